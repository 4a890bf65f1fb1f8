"""Three-dimensional box [0, beta] x [0, 1]^2: certified small-volume analysis.

The box reduces to a model slab over the flat two-torus profile
I(v) = min(sqrt(pi v), 1, sqrt(pi (1 - v))). Two-sided generalized unduloids
with v0 < 4 pi / 81 < 1 / pi < v1 are excluded by showing that a certain
weighted-volume functional Q(v0, v1) is positive. Q is bounded below by a sum
of three closed-form pieces P = p1 + p2 + p3; the minimum of P over a mesh
whose resolution is controlled through the monotone reparametrisations
l0 / l1 gives a rigorous lower bound for P on the whole rectangle.

One-sided unduloids (v0 = 0) are handled by the volume function
``one_sided_volume`` and its minimum ``solve_vmin``. ``q3_ranges`` assembles the
volume ranges on which the conjectured minimizers are known to be optimal.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BranchBoundaryError, CertificationError, DivergenceError, DomainError
from .special_fn import Tolerances, ellip_e, ellip_f, find_root, integrate_endpoint_singular

PI = math.pi
SPHERE_END = 4.0 * PI / 81.0  # sphere / cylinder crossing of the torus profile at beta = 1
CYL_END = 1.0 / PI
PLANE_END = 1.0 - 1.0 / PI
DEFAULT_EPS = 3e-4
MIN_WEIGHTED_CURVATURE = 0.8
P4_RADIUS = 1.0 / 0.8
P1_BOUND = -0.046

# p1 at v0 = 0: the chord runs from the origin to (1/pi, 1), the integrand
# reduces to (v - a) / sqrt(1 - pi v) and integrates in closed form.
_U_END = 1.0 - PI * SPHERE_END
P1_AT_ZERO = (2.0 / PI) * (
    (1.0 / PI - SPHERE_END) * (1.0 - math.sqrt(_U_END))
    - (1.0 / (3.0 * PI)) * (1.0 - _U_END ** 1.5)
)

_QUAD_TOL = Tolerances(abs_tol=1e-13, rel_tol=1e-12, max_iter=12)


# ---------------------------------------------------------------------------
# result containers


@dataclass(frozen=True)
class Mesh1D:
    points: np.ndarray
    eps: float
    kind: str  # "adaptive_v0" or "closed_form_v1"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0 or np.any(np.diff(pts) <= 0):
            raise DomainError("mesh points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    def max_increment(self) -> float:
        """Largest jump of the controlling reparametrisation between neighbours."""
        lift = l0 if self.kind == "adaptive_v0" else l1
        values = np.array([lift(float(v)) for v in self.points])
        return float(np.max(np.diff(values))) if values.size > 1 else 0.0


@dataclass(frozen=True)
class CertifiedMinimum:
    mesh_min: float
    argmin: tuple
    continuum_lower_bound: float
    eps: float
    evaluations: int

    def __post_init__(self):
        if self.continuum_lower_bound > self.mesh_min:
            raise DomainError("lower bound cannot exceed the mesh minimum")


@dataclass(frozen=True)
class VerifiedRanges:
    beta: float
    sphere: tuple | None
    cylinder: tuple | None
    plane: tuple | None
    uncertainty: tuple
    lambda_floor: float
    v_min: float = field(default=0.0)

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "sphere": list(self.sphere) if self.sphere else None,
            "cylinder": list(self.cylinder) if self.cylinder else None,
            "plane": list(self.plane) if self.plane else None,
            "uncertainty": list(self.uncertainty),
            "lambda_floor": self.lambda_floor,
            "v_min": self.v_min,
        }


# ---------------------------------------------------------------------------
# the torus profile and its chords


def torus_profile(v):
    v = np.asarray(v, dtype=float)
    return np.minimum(np.minimum(np.sqrt(PI * v), 1.0), np.sqrt(PI * np.maximum(1.0 - v, 0.0)))


def _zone(v):
    return np.where(v <= CYL_END, 0, np.where(v <= PLANE_END, 1, 2))


def _rise(w: float, d):
    """I(w + d) - I(w), rationalised when both points share a branch."""
    d = np.asarray(d, dtype=float)
    v = w + d
    direct = torus_profile(v) - float(torus_profile(w))
    zw = int(_zone(np.array(w)))
    same = _zone(v) == zw
    with np.errstate(all="ignore"):
        if zw == 0:
            exact = PI * d / (np.sqrt(PI * np.maximum(v, 0.0)) + math.sqrt(PI * w))
        elif zw == 1:
            exact = np.zeros_like(d)
        else:
            exact = -PI * d / (np.sqrt(PI * np.maximum(1.0 - v, 0.0)) + math.sqrt(PI * (1.0 - w)))
    return np.where(same, exact, direct)


class _TorusChord:
    """Secant of the torus profile through the graph points above w0 < w1."""

    def __init__(self, w0: float, w1: float):
        if not 0.0 <= w0 < w1 <= 1.0:
            raise DomainError("chord needs 0 <= w0 < w1 <= 1")
        self.w0, self.w1 = float(w0), float(w1)
        i0, i1 = float(torus_profile(w0)), float(torus_profile(w1))
        self.slope = (i1 - i0) / (w1 - w0)
        self.i0, self.i1 = i0, i1

    def value(self, v):
        return self.i0 + self.slope * (np.asarray(v, dtype=float) - self.w0)

    def gap(self, v, d0, d1):
        """I(v) - chord(v), measured from whichever anchor is nearer."""
        from_left = _rise(self.w0, d0) - self.slope * d0
        from_right = _rise(self.w1, -d1) + self.slope * d1
        return np.where(d0 <= d1, from_left, from_right)

    def integral(self, lo: float, hi: float, weight_shift: float = SPHERE_END) -> float:
        """Integral of (v - shift) / (I sqrt((I / chord)^2 - 1)) over [lo, hi]."""
        if not self.w0 <= lo < hi <= self.w1:
            raise DomainError("integration range must lie under the chord")
        left, right = lo - self.w0, self.w1 - hi

        def integrand(x, da, db):
            d0 = left + da
            d1 = right + db
            gap = self.gap(x, d0, d1)
            prof = torus_profile(x)
            ell = self.value(x)
            if np.any(gap <= 0):
                raise DivergenceError("chord touches the profile inside the range")
            return (x - weight_shift) * ell / (prof * np.sqrt(gap * (2.0 * prof - gap)))

        return integrate_endpoint_singular(integrand, lo, hi, _QUAD_TOL, offsets=True).value


def _check_v0(v0, allow_zero=True):
    arr = np.asarray(v0, dtype=float)
    lo_ok = arr >= 0 if allow_zero else arr > 0
    if np.any(~lo_ok) or np.any(arr > SPHERE_END):
        raise DomainError("v0 must lie in (0, 4 pi / 81]")
    return arr


def _check_v1(v1):
    arr = np.asarray(v1, dtype=float)
    if np.any(arr < CYL_END) or np.any(arr > PLANE_END):
        raise DomainError("v1 must lie in [1 / pi, 1 - 1 / pi]")
    return arr


def _out(arr, *refs):
    return float(arr) if all(np.ndim(r) == 0 for r in refs) else arr


# ---------------------------------------------------------------------------
# closed-form lower pieces


def p1(v0):
    """Closed form of the sphere-range piece of the lower bound, for v0 in [0, 4 pi / 81].

    Uses incomplete elliptic integrals with parameter m = 1 - pi v0. At v0 = 0
    the exact limiting value ``P1_AT_ZERO`` is returned.
    """
    v = _check_v0(v0)
    a = SPHERE_END
    pos = v > 0
    vs = np.where(pos, v, 0.5 * a)
    m = 1.0 - PI * vs
    x = np.minimum(math.sqrt(1.0 / PI - a) / np.sqrt(1.0 / PI - vs), 1.0)
    root = np.sqrt(PI * vs)
    k_minus_f = ellip_f(np.ones_like(m), m) - ellip_f(x, m)
    e_minus_e = ellip_e(np.ones_like(m), m) - ellip_e(x, m)
    val = (
        -(4.0 / 27.0) * math.sqrt(1.0 / PI - a) * np.sqrt(np.maximum(a - vs, 0.0))
        - 2.0 * (vs / (3.0 * PI) + 4.0 * root / 81.0) * k_minus_f
        + (2.0 / PI)
        * (2.0 * (root + 1.0) ** 2 / (3.0 * PI) - np.sqrt(vs) / (3.0 * math.sqrt(PI)) - a)
        * e_minus_e
    )
    val = np.where(v >= a, 0.0, np.where(pos, val, P1_AT_ZERO))
    return _out(val, v0)


def p2(v1):
    """Closed form of the cylinder-range piece (depends on v1 only); strictly decreasing."""
    v = _check_v1(v1)
    val = (2.0 / 81.0) * (
        (54.0 * v**2 - 8.0 / 3.0) * np.sqrt(PI**2 * v**2 - 4.0 * PI**2 / 81.0)
        - (54.0 * v**2 - 4.0 + 27.0 / PI**2) * np.sqrt(np.maximum(PI**2 * v**2 - 1.0, 0.0))
    )
    return _out(val, v1)


def p3(v0, v1):
    """Closed form of the plane-range piece; non-negative and non-decreasing in both."""
    a0 = _check_v0(v0)
    b1 = _check_v1(v1)
    root = np.sqrt(PI * a0)
    z = (root * b1 - a0) / (1.0 - root)
    span = 2.0 * z + b1 + 1.0 / PI
    rise = np.maximum(b1 - 1.0 / PI, 0.0)
    val = (z + b1) ** 2 * np.arctan(np.sqrt(rise) / np.sqrt(span)) + 0.5 * (
        1.0 / PI - 8.0 * PI / 81.0 - z
    ) * np.sqrt(rise * span)
    return _out(val, v0, v1)


def p_total(v0, v1):
    return _out(np.asarray(p1(v0)) + np.asarray(p2(v1)) + np.asarray(p3(v0, v1)), v0, v1)


def p4() -> float:
    """Lower bound for the plane-range contribution when v1 > 1 - 1/pi (with lambda >= 0.8)."""
    c = P4_RADIUS
    a = SPHERE_END

    def antiderivative(v):
        root = math.sqrt(c * c - v * v)
        return (a - v / 2.0) * root + (c * c / 2.0) * math.atan(v / root)

    return antiderivative(PLANE_END) - antiderivative(CYL_END)


# quadrature of the integral definitions, used as an independent route


def p1_quad(v0: float) -> float:
    _check_v0(v0, allow_zero=False)
    if v0 >= SPHERE_END:
        return 0.0
    return _TorusChord(v0, CYL_END).integral(v0, SPHERE_END)


def p2_quad(v1: float) -> float:
    _check_v1(v1)
    return _TorusChord(0.0, v1).integral(SPHERE_END, CYL_END)


def p3_quad(v0: float, v1: float) -> float:
    _check_v0(v0, allow_zero=False)
    _check_v1(v1)
    if v1 == CYL_END:
        return 0.0
    return _TorusChord(v0, v1).integral(CYL_END, v1)


def q_direct(v0: float, v1: float) -> float:
    """Weighted-volume functional of the chord from v0 to v1, by singular quadrature.

    The range is split at 4 pi / 81, 1 / pi and 1 - 1 / pi where the integrand
    changes analytic form.
    """
    if not (0 < v0 < SPHERE_END < CYL_END < v1 < 1):
        raise DomainError("q_direct needs 0 < v0 < 4 pi / 81 < 1 / pi < v1 < 1")
    chord_ = _TorusChord(v0, v1)
    cuts = [v0] + [c for c in (SPHERE_END, CYL_END, PLANE_END) if v0 < c < v1] + [v1]
    return float(sum(chord_.integral(lo, hi) for lo, hi in zip(cuts, cuts[1:])))


# ---------------------------------------------------------------------------
# mesh control


def d0(v0: float) -> float:
    if not 0 < v0 <= SPHERE_END:
        raise DomainError("d0 needs 0 < v0 <= 4 pi / 81")
    return math.log(4.0 * PI / (9.0 * math.sqrt(PI * v0))) / (7.0 * math.sqrt(v0))


def l0(v0: float) -> float:
    if not 0 <= v0 <= SPHERE_END:
        raise DomainError("l0 needs 0 <= v0 <= 4 pi / 81")
    if v0 == 0:
        return 0.0
    return math.sqrt(v0) / 7.0 * math.log(16.0 * math.e**2 * PI / (81.0 * v0))


def d1(v1: float) -> float:
    if not CYL_END < v1 <= PLANE_END:
        raise DomainError("d1 needs 1/pi < v1 <= 1 - 1/pi")
    return 1.0 / (3.0 * math.sqrt(2.0 * PI) * math.sqrt(v1 - CYL_END))


def l1(v1: float) -> float:
    if not CYL_END <= v1 <= PLANE_END:
        raise DomainError("l1 needs 1/pi <= v1 <= 1 - 1/pi")
    return math.sqrt(2.0) / (3.0 * math.sqrt(PI)) * math.sqrt(v1 - CYL_END)


def build_mesh_v0(eps: float = DEFAULT_EPS) -> Mesh1D:
    """Adaptive mesh on [0, 4 pi / 81] with l0-increments at most eps.

    Steps are 0.99 eps / d0(v), which suffices because d0 is decreasing.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    pts = [0.0, 1e-8]
    while True:
        nxt = pts[-1] + 0.99 * eps / d0(pts[-1])
        if nxt > SPHERE_END:
            break
        pts.append(nxt)
    return Mesh1D(np.array(pts), eps, "adaptive_v0")


def build_mesh_v1(eps: float = DEFAULT_EPS) -> Mesh1D:
    """Mesh on [1/pi, 1 - 1/pi] equally spaced in l1, via the explicit inverse of l1."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    count = math.ceil(l1(PLANE_END) / eps)
    steps = np.arange(count) * eps
    return Mesh1D(CYL_END + (9.0 * PI / 2.0) * steps**2, eps, "closed_form_v1")


def _thread_count(threads: int | None) -> int:
    env = os.environ.get("SLABISO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, threads or os.cpu_count() or 1)


def certify_min_P(eps: float = DEFAULT_EPS, threads: int | None = None) -> CertifiedMinimum:
    """Minimum of P over the product mesh, and the resulting bound over the rectangle.

    Rows are evaluated in parallel; the reduction keeps the smallest value and
    breaks exact ties by the lexicographically smallest (v0, v1), so the result
    does not depend on the thread count.

    Raises:
        CertificationError: the continuum lower bound mesh_min - 2 eps is not positive.
    """
    rows = build_mesh_v0(eps).points
    cols = build_mesh_v1(eps).points
    p2_cols = p2(cols)
    n_workers = _thread_count(threads)
    chunks = np.array_split(np.arange(rows.size), min(n_workers * 4, rows.size))

    def best_in(idx):
        block = p1(rows[idx])[:, None] + p2_cols[None, :] + p3(rows[idx][:, None], cols[None, :])
        k = int(np.argmin(block))  # first occurrence = lexicographically smallest
        i, j = divmod(k, cols.size)
        return float(block[i, j]), int(idx[i]), j

    if n_workers == 1:
        results = [best_in(idx) for idx in chunks if idx.size]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(best_in, [idx for idx in chunks if idx.size]))
    value, i, j = min(results)
    cert = CertifiedMinimum(
        mesh_min=value,
        argmin=(float(rows[i]), float(cols[j])),
        continuum_lower_bound=value - 2.0 * eps,
        eps=eps,
        evaluations=rows.size * cols.size,
    )
    if not cert.continuum_lower_bound > 0:
        raise CertificationError(
            f"lower bound {cert.continuum_lower_bound:.3e} for P is not positive"
        )
    return cert


def certify_min_P1(eps: float = DEFAULT_EPS) -> CertifiedMinimum:
    """Minimum of p1 over the v0 mesh; the bound p1 >= mesh_min - eps must beat -p4.

    Raises:
        CertificationError: the bound is below -0.046 or does not dominate -p4().
    """
    rows = build_mesh_v0(eps).points
    vals = p1(rows)
    k = int(np.argmin(vals))
    value = float(vals[k])
    cert = CertifiedMinimum(
        mesh_min=value,
        argmin=(float(rows[k]),),
        continuum_lower_bound=value - eps,
        eps=eps,
        evaluations=rows.size,
    )
    if not (cert.continuum_lower_bound >= P1_BOUND and cert.continuum_lower_bound + p4() > 0):
        raise CertificationError(
            f"p1 lower bound {cert.continuum_lower_bound:.6f} does not dominate -p4"
        )
    return cert


def free_min_P(start: tuple | None = None, tol: float = 1e-13, max_sweeps: int = 200):
    """Unconstrained minimum of P by coordinate descent with bounded Brent line searches.

    Starts from the mesh argmin at eps = 3e-4 unless ``start`` is given.
    Returns (value, v0, v1).
    """
    if start is None:
        start = certify_min_P(DEFAULT_EPS, threads=1).argmin
    v0, v1 = map(float, start)
    value = p_total(v0, v1)
    opts = {"xatol": 1e-14, "maxiter": 500}
    for _ in range(max_sweeps):
        previous = value
        res = minimize_scalar(lambda x: p_total(x, v1), bounds=(1e-12, SPHERE_END),
                              method="bounded", options=opts)
        if res.fun < value:
            v0, value = float(res.x), float(res.fun)
        res = minimize_scalar(lambda y: p_total(v0, y), bounds=(CYL_END, PLANE_END),
                              method="bounded", options=opts)
        if res.fun < value:
            v1, value = float(res.x), float(res.fun)
        if previous - value <= tol * max(1.0, abs(value)):
            break
    return value, v0, v1


def verify_appendix(eps: float = DEFAULT_EPS, threads: int | None = None,
                    timing: bool = False) -> dict:
    """Run both certificates and collect the report (no exception on failure)."""
    started = time.perf_counter()
    verdict = "VERIFIED"
    try:
        cert_p = certify_min_P(eps, threads)
    except CertificationError:
        verdict = "FAILED"
        cert_p = _uncertified_P(eps)
    try:
        cert_p1 = certify_min_P1(eps)
    except CertificationError:
        verdict = "FAILED"
        rows = build_mesh_v0(eps).points
        vals = p1(rows)
        k = int(np.argmin(vals))
        cert_p1 = CertifiedMinimum(float(vals[k]), (float(rows[k]),), float(vals[k]) - eps,
                                   eps, rows.size)
    elapsed = time.perf_counter() - started
    return {
        "eps": eps,
        "N0": len(build_mesh_v0(eps)),
        "N1": len(build_mesh_v1(eps)),
        "mesh_min_P": cert_p.mesh_min,
        "argmin": list(cert_p.argmin),
        "lower_bound_P": cert_p.continuum_lower_bound,
        "mesh_min_P1": cert_p1.mesh_min,
        "argmin_P1": cert_p1.argmin[0],
        "lower_bound_P1": cert_p1.continuum_lower_bound,
        "p4": p4(),
        "verdict": verdict,
        "wall_time_s": elapsed if timing else None,
        "evaluations": cert_p.evaluations + cert_p1.evaluations,
    }


def _uncertified_P(eps: float) -> CertifiedMinimum:
    rows = build_mesh_v0(eps).points
    cols = build_mesh_v1(eps).points
    grid = p_total(rows[:, None], cols[None, :])
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    value = float(grid[i, j])
    return CertifiedMinimum(value, (float(rows[i]), float(cols[j])), value - 2 * eps, eps,
                            grid.size)


# ---------------------------------------------------------------------------
# one-sided unduloids


def arcsec(x):
    """Inverse secant on x >= 1, as arccos(1/x)."""
    x = np.asarray(x, dtype=float)
    return np.arccos(1.0 / x)


def _f2(xi):
    s = np.sqrt(np.maximum(PI**2 * xi**2 - 1.0, 0.0))
    return (4.0 / 3.0) * PI * xi**3 - ((4.0 / 3.0) * xi**2 + 1.0 / (6.0 * PI**2)) * s + (
        xi**2 / 2.0
    ) * arcsec(PI * xi)


def one_sided_volume(xi):
    """Weighted volume (times beta) lower bound of the one-sided unduloid with 1/lambda = xi.

    Exact for xi <= 1 - 1/pi: the corner-sphere value (4 pi / 3) xi^3 up to
    1/pi, then the plane-touching branch. Past 1 - 1/pi an extra term accounts
    for the reflected cylinder branch and the result is only a lower bound.
    """
    x = np.asarray(xi, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("xi must be positive")
    first = (4.0 * PI / 3.0) * x**3
    xc = np.maximum(x, CYL_END)
    second = _f2(xc)
    shifted = 1.0 / PI + np.maximum(x, PLANE_END)
    third = second - (xc**2 / 2.0) * (
        np.sqrt(np.maximum(shifted**2 - 1.0, 0.0)) / shifted**2 + arcsec(shifted)
    )
    out = np.where(x <= CYL_END, first, np.where(x <= PLANE_END, second, third))
    return _out(out, xi)


def one_sided_volume_quad(xi: float) -> float:
    """Direct quadrature of the one-sided volume integral with the chord v -> v / xi.

    Only valid for xi <= 1 - 1/pi, where the touching point is v1 = min(pi xi^2, xi).
    """
    if not 0 < xi <= PLANE_END:
        raise DomainError("quadrature route covers 0 < xi <= 1 - 1/pi")
    top = PI * xi * xi if xi <= CYL_END else xi
    chord_ = _TorusChord(0.0, top)
    cuts = [0.0, top] if top <= CYL_END else [0.0, CYL_END, top]
    return float(sum(chord_.integral(lo, hi, weight_shift=0.0) for lo, hi in zip(cuts, cuts[1:])))


def convexity_remainder(x):
    """R(x) with F2''(xi) - arcsec(pi xi) = 8 R(pi xi), x = pi xi > 1.

    R(x) = x - (8x^4 - 13x^2 + 4) / (8 (x^2 - 1)^(3/2)), positive for x > 1,
    which makes F2 strictly convex.
    """
    x = np.asarray(x, dtype=float)
    out = x - (8.0 * x**4 - 13.0 * x**2 + 4.0) / (8.0 * (x * x - 1.0) ** 1.5)
    return _out(out, x)


def f2_second_derivative(xi):
    """Closed-form F2''(xi) on (1/pi, 1 - 1/pi], via the remainder R."""
    x = PI * np.asarray(xi, dtype=float)
    return _out(arcsec(x) + 8.0 * np.asarray(convexity_remainder(x)), xi)


def _stationary_equation(x: float) -> float:
    return 4.0 * x + float(arcsec(x)) - (4.0 * x * x - 3.0) / math.sqrt(x * x - 1.0)


def solve_vmin() -> tuple:
    """(x0, xi0, v_min): the critical point of the plane-touching branch and its volume."""
    x0 = find_root(_stationary_equation, 1.001, 1.2, Tolerances(abs_tol=1e-15, rel_tol=1e-15))
    xi0 = x0 / PI
    return x0, xi0, float(_f2(xi0))


def lambda_floor() -> float:
    """Lower bound for the weighted mean curvature of a two-sided unduloid in range."""
    return (1.0 - 2.0 * PI / 9.0) / (0.5 - SPHERE_END)


def sphere_threshold_beta() -> float:
    """Largest beta for which the full conjectured sphere range is verified."""
    return (81.0 * solve_vmin()[2] / (4.0 * PI)) ** (1.0 / 3.0)


def plane_threshold_beta() -> float:
    return 2.0 - 4.0 / PI


def _interval(lo: float, hi: float, closed_lo: bool = True):
    if hi < lo or (not closed_lo and hi <= lo):
        return None
    return (lo, hi)


def q3_ranges(beta: float) -> VerifiedRanges:
    """Volume ranges on which corner spheres, edge cylinders and slabs are minimizing."""
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    v_min = solve_vmin()[2]
    sphere_cap = SPHERE_END * beta**2
    sphere = _interval(0.0, min(sphere_cap, v_min / beta), closed_lo=False)
    cyl_hi = max(CYL_END - beta / 4.0, min(SPHERE_END, v_min / beta))
    cylinder = _interval(sphere_cap, min(cyl_hi, 0.5))
    plane = _interval(CYL_END + beta / 4.0, 0.5)
    return VerifiedRanges(
        beta=beta,
        sphere=sphere,
        cylinder=cylinder,
        plane=plane,
        uncertainty=(CYL_END - beta / 4.0, CYL_END + beta / 4.0),
        lambda_floor=lambda_floor(),
        v_min=v_min,
    )


def ode_barriers(beta: float) -> tuple:
    """(v_p_max, v_c_plus_min, barrier) for the comparison argument near 1/pi.

    The barrier is the profile-type ODE solution sqrt(1 - (pi/beta)(v - v_p_max)^2),
    which touches sqrt(pi v) exactly at 1/pi - beta/4.
    """
    if not beta > 0:
        raise DomainError("beta must be positive")
    v_p_max = CYL_END + beta / 4.0
    v_c_plus_min = CYL_END - beta / 4.0

    def barrier(v):
        v = np.asarray(v, dtype=float)
        return _out(np.sqrt(np.maximum(1.0 - (PI / beta) * (v - v_p_max) ** 2, 0.0)), v)

    return v_p_max, v_c_plus_min, barrier


def _branch_derivatives(beta: float, v: float):
    """(I, I', I'', chi) of the conjectured profile on the branch containing v."""
    w, sign = (v, 1.0) if v <= 0.5 else (1.0 - v, -1.0)
    sphere_end = SPHERE_END * beta**2
    edges = (sphere_end, CYL_END, 1.0 - CYL_END, 1.0 - sphere_end)
    if any(abs(v - e) < 1e-12 for e in edges) or not 0 < v < 1:
        raise BranchBoundaryError(f"v = {v} is on a branch boundary of the profile")
    if w < sphere_end:
        c = (9.0 * PI / (2.0 * beta)) ** (1.0 / 3.0)
        val = c * w ** (2.0 / 3.0)
        return val, sign * (2.0 / 3.0) * c * w ** (-1.0 / 3.0), -(2.0 / 9.0) * c * w ** (-4.0 / 3.0), 2
    if w < CYL_END:
        val = math.sqrt(PI * w)
        return val, sign * 0.5 * math.sqrt(PI / w), -0.25 * math.sqrt(PI) * w**-1.5, 0
    return 1.0, 0.0, 0.0, 0


def odi_residual(beta: float, v: float) -> float:
    """I^2 I'' + I I'^2 - (pi / (2 beta)) chi on the branch of the conjectured profile at v.

    Raises:
        BranchBoundaryError: v sits on a kink of the profile.
    """
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    val, slope, curv, chi = _branch_derivatives(beta, v)
    return val * val * curv + val * slope * slope - (PI / (2.0 * beta)) * chi


def conjectured_kinks(beta: float) -> tuple:
    sphere_end = SPHERE_END * beta**2
    return (0.0, sphere_end, CYL_END, 1.0 - CYL_END, 1.0 - sphere_end, 1.0)

