"""Generalized unduloids on the two-dimensional model slab.

The model slab is [0, T] x supp(phi) carrying the density phi(s)/T, where
phi is the model density of a base profile I. Its stationary boundaries are
monotone graphs s = f(t) of constant weighted curvature; each one is fixed by
the chord of I between the volume levels v0 < v1 it sweeps. This module
evaluates the half-period, volume and area integrals of those curves, samples
their shapes, and offers a brute-force discretisation of the one-dimensional
relaxed problem as an independent check on profile values.

Integrals are computed in the height coordinate s whenever the profile has a
closed-form density (this keeps Gaussian tails resolvable) and in the volume
coordinate v otherwise. In either case the substitution
x = x0 + (x1 - x0) sin^2(theta) removes the square-root endpoint behaviour and
Gauss-Legendre rules are applied on each smooth piece.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, isotonic_regression, minimize

from .errors import DegenerateChordError, DivergenceError, DomainError, ZonalLineError
from .profile import BaseProfile, GaussianProfile, ModelDensity, TorusProfile

# Pairs closer than this are treated as a horizontal line.
NEAR_DEGENERATE = 1e-8
_QUAD_START = 48
_QUAD_MAX = 3072
_QUAD_RTOL = 1e-13


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@dataclass(frozen=True)
class Chord:
    """Secant line l(v) = lam * v + c of a profile between v0 and v1."""

    v0: float
    v1: float
    lam: float
    c: float
    degenerate: bool = False

    def eval(self, v):
        return self.lam * np.asarray(v, dtype=float) + self.c

    def __call__(self, v):
        return self.eval(v)


@dataclass
class UnduloidShape:
    """Sampled monotone branch: columns t (increasing), s (height), v (volume level)."""

    t: np.ndarray
    s: np.ndarray
    v: np.ndarray
    chord: Chord
    half_period: float
    kind: str

    @property
    def samples(self) -> np.ndarray:
        return np.column_stack([self.t, self.s, self.v])


# --------------------------------------------------------------------------
# coordinates


class _HeightCoords:
    """Integration in the height variable s, with v = Phi(s) and I(v) = phi(s)."""

    def __init__(self, density: ModelDensity):
        self.d = density
        self.kinks = tuple(density.sing_points)

    def height(self, x):
        return np.asarray(self.d.density(x), dtype=float)

    def mass(self, x):
        return np.asarray(self.d.cdf(x), dtype=float)

    def height_diff(self, x, a, delta=None):
        return np.asarray(self.d.density_diff(x, a, delta), dtype=float)

    def mass_diff(self, x, a, delta=None):
        return np.asarray(self.d.cdf_diff(x, a, delta), dtype=float)

    def dmass(self, x, h):
        return h

    def jac_t(self, x, h):
        return np.ones_like(h)

    def heights_of(self, x):
        return np.asarray(x, dtype=float)


class _VolumeCoords:
    """Integration directly in the volume variable v."""

    def __init__(self, p: BaseProfile):
        self.p = p
        self.kinks = tuple(p.singular_set)

    def height(self, x):
        return np.asarray(self.p.eval(np.clip(x, 0.0, 1.0)), dtype=float)

    def mass(self, x):
        return np.asarray(x, dtype=float)

    def height_diff(self, x, a, delta=None):
        return np.asarray(self.p.diff(np.clip(x, 0.0, 1.0), np.clip(a, 0.0, 1.0), delta),
                          dtype=float)

    def mass_diff(self, x, a, delta=None):
        return np.asarray(x, dtype=float) - a if delta is None else np.asarray(delta, dtype=float)

    def dmass(self, x, h):
        return np.ones_like(h)

    def jac_t(self, x, h):
        return 1.0 / h

    def heights_of(self, x):
        return np.asarray(self.p.density.quantile(np.clip(x, 0.0, 1.0)), dtype=float)


def _coords_for(p: BaseProfile):
    if isinstance(p, (TorusProfile, GaussianProfile)):
        return _HeightCoords(p.density)
    return _VolumeCoords(p)


class ChordSegment:
    """Chord integrals between two coordinates x0 < x1 of a profile's graph.

    For a weight w the quantity computed is int w / sqrt(gap (h + l)) dx where
    h is the profile height, l the chord and gap = h - l >= 0. The gap is
    evaluated from whichever endpoint gives the smaller cancellation error.
    """

    def __init__(self, coords, x0: float, x1: float, lam: float):
        if not x0 < x1:
            raise DomainError("segment needs x0 < x1")
        self.coords = coords
        self.x0 = float(x0)
        self.x1 = float(x1)
        self.length = self.x1 - self.x0
        self.lam = float(lam)
        cuts = [k for k in coords.kinks if self.x0 < k < self.x1]
        edges = np.array([self.x0, *cuts, self.x1])
        frac = np.clip((edges - self.x0) / self.length, 0.0, 1.0)
        self.theta_edges = np.arcsin(np.sqrt(frac))
        self.theta_edges[-1] = math.pi / 2

    def gap(self, x, d0=None, d1=None):
        """Profile height minus chord at x, returned as (gap, chord, height).

        ``d0 = x - x0`` and ``d1 = x1 - x`` may be passed when known exactly.
        """
        c = self.coords
        h = c.height(x)
        dh0 = c.height_diff(x, self.x0, d0)
        dm0 = c.mass_diff(x, self.x0, d0)
        dh1 = c.height_diff(x, self.x1, None if d1 is None else -d1)
        dm1 = c.mass_diff(x, self.x1, None if d1 is None else -d1)
        g0 = dh0 - self.lam * dm0
        g1 = dh1 - self.lam * dm1
        use0 = np.abs(dh0) + np.abs(self.lam * dm0) <= np.abs(dh1) + np.abs(self.lam * dm1)
        g = np.where(use0, g0, g1)
        return g, h - g, h

    def nodes(self, n: int, theta_edges=None):
        """Gauss-Legendre nodes over the theta pieces.

        Returns (x, dx-weights, x - x0, x1 - x) with the two distances taken
        from the sin^2 map rather than from the rounded x.
        """
        te = self.theta_edges if theta_edges is None else theta_edges
        gx, gw = _gauss_legendre(n)
        lo, hi = te[:-1, None], te[1:, None]
        theta = (lo + hi) / 2 + (hi - lo) / 2 * gx
        wt = (hi - lo) / 2 * gw
        theta, wt = theta.ravel(), wt.ravel()
        st, ct = np.sin(theta), np.cos(theta)
        d0 = self.length * st * st
        d1 = self.length * ct * ct
        x = np.where(theta > math.pi / 4, self.x1 - d1, self.x0 + d0)
        return x, wt * 2.0 * self.length * st * ct, d0, d1

    def _terms(self, x, dx, d0=None, d1=None):
        g, ell, h = self.gap(x, d0, d1)
        with np.errstate(invalid="ignore", divide="ignore"):
            root = np.sqrt(np.maximum(g, 0.0) * (h + ell))
            base = dx / root
        base = np.where(root > 0, base, 0.0)
        c = self.coords
        jt = c.jac_t(x, h)
        t_term = ell * jt * base
        return {
            "T": t_term,
            "V": c.mass(x) * t_term,
            "A": h * c.dmass(x, h) * base,
            "ell_jt_base": t_term,
            "x": x,
        }

    def integrals(self, keys=("T", "V", "A"), extra=None, rtol: float = _QUAD_RTOL):
        """Integrals of the standard weights (and ``extra(x, mass) * T-weight``).

        Returns a dict keyed by the requested names; 'X' holds the extra one.
        """
        n = _QUAD_START
        prev = None
        while True:
            x, dx, d0, d1 = self.nodes(n)
            terms = self._terms(x, dx, d0, d1)
            vals = {k: float(np.sum(terms[k])) for k in keys}
            if extra is not None:
                vals["X"] = float(np.sum(extra(x, self.coords.mass(x)) * terms["ell_jt_base"]))
            if prev is not None:
                change = max(abs(vals[k] - prev[k]) / max(abs(vals[k]), 1e-300) for k in vals)
                if change <= rtol or n >= _QUAD_MAX:
                    return vals
            prev = vals
            n *= 2

    def cumulative_t(self, xs: np.ndarray, per_piece: int = 12) -> np.ndarray:
        """tau(x_k) = int_{x_k}^{x1} of the half-period weight, for sorted xs."""
        xs = np.asarray(xs, dtype=float)
        frac = np.clip((xs - self.x0) / self.length, 0.0, 1.0)
        th = np.arcsin(np.sqrt(frac))
        th[0], th[-1] = 0.0, math.pi / 2
        inner = np.unique(np.concatenate([th, self.theta_edges]))
        x, dx, d0, d1 = self.nodes(per_piece, inner)
        t_term = self._terms(x, dx, d0, d1)["T"].reshape(len(inner) - 1, per_piece).sum(axis=1)
        cum = np.concatenate([[0.0], np.cumsum(t_term)])
        at = np.searchsorted(inner, th)
        total = cum[-1]
        return total - cum[at]

    def touches_interior(self, n: int = 67) -> bool:
        """Whether the chord meets the graph strictly between its ends.

        By concavity this happens only along a flat stretch, where the gap is
        zero up to rounding of its own terms.
        """
        theta = np.linspace(0.0, math.pi / 2, n)[1:-1]
        d0 = self.length * np.sin(theta) ** 2
        d1 = self.length * np.cos(theta) ** 2
        x = np.where(theta > math.pi / 4, self.x1 - d1, self.x0 + d0)
        c = self.coords
        near0 = d0 <= d1
        rise = np.where(near0, c.height_diff(x, self.x0, d0), c.height_diff(x, self.x1, -d1))
        run = self.lam * np.where(near0, c.mass_diff(x, self.x0, d0), c.mass_diff(x, self.x1, -d1))
        return bool(np.any(rise - run <= 1e-12 * (np.abs(rise) + np.abs(run))))

    def _edge_gap(self, end, sign, step):
        x = np.array([end + sign * step])
        if sign > 0:
            return self.gap(x, np.array([step]), np.array([self.length - step]))[0][0]
        return self.gap(x, np.array([self.length - step]), np.array([step]))[0][0]

    def check_transversal(self):
        """Raise DivergenceError if the chord leaves the graph tangentially."""
        for end, sign in ((self.x0, 1.0), (self.x1, -1.0)):
            step = 1e-6 * self.length
            g1, g2 = (self._edge_gap(end, sign, k * step) for k in (1, 2))
            if g1 <= 0 or g2 / g1 > 3.0:
                raise DivergenceError("chord is tangent to the profile at an endpoint; "
                                      "the half-period diverges logarithmically")


# --------------------------------------------------------------------------
# chords and the integrals


def _check_pair(v0: float, v1: float):
    if not (0.0 <= v0 < v1 <= 1.0):
        raise DomainError("need 0 <= v0 < v1 <= 1")
    if v0 == 0.0 and v1 == 1.0:
        raise DomainError("a chord cannot join v = 0 to v = 1")


def chord(p: BaseProfile, v0: float, v1: float) -> Chord:
    """Chord of ``p`` between v0 and v1.

    The returned chord is flagged ``degenerate`` when it meets the profile
    strictly inside (v0, v1), as happens on a flat zone. Operations that
    integrate along the chord refuse degenerate chords.
    """
    v0, v1 = float(v0), float(v1)
    _check_pair(v0, v1)
    i0, i1 = float(p.eval(v0)), float(p.eval(v1))
    lam = (i1 - i0) / (v1 - v0)
    c = (v1 * i0 - v0 * i1) / (v1 - v0)
    ch = Chord(v0, v1, lam, c)
    return replace(ch, degenerate=_segment_between(p, v0, v1, ch).touches_interior())


def _segment_between(p: BaseProfile, v0: float, v1: float, ch: Chord) -> ChordSegment:
    coords = _coords_for(p)
    if isinstance(coords, _HeightCoords):
        r = coords.d.support_radius
        x0 = -r if v0 == 0.0 else float(coords.d.quantile(v0))
        x1 = r if v1 == 1.0 else float(coords.d.quantile(v1))
        if not (math.isfinite(x0) and math.isfinite(x1)):
            # unbounded support: the height variable cannot reach the end
            return ChordSegment(_VolumeCoords(p), v0, v1, ch.lam)
        # slope taken through the rounded heights so the gap vanishes at both ends
        lam = float(coords.height_diff(x1, x0) / coords.mass_diff(x1, x0))
    else:
        x0, x1 = v0, v1
        lam = ch.lam
    return ChordSegment(coords, x0, x1, lam)


def _segment(p: BaseProfile, v0: float, v1: float, ch: Chord | None = None) -> ChordSegment:
    ch = ch or chord(p, v0, v1)
    if ch.degenerate:
        raise DegenerateChordError(f"chord ({v0}, {v1}) touches the profile in its interior")
    if (v0 == 0.0 or v1 == 1.0) and not p.tail_integrable:
        raise DivergenceError(
            "v / I(v)^2 is not integrable at the boundary: no one-sided unduloid exists"
        )
    seg = _segment_between(p, v0, v1, ch)
    seg.check_transversal()
    return seg


def _linearised_half_period(p: BaseProfile, v: float) -> float:
    curvature = -float(p.eval(v)) * float(p.deriv2(v))
    if not curvature > 0:
        raise DivergenceError("horizontal line with I I'' = 0 has no finite half-period")
    return math.pi / math.sqrt(curvature)


def chord_integrals(p: BaseProfile, v0: float, v1: float) -> dict:
    """Raw integrals {'T', 'V', 'A'}: half-period, T * volume and T * area."""
    v0, v1 = float(v0), float(v1)
    _check_pair(v0, v1)
    mid = 0.5 * (v0 + v1)
    # width is judged against the distance to the nearer end of [0, 1]
    if v1 - v0 < NEAR_DEGENERATE * 2.0 * min(mid, 1.0 - mid):
        t = _linearised_half_period(p, mid)
        return {"T": t, "V": mid * t, "A": float(p.eval(mid)) * t}
    return _segment(p, v0, v1).integrals()


def half_period(p: BaseProfile, v0: float, v1: float) -> float:
    """Horizontal extent of the monotone unduloid branch sweeping v1 down to v0."""
    return chord_integrals(p, v0, v1)["T"]


def volume(p: BaseProfile, T: float, v0: float, v1: float) -> float:
    """Weighted volume enclosed below the branch in a slab of width T."""
    if not T > 0:
        raise DomainError("slab width must be positive")
    return chord_integrals(p, v0, v1)["V"] / T


def area(p: BaseProfile, T: float, v0: float, v1: float) -> float:
    """Weighted length of the branch in a slab of width T."""
    if not T > 0:
        raise DomainError("slab width must be positive")
    return chord_integrals(p, v0, v1)["A"] / T


def area_lower_bound(ell_at_v: float, v0: float, v1: float, T: float) -> float:
    """Lower bound (l + sqrt(l^2 + 4((v1 - v0)/T)^2)) / 2 on the area of an unduloid."""
    if not T > 0:
        raise DomainError("slab width must be positive")
    jump = (v1 - v0) / T
    return 0.5 * (ell_at_v + math.sqrt(ell_at_v * ell_at_v + 4.0 * jump * jump))


def horizontal_stable(p: BaseProfile, v: float, T: float) -> bool:
    """Whether the horizontal line at volume v is stable in a slab of width T."""
    if any(v == k for k in p.singular_set):
        raise ZonalLineError(f"v = {v} is a kink of the profile")
    if not 0.0 < v < 1.0:
        raise DomainError("need 0 < v < 1")
    curvature = -float(p.eval(v)) * float(p.deriv2(v))
    return math.sqrt(max(curvature, 0.0)) <= math.pi / T


# --------------------------------------------------------------------------
# shapes


def _shape_kind(v0: float, v1: float) -> str:
    if v0 == 0.0:
        return "one_sided_bottom"
    if v1 == 1.0:
        return "one_sided_top"
    return "two_sided"


def shape(p: BaseProfile, v0: float, v1: float, n_samples: int = 500) -> UnduloidShape:
    """Sample the branch on a Chebyshev-spaced grid of volume levels.

    t = 0 corresponds to v1 (the top of the branch) and t = half_period to v0.
    Passing v0 == v1 returns the constant horizontal line at that level.
    """
    if n_samples < 2:
        raise DomainError("need at least two samples")
    if v0 == v1:
        return horizontal_shape(p, v0, n_samples)
    ch = chord(p, v0, v1)
    seg = _segment(p, v0, v1, ch)
    k = np.arange(n_samples)
    v = v1 - (v1 - v0) * (0.5 - 0.5 * np.cos(math.pi * k / (n_samples - 1)))
    v[0], v[-1] = v1, v0
    if isinstance(seg.coords, _HeightCoords):
        xs = np.asarray(seg.coords.d.quantile(v), dtype=float)
        xs[0], xs[-1] = seg.x1, seg.x0
        s = xs
    else:
        xs = v.copy()
        s = np.asarray(p.density.quantile(v), dtype=float)
    order = np.argsort(xs, kind="stable")
    tau = np.empty_like(xs)
    tau[order] = seg.cumulative_t(xs[order])
    tau[0] = 0.0
    total = seg.integrals(keys=("T",))["T"]
    tau[-1] = total
    return UnduloidShape(tau, s, v, ch, total, _shape_kind(v0, v1))


def horizontal_shape(p: BaseProfile, v: float, n_samples: int = 500,
                     T: float | None = None) -> UnduloidShape:
    """Constant line at volume level v, sampled on [0, T]."""
    if not 0.0 < v < 1.0:
        raise DomainError("need 0 < v < 1")
    if T is None:
        try:
            T = _linearised_half_period(p, v)
        except DivergenceError:
            T = 1.0
    level = float(p.eval(v))
    ch = Chord(v, v, 0.0, level)
    t = np.linspace(0.0, T, n_samples)
    s = np.full(n_samples, float(p.density.quantile(v)))
    return UnduloidShape(t, s, np.full(n_samples, v), ch, T, "horizontal")


def _zone_aware_gradient(s, t, kinks):
    """Second-order ds/dt whose stencils never straddle a kink of the density.

    Centred differences lose an order where f'' jumps; samples next to a kink
    use the three-point one-sided formula on their own side instead.
    """
    slope = np.gradient(s, t)
    if not len(kinks) or len(s) < 5:
        return slope
    zone = np.searchsorted(np.asarray(kinks), s)
    for i in range(1, len(s) - 1):
        if zone[i - 1] == zone[i] == zone[i + 1]:
            continue
        if i >= 2 and zone[i - 2] == zone[i - 1] == zone[i]:
            j = (i - 2, i - 1, i)
        elif i + 2 < len(s) and zone[i] == zone[i + 1] == zone[i + 2]:
            j = (i, i + 1, i + 2)
        else:
            continue
        # derivative at t[i] of the quadratic through the three points
        t0, t1, t2 = t[list(j)]
        s0, s1, s2 = s[list(j)]
        x = t[i]
        slope[i] = (s0 * (2 * x - t1 - t2) / ((t0 - t1) * (t0 - t2))
                    + s1 * (2 * x - t0 - t2) / ((t1 - t0) * (t1 - t2))
                    + s2 * (2 * x - t0 - t1) / ((t2 - t0) * (t2 - t1)))
    return slope


def cmc_residual(sh: UnduloidShape, d: ModelDensity) -> float:
    """Max deviation from the first integral phi(f)/sqrt(1+f'^2) - lam Phi(f) = c.

    f' comes from second-order finite differences of the samples, so the
    value measures sampling accuracy as well as the curve itself.
    """
    s = np.asarray(sh.s, dtype=float)
    if sh.kind == "horizontal":
        slope = np.zeros_like(s)
    else:
        slope = _zone_aware_gradient(s, np.asarray(sh.t, dtype=float), d.sing_points)
    lhs = np.asarray(d.density(s)) / np.sqrt(1.0 + slope * slope)
    resid = np.abs(lhs - sh.chord.lam * np.asarray(d.cdf(s)) - sh.chord.c)
    inner = resid[1:-1] if len(resid) > 2 else resid
    return float(np.max(inner))


def write_shape_csv(sh: UnduloidShape, target) -> str:
    """Write ``t,s,v`` rows with 17 significant digits; returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "s", "v"])
    for row in sh.samples:
        writer.writerow([f"{x:.17g}" for x in row])
    text = buf.getvalue()
    if target is not None:
        Path(target).write_text(text)
    return text


# --------------------------------------------------------------------------
# brute-force relaxed functional


def _project(x, weights, target):
    """Euclidean projection onto {1 >= y_0 >= ... >= y_n >= 0, weights . y = target}.

    For a multiplier mu the projection onto the monotone box is the clipped
    isotonic fit of x + mu * weights; mu is then solved for the mean.
    """

    def fit(mu):
        y = isotonic_regression(x + mu * weights, increasing=False).x
        return np.clip(y, 0.0, 1.0)

    def excess(mu):
        return float(weights @ fit(mu)) - target

    lo, hi = -1.0, 1.0
    while excess(lo) > 0:
        lo *= 2.0
    while excess(hi) < 0:
        hi *= 2.0
    mu = brentq(excess, lo, hi, xtol=1e-15, rtol=1e-15)
    return fit(mu)


def _step_start(weights, vbar):
    """Non-increasing 1-then-0 profile with one fractional node and exact mean."""
    v = np.zeros(len(weights))
    mass = 0.0
    for i, w in enumerate(weights):
        if mass + w <= vbar:
            v[i] = 1.0
            mass += w
        else:
            v[i] = (vbar - mass) / w
            break
    return v


def _relaxed_cost(p: BaseProfile, v, h, T):
    dv = np.diff(v)
    mid = np.clip(0.5 * (v[1:] + v[:-1]), 0.0, 1.0)
    level = np.asarray(p.eval(mid), dtype=float)
    seg = np.sqrt(dv * dv + (level * h) ** 2)
    return float(np.sum(seg)) / T, dv, mid, level, seg


def _relaxed_grad(p: BaseProfile, v, h, T):
    cost, dv, mid, level, seg = _relaxed_cost(p, v, h, T)
    slope = np.asarray(p.deriv1(mid), dtype=float)
    # I * I' stays bounded at the ends for the profiles of interest
    with np.errstate(invalid="ignore"):
        ii = np.where(level > 0, level * slope, 0.0)
    safe = np.maximum(seg, 1e-300)
    d_next = (dv + 0.5 * ii * h * h) / safe
    d_prev = (-dv + 0.5 * ii * h * h) / safe
    grad = np.zeros_like(v)
    grad[1:] += d_next
    grad[:-1] += d_prev
    return cost, grad / T


def functional_oracle(p: BaseProfile, T: float, vbar: float, n_grid: int = 120,
                      max_iter: int = 300) -> float:
    """Brute-force upper bound for the base-induced slab profile at vbar.

    Minimises (1/T) sum sqrt(dv^2 + I(v_mid)^2 dt^2) over non-increasing
    piecewise-linear v on a uniform grid of [0, T] with trapezoidal mean
    equal to vbar. A jump of v is represented by a steep segment, whose cost
    tends to the jump height. SLSQP (analytic gradient, linear monotonicity
    and mean constraints) is run from five fixed starts: horizontal, a step,
    two linear ramps and one pseudo-random monotone profile from a fixed seed.
    """
    if not 0.0 < vbar < 1.0:
        raise DomainError("need 0 < vbar < 1")
    if n_grid < 50:
        raise DomainError("need n_grid >= 50")
    h = T / (n_grid - 1)
    weights = np.full(n_grid, h / T)
    weights[0] = weights[-1] = 0.5 * h / T
    frac = np.linspace(0.0, 1.0, n_grid)
    rng = np.random.default_rng(20240611)
    starts = [
        np.full(n_grid, vbar),
        _step_start(weights, vbar),
        np.clip(1.0 - 2.0 * frac, 0.0, 1.0),
        1.0 - frac,
        np.sort(rng.uniform(0.0, 1.0, n_grid))[::-1],
    ]
    steps = np.zeros((n_grid - 1, n_grid))
    idx = np.arange(n_grid - 1)
    steps[idx, idx] = 1.0
    steps[idx, idx + 1] = -1.0
    constraints = [
        {"type": "eq", "fun": lambda x: weights @ x - vbar, "jac": lambda x: weights},
        {"type": "ineq", "fun": lambda x: steps @ x, "jac": lambda x: steps},
    ]
    best = math.inf
    for start in starts:
        x0 = _project(start, weights, vbar)
        res = minimize(lambda x: _relaxed_grad(p, x, h, T), x0, jac=True, method="SLSQP",
                       bounds=[(0.0, 1.0)] * n_grid, constraints=constraints,
                       options={"maxiter": max_iter, "ftol": 1e-12})
        # clean up constraint slack before scoring
        v = _project(res.x, weights, vbar)
        best = min(best, _relaxed_cost(p, v, h, T)[0], _relaxed_cost(p, x0, h, T)[0])
    return float(best)
