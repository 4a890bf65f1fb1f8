"""Numerical kernels: elliptic integrals, Gaussian cdf/quantile, digamma,
endpoint-singular quadrature and bracketed root finding.

Elliptic integrals use Carlson's symmetric forms with the duplication
algorithm. The quadrature engine is a double-exponential (tanh-sinh) rule.
Gaussian tails, digamma and the Brent iteration are delegated to scipy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special

from .errors import DivergenceError, DomainError, NoBracketError, NonConvergenceError


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class Tolerances:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be at least 1")


DEFAULT_TOL = Tolerances()

# Carlson duplication stops once the Taylor remainder is below this.
_CARLSON_R = 2.0**-53
_CARLSON_MAX_STEPS = 100


def _carlson_rf(x, y, z):
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + z) / 3.0
    q = (3.0 * _CARLSON_R) ** (-1.0 / 6.0) * np.maximum.reduce(
        [np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)]
    )
    dx, dy = a0 - x, a0 - y
    a = a0.copy()
    scale = 1.0
    for _ in range(_CARLSON_MAX_STEPS):
        if np.all(scale * q < np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x = (x + lam) / 4.0
        y = (y + lam) / 4.0
        z = (z + lam) / 4.0
        a = (a + lam) / 4.0
        scale /= 4.0
    else:
        raise NonConvergenceError("Carlson RF duplication did not converge")
    big_x = dx * scale / a
    big_y = dy * scale / a
    big_z = -big_x - big_y
    e2 = big_x * big_y - big_z**2
    e3 = big_x * big_y * big_z
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2**2 / 24.0 - 3.0 * e2 * e3 / 44.0) / np.sqrt(a)


def _carlson_rd(x, y, z):
    x, y, z = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    a0 = (x + y + 3.0 * z) / 5.0
    q = (_CARLSON_R / 4.0) ** (-1.0 / 6.0) * np.maximum.reduce(
        [np.abs(a0 - x), np.abs(a0 - y), np.abs(a0 - z)]
    )
    dx, dy = a0 - x, a0 - y
    a = a0.copy()
    scale = 1.0
    acc = np.zeros_like(a)
    for _ in range(_CARLSON_MAX_STEPS):
        if np.all(scale * q < np.abs(a)):
            break
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        acc += scale / (sz * (z + lam))
        x = (x + lam) / 4.0
        y = (y + lam) / 4.0
        z = (z + lam) / 4.0
        a = (a + lam) / 4.0
        scale /= 4.0
    else:
        raise NonConvergenceError("Carlson RD duplication did not converge")
    big_x = dx * scale / a
    big_y = dy * scale / a
    big_z = -(big_x + big_y) / 3.0
    xy = big_x * big_y
    e2 = xy - 6.0 * big_z**2
    e3 = (3.0 * xy - 8.0 * big_z**2) * big_z
    e4 = 3.0 * (xy - big_z**2) * big_z**2
    e5 = xy * big_z**3
    series = (
        1.0
        - 3.0 * e2 / 14.0
        + e3 / 6.0
        + 9.0 * e2**2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0
    )
    return scale * series / (a * np.sqrt(a)) + 3.0 * acc


def _as_output(arr, like_scalar: bool):
    return float(arr) if like_scalar else arr


def _check_elliptic_args(x, m):
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(m)):
        raise DomainError("elliptic arguments must be finite")
    if np.any(x < 0) or np.any(x > 1) or np.any(m < 0) or np.any(m > 1):
        raise DomainError("elliptic integrals need 0 <= x <= 1 and 0 <= m <= 1")
    return np.broadcast_arrays(x, m)


def ellip_f(x, m):
    """Incomplete elliptic integral of the first kind in sine-amplitude form.

    F(x, m) = int_0^x dt / sqrt((1 - t^2)(1 - m t^2)), so ellip_f(1, m) = K(m).
    Accepts scalars or broadcastable arrays.
    """
    scalar = np.ndim(x) == 0 and np.ndim(m) == 0
    x, m = _check_elliptic_args(x, m)
    if np.any((x == 1) & (m == 1)):
        raise DivergenceError("F(1, 1) is infinite")
    x2 = x * x
    out = x * _carlson_rf(1.0 - x2, 1.0 - m * x2, 1.0)
    return _as_output(out, scalar)


def ellip_e(x, m):
    """Incomplete elliptic integral of the second kind in sine-amplitude form.

    E(x, m) = int_0^x sqrt(1 - m t^2) / sqrt(1 - t^2) dt, so ellip_e(1, m) = E(m).
    """
    scalar = np.ndim(x) == 0 and np.ndim(m) == 0
    x, m = _check_elliptic_args(x, m)
    x2 = x * x
    # At m = 1 the integrand is identically 1 and the Carlson pieces both blow up.
    unit = m == 1.0
    ms = np.where(unit, 0.0, m)
    y = 1.0 - ms * x2
    out = x * _carlson_rf(1.0 - x2, y, 1.0) - ms * x * x2 * _carlson_rd(1.0 - x2, y, 1.0) / 3.0
    out = np.where(unit, x, out)
    return _as_output(out, scalar)


def gauss_cdf(s):
    """Standard normal distribution function."""
    return special.ndtr(s)


def gauss_quantile(p):
    """Inverse of gauss_cdf on (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if np.any(~(arr > 0)) or np.any(~(arr < 1)):
        raise DomainError("gaussian quantile needs 0 < p < 1")
    return special.ndtri(p)


def digamma(x):
    """Logarithmic derivative of the gamma function for x > 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("digamma is only provided for x > 0")
    return special.psi(x)


# Tanh-sinh rule on [0, 1]: x = 1 / (1 + exp(-pi sinh t)), truncated at |t| = 6.5
# where the node distance to the endpoint underflows double precision.
_TS_TMAX = 6.5
_TS_MAX_LEVEL = 12


_ROUNDING_GUARD = 2.0**20
_MAX_SINGULAR_ORDER = 0.95


def _ts_nodes(t):
    u = math.pi * np.sinh(t)
    # distance to the nearer endpoint, computed without cancellation
    with np.errstate(over="ignore"):
        near = 1.0 / (1.0 + np.exp(np.abs(u)))
    weight = math.pi * np.cosh(t) * near * (1.0 - near)
    return near, weight


def integrate_endpoint_singular(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: Tolerances | None = None,
    offsets: bool = False,
) -> QuadratureResult:
    """Integrate ``f`` over [a, b] allowing integrable endpoint singularities.

    ``f`` must accept a numpy array of abscissae. With ``offsets=True`` it is
    called as ``f(x, x - a, b - x)`` where both distances are exact even when
    x rounds onto an endpoint; use this when the singular factor depends on
    the distance to a nonzero endpoint. The rule refines the step until two
    successive levels agree to ``max(abs_tol, rel_tol*|value|)``.

    Without offsets, nodes within about a million ulps of a nonzero endpoint
    cannot be sampled faithfully. Their share is filled in from a local power law
    (b - x)^(-p) fitted to the two innermost samples on that side, which is
    exact for the common inverse-square-root singularity.

    Raises:
        NonConvergenceError: the levels do not settle, or the outermost nodes
            still carry non-negligible mass (a non-integrable endpoint).
    """
    tol = tol or DEFAULT_TOL
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError("integration needs a < b")
    width = b - a
    evaluations = 0

    kept_dist: list = []
    kept_vals: list = []
    kept_side: list = []
    drop_dist: list = []
    drop_weight: list = []
    drop_side: list = []

    def contributions(t):
        nonlocal evaluations
        near, weight = _ts_nodes(t)
        left = t < 0
        x = np.where(left, a + width * near, b - width * near)
        da = np.where(left, width * near, width * (1.0 - near))
        db = np.where(left, width * (1.0 - near), width * near)
        if offsets:
            keep = (near > 0) & (weight > 0)
        else:
            # close to a nonzero endpoint the rounded abscissa misstates the
            # distance; such nodes are left to the tail model as well
            guard = np.where(left, _ROUNDING_GUARD * math.ulp(a), _ROUNDING_GUARD * math.ulp(b))
            usable = (near > 0) & (weight > 0)
            keep = usable & (x > a) & (x < b) & (width * near > guard)
            lost = usable & ~keep
            drop_dist.append(width * near[lost])
            drop_weight.append(width * weight[lost])
            drop_side.append(left[lost])
        x, weight, t, da, db = x[keep], weight[keep], t[keep], da[keep], db[keep]
        if x.size == 0:
            return np.zeros(0), np.zeros(0)
        with np.errstate(all="ignore"):
            fx = f(x, da, db) if offsets else f(x)
            fx = np.asarray(fx, dtype=float) * np.ones_like(x)
        evaluations += x.size
        if not np.all(np.isfinite(fx)):
            raise NonConvergenceError("integrand is not finite at a quadrature node")
        side = t < 0
        if offsets:
            kept_dist.append(np.where(side, da, db))
        else:
            kept_dist.append(np.where(side, x - a, b - x))
        kept_vals.append(fx)
        kept_side.append(side)
        return t, width * weight * fx

    def unreachable_tail() -> float:
        """Model estimate of the dropped nodes' terms (without the step factor)."""
        if offsets or not drop_dist:
            return 0.0
        dd, dw, ds = map(np.concatenate, (drop_dist, drop_weight, drop_side))
        if dd.size == 0:
            return 0.0
        kd, kv, ks = map(np.concatenate, (kept_dist, kept_vals, kept_side))
        total = 0.0
        for side in (True, False):
            lost = ds == side
            if not lost.any():
                continue
            fit = local_power(side)
            if fit is None:
                continue
            power, d1, f1 = fit
            if not power < 1.0:
                continue  # not integrable; reported after convergence
            power = max(power, 0.0)
            total += float(np.sum(dw[lost] * f1 * (d1 / dd[lost]) ** power))
        return total

    def local_power(side: bool):
        """Exponent p of f ~ dist^(-p) from the two samples nearest one endpoint."""
        if not kept_dist:
            return None
        kd, kv, ks = map(np.concatenate, (kept_dist, kept_vals, kept_side))
        mine = ks == side
        if mine.sum() < 2:
            return None
        order = np.argsort(kd[mine])[:2]
        (d1, d2), (f1, f2) = kd[mine][order], kv[mine][order]
        if np.sign(f1) == np.sign(f2) != 0 and d2 > d1 > 0:
            return math.log(abs(f1 / f2)) / math.log(d2 / d1), d1, f1
        return 0.0, d1, f1

    h = 0.5
    t = np.arange(-_TS_TMAX, _TS_TMAX + h / 2, h)
    t_all, terms_all = contributions(t)
    total = (float(np.sum(terms_all)) + unreachable_tail()) * h
    error = math.inf
    levels = min(tol.max_iter, _TS_MAX_LEVEL)
    for _ in range(levels):
        h /= 2.0
        t_new = np.arange(-_TS_TMAX + h, _TS_TMAX, 2 * h)
        t_n, terms_n = contributions(t_new)
        t_all = np.concatenate([t_all, t_n])
        terms_all = np.concatenate([terms_all, terms_n])
        new_total = (float(np.sum(terms_all)) + unreachable_tail()) * h
        error = abs(new_total - total)
        total = new_total
        if error <= max(tol.abs_tol, tol.rel_tol * abs(total)) / 10.0:
            break
    else:
        raise NonConvergenceError(
            f"tanh-sinh quadrature did not converge (last change {error:.3e})"
        )
    # A singularity of order dist^(-1) or stronger is not integrable; near
    # such an endpoint the innermost samples reveal the local exponent.
    for side in (True, False):
        fit = local_power(side)
        if fit is not None and fit[0] > _MAX_SINGULAR_ORDER and abs(fit[2]) * fit[1] > tol.abs_tol:
            raise NonConvergenceError("integrand appears non-integrable at an endpoint")
    return QuadratureResult(total, error, evaluations)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerances | None = None,
) -> float:
    """Root of ``f`` inside a sign-changing bracket (Brent's method).

    The bracket may be given in either order; the result does not depend on it.
    """
    tol = tol or DEFAULT_TOL
    lo, hi = (float(lo), float(hi)) if lo <= hi else (float(hi), float(lo))
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoBracketError(f"no sign change on [{lo}, {hi}]")
    try:
        return float(
            optimize.brentq(f, lo, hi, xtol=tol.abs_tol, rtol=4 * np.finfo(float).eps,
                            maxiter=tol.max_iter)
        )
    except RuntimeError as exc:
        raise NonConvergenceError(str(exc)) from exc
