"""Base isoperimetric profiles and their log-concave model densities.

A concave symmetric profile I on [0, 1] determines an even log-concave
density phi with distribution function Phi through I = phi o Phi^{-1}.
The flat 2-torus and the Gaussian profiles come with closed-form densities.
Profiles loaded from a breakpoint list use the generic numerical
correspondence in :func:`bobkov_density`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DomainError, NonConvergenceError
from .special_fn import Tolerances, find_root, integrate_endpoint_singular

PI = math.pi
SQRT_2PI = math.sqrt(2.0 * PI)
# Torus breakpoints, kept as single double constants so zone tests are exact.
TORUS_KINK = 1.0 / PI
TORUS_KINK_HI = 1.0 - 1.0 / PI
# Gaussian quantiles are clipped here; the mass beyond is below 1e-300.
GAUSS_S_CAP = 40.0

# 16-point Gauss-Legendre rule on [0, 1], used for short cdf differences.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = (_GL_X + 1.0) / 2.0
_GL_W = _GL_W / 2.0


def _naive_diff(fn):
    def diff(s, a, delta=None):
        return fn(s) - fn(a)

    return diff


@dataclass
class ModelDensity:
    """Even log-concave density phi on the line and its distribution function.

    ``density_diff(s, a)`` and ``cdf_diff(s, a)`` return phi(s) - phi(a) and
    Phi(s) - Phi(a); the built-in densities evaluate them without cancellation
    when s and a are close. Both accept an optional ``delta`` holding s - a
    exactly, for callers that know it better than the rounded s does.
    """

    density: Callable
    cdf: Callable
    quantile: Callable
    support_radius: float
    sing_points: tuple = ()
    density_diff: Callable | None = None
    cdf_diff: Callable | None = None

    def __post_init__(self):
        if self.density_diff is None:
            self.density_diff = _naive_diff(self.density)
        if self.cdf_diff is None:
            self.cdf_diff = _naive_diff(self.cdf)


class BaseProfile:
    """Concave symmetric profile I on [0, 1].

    Subclasses provide ``eval``, one-sided ``deriv1``, ``deriv2`` and the
    matching model density. ``singular_set`` lists the kinks of I and
    ``zones`` the open intervals of smoothness between them.
    """

    name: str = "profile"
    singular_set: tuple = ()
    # Whether v / I(v)^2 is integrable at 0; decides if one-sided unduloids exist.
    tail_integrable: bool = False

    def eval(self, v):
        raise NotImplementedError

    def __call__(self, v):
        return self.eval(v)

    def deriv1(self, v, side: int = 1):
        raise NotImplementedError

    def deriv2(self, v):
        raise NotImplementedError

    def diff(self, v, w, delta=None):
        """I(v) - I(w); ``delta`` optionally carries v - w exactly."""
        return self.eval(v) - self.eval(w)

    @property
    def zones(self) -> tuple:
        edges = (0.0, *self.singular_set, 1.0)
        return tuple(zip(edges[:-1], edges[1:]))

    def zone_index(self, v) -> np.ndarray:
        return np.searchsorted(np.asarray(self.singular_set), v, side="right")

    @cached_property
    def density(self) -> ModelDensity:
        return bobkov_density(self)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def _check_unit(v):
    arr = np.asarray(v, dtype=float)
    if np.any(~(arr >= 0)) or np.any(~(arr <= 1)):
        raise DomainError("volume fraction must lie in [0, 1]")
    return arr


def _scalar_out(x, ref):
    return float(x) if np.ndim(ref) == 0 else x


class TorusProfile(BaseProfile):
    """I(v) = min(sqrt(pi v), 1, sqrt(pi (1 - v))) for the unit-area flat torus."""

    name = "torus2"
    singular_set = (TORUS_KINK, TORUS_KINK_HI)
    tail_integrable = True

    def eval(self, v):
        arr = _check_unit(v)
        out = np.minimum(np.minimum(np.sqrt(PI * arr), 1.0), np.sqrt(PI * (1.0 - arr)))
        return _scalar_out(out, v)

    def deriv1(self, v, side: int = 1):
        arr = _check_unit(v)
        zone = self._zone(arr, side)
        with np.errstate(divide="ignore"):
            out = np.select(
                [zone == 0, zone == 1],
                [math.sqrt(PI) / (2.0 * np.sqrt(arr)), 0.0 * arr],
                -math.sqrt(PI) / (2.0 * np.sqrt(1.0 - arr)),
            )
        return _scalar_out(out, v)

    def deriv2(self, v):
        arr = _check_unit(v)
        zone = self._zone(arr, 1)
        with np.errstate(divide="ignore"):
            out = np.select(
                [zone == 0, zone == 1],
                [-math.sqrt(PI) / (4.0 * arr**1.5), 0.0 * arr],
                -math.sqrt(PI) / (4.0 * (1.0 - arr) ** 1.5),
            )
        return _scalar_out(out, v)

    def diff(self, v, w, delta=None):
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        step = v - w if delta is None else np.asarray(delta, dtype=float)
        zv, zw = self._zone(v, 1), self._zone(w, 1)
        # equal-zone differences of square roots, rationalised
        left = PI * step / (np.sqrt(PI * v) + np.sqrt(PI * w))
        right = -PI * step / (np.sqrt(PI * (1.0 - v)) + np.sqrt(PI * (1.0 - w)))
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.select(
                [(zv == 0) & (zw == 0), (zv == 1) & (zw == 1), (zv == 2) & (zw == 2)],
                [left, 0.0 * v, right],
                self.eval(v) - self.eval(w),
            )
        out = np.where(step == 0, 0.0, out)
        return _scalar_out(out, v)

    @staticmethod
    def _zone(arr, side):
        if side >= 0:
            return np.where(arr < TORUS_KINK, 0, np.where(arr < TORUS_KINK_HI, 1, 2))
        return np.where(arr <= TORUS_KINK, 0, np.where(arr <= TORUS_KINK_HI, 1, 2))

    @cached_property
    def density(self) -> ModelDensity:
        return torus_density()


class GaussianProfile(BaseProfile):
    """Gaussian profile I(v) = phi(Phi^{-1}(v)), which satisfies I I'' = -1."""

    name = "gaussian"
    singular_set = ()
    tail_integrable = False

    @staticmethod
    def _lower_quantile(arr):
        with np.errstate(divide="ignore"):
            return np.maximum(special.ndtri(np.minimum(arr, 1.0 - arr)), -GAUSS_S_CAP)

    def eval(self, v):
        arr = _check_unit(v)
        s = self._lower_quantile(arr)
        out = np.where(np.minimum(arr, 1.0 - arr) > 0, np.exp(-0.5 * s * s) / SQRT_2PI, 0.0)
        return _scalar_out(out, v)

    def deriv1(self, v, side: int = 1):
        arr = _check_unit(v)
        s = self._lower_quantile(arr)
        out = np.where(arr <= 0.5, -s, s)
        return _scalar_out(out, v)

    def deriv2(self, v):
        arr = _check_unit(v)
        with np.errstate(divide="ignore"):
            out = -1.0 / np.asarray(self.eval(arr))
        return _scalar_out(out, v)

    @cached_property
    def density(self) -> ModelDensity:
        return gaussian_density()


class PiecewiseProfile(BaseProfile):
    """Profile given by linear interpolation of breakpoints on [0, 1/2].

    The breakpoints start at (0, 0), end at v = 1/2 and are mirrored to
    (1/2, 1]. Concavity and positivity are checked at construction.
    """

    tail_integrable = False

    def __init__(self, name: str, breakpoints: Sequence[Sequence[float]]):
        pts = np.asarray(breakpoints, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise DomainError("breakpoints must be a list of [v, I] pairs")
        if pts[0, 0] != 0.0 or pts[0, 1] != 0.0:
            raise DomainError("first breakpoint must be (0, 0)")
        if pts[-1, 0] != 0.5:
            raise DomainError("last breakpoint must sit at v = 1/2")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise DomainError("breakpoint volumes must be strictly increasing")
        if np.any(pts[1:, 1] <= 0):
            raise DomainError("profile must be positive on (0, 1)")
        slopes = np.diff(pts[:, 1]) / np.diff(pts[:, 0])
        if np.any(np.diff(slopes) > 1e-12) or slopes[-1] < -1e-12:
            raise DomainError("breakpoints do not describe a concave symmetric profile")
        self.name = name
        mirrored = pts[-2::-1].copy()
        mirrored[:, 0] = 1.0 - mirrored[:, 0]
        self._v = np.concatenate([pts[:, 0], mirrored[:, 0]])
        self._i = np.concatenate([pts[:, 1], mirrored[:, 1]])
        kinks = [float(x) for x in pts[1:-1, 0]]
        if slopes[-1] > 0:
            kinks.append(0.5)
        kinks += [1.0 - x for x in reversed(pts[1:-1, 0])]
        self.singular_set = tuple(sorted(kinks))
        self._slopes = np.diff(self._i) / np.diff(self._v)

    def eval(self, v):
        arr = _check_unit(v)
        return _scalar_out(np.interp(arr, self._v, self._i), v)

    def deriv1(self, v, side: int = 1):
        arr = _check_unit(v)
        idx = np.searchsorted(self._v, arr, side="right" if side >= 0 else "left") - 1
        idx = np.clip(idx, 0, len(self._slopes) - 1)
        return _scalar_out(self._slopes[idx], v)

    def deriv2(self, v):
        arr = _check_unit(v)
        return _scalar_out(np.zeros_like(arr), v)


def torus2_profile() -> TorusProfile:
    return TorusProfile()


def gaussian_profile() -> GaussianProfile:
    return GaussianProfile()


def torus_density() -> ModelDensity:
    """Closed-form model density of the flat torus profile.

    phi is 1 on |s| <= 1/2 - 1/pi and decays linearly to 0 at |s| = 1/2 + 1/pi.
    """
    radius = 0.5 + 1.0 / PI
    flat = 0.5 - 1.0 / PI
    half_slope = PI / 2.0

    def zone(s):
        return np.where(s < -flat, 0, np.where(s <= flat, 1, 2))

    def density(s):
        s = np.asarray(s, dtype=float)
        out = np.where(np.abs(s) <= flat, 1.0, half_slope * np.maximum(radius - np.abs(s), 0.0))
        return _scalar_out(out, s)

    def cdf(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(s, -radius, radius)
        out = np.select(
            [u < -flat, u <= flat],
            [PI / 4.0 * (u + radius) ** 2, TORUS_KINK + (u + flat)],
            1.0 - PI / 4.0 * (radius - u) ** 2,
        )
        return _scalar_out(out, s)

    def quantile(v):
        arr = _check_unit(v)
        out = np.select(
            [arr <= TORUS_KINK, arr <= TORUS_KINK_HI],
            [-radius + 2.0 * np.sqrt(arr / PI), arr - 0.5],
            radius - 2.0 * np.sqrt(np.maximum(1.0 - arr, 0.0) / PI),
        )
        return _scalar_out(out, v)

    def density_diff(s, a, delta=None):
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        d = s - a if delta is None else np.asarray(delta, dtype=float)
        zs, za = zone(s), zone(a)
        inside = (np.abs(s) <= radius) & (np.abs(a) <= radius)
        out = np.select(
            [inside & (zs == 0) & (za == 0), inside & (zs == 1) & (za == 1),
             inside & (zs == 2) & (za == 2)],
            [half_slope * d, 0.0 * s, -half_slope * d],
            density(s) - density(a),
        )
        return _scalar_out(out, s)

    def cdf_diff(s, a, delta=None):
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        d = s - a if delta is None else np.asarray(delta, dtype=float)
        zs, za = zone(s), zone(a)
        inside = (np.abs(s) <= radius) & (np.abs(a) <= radius)
        out = np.select(
            [inside & (zs == 0) & (za == 0), inside & (zs == 1) & (za == 1),
             inside & (zs == 2) & (za == 2)],
            [PI / 4.0 * d * (2.0 * a + d + 2.0 * radius), d,
             PI / 4.0 * d * (2.0 * radius - 2.0 * a - d)],
            cdf(s) - cdf(a),
        )
        return _scalar_out(out, s)

    return ModelDensity(density, cdf, quantile, radius, (-flat, flat), density_diff, cdf_diff)


def gaussian_density() -> ModelDensity:
    """Standard normal density with tail-aware differences."""

    def density(s):
        s = np.asarray(s, dtype=float)
        return _scalar_out(np.exp(-0.5 * s * s) / SQRT_2PI, s)

    def cdf(s):
        return special.ndtr(s)

    def quantile(v):
        arr = _check_unit(v)
        with np.errstate(divide="ignore"):
            out = np.clip(special.ndtri(arr), -GAUSS_S_CAP, GAUSS_S_CAP)
        return _scalar_out(out, v)

    def density_diff(s, a, delta=None):
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        d = s - a if delta is None else np.asarray(delta, dtype=float)
        # anchor at the point with the larger density so expm1 cannot overflow
        half = 0.5 * d * (2.0 * a + d)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(np.abs(a) <= np.abs(s),
                           density(a) * np.expm1(-half),
                           -density(s) * np.expm1(half))
        return _scalar_out(out, s)

    def cdf_diff(s, a, delta=None):
        s = np.asarray(s, dtype=float)
        a = np.asarray(a, dtype=float)
        delta = s - a if delta is None else np.asarray(delta, dtype=float)
        s, a, delta = np.broadcast_arrays(s, a, delta)
        # Short steps: integrate phi(a + t) = phi(a) exp(-a t - t^2/2) directly.
        t = delta[..., None] * _GL_X
        with np.errstate(over="ignore", invalid="ignore"):
            short = np.exp(-0.5 * a * a)[..., None] * np.exp(-a[..., None] * t - 0.5 * t * t)
            short = delta * np.sum(short * _GL_W, axis=-1) / SQRT_2PI
        # upper tails are differenced through the complementary function
        both_high = (s >= 0) & (a >= 0)
        long_ = np.where(both_high, special.ndtr(-a) - special.ndtr(-s),
                         special.ndtr(s) - special.ndtr(a))
        use_short = np.abs(delta) * (1.0 + np.maximum(np.abs(s), np.abs(a))) <= 0.5
        out = np.where(use_short, short, long_)
        return _scalar_out(out, s)

    return ModelDensity(density, cdf, quantile, math.inf, (), density_diff, cdf_diff)


def bobkov_density(p: BaseProfile, tol: Tolerances | None = None) -> ModelDensity:
    """Model density of a profile through Phi^{-1}(v) = int_{1/2}^v dw / I(w).

    This is the generic numerical route; it works for any concave symmetric
    profile but is slow (each quantile is a quadrature, each cdf value a root
    solve). The integral is split at the kinks of I.
    """
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-12)
    kinks = [k for k in p.singular_set if k < 0.5]

    def lower_piece(lo: float, hi: float) -> float:
        # int_lo^hi dw / I(w) with lo, hi <= 1/2 and the singular end at lo
        def integrand(w, dlo, dhi):
            return 1.0 / np.asarray(p.eval(np.minimum(lo + dlo, 0.5)))

        return integrate_endpoint_singular(integrand, lo, hi, tol, offsets=True).value

    @lru_cache(maxsize=4096)
    def lower_quantile(v: float) -> float:
        # v in (0, 1/2]; returns Phi^{-1}(v) <= 0
        edges = [v] + [k for k in kinks if k > v] + [0.5]
        return -sum(lower_piece(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a)

    try:
        radius = -lower_quantile_at_zero(p, kinks, tol)
    except NonConvergenceError:
        radius = math.inf

    def quantile(v):
        arr = _check_unit(v)

        def one(x):
            x = float(x)
            if x == 0.5:
                return 0.0
            low = min(x, 1.0 - x)
            if low == 0.0:
                val = -radius
            else:
                val = lower_quantile(low)
            val = max(val, -GAUSS_S_CAP)
            return val if x < 0.5 else -val

        out = np.vectorize(one, otypes=[float])(arr)
        return _scalar_out(out, v)

    @lru_cache(maxsize=4096)
    def cdf_scalar(s: float) -> float:
        if s == 0.0:
            return 0.5
        if s >= radius:
            return 1.0
        if s <= -radius:
            return 0.0
        target = -abs(s)
        lo = 1e-300
        if lower_quantile(lo) > target:
            return 0.0 if s < 0 else 1.0
        root = find_root(lambda x: lower_quantile(x) - target, lo, 0.5,
                         Tolerances(abs_tol=1e-15, rel_tol=1e-12))
        return root if s < 0 else 1.0 - root

    def cdf(s):
        out = np.vectorize(cdf_scalar, otypes=[float])(np.asarray(s, dtype=float))
        return _scalar_out(out, s)

    def density(s):
        out = np.asarray(p.eval(np.asarray(cdf(s))))
        return _scalar_out(out, s)

    sing = sorted({float(quantile(k)) for k in p.singular_set})
    return ModelDensity(density, cdf, quantile, radius, tuple(sing))


def lower_quantile_at_zero(p: BaseProfile, kinks, tol) -> float:
    """Phi^{-1}(0) = -int_0^{1/2} dw / I(w); raises when the integral diverges."""
    edges = [0.0] + list(kinks) + [0.5]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        def integrand(w, da, db, a=a):
            return 1.0 / np.asarray(p.eval(np.minimum(a + da, 0.5)))

        total += integrate_endpoint_singular(integrand, a, b, tol, offsets=True).value
    return -total


def conjectured_profile_q3(beta: float, v: float) -> float:
    """Conjectured isoperimetric profile of the box [0, beta] x [0, 1]^2 (unit volume).

    Minimum of a corner-sphere branch (9 pi / (2 beta))^{1/3} v^{2/3}, an
    edge-cylinder branch sqrt(pi v) and the flat plane 1, reflected about 1/2.
    """
    if not 0 < beta <= 1:
        raise DomainError("beta must lie in (0, 1]")
    arr = _check_unit(v)
    w = np.minimum(arr, 1.0 - arr)
    sphere = (9.0 * PI / (2.0 * beta)) ** (1.0 / 3.0) * w ** (2.0 / 3.0)
    out = np.minimum(np.minimum(sphere, np.sqrt(PI * w)), 1.0)
    return _scalar_out(out, v)


def load_profile(source: str | Path | dict) -> BaseProfile:
    """Build a profile from a JSON file path, a JSON string or a parsed dict.

    Schema: ``{"name": ..., "kind": "torus2" | "gaussian" | "piecewise",
    "breakpoints": [[v, I], ...]}``; breakpoints are only read for piecewise.
    """
    if isinstance(source, dict):
        spec = source
    else:
        text = str(source)
        path = Path(text)
        if not text.lstrip().startswith("{") and path.exists():
            text = path.read_text()
        spec = json.loads(text)
    kind = spec.get("kind")
    if kind == "torus2":
        return torus2_profile()
    if kind == "gaussian":
        return gaussian_profile()
    if kind == "piecewise":
        return PiecewiseProfile(spec.get("name", "piecewise"), spec["breakpoints"])
    raise DomainError(f"unknown profile kind {kind!r}")


def profile_by_name(name: str) -> BaseProfile:
    if name in ("torus2", "torus"):
        return torus2_profile()
    if name in ("gaussian", "gauss"):
        return gaussian_profile()
    return load_profile(name)
