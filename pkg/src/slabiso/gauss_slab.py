"""Isoperimetric profile of the Gaussian slab [0, T] x R^n.

Three families compete at every volume: horizontal half-spaces (area
I_gamma(v)), vertical walls (area 1/T) and Gaussian unduloids. Below
T = sqrt(2 pi) horizontal sets always win, above T = pi they never do.
This module computes the unduloid branch numerically, assembles the
resulting profile and estimates the volumes where the winner changes.
The thresholds v_h and v_v reported here are numerical estimates, not
certified values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .errors import DomainError, NoBracketError
from .profile import SQRT_2PI, gaussian_profile
from .special_fn import Tolerances, find_root, gauss_cdf, gauss_quantile
from .unduloid import area_lower_bound

SUBCRITICAL = math.sqrt(2.0 * math.pi)
SUPERCRITICAL = math.pi

_GAUSS = gaussian_profile()
_DENSITY = _GAUSS.density

# Height grid for the top of the branch and the gaps scanned below it.
_S1_GRID = np.linspace(-8.0, 8.0, 161)
_GAPS = np.geomspace(2e-4, 1e12, 65)


@dataclass(frozen=True)
class ProfilePoint:
    vbar: float
    area: float
    kind: str
    params: tuple | None = None


@dataclass(frozen=True)
class PhaseReport:
    T: float
    v_v_plus: float
    v_v_plus_plus: float
    v_h_estimate: float
    v_v_estimate: float
    regime: str
    note: str = "numeric estimates, not certified"


def gauss_profile_value(v):
    return _GAUSS.eval(v)


def _inverse_profile(level: float) -> float:
    """Smallest v in (0, 1/2] with I_gamma(v) = level."""
    if not 0 < level <= 1.0 / SQRT_2PI:
        raise DomainError("level outside the range of the Gaussian profile")
    if level == 1.0 / SQRT_2PI:
        return 0.5
    return find_root(lambda v: _GAUSS.eval(v) - level, 1e-300, 0.5,
                     Tolerances(abs_tol=1e-15, rel_tol=1e-13))


def regime(T: float) -> str:
    if T <= SUBCRITICAL:
        return "subcritical"
    if T <= SUPERCRITICAL:
        return "intermediate"
    return "supercritical"


# --------------------------------------------------------------------------
# closed-form bounds


def solve_delta(T: float, w: float) -> float:
    """delta in (w, 1] with delta * I_gamma(w / delta) = 1/T."""
    if not T > SUBCRITICAL:
        raise DomainError("need T > sqrt(2 pi)")
    if not 0 < w <= 0.5:
        raise DomainError("need 0 < w <= 1/2")
    target = 1.0 / T
    gap = _GAUSS.eval(w) - target
    if abs(gap) <= 1e-12 * target:
        # w sits on the level set I_gamma(w) = 1/T up to rounding
        return 1.0
    if gap < 0:
        raise NoBracketError("I_gamma(w) < 1/T: no admissible delta")

    def resid(delta):
        return delta * _GAUSS.eval(min(w / delta, 1.0)) - target

    # delta * I_gamma(w / delta) increases in delta and vanishes at delta = w
    return find_root(resid, w * (1.0 + 1e-15), 1.0, Tolerances(abs_tol=1e-15, rel_tol=1e-15))


def v_v_plus(T: float) -> float:
    """sqrt(2 pi) / (2T): above it vertical walls are minimising (capped at 1/2)."""
    if not T > 0:
        raise DomainError("need T > 0")
    return min(SQRT_2PI / (2.0 * T), 0.5)


def lower_envelope(T: float, vbar: float) -> float:
    """C^{1,1} lower bound for the slab profile built from the scaled Gaussian profile."""
    if not T > SUBCRITICAL:
        raise DomainError("need T > sqrt(2 pi)")
    if not 0.0 <= vbar <= 1.0:
        raise DomainError("need 0 <= vbar <= 1")
    w = v_v_plus(T)
    delta = SQRT_2PI / T
    low = min(vbar, 1.0 - vbar)
    if low >= w:
        return 1.0 / T
    return delta * float(_GAUSS.eval(low / delta))


def _a_minus_at(T, vbar, v0, v1):
    i0, i1 = float(_GAUSS.eval(v0)), float(_GAUSS.eval(v1))
    lam = (i1 - i0) / (v1 - v0)
    ell = i0 + lam * (vbar - v0)
    return area_lower_bound(ell, v0, v1, T)


def a_minus(T: float, vbar: float, scan: int = 40) -> float:
    """Infimum of the unduloid area lower bound over chords straddling vbar.

    Coarse scan followed by nested bounded Brent searches (outer v1, inner
    v0). The boundary limits I_gamma(vbar) (v0, v1 -> vbar) and 1/T
    (v0 -> 0, v1 -> 1) are included.
    """
    if not 0.0 < vbar < 1.0:
        raise DomainError("need 0 < vbar < 1")
    if not T > 0:
        raise DomainError("need T > 0")
    best = min(float(_GAUSS.eval(vbar)), 1.0 / T)
    u = (np.arange(scan) + 0.5) / scan
    v0s = vbar * u
    v1s = vbar + (1.0 - vbar) * u
    table = np.array([[_a_minus_at(T, vbar, a, b) for a in v0s] for b in v1s])
    j, i = np.unravel_index(np.argmin(table), table.shape)
    best = min(best, float(table[j, i]))

    def inner(v1):
        lo = v0s[max(i - 1, 0)] if i > 0 else vbar * 1e-12
        hi = v0s[min(i + 1, scan - 1)] if i < scan - 1 else vbar * (1 - 1e-12)
        res = optimize.minimize_scalar(lambda a: _a_minus_at(T, vbar, a, v1),
                                       bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12 * max(vbar, 1e-300)})
        return float(res.fun)

    lo1 = v1s[max(j - 1, 0)] if j > 0 else vbar + (1 - vbar) * 1e-12
    hi1 = v1s[min(j + 1, scan - 1)] if j < scan - 1 else 1.0 - (1 - vbar) * 1e-12
    res = optimize.minimize_scalar(inner, bounds=(lo1, hi1), method="bounded",
                                   options={"xatol": 1e-12})
    return min(best, float(res.fun))


def v_v_plus_plus(T: float, tol: float = 1e-6) -> float:
    """Smallest vbar in (0, 1/2] at which the area lower bound reaches 1/T."""
    if not T > SUBCRITICAL:
        raise DomainError("need T > sqrt(2 pi)")
    target = 1.0 / T

    def reached(v):
        return a_minus(T, v) >= target * (1.0 - 1e-10)

    if not reached(0.5):
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if reached(mid):
            hi = mid
        else:
            lo = mid
    return hi


# --------------------------------------------------------------------------
# unduloid branch


_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)
_MILLS_SCALE = math.sqrt(math.pi / 2.0)
_TAIL_START = 4.0


def _mills(s):
    """Phi(s) / phi(s), finite for every s <= 37."""
    return _MILLS_SCALE * special.erfcx(-np.asarray(s, dtype=float) / math.sqrt(2.0))


def _scaled_mass_step(a, d):
    """(Phi(a + d) - Phi(a)) / phi(a + d) with d passed exactly."""
    s = a + d
    t = d[..., None] * (_GL16_X + 1.0) / 2.0
    with np.errstate(over="ignore", invalid="ignore"):
        short = d * np.sum(np.exp(s[..., None] * t - 0.5 * t * t) * _GL16_W, axis=-1) / 2.0
        ratio = np.exp(0.5 * d * (s + a))
        upper = _mills(-a) * ratio - _mills(-s)
        lower = _mills(s) - _mills(a) * ratio
    long_ = np.where((s >= 0) & (a >= 0), upper, lower)
    return np.where(np.abs(d) * (1.0 + np.abs(s) + np.abs(a)) <= 0.5, short, long_)


class GaussChord:
    """Chord of the Gaussian profile between heights s0 < s1, usable deep in the tail.

    All three integrands depend on the profile only through r = chord / phi(s)
    and q = 1 - r, which are formed from Mills ratios and exact offsets to the
    nearer endpoint. Nothing underflows, so s0 may be far below -38 where
    phi(s0) and Phi(s0) are zero in double precision. The lower tail is cut
    into pieces growing geometrically, which resolves the slowly decaying
    half-period weight (about lambda / |s|).
    """

    def __init__(self, s0: float, s1: float):
        if not s0 < s1:
            raise DomainError("chord needs s0 < s1")
        if s0 + s1 > 0:
            raise DomainError("GaussChord is built for s0 + s1 <= 0; reflect the pair")
        self.s0, self.s1 = float(s0), float(s1)
        self.lam = float(_DENSITY.density_diff(s1, s0)) / float(_DENSITY.cdf_diff(s1, s0))

    def edges(self) -> np.ndarray:
        s0, s1 = self.s0, self.s1
        length = s1 - s0
        pts = {s0, s1}
        for base, sign in ((s0, 1.0), (s1, -1.0)):
            step = 0.25 / (1.0 + abs(base))
            while step < length:
                pts.add(base + sign * step)
                step *= 4.0
        cut = -_TAIL_START
        while cut > s0:
            if cut < s1:
                pts.add(cut)
            cut *= 4.0
        return np.array(sorted(pts))

    def ratios(self, d0, d1):
        """(q, r) at the points s0 + d0 = s1 - d1."""
        picks = []
        for a, d in ((self.s0, d0), (self.s1, -d1)):
            with np.errstate(over="ignore", invalid="ignore"):
                e = 0.5 * d * (2.0 * a + d)
                mass = self.lam * _scaled_mass_step(np.full_like(d, a), d)
                q = -np.expm1(e) - mass
                r = np.exp(e) + mass
                mag = np.abs(np.expm1(e)) + np.abs(mass)
            ok = np.isfinite(mag) & np.isfinite(q) & np.isfinite(r)
            picks.append((np.where(ok, mag, np.inf), q, r))
        first = picks[0][0] <= picks[1][0]
        return np.where(first, picks[0][1], picks[1][1]), np.where(first, picks[0][2], picks[1][2])

    def _sums(self, edges, n):
        gx, gw = np.polynomial.legendre.leggauss(n)
        theta = (gx + 1.0) * math.pi / 4.0
        wt = gw * math.pi / 4.0
        st, ct = np.sin(theta), np.cos(theta)
        lo, hi = edges[:-1, None], edges[1:, None]
        width = hi - lo
        from_lo = theta <= math.pi / 4.0
        off_lo, off_hi = width * st * st, width * ct * ct
        s = np.where(from_lo, lo + off_lo, hi - off_hi).ravel()
        d0 = np.where(from_lo, (lo - self.s0) + off_lo, (hi - self.s0) - off_hi).ravel()
        d1 = np.where(from_lo, (self.s1 - lo) - off_lo, (self.s1 - hi) + off_hi).ravel()
        ds = (wt * 2.0 * width * st * ct).ravel()
        q, r = self.ratios(d0, d1)
        with np.errstate(invalid="ignore", divide="ignore"):
            base = np.where(q > 0, ds / np.sqrt(np.maximum(q, 0.0) * (2.0 - q)), 0.0)
        t_w = r * base
        return {
            "T": float(np.sum(t_w)),
            "V": float(np.sum(special.ndtr(s) * t_w)),
            "A": float(np.sum(np.exp(-0.5 * s * s) / SQRT_2PI * base)),
        }

    def integrals(self, rtol: float = 1e-13) -> dict:
        """Raw {'T', 'V', 'A'}: half-period, T * volume and T * area.

        ``rtol=None`` returns a single 16-point pass per piece, accurate to
        a few digits, which is what sign scans need.
        """
        edges = self.edges()
        if rtol is None:
            return self._sums(edges, 16)
        n, prev = 16, None
        while True:
            vals = self._sums(edges, n)
            if prev is not None:
                change = max(abs(vals[k] - prev[k]) / max(abs(vals[k]), 1e-300) for k in vals)
                if change <= rtol or n >= 256:
                    return vals
            prev, n = vals, 2 * n


def _raw(s0: float, s1: float, rtol: float = 1e-13) -> dict:
    """Chord integrals for any s0 < s1, reflecting pairs centred above zero."""
    if s0 + s1 <= 0:
        return GaussChord(s0, s1).integrals(rtol)
    out = GaussChord(-s1, -s0).integrals(rtol)
    return {"T": out["T"], "V": out["T"] - out["V"], "A": out["A"]}


def _integrals(s0: float, s1: float) -> dict:
    return _raw(s0, s1)


def _half_period_s(s0: float, s1: float, rtol: float = 1e-13) -> float:
    return _raw(s0, s1, rtol)["T"]


def _chord_slope(s0: float, s1: float) -> float:
    if s0 + s1 <= 0:
        return GaussChord(s0, s1).lam
    return -GaussChord(-s1, -s0).lam


# Curve tracing only seeds the final solve, so it runs at a looser tolerance.
_SCAN_RTOL = 1e-7


@dataclass
class UnduloidCurve:
    """Solutions of T(s0, s1) = T with s0 + s1 <= 0, traced along a grid of s1.

    ``branches`` lists arrays with columns (log(s1 - s0), s1, volume, area);
    every branch is a run of consecutive grid heights on which one root was
    followed continuously. Pairs centred above zero are the mirror images
    (s0, s1) -> (-s1, -s0).
    """

    T: float
    branches: list = field(default_factory=list)


def _roots_below(T: float, s1: float) -> list:
    """Gaps g with half-period T for the pair (s1 - g, s1), centred at or below 0.

    The gap is scanned on a logarithmic grid and every sign change refined by
    Brent's method, since the half-period is not monotone in the gap.
    """
    gaps = _GAPS[_GAPS >= 2.0 * s1]
    if s1 > 0:
        gaps = np.concatenate([[2.0 * s1], gaps])
    if gaps.size < 2:
        return []
    vals = np.array([_half_period_s(s1 - g, s1, None) - T for g in gaps])
    roots = []
    for k in range(len(gaps) - 1):
        if vals[k] == 0.0:
            roots.append(float(gaps[k]))
        elif vals[k] * vals[k + 1] < 0:
            lg = optimize.brentq(
                lambda x: _half_period_s(s1 - math.exp(x), s1, _SCAN_RTOL) - T,
                math.log(gaps[k]), math.log(gaps[k + 1]), xtol=1e-10)
            roots.append(math.exp(lg))
    return roots


@lru_cache(maxsize=32)
def _curve_cached(T: float) -> UnduloidCurve:
    rows = []
    for s1 in _S1_GRID:
        s1 = float(s1)
        for gap in _roots_below(T, s1):
            r = _raw(s1 - gap, s1, _SCAN_RTOL)
            rows.append((s1, math.log(gap), r["V"] / r["T"], r["A"] / r["T"]))
    return UnduloidCurve(T, _link_branches(rows))


def _link_branches(rows) -> list:
    """Group roots into branches by nearest continuation in log-gap."""
    by_s1: dict = {}
    for s1, lg, vol, ar in rows:
        by_s1.setdefault(s1, []).append((lg, vol, ar))
    heights = sorted(by_s1)
    step = float(_S1_GRID[1] - _S1_GRID[0])
    open_branches: list = []
    done: list = []
    prev_h = None
    for h in heights:
        current = sorted(by_s1[h])
        contiguous = prev_h is not None and abs(h - prev_h - step) < 1e-9
        taken = set()
        still_open = []
        if contiguous:
            for br in open_branches:
                last = br[-1][0]
                cands = [(abs(lg - last), k) for k, (lg, _, _) in enumerate(current)
                         if k not in taken and abs(lg - last) < 1.0]
                if cands:
                    _, k = min(cands)
                    taken.add(k)
                    lg, vol, ar = current[k]
                    br.append((lg, h, vol, ar))
                    still_open.append(br)
                else:
                    done.append(br)
        else:
            done.extend(open_branches)
        for k, (lg, vol, ar) in enumerate(current):
            if k not in taken:
                still_open.append([(lg, h, vol, ar)])
        open_branches = still_open
        prev_h = h
    done.extend(open_branches)
    return [np.array(b) for b in done]


def unduloid_curve(T: float) -> list:
    """Volume pairs (v0, v1) with half_period(gaussian, v0, v1) = T.

    The list is closed under (v0, v1) -> (1 - v1, 1 - v0). Pairs reaching
    deeper than about 38 standard deviations have v0 = 0.0 (or v1 = 1.0)
    after rounding; use unduloid_curve_heights for the exact heights.
    """
    return [(float(gauss_cdf(a)), float(gauss_cdf(b))) for a, b in unduloid_curve_heights(T)]


def unduloid_curve_heights(T: float) -> list:
    """The curve as height pairs (s0, s1), with v = Phi(s)."""
    if not T > 0:
        raise DomainError("need T > 0")
    out = []
    for br in _curve_cached(float(T)).branches:
        for lg, s1, _, _ in br:
            s0 = s1 - math.exp(lg)
            out.append((s0, s1))
            if s0 + s1 < 0:
                out.append((-s1, -s0))
    return out


def _solve_pair(T: float, vol: float, lg: float, s1: float):
    """Solve (half-period, volume) = (T, vol) in the variables (log gap, s1)."""

    def resid(x):
        g, b = math.exp(x[0]), x[1]
        if not (b - g) + b <= 0:
            return [1e3, 1e3]
        r = _integrals(b - g, b)
        return [(r["T"] - T) / T, (r["V"] / r["T"] - vol) / vol]

    # hybr often reports slow progress after it has already converged, so
    # the answer is judged by its residuals alone
    sol = optimize.root(resid, [lg, s1], method="hybr", options={"xtol": 1e-13})
    if not np.all(np.isfinite(sol.x)):
        return None
    g, b = math.exp(sol.x[0]), float(sol.x[1])
    a = b - g
    if not a + b <= 0:
        return None
    r = _integrals(a, b)
    if abs(r["T"] - T) > 1e-9 * T or abs(r["V"] / r["T"] - vol) > 1e-10 * vol:
        return None
    return a, b, r["A"] / r["T"]


def _unduloid_candidates(T: float, vbar: float) -> list:
    """(s0, s1, area) of unduloids with half-period T and volume vbar."""
    curve = _curve_cached(float(T))
    found = []
    # pairs are stored centred at or below zero; volume 1 - vbar reflects
    for target, mirrored in ((vbar, False), (1.0 - vbar, True)):
        for br in curve.branches:
            if len(br) < 2:
                continue
            vol = br[:, 2] - target
            for k in range(len(br) - 1):
                if vol[k] == 0 or vol[k] * vol[k + 1] < 0:
                    w = 0.0 if vol[k] == vol[k + 1] else vol[k] / (vol[k] - vol[k + 1])
                    seed = br[k, :2] + w * (br[k + 1, :2] - br[k, :2])
                    hit = _solve_pair(T, target, float(seed[0]), float(seed[1]))
                    if hit is None:
                        continue
                    a, b, ar = hit
                    found.append((-b, -a, ar) if mirrored else (a, b, ar))
    return found


def numeric_profile(T: float, vbar: float) -> ProfilePoint:
    """Least area among horizontal, vertical and unduloid sets of volume vbar.

    Ties go to the first of horizontal, vertical, unduloid. Volumes with no
    matching unduloid simply drop that candidate.
    """
    if not 0.0 < vbar < 1.0:
        raise DomainError("need 0 < vbar < 1")
    if not T > 0:
        raise DomainError("need T > 0")
    best = ProfilePoint(vbar, float(_GAUSS.eval(vbar)), "horizontal")
    vertical = 1.0 / T
    if vertical < best.area:
        best = ProfilePoint(vbar, vertical, "vertical")
    for s0, s1, ar in _unduloid_candidates(T, vbar):
        if ar < best.area:
            v0, v1 = float(gauss_cdf(s0)), float(gauss_cdf(s1))
            lam = _chord_slope(s0, s1)
            best = ProfilePoint(vbar, ar, "unduloid", (v0, v1, lam))
    return best


# --------------------------------------------------------------------------
# phase thresholds


def _bisect_kind(T, lo, hi, inside_is_lo: bool, kind: str, tol: float) -> float:
    """Boundary between lo (kind holds iff inside_is_lo) and hi."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        holds = numeric_profile(T, mid).kind == kind
        if holds == inside_is_lo:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def phase_report(T: float, tol: float = 1e-4, scan: int = 24) -> PhaseReport:
    """Regime, thresholds and numerical estimates of v_h and v_v for width T."""
    if not T > 0:
        raise DomainError("need T > 0")
    grid = np.linspace(0.5 / scan, 0.5, scan)
    kinds = [numeric_profile(T, v).kind for v in grid]

    horizontal = [k for k, kind in enumerate(kinds) if kind == "horizontal"]
    if not horizontal:
        v_h = 0.0
    elif horizontal[-1] == scan - 1:
        v_h = 0.5
    else:
        k = horizontal[-1]
        v_h = _bisect_kind(T, grid[k], grid[k + 1], True, "horizontal", tol)

    vertical = [k for k, kind in enumerate(kinds) if kind == "vertical"]
    if not vertical:
        v_v = 0.5
    elif vertical[0] == 0:
        v_v = _bisect_kind(T, 0.0, grid[0], False, "vertical", tol)
    else:
        k = vertical[0]
        v_v = _bisect_kind(T, grid[k - 1], grid[k], False, "vertical", tol)
    v_v = max(v_v, v_h)

    if T > SUBCRITICAL:
        vpp = v_v_plus_plus(T)
    else:
        vpp = 0.5
    return PhaseReport(float(T), v_v_plus(T), float(vpp), float(v_h), float(v_v), regime(T))


def profile_table(T: float, samples: int) -> list:
    """numeric_profile on an evenly spaced grid strictly inside (0, 1)."""
    grid = (np.arange(samples) + 1.0) / (samples + 1.0)
    return [numeric_profile(T, float(v)) for v in grid]


def inverse_gauss_profile(level: float) -> float:
    """I_gamma^{-1}(level) on (0, 1/2]."""
    return _inverse_profile(level)


def quantile(v: float) -> float:
    return float(gauss_quantile(v))
