"""Unit cube in high dimension: face-tube neighbourhoods and the failure of the
natural "tube around a face" conjecture for n >= 10.

A tube of radius r <= 1 around an (n - k)-dimensional face of [0, 1]^n has
volume omega_k r^k / 2^k and boundary area k omega_k r^(k-1) / 2^k. At the volume
of the unit corner ball, v_s(n), the corner tube (k = n) is the cheapest of all
tubes once n >= 10, while no tube family is cheapest for n between 4 and 9 in
the ordered sense checked here.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import CertificationError, DomainError
from .special_fn import digamma

STRICT_MARGIN = 1e-12


@dataclass(frozen=True)
class VerdictND:
    n: int
    monotone_on_integers: bool
    failure_witness: int | None
    values: list = field(default_factory=list)
    induction_lhs: float = 0.0

    def __post_init__(self):
        if len(self.values) != self.n or any(not val > 0 for val in self.values):
            raise DomainError("values must hold n positive areas")

    def as_dict(self) -> dict:
        return asdict(self)


def _check_dim(k) -> None:
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise DomainError("dimension must be a positive integer")


def log_unit_ball_volume(k: float) -> float:
    """log of omega_k = pi^(k/2) / Gamma(k/2 + 1); k may be real."""
    if not k > 0:
        raise DomainError("dimension must be positive")
    return 0.5 * k * math.log(math.pi) - float(gammaln(0.5 * k + 1.0))


def unit_ball_volume(k: int) -> float:
    _check_dim(k)
    return math.exp(log_unit_ball_volume(k))


def v_s(k: int) -> float:
    """Volume fraction of the unit ball around a vertex of the unit cube, omega_k / 2^k."""
    _check_dim(k)
    return math.exp(log_unit_ball_volume(k) - k * math.log(2.0))


def face_tube_area(k: int, v: float) -> float:
    """Boundary area of the tube around a codimension-k face enclosing volume v."""
    _check_dim(k)
    if not 0 < v <= v_s(k) * (1.0 + 1e-15):
        raise DomainError(f"volume {v} exceeds the largest tube of codimension {k}")
    log_area = math.log(k / 2.0) + log_unit_ball_volume(k) / k + (k - 1) / k * math.log(v)
    return math.exp(log_area)


def log_face_ratio(k: float, n: int) -> float:
    """log F(k, n) with F(k, n) = 2^(n/k) k (omega_k / omega_n)^(1/k); k may be real."""
    return (n / k) * math.log(2.0) + math.log(k) + (
        log_unit_ball_volume(k) - log_unit_ball_volume(n)
    ) / k


def induction_lhs(n: float) -> float:
    """log 2 + (d/dn) log Gamma(n/2 + 1) - (1/2) log pi; exceeding 1 propagates the decrease."""
    return math.log(2.0) + 0.5 * float(digamma(0.5 * n + 1.0)) - 0.5 * math.log(math.pi)


def _first_violation(values) -> int | None:
    for k in range(len(values) - 1):
        if not values[k] > values[k + 1] * (1.0 + STRICT_MARGIN):
            return k + 1
    return None


def conjecture_verdict(n: int) -> VerdictND:
    """Whether k -> tube area at volume v_s(n) decreases strictly over k = 1..n."""
    _check_dim(n)
    if n < 2:
        raise DomainError("n must be at least 2")
    vol = v_s(n)
    values = [face_tube_area(k, vol) for k in range(1, n + 1)]
    witness = _first_violation(values)
    return VerdictND(n, witness is None, witness, values, induction_lhs(n))


def real_interval_monotone(n: int, lo: float, hi: float, samples: int = 2001) -> bool:
    """Strict decrease of k -> F(k, n) on a fine sample of the real interval [lo, hi]."""
    ks = np.linspace(lo, hi, samples)
    logs = np.array([log_face_ratio(float(k), n) for k in ks])
    return bool(np.all(np.diff(logs) < 0))


def refutation_report(n_max: int) -> list:
    """Verdicts for n = 2..n_max, checking decrease for n >= 10 and the induction step from 11.

    Raises:
        CertificationError: some n >= 10 is not monotone or the induction quantity fails.
    """
    if n_max < 10:
        raise DomainError("n_max must be at least 10")
    report = [conjecture_verdict(n) for n in range(2, n_max + 1)]
    for verdict in report:
        if verdict.n >= 10 and not verdict.monotone_on_integers:
            raise CertificationError(f"tube areas are not decreasing for n = {verdict.n}")
        if verdict.n >= 11 and not verdict.induction_lhs > 1:
            raise CertificationError(f"induction step fails at n = {verdict.n}")
    return report


def report_json(report: list) -> str:
    return json.dumps([v.as_dict() for v in report], indent=2, default=_json_float)


def report_csv(report: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "k", "value"])
    for verdict in report:
        for k, val in enumerate(verdict.values, start=1):
            writer.writerow([verdict.n, k, format(val, ".17g")])
    return buf.getvalue()


def _json_float(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
