import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import digamma as scipy_digamma

from slabiso import cube_nd
from slabiso.cube_nd import (
    VerdictND,
    conjecture_verdict,
    face_tube_area,
    induction_lhs,
    log_face_ratio,
    real_interval_monotone,
    refutation_report,
    unit_ball_volume,
    v_s,
)
from slabiso.errors import DomainError


class TestBallVolumes:
    def test_low_dimensions(self):
        assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-15)
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-15)
        assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, rel=1e-14)

    def test_decreasing_from_six(self):
        vals = [unit_ball_volume(k) for k in range(1, 40)]
        assert vals[5] > vals[6]
        assert all(a > b for a, b in zip(vals[5:], vals[6:]))
        # and increasing before the peak at k = 5
        assert all(a < b for a, b in zip(vals[:4], vals[1:5]))

    @pytest.mark.parametrize("k", range(3, 60))
    def test_recurrence(self, k):
        assert unit_ball_volume(k) == pytest.approx(
            2 * math.pi * unit_ball_volume(k - 2) / k, rel=1e-12)

    def test_large_dimension_stays_finite(self):
        assert 0 < unit_ball_volume(200) < 1e-100
        assert 0 < v_s(200)

    @pytest.mark.parametrize("k", [0, -1, 2.5, "3"])
    def test_domain(self, k):
        with pytest.raises(DomainError):
            unit_ball_volume(k)


class TestCornerVolume:
    def test_examples(self):
        assert v_s(1) == pytest.approx(1.0, rel=1e-15)
        assert v_s(2) == pytest.approx(math.pi / 4, rel=1e-15)
        assert v_s(4) == pytest.approx(math.pi**2 / 32, rel=1e-14)
        assert v_s(4) < 0.5

    def test_strictly_decreasing(self):
        vals = [v_s(k) for k in range(1, 21)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestFaceTubes:
    @given(st.floats(1e-6, 1.0))
    def test_slab(self, v):
        assert face_tube_area(1, v) == pytest.approx(1.0, rel=1e-14)

    @given(st.floats(1e-6, math.pi / 4))
    def test_cylinder(self, v):
        assert face_tube_area(2, v) == pytest.approx(math.sqrt(math.pi * v), rel=1e-14)

    @given(st.floats(1e-6, math.pi / 6))
    def test_sphere(self, v):
        expected = (9 * math.pi / 2) ** (1 / 3) * v ** (2 / 3)
        assert face_tube_area(3, v) == pytest.approx(expected, rel=1e-13)

    def test_volume_too_large(self):
        with pytest.raises(DomainError):
            face_tube_area(2, 0.8)
        with pytest.raises(DomainError):
            face_tube_area(3, 0.0)

    def test_full_tube_allowed(self):
        assert face_tube_area(4, v_s(4)) > 0


class TestVerdicts:
    def test_nine_fails(self):
        verdict = conjecture_verdict(9)
        assert not verdict.monotone_on_integers
        assert verdict.failure_witness is not None
        k = verdict.failure_witness
        assert verdict.values[k - 1] <= verdict.values[k]

    def test_ten_holds_on_integers_only(self):
        verdict = conjecture_verdict(10)
        assert verdict.monotone_on_integers and verdict.failure_witness is None
        assert not real_interval_monotone(10, 9.0, 10.0)

    def test_eleven_starts_the_induction(self):
        verdict = conjecture_verdict(11)
        assert verdict.monotone_on_integers
        assert verdict.induction_lhs > 1
        assert verdict.induction_lhs == pytest.approx(1.017, abs=5e-4)

    def test_induction_against_library_digamma(self):
        for n in range(2, 40):
            ref = math.log(2) + 0.5 * scipy_digamma(n / 2 + 1) - 0.5 * math.log(math.pi)
            assert induction_lhs(n) == pytest.approx(ref, rel=1e-13)

    def test_induction_increasing(self):
        vals = [induction_lhs(n) for n in range(2, 200)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("n", [4, 7, 10, 13, 20])
    def test_ratio_ordering_matches_areas(self, n):
        verdict = conjecture_verdict(n)
        logs = [log_face_ratio(k, n) for k in range(1, n + 1)]
        assert np.array_equal(np.argsort(verdict.values), np.argsort(logs))
        assert all((a > b) == (la > lb) for a, b, la, lb in
                   zip(verdict.values, verdict.values[1:], logs, logs[1:]))

    def test_ratio_is_area_over_corner_volume(self):
        # F(k, n) = 2 I^(k)(v_s(n)) / v_s(n)^((k-1)/k) up to the k-independent factor
        n = 12
        vol = v_s(n)
        for k in range(1, n + 1):
            direct = math.log(2 * face_tube_area(k, vol)) - (k - 1) / k * math.log(vol)
            assert direct - math.log(k) - cube_nd.log_unit_ball_volume(k) / k == pytest.approx(0, abs=1e-12)
            assert log_face_ratio(k, n) == pytest.approx(
                math.log(k) + (cube_nd.log_unit_ball_volume(k) - math.log(vol)) / k, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            conjecture_verdict(1)
        with pytest.raises(DomainError):
            refutation_report(9)

    def test_invariants(self):
        with pytest.raises(DomainError):
            VerdictND(3, True, None, [1.0, 0.5])
        with pytest.raises(DomainError):
            VerdictND(2, True, None, [1.0, 0.0])


class TestReport:
    def test_fifteen(self):
        report = refutation_report(15)
        assert [v.n for v in report] == list(range(2, 16))
        for v in report:
            assert v.monotone_on_integers == (v.n >= 10)
            assert len(v.values) == v.n
            if v.n >= 4:
                assert v_s(v.n) < 0.5

    def test_scales_to_large_dimension(self):
        report = refutation_report(120)
        assert all(v.monotone_on_integers for v in report if v.n >= 10)

    def test_json_and_csv(self):
        report = refutation_report(11)
        data = json.loads(cube_nd.report_json(report))
        assert data[-1]["n"] == 11 and data[-1]["monotone_on_integers"] is True
        assert set(data[0]) == {"n", "monotone_on_integers", "failure_witness", "values", "induction_lhs"}
        rows = list(csv.reader(io.StringIO(cube_nd.report_csv(report))))
        assert rows[0] == ["n", "k", "value"]
        assert len(rows) == 1 + sum(range(2, 12))
        assert float(rows[-1][2]) == report[-1].values[-1]
