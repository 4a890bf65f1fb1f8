import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from slabiso.errors import DomainError
from slabiso.profile import (
    TORUS_KINK,
    TORUS_KINK_HI,
    bobkov_density,
    conjectured_profile_q3,
    gaussian_density,
    gaussian_profile,
    load_profile,
    profile_by_name,
    torus2_profile,
    torus_density,
)

TORUS = torus2_profile()
GAUSS = gaussian_profile()
BUILTINS = [TORUS, GAUSS]
GRID = np.linspace(0.0, 1.0, 1001)


def _normal_pdf(s):
    return math.exp(-0.5 * s * s) / math.sqrt(2 * math.pi)


class TestTorusProfile:
    def test_values(self):
        assert TORUS.eval(1 / math.pi) == pytest.approx(1.0, abs=1e-15)
        assert TORUS.eval(4 * math.pi / 81) == pytest.approx(2 * math.pi / 9, rel=1e-15)
        assert TORUS.eval(0.0) == 0.0

    def test_matches_three_branch_minimum(self):
        v = GRID
        expected = np.minimum(np.minimum(np.sqrt(math.pi * v), 1.0), np.sqrt(math.pi * (1 - v)))
        assert np.max(np.abs(TORUS.eval(v) - expected)) <= 1e-15

    def test_singular_set_is_exact(self):
        assert TORUS.singular_set == (1 / math.pi, 1 - 1 / math.pi)
        assert TORUS_KINK == 1 / math.pi and TORUS_KINK_HI == 1 - 1 / math.pi

    def test_zones_cover_unit_interval(self):
        zones = TORUS.zones
        assert zones[0][0] == 0.0 and zones[-1][1] == 1.0
        assert all(a[1] == b[0] for a, b in zip(zones, zones[1:]))

    def test_one_sided_derivatives_at_kink(self):
        k = 1 / math.pi
        assert TORUS.deriv1(k, side=-1) == pytest.approx(math.pi / 2, rel=1e-12)
        assert TORUS.deriv1(k, side=1) == 0.0


class TestGaussianProfile:
    def test_half(self):
        assert GAUSS.eval(0.5) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)

    @pytest.mark.parametrize("v", [k / 10 for k in range(1, 10)])
    def test_second_order_identity(self, v):
        assert GAUSS.eval(v) * GAUSS.deriv2(v) == pytest.approx(-1.0, rel=1e-12)

    def test_symmetry_example(self):
        assert GAUSS.eval(0.25) == pytest.approx(GAUSS.eval(0.75), abs=1e-15)

    @pytest.mark.parametrize("v", [0.05, 0.3, 0.6])
    def test_first_derivative_against_finite_difference(self, v):
        h = 1e-6
        fd = (GAUSS.eval(v + h) - GAUSS.eval(v - h)) / (2 * h)
        assert GAUSS.deriv1(v) == pytest.approx(fd, rel=1e-7)


@pytest.mark.parametrize("p", BUILTINS, ids=lambda p: p.name)
class TestProfileInvariants:
    def test_symmetric(self, p):
        assert np.max(np.abs(p.eval(GRID) - p.eval(1 - GRID))) <= 1e-14

    def test_endpoints_and_positivity(self, p):
        assert p.eval(0.0) == 0.0 and p.eval(1.0) == 0.0
        assert np.all(p.eval(GRID[1:-1]) > 0)

    def test_concave_on_grid(self, p):
        vals = p.eval(GRID)
        second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
        assert np.all(second <= 1e-14)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_chord_below_profile(self, p, a, b, w):
        v0, v1 = sorted((a, b))
        v = v0 + w * (v1 - v0)
        line = p.eval(v0) + w * (p.eval(v1) - p.eval(v0))
        assert line <= p.eval(v) + 1e-14

    def test_density_round_trip(self, p):
        d = p.density
        v = np.linspace(0.01, 0.99, 99)
        assert np.max(np.abs(d.cdf(d.quantile(v)) - v)) <= 1e-9

    def test_density_is_profile_of_cdf(self, p):
        d = p.density
        s = np.linspace(-0.8, 0.8, 161) if p is TORUS else np.linspace(-6, 6, 161)
        assert np.max(np.abs(p.eval(d.cdf(s)) - d.density(s))) <= 1e-10

    def test_density_even_and_log_concave(self, p):
        d = p.density
        s = np.linspace(-0.8, 0.8, 401) if p is TORUS else np.linspace(-8, 8, 401)
        phi = d.density(s)
        assert np.max(np.abs(phi - d.density(-s))) <= 1e-12
        logs = np.log(phi)
        assert np.all(logs[1:-1] >= 0.5 * (logs[:-2] + logs[2:]) - 1e-12)

    def test_density_has_unit_mass(self, p):
        d = p.density
        r = min(d.support_radius, 40.0)
        pts = [x for x in d.sing_points if -r < x < r]
        mass, _ = integrate.quad(d.density, -r, r, points=pts or None, epsabs=1e-13, limit=200)
        assert mass == pytest.approx(1.0, abs=1e-10)


class TestBobkovDensity:
    def test_torus_centre_and_support(self):
        d = bobkov_density(TORUS)
        assert d.density(0.0) == pytest.approx(1.0, abs=1e-12)
        assert d.support_radius == pytest.approx(0.5 + 1 / math.pi, abs=1e-10)

    def test_torus_matches_piecewise_linear_density(self):
        # the density is 1 on the middle band and falls linearly to 0 at the edge
        d = bobkov_density(TORUS)
        ref = torus_density()
        s = np.linspace(-0.8, 0.8, 97)
        assert np.max(np.abs(d.density(s) - ref.density(s))) <= 1e-9
        middle = 0.5 - 1 / math.pi
        assert np.all(np.abs(ref.density(np.linspace(-middle, middle, 11)) - 1.0) <= 1e-15)

    @pytest.mark.parametrize("s", [0.0, 1.0, 2.0])
    def test_gaussian_recovers_normal_density(self, s):
        d = bobkov_density(GAUSS)
        assert d.density(s) == pytest.approx(_normal_pdf(s), abs=1e-9)
        assert d.support_radius == math.inf

    def test_closed_form_densities(self):
        g = gaussian_density()
        assert g.cdf(1.0) - g.cdf(-1.0) == pytest.approx(0.6826894921370859, abs=1e-15)
        assert torus_density().cdf(0.0) == 0.5

    def test_cdf_diff_is_cancellation_free(self):
        g = gaussian_density()
        assert g.cdf_diff(5.0 + 1e-9, 5.0) == pytest.approx(_normal_pdf(5.0) * 1e-9, rel=1e-6)


class TestConjecturedProfile:
    def test_junction_values(self):
        assert conjectured_profile_q3(1.0, 4 * math.pi / 81) == pytest.approx(2 * math.pi / 9, rel=1e-14)
        assert conjectured_profile_q3(1.0, 1 - 1 / math.pi) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("beta", [0.2, 0.5, 1.0])
    def test_half_volume(self, beta):
        assert conjectured_profile_q3(beta, 0.5) == 1.0

    @pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
    def test_concave(self, beta):
        vals = conjectured_profile_q3(beta, GRID)
        assert np.all(vals[:-2] - 2 * vals[1:-1] + vals[2:] <= 1e-14)

    @pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
    def test_branch_crossovers(self, beta):
        sphere_end = 4 * math.pi / 81 * beta**2
        sphere = (9 * math.pi / (2 * beta)) ** (1 / 3) * sphere_end ** (2 / 3)
        assert sphere == pytest.approx(math.sqrt(math.pi * sphere_end), abs=1e-12)
        assert conjectured_profile_q3(beta, sphere_end) == pytest.approx(sphere, abs=1e-12)
        # cylinder sqrt(pi v) reaches the plane level 1 at v = 1/pi
        assert conjectured_profile_q3(beta, 1 / math.pi) == pytest.approx(1.0, abs=1e-12)
        assert conjectured_profile_q3(beta, 1 / math.pi - 1e-6) < 1.0

    @given(st.floats(0.05, 1.0), st.floats(0.0, 1.0))
    def test_symmetric_and_bounded(self, beta, v):
        val = conjectured_profile_q3(beta, v)
        assert val == pytest.approx(conjectured_profile_q3(beta, 1 - v), abs=1e-14)
        assert 0.0 <= val <= 1.0

    def test_domain(self):
        with pytest.raises(DomainError):
            conjectured_profile_q3(0.0, 0.2)
        with pytest.raises(DomainError):
            conjectured_profile_q3(1.5, 0.2)


class TestLoading:
    def test_by_name(self):
        assert profile_by_name("torus2").eval(0.5) == 1.0
        assert profile_by_name("gaussian").eval(0.5) == GAUSS.eval(0.5)

    def test_piecewise_from_json(self, tmp_path):
        # breakpoints describe [0, 1/2]; the rest follows by symmetry
        spec = {"name": "tent", "kind": "piecewise", "breakpoints": [[0, 0], [0.5, 1]]}
        path = tmp_path / "tent.json"
        path.write_text(json.dumps(spec))
        p = load_profile(path)
        assert p.eval(0.25) == pytest.approx(0.5, abs=1e-15)
        assert load_profile(json.dumps(spec)).eval(0.75) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_non_concave(self):
        spec = {"kind": "piecewise", "breakpoints": [[0, 0], [0.25, 0.1], [0.5, 1]]}
        with pytest.raises(DomainError):
            load_profile(spec)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            load_profile({"kind": "sphere"})
