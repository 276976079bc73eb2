"""Extremal regions, their free ends, the ratio functionals and the scans.

Boundary and intercept oracles were solved with mpmath at 30 digits by
root-finding on the moment integral computed with ``mp.quad``.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sci

from gausscorr import gauss_core as gc
from gausscorr.errors import DomainError, InfeasibleError, OutOfScopeError
from gausscorr.extremal import (R1, R2, ExtremalConfig, averaging_inequality_check, b_tilde,
                                boundary_for_centroid, dF1_dh, extend_support, f1, f_ratio,
                                final_case_check, final_case_geometry, h_star, h_tilde,
                                halfplane_average_check, halfplane_centroid, handoff_gap, log_grid,
                                r2_shift_check, run_scans, scan_f2, scan_lemma8, scan_lemma9)
from gausscorr.profiles import ConcaveProfile, Layer, centroid_x, line_mass, match_layer, random_profile
from gausscorr.reduction import linearize

H_TILDE_ORACLE = [
    ((1.0, 0.5), 0.2069771956558052640005),
    ((2.0, 0.2), 2.653528689738598427397),
    ((0.5, 1.0), -2.06200820061967264671),
]

BOUNDARY_ORACLE = [
    ((1.0, 0.0, -0.5), -0.043484523358598287486027),
    ((2.0, -1.0, -0.3), -0.102271788801271549283046),
]


def _moment_by_quad(m, h, lo, hi, c):
    pts = [-h / m] if m and lo < -h / m < hi else None
    val, _ = sci.quad(lambda x: (x - c) * gc.std_cdf(m * x + h) * gc.std_pdf(x), lo, hi,
                      epsabs=1e-14, epsrel=1e-13, limit=200, points=pts)
    return val


class TestBoundary:
    def test_vertical_strip_limit(self):
        assert b_tilde(1.0, -math.sqrt(2 / math.pi)) == pytest.approx(0.0, abs=1e-12)

    def test_zero_centroid_gives_infinite_end(self):
        assert b_tilde(1.0, 0.0) == math.inf

    def test_b_tilde_oracle(self):
        # -phi(B) / Phi(B) = -1
        assert b_tilde(0.0, -1.0) == pytest.approx(-0.302630840711572740852846, abs=1e-12)

    @pytest.mark.parametrize("args, expected", BOUNDARY_ORACLE)
    def test_oracle(self, args, expected):
        assert boundary_for_centroid(R1, *args) == pytest.approx(expected, abs=1e-12)

    def test_residual_by_independent_quadrature(self):
        B = boundary_for_centroid(R1, 1.0, 0.0, -0.5)
        assert abs(_moment_by_quad(1.0, 0.0, -math.inf, B, -0.5)) < 1e-10

    def test_r2_is_reflected_r1(self):
        A = boundary_for_centroid(R2, 1.0, 1.0, 0.5)
        assert A == pytest.approx(-boundary_for_centroid(R1, -1.0, 1.0, -0.5), abs=0)
        cfg = ExtremalConfig(R2, 1.0, 1.0, A, 0.5)
        assert abs(cfg.moment_residual()) < 1e-12

    def test_centroid_above_halfplane_is_infeasible(self):
        with pytest.raises(InfeasibleError):
            boundary_for_centroid(R1, 1.0, 0.0, halfplane_centroid(1.0, 0.0) + 0.1)

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            boundary_for_centroid("R3", 1.0, 0.0, 0.0)

    @given(st.floats(-3, 3), st.floats(-2, 3), st.floats(0.05, 2.0))
    @settings(max_examples=80, deadline=None)
    def test_solved_config_has_zero_moment(self, m, h, below):
        c = halfplane_centroid(m, h) - below
        cfg = ExtremalConfig.solve(R1, m, h, c)
        assert abs(cfg.moment_residual()) < 1e-11
        assert cfg.boundary > c


class TestSpecialIntercepts:
    @pytest.mark.parametrize("args, expected", H_TILDE_ORACLE)
    def test_h_tilde_oracle(self, args, expected):
        assert h_tilde(*args) == pytest.approx(expected, abs=1e-11)

    def test_h_tilde_edge_cases(self):
        assert h_tilde(1.0, -0.2) == math.inf
        assert h_tilde(0.0, 0.3) == -math.inf

    def test_h_tilde_makes_full_halfplane(self):
        m, c = 2.0, 0.2
        assert halfplane_centroid(m, h_tilde(m, c)) == pytest.approx(c, abs=1e-13)

    def test_h_star_hits_layer_end(self):
        m, c = 1.0, -0.3
        layer = match_layer(c, 0.4)
        hs = h_star(m, c, layer.b)
        assert boundary_for_centroid(R1, m, hs, c) == pytest.approx(layer.b, abs=1e-9)

    def test_h_star_needs_b_above_c(self):
        with pytest.raises(InfeasibleError):
            h_star(1.0, 0.2, 0.1)


class TestRatio:
    def test_zero_slope_is_gaussian_cdf(self):
        layer = match_layer(-0.3, 0.4)
        for h in (-1.0, 0.0, 2.0):
            B = boundary_for_centroid(R1, 0.0, h, layer.centroid)
            assert f1(0.0, h, layer) == pytest.approx(gc.std_cdf(B), abs=1e-12)

    def test_full_halfplane_limit(self):
        c = -0.3
        layer = match_layer(c, 0.5)
        cfg = ExtremalConfig(R1, 0.0, math.inf, b_tilde(0.0, c), c)
        assert f_ratio(cfg, layer) == pytest.approx(gc.std_cdf(b_tilde(0.0, c)), abs=1e-12)
        assert f_ratio(cfg, layer) <= 1.0

    def test_r2_full_halfplane_against_mpmath(self):
        # the half-plane centroid 0.916 is out of reach for w = 0.5, so the
        # layer is taken at c = 0.5 and the centroid check is switched off
        layer = match_layer(0.5, 0.5)
        cfg = ExtremalConfig(R2, 1.0, -1.0, -math.inf, halfplane_centroid(1.0, -1.0))
        val = f_ratio(cfg, layer, check_centroid=False)
        assert val == pytest.approx(0.742044863976052757929885, abs=1e-12)
        assert 0.0 < val <= 1.0
        with pytest.raises(DomainError):
            f_ratio(cfg, layer)

    def test_r1_must_cover_layer(self):
        layer = match_layer(-0.3, 0.4)
        cfg = ExtremalConfig(R1, 1.0, 0.0, layer.b - 0.5, -0.3)
        with pytest.raises(InfeasibleError):
            f_ratio(cfg, layer)

    @pytest.mark.parametrize("h", [0.0, 0.8, 2.0])
    def test_derivative_matches_finite_difference(self, h):
        layer = match_layer(-0.3, 0.4)
        m, d = 1.0, 1e-5
        fd = (f1(m, h + d, layer) - f1(m, h - d, layer)) / (2 * d)
        assert dF1_dh(m, h, layer) == pytest.approx(fd, rel=1e-5, abs=1e-9)


class TestScans:
    def test_boundary_constant_for_zero_slope(self):
        rep = scan_lemma8(R1, 0.0, -0.5, [-2.0, -1.0, 0.0, 1.0, 2.0])
        assert rep.passed
        assert max(abs(p.forward_difference) for p in rep.points[:-1]) < 1e-12

    def test_boundary_increasing(self):
        rep = scan_lemma8(R1, 1.0, -0.5, [-2, -1, 0, 1, 2, 4, 8])
        assert rep.passed and not rep.skipped
        assert rep.min_forward_difference >= 0.0

    def test_r2_branch(self):
        rep = scan_lemma8(R2, 1.0, 0.5)
        assert rep.points and rep.passed

    def test_ratio_constant_for_zero_slope(self):
        rep = scan_lemma9(0.0, -0.3, 0.4, [-1.0, 0.0, 1.0, 3.0])
        vals = [p.value for p in rep.points]
        assert np.ptp(vals) < 1e-12 and rep.passed

    def test_ratio_increasing_and_bounded(self):
        layer = match_layer(-0.3, 0.4)
        lo = h_star(1.0, -0.3, layer.b)
        rep = scan_lemma9(1.0, -0.3, 0.4, log_grid(lo, lo + 8.0, 9))
        assert len(rep.points) == 9
        assert rep.passed and rep.max_value <= 1.0

    def test_infeasible_layer_is_skipped(self):
        rep = scan_lemma9(1.0, 2.0, 0.9)
        assert rep.skipped and not rep.points and rep.passed

    def test_f2_bound(self):
        assert scan_f2(1.0, 0.2, 0.5).passed

    @pytest.mark.parametrize("m, c, w", [(1.0, 0.2, 0.5), (2.0, 0.5, 0.3), (0.5, 0.2, 0.1)])
    def test_handoff(self, m, c, w):
        assert handoff_gap(m, c, w) < 1e-9

    def test_small_grid_summary(self):
        summary = run_scans(ms=(0.0, 1.0), cs=(-0.5, 0.2), ws=(0.3, 0.7), n=7)
        assert summary.passed
        assert summary.to_dict()["passed"] is True


class TestShiftAndAveraging:
    def test_r2_shift(self):
        layer = match_layer(0.2, 0.5)
        rep = r2_shift_check(1.0, 0.0, layer, np.linspace(layer.a - 3, layer.a, 10))
        assert rep.ratio_nonincreasing and rep.mass_nondecreasing

    def test_r2_shift_rejects_points_inside_layer(self):
        layer = match_layer(0.2, 0.5)
        with pytest.raises(DomainError):
            r2_shift_check(1.0, 0.0, layer, [layer.a + 0.1])

    def test_square_uniform(self):
        rep = averaging_inequality_check(lambda x: x * x, np.ones_like, (-1, 1), (-0.5, 0.5))
        assert rep.outer_average == pytest.approx(1 / 3, abs=1e-12)
        assert rep.inner_average == pytest.approx(1 / 12, abs=1e-12)
        assert rep.status == "pass"

    def test_linear_equal_barycentres(self):
        rep = averaging_inequality_check(lambda x: 2 * x + 1, np.ones_like, (-2, 2), (-1, 1))
        assert rep.margin == pytest.approx(0.0, abs=1e-12)
        assert rep.status == "pass"

    def test_hypothesis_not_met(self):
        # weight piled on the left drags the outer barycentre below the inner one
        rep = averaging_inequality_check(lambda x: x, lambda x: np.exp(-5 * x), (-1, 1), (0.0, 1.0))
        assert rep.status == "hypothesis not met"

    def test_nesting_required(self):
        with pytest.raises(DomainError):
            averaging_inequality_check(np.abs, np.ones_like, (0, 1), (-1, 0.5))

    def test_ratio_scan_instance(self):
        # the convex g(y) = f(-y) weighted by the region density, as used for the F1 monotonicity
        m, h = 1.0, 0.3
        layer = match_layer(-0.3, 0.4)
        B = boundary_for_centroid(R1, m, h, layer.centroid)

        def rho(x):
            return gc.std_cdf(m * np.asarray(x) + h) * gc.std_pdf(np.asarray(x))

        rep = averaging_inequality_check(lambda y: gc.hazard(-np.asarray(y)), rho,
                                         (-math.inf, B), (layer.a, layer.b))
        assert rep.status in ("pass", "hypothesis not met")
        if rep.status == "pass":
            assert rep.margin >= -1e-9


class TestFinalCase:
    def test_geometry(self):
        geo = final_case_geometry(1.0, -1.0, -1.0)
        assert geo.h0 == pytest.approx(-1 / math.sqrt(2))
        assert geo.x0 == pytest.approx(1 - 1 / math.sqrt(2))
        assert geo.x1 < geo.x2

    def test_reduced_case(self):
        rep = final_case_check(1.0, -1.0, -1.0, 3.0)
        assert rep.passed and not rep.trivial
        assert abs(rep.reflection_gap) < 1e-12
        assert rep.reduced_margin >= 0 and rep.average_margin >= 0

    def test_direct_margin_by_quadrature(self):
        m, h, a, b = 1.0, -1.0, -1.0, 3.0
        num, _ = sci.quad(lambda x: gc.std_cdf(m * x + h) * gc.std_pdf(x), a, b, epsabs=1e-14)
        expected = num / gc.gauss_interval(a, b) - gc.std_cdf(h / math.sqrt(2))
        assert final_case_check(m, h, a, b).average_margin == pytest.approx(expected, abs=1e-12)

    def test_trivial_when_layer_right_of_x0(self):
        rep = final_case_check(1.0, -1.0, 0.5, 2.0)
        assert rep.trivial and rep.reduced_margin is None and rep.passed

    def test_out_of_scope_midpoint(self):
        with pytest.raises(OutOfScopeError):
            final_case_check(1.0, -1.0, -3.0, -1.0)

    @pytest.mark.parametrize("m, h", [(0.0, -1.0), (1.0, 0.5)])
    def test_domain(self, m, h):
        with pytest.raises(DomainError):
            final_case_check(m, h, -1.0, 1.0)

    def test_average_decrease(self):
        rep = halfplane_average_check(2.0, 0.3, np.linspace(0.05, 6, 60))
        assert rep.passed and rep.min_step >= 0

    def test_average_decrease_needs_nonnegative_intercept(self):
        with pytest.raises(DomainError):
            halfplane_average_check(1.0, -0.1, [1.0])


class TestExtension:
    def test_linear_profile_extends_to_its_own_region(self):
        p = ConcaveProfile.linear(0.5, 0.2)
        rep = extend_support(p, (0.5, 0.2), (-1.0, 1.0), centroid_x(p))
        assert rep.B0 == math.inf and rep.A0 < -7.0
        assert rep.left_line_mass == pytest.approx(rep.left_profile_mass, abs=1e-12)
        assert rep.right_line_mass == pytest.approx(rep.right_profile_mass, abs=1e-12)

    def test_symmetric_tent(self):
        tent = ConcaveProfile((-3.0, 3.0), ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)))
        res = linearize(tent, (-1.0, 1.0))
        rep = extend_support(tent, (res.m0, res.h0), (-1.0, 1.0), 0.0)
        assert rep.B0 - 1.0 == pytest.approx(-1.0 - rep.A0, abs=1e-10)
        assert rep.mass_ok and abs(rep.centroid_residual) < 1e-12

    def test_random_profiles_gain_mass(self):
        checked = 0
        for seed in range(40):
            p = random_profile(seed)
            c = centroid_x(p)
            a, b = max(p.support[0], c - 0.8), min(p.support[1], c + 0.8)
            if not a < c < b:
                continue
            res = linearize(p, (a, b))
            rep = extend_support(p, (res.m0, res.h0), (a, b), c)
            assert rep.mass_ok
            assert abs(rep.centroid_residual) < 1e-9
            checked += 1
        assert checked >= 20

    def test_centroid_outside_interval(self):
        with pytest.raises(DomainError):
            extend_support(ConcaveProfile.full(), (0.0, 1.0), (0.5, 1.0), 0.0)


def test_layer_strip_mass():
    cfg = ExtremalConfig.solve(R1, 1.0, 0.0, -0.5)
    layer = Layer.from_bounds(-1.0, -0.2)
    assert cfg.strip_mass(layer.a, layer.b) == pytest.approx(line_mass(1.0, 0.0, -1.0, -0.2), abs=1e-15)
