"""Polygons, Ehrhard profiles, concavity checks and the mass-and-moment linearisation.

The triangle values come from mpmath quadrature of the slice measure at 30
digits.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sci

from gausscorr import gauss_core as gc
from gausscorr.errors import DomainError, InsufficientDataError
from gausscorr.polygon import ConvexPolygon, random_polygon
from gausscorr.profiles import ConcaveProfile, functionals, line_mass, line_moment, random_profile
from gausscorr.reduction import (check_concavity, count_intersections, ehrhard_profile, linearize,
                                 mass_match_intercept)

TRIANGLE = ConvexPolygon(((-0.5, -0.3), (1.5, -0.3), (-0.5, 1.2)))
TRIANGLE_MASS = 0.1974427829148544445379
TRIANGLE_MOMENT = (0.02593521105253345577856, 0.03677199214322874384389)


def random_interval(rng, profile):
    """Interval inside the support, sometimes sticking out by up to 1."""
    A, B = profile.support
    lo = max(A, -2.0)
    hi = min(B, 2.0)
    a, b = np.sort(rng.uniform(lo, hi, 2))
    if rng.random() < 0.3:
        a -= rng.uniform(0, 1)
    if rng.random() < 0.3:
        b += rng.uniform(0, 1)
    if b - a < 0.05:
        b = a + 0.05
    return float(a), float(b)


class TestConvexPolygon:
    def test_mass_and_moment_oracle(self):
        assert TRIANGLE.gaussian_mass() == pytest.approx(TRIANGLE_MASS, abs=1e-15)
        np.testing.assert_allclose(TRIANGLE.gaussian_moment(), TRIANGLE_MOMENT, atol=1e-15)

    def test_box_factorises(self):
        box = ConvexPolygon.box(-1.0, 2.0, -0.5, 0.3)
        expected = gc.gauss_interval(-1.0, 2.0) * gc.gauss_interval(-0.5, 0.3)
        assert box.gaussian_mass() == pytest.approx(expected, abs=1e-15)

    def test_fan_agrees_with_slices(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            poly = random_polygon(rng)
            lo, hi = poly.projection((1.0, 0.0))
            xs_mass, _ = sci.quad(lambda t: float(poly.slice_measure(t)[0]) * gc.std_pdf(t), lo, hi,
                                  epsabs=1e-14, limit=200, points=[v[0] for v in poly.vertices])
            assert poly.gaussian_mass() == pytest.approx(xs_mass, abs=1e-12)

    def test_rejects_nonconvex_or_clockwise(self):
        with pytest.raises(DomainError):
            ConvexPolygon(((0, 0), (0, 1), (1, 0)))
        with pytest.raises(DomainError):
            ConvexPolygon(((0, 0), (1, 0), (2, 0)))
        with pytest.raises(DomainError):
            ConvexPolygon.from_dict({"vertices": [[0, 0], [2, 0], [1, 0.2], [1, 2]]})

    def test_contains_and_translate(self):
        inside = TRIANGLE.contains(np.array([[0.0, 0.0], [1.4, 1.0]]))
        assert inside.tolist() == [True, False]
        moved = TRIANGLE.translate((1.0, 2.0))
        assert moved.vertices[0] == (0.5, 1.7)

    def test_slices_miss(self):
        y1, y2 = TRIANGLE.slices([5.0, 0.0])
        assert math.isnan(y1[0]) and y1[1] == pytest.approx(-0.3) and y2[1] == pytest.approx(0.825)
        assert TRIANGLE.slice_measure([5.0])[0] == 0.0

    def test_intersection(self):
        a = ConvexPolygon.box(0, 2, 0, 2)
        b = ConvexPolygon.box(1, 3, 1, 3)
        inter = a.intersection(b)
        assert inter.gaussian_mass() == pytest.approx(ConvexPolygon.box(1, 2, 1, 2).gaussian_mass(), abs=1e-15)
        assert a.intersection(ConvexPolygon.box(5, 6, 5, 6)) is None

    def test_dict_roundtrip(self):
        assert ConvexPolygon.from_dict(TRIANGLE.to_dict()).gaussian_mass() == pytest.approx(TRIANGLE_MASS)


class TestEhrhardProfile:
    def test_square(self):
        sq = ConvexPolygon.box(-1.0, 1.0, -1.0, 1.0)
        prof = ehrhard_profile(sq, (1.0, 0.0), np.linspace(-0.9, 0.9, 7))
        np.testing.assert_allclose(prof.psi, 0.4752328492470835786672, atol=1e-13)

    def test_halfplane_in_large_box(self):
        big = ConvexPolygon.box(-50.0, 50.0, -50.0, 0.7)
        prof = ehrhard_profile(big, (1.0, 0.0), np.linspace(-3, 3, 5))
        np.testing.assert_allclose(prof.psi, 0.7, atol=1e-12)

    def test_empty_slices_are_minus_inf(self):
        prof = ehrhard_profile(TRIANGLE, (1.0, 0.0), [-2.0, 0.0, 3.0])
        assert prof.psi[0] == -math.inf and prof.psi[2] == -math.inf and np.isfinite(prof.psi[1])

    def test_direction_normalised(self):
        p1 = ehrhard_profile(TRIANGLE, (2.0, 2.0), [0.1])
        p2 = ehrhard_profile(TRIANGLE, (1.0, 1.0), [0.1])
        assert p1.psi[0] == p2.psi[0]

    def test_random_polygons_are_concave(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            poly = random_polygon(rng)
            theta = rng.uniform(0, 2 * math.pi)
            prof = ehrhard_profile(poly, (math.cos(theta), math.sin(theta)))
            assert check_concavity(prof.pairs(), 1e-6).concave


class TestCheckConcavity:
    t = np.linspace(-2, 2, 41)

    def test_linear(self):
        rep = check_concavity(np.column_stack([self.t, 3 * self.t + 1]))
        assert rep.concave and abs(rep.max_violation) < 1e-14

    def test_concave_parabola(self):
        rep = check_concavity(np.column_stack([self.t, -self.t ** 2]))
        assert rep.concave and rep.max_violation <= 0

    def test_convex_parabola_detected(self):
        rep = check_concavity(np.column_stack([self.t, self.t ** 2]))
        assert not rep.concave and rep.max_violation > 0

    def test_inner_minus_inf_is_violation(self):
        psi = -self.t ** 2
        psi[20] = -math.inf
        assert check_concavity(np.column_stack([self.t, psi])).max_violation == math.inf

    def test_too_few_samples(self):
        with pytest.raises(InsufficientDataError):
            check_concavity([(0, 1), (1, 2)])


class TestMassMatch:
    def test_linear_fixed_point(self):
        prof = ConcaveProfile.linear(0.8, -0.3)
        assert mass_match_intercept(prof, (-1, 1.5), 0.8) == pytest.approx(-0.3, abs=1e-12)

    def test_constant(self):
        prof = ConcaveProfile.constant(0.4)
        assert mass_match_intercept(prof, (-1, 1), 0.0) == pytest.approx(0.4, abs=1e-12)

    def test_random_residual(self):
        for seed in range(20):
            prof = random_profile(seed)
            a, b = random_interval(np.random.default_rng(seed), prof)
            h = mass_match_intercept(prof, (a, b), 1.0)
            assert line_mass(1.0, h, a, b) == pytest.approx(functionals(prof, (a, b), 1e-13).mass, abs=1e-10)


class TestLinearize:
    def test_linear_input(self):
        res = linearize(ConcaveProfile.linear(-0.7, 0.2), (-1.0, 2.0))
        assert (res.m0, res.h0) == pytest.approx((-0.7, 0.2))
        assert res.mass_residual == 0.0 and res.linear_input

    def test_symmetric_tent(self):
        tent = ConcaveProfile((-1.0, 1.0), ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)))
        res = linearize(tent, (-1.0, 1.0))
        assert res.m0 == pytest.approx(0.0, abs=1e-10)
        target = functionals(tent, (-1.0, 1.0)).mass
        assert gc.std_cdf(res.h0) * gc.gauss_interval(-1, 1) == pytest.approx(target, abs=1e-10)
        assert len(res.intersections) == 2

    def test_full_profile(self):
        res = linearize(ConcaveProfile.full(), (-1.0, 1.0))
        assert res.h0 == math.inf

    def test_rejects_bad_interval(self):
        with pytest.raises(DomainError):
            linearize(ConcaveProfile.linear(1, 0), (1.0, -1.0))

    @given(st.integers(0, 2 ** 31 - 1))
    @settings(max_examples=60, deadline=None)
    def test_random_profiles(self, seed):
        prof = random_profile(seed, pieces=1 + seed % 4)
        a, b = random_interval(np.random.default_rng(seed), prof)
        res = linearize(prof, (a, b))
        fn = functionals(prof, (a, b), 1e-12)
        assert abs(line_mass(res.m0, res.h0, a, b) - fn.mass) <= 1e-8
        assert abs(line_moment(res.m0, res.h0, a, b) - fn.moment) <= 1e-8
        assert res.endpoint_ok and res.slope_ok and res.nonlinear_ok

    def test_intersections_of_tent_and_chord(self):
        tent = ConcaveProfile((-2.0, 2.0), ((-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)))
        pts = count_intersections(tent, 0.0, 0.5, -1.5, 1.5)
        assert pts == pytest.approx([-0.5, 0.5])
