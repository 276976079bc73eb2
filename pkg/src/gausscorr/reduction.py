"""From convex bodies to concave profiles, and from profiles to straight lines.

Two steps.  A planar convex body sliced along a direction ``u`` gives the
profile ``psi(t) = Phi^-1(mu_1(K cap H_t))``, which is concave.  A concave
profile on ``[a, b]`` is then replaced by the line ``m0 x + h0`` whose region
over ``[a, b]`` has the same Gaussian mass and x-moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gauss_core as gc
from .errors import BracketError, DomainError, InsufficientDataError
from .polygon import ConvexPolygon, random_polygon
from .profiles import ConcaveProfile, evaluate, functionals, line_mass, line_moment
from .quadrature import DEFAULT_TOL, expand_bracket, find_root

__all__ = [
    "ConvexPolygon", "random_polygon", "SampledProfile", "ConcavityReport",
    "LinearizationResult", "ehrhard_profile", "check_concavity",
    "mass_match_intercept", "linearize", "count_intersections",
]

INTERSECTION_TOL = 1e-9
ENDPOINT_TOL = 1e-8
SLOPE_LIMIT = 2.0 ** 40


# --- Ehrhard profile of a polygon ---------------------------------------------

@dataclass(frozen=True)
class SampledProfile:
    """``psi`` sampled on a grid; ``-inf`` where the slice is empty."""

    t: np.ndarray
    psi: np.ndarray
    direction: tuple[float, float] = (1.0, 0.0)

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.psi.tolist()))


def ehrhard_profile(polygon: ConvexPolygon, u=(1.0, 0.0), grid=None, n: int = 101) -> SampledProfile:
    """Sample ``psi(t) = Phi^-1(mu_1(K cap {<x, u> = t}))``.

    Slices come from exact edge intersections.  Without a ``grid``, ``n``
    points strictly inside the projection of ``K`` onto ``u`` are used.
    """
    u = np.asarray(u, dtype=float)
    norm = float(np.hypot(*u))
    if not norm > 0.0:
        raise DomainError("direction must be nonzero")
    u = u / norm
    if grid is None:
        lo, hi = polygon.projection(u)
        grid = np.linspace(lo, hi, n + 2)[1:-1]
    t = np.asarray(grid, dtype=float)
    weight = polygon.slice_measure(t, u)
    psi = np.where(weight > 0.0, gc.std_cdf_inv(np.clip(weight, 0.0, 1.0)), -math.inf)
    return SampledProfile(t, np.asarray(psi, dtype=float), (float(u[0]), float(u[1])))


@dataclass(frozen=True)
class ConcavityReport:
    concave: bool
    max_violation: float
    location: float
    tol: float
    samples_used: int


def check_concavity(samples, tol: float = 1e-6) -> ConcavityReport:
    """Discrete concavity test on ``(t, psi)`` samples.

    The violation at an interior sample is the increase in slope across it,
    scaled by ``1 + max(|slope|)`` so that steep flanks near the end of a
    support are judged on the same footing as flat parts.  ``-inf`` samples
    are allowed only at the ends (outside the support).
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("samples must be (t, psi) pairs")
    t, psi = arr[:, 0], arr[:, 1]
    if np.any(np.diff(t) <= 0.0):
        raise DomainError("sample locations must be strictly increasing")
    finite = np.isfinite(psi)
    if np.any(np.isposinf(psi)):
        raise DomainError("+inf samples are not supported; use ConcaveProfile.full")
    if finite.sum() < 3:
        raise InsufficientDataError(f"need at least 3 finite samples, got {int(finite.sum())}")
    idx = np.flatnonzero(finite)
    if idx[-1] - idx[0] + 1 != idx.size:
        # -inf strictly between finite values is not concave
        gap = idx[np.flatnonzero(np.diff(idx) > 1)[0]] + 1
        return ConcavityReport(False, math.inf, float(t[gap]), tol, int(idx.size))
    tt, pp = t[idx], psi[idx]
    slopes = np.diff(pp) / np.diff(tt)
    jump = np.diff(slopes)
    scale = 1.0 + np.maximum(np.abs(slopes[:-1]), np.abs(slopes[1:]))
    viol = jump / scale
    k = int(np.argmax(viol))
    worst = float(viol[k])
    return ConcavityReport(worst <= tol, worst, float(tt[k + 1]), tol, int(idx.size))


# --- Linearisation ------------------------------------------------------------

def mass_match_intercept(profile: ConcaveProfile, interval, m: float, tol: float = DEFAULT_TOL,
                         target_mass: float | None = None) -> float:
    """Intercept ``h`` with ``mass({a<=x<=b, y<=m x+h}) = mass(C_psi over [a, b])``.

    The line mass is strictly increasing in ``h`` from 0 to ``mu_1([a, b])``,
    so a bracket always exists once the target lies strictly inside.
    """
    a, b = (float(v) for v in interval)
    target = functionals(profile, (a, b), tol).mass if target_mass is None else float(target_mass)
    width = gc.gauss_interval(a, b)
    if not 0.0 < target < width:
        raise DomainError(f"target mass {target:.6g} not inside (0, {width:.6g})")

    def gap(h):
        return line_mass(m, h, a, b) - target

    centre = -m * 0.5 * (a + b) if math.isfinite(a + b) else 0.0
    lo, hi, _ = expand_bracket(gap, centre - 1.0, centre + 1.0)
    return find_root(gap, lo, hi, tol=1e-14).root


@dataclass(frozen=True)
class LinearizationResult:
    """The matching line ``m0 x + h0`` and the checks made on it."""

    m0: float
    h0: float
    mass_residual: float
    moment_residual: float
    intersections: list[float]
    interval: tuple[float, float]
    endpoint_ok: bool = True
    slope_ok: bool = True
    linear_input: bool = False
    bracket_trace: list = field(default_factory=list)

    @property
    def nonlinear_ok(self) -> bool:
        return self.linear_input or len(self.intersections) == 2

    def to_dict(self) -> dict:
        return {"m0": self.m0, "h0": self.h0 if math.isfinite(self.h0) else str(self.h0),
                "mass_residual": self.mass_residual, "moment_residual": self.moment_residual,
                "intersections": list(self.intersections), "interval": list(self.interval),
                "endpoint_ok": self.endpoint_ok, "slope_ok": self.slope_ok,
                "linear_input": self.linear_input}


def _sign(d: float, tol: float) -> int:
    return 1 if d > tol else (-1 if d < -tol else 0)


def count_intersections(profile: ConcaveProfile, m: float, h: float, a: float, b: float,
                        tol: float = INTERSECTION_TOL) -> list[float]:
    """Points in ``(a, b)`` where ``psi - (m x + h)`` changes sign or touches zero.

    The difference is scanned at ``a``, ``b``, the profile's nodes and the ends
    of its support (where ``psi`` jumps to ``-inf``).  A run of zeros counts
    once.
    """
    A, B = profile.support
    nodes = sorted({a, b, *(x for x in profile.xs if a < x < b), *(v for v in (A, B) if a < v < b)})
    seq: list[tuple[float, float]] = []
    for x in nodes:
        val = float(evaluate(profile, x)) - (m * x + h)
        if x == A and A > a:
            seq.append((x, -math.inf))
        seq.append((x, val))
        if x == B and B < b:
            seq.append((x, -math.inf))

    found: list[float] = []
    prev: tuple[float, float] | None = None
    prev_sign = 0
    zero_start: float | None = None
    for x, d in seq:
        s = _sign(d, tol)
        if s == 0:
            if zero_start is None:
                zero_start = x
            continue
        if zero_start is not None:
            found.append(zero_start)
            zero_start = None
        elif prev_sign and s != prev_sign and prev is not None:
            x1, d1 = prev
            if math.isinf(d1) or math.isinf(d) or x1 == x:
                found.append(x)
            else:
                found.append(x1 + d1 / (d1 - d) * (x - x1))
        prev, prev_sign = (x, d), s
    if zero_start is not None:
        found.append(zero_start)
    return [x for x in found if a < x < b]


def linearize(profile: ConcaveProfile, interval, tol: float = DEFAULT_TOL) -> LinearizationResult:
    """Line matching the Gaussian mass and x-moment of ``C_psi`` over ``[a, b]``.

    The outer unknown is the slope: the moment of the mass-matched region is
    below the target as ``m -> -inf`` and above it as ``m -> +inf``, so the
    bracket is grown from ``m = 0`` in powers of 2 until the gap changes sign.
    """
    a, b = (float(v) for v in interval)
    if not (a < b and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"need a finite interval a < b, got [{a}, {b}]")
    A, B = profile.support
    if profile.is_infinite and A <= a and B >= b:
        return LinearizationResult(0.0, math.inf, 0.0, 0.0, [], (a, b), linear_input=True)
    if profile.is_linear_on(a, b):
        m, h = profile.line_at(0.5 * (a + b))
        return LinearizationResult(m, h, 0.0, 0.0, [], (a, b), linear_input=True)

    target = functionals(profile, (a, b), tol)
    if not target.mass > 0.0:
        raise DomainError("profile is -inf on all of [a, b]")

    def h_of(m):
        return mass_match_intercept(profile, (a, b), m, tol, target.mass)

    def gap(m):
        return line_moment(m, h_of(m), a, b) - target.moment

    trace = []
    g0 = gap(0.0)
    trace.append((0.0, g0))
    if g0 == 0.0:
        lo = hi = 0.0
    else:
        step = 1.0
        direction = 1.0 if g0 < 0.0 else -1.0
        while True:
            m_try = direction * step
            g = gap(m_try)
            trace.append((m_try, g))
            if (g > 0.0) != (g0 > 0.0) or g == 0.0:
                lo, hi = sorted((0.0 if step == 1.0 else direction * step / 2.0, m_try))
                break
            step *= 2.0
            if step > SLOPE_LIMIT:
                raise BracketError(f"moment gap keeps its sign up to |m| = {SLOPE_LIMIT:g}", trace)
    m0 = lo if lo == hi else find_root(gap, lo, hi, tol=1e-13).root
    h0 = h_of(m0)
    mass_res = line_mass(m0, h0, a, b) - target.mass
    moment_res = line_moment(m0, h0, a, b) - target.moment

    psi_a, psi_b = float(evaluate(profile, a)), float(evaluate(profile, b))
    endpoint_ok = psi_a <= m0 * a + h0 + ENDPOINT_TOL and psi_b <= m0 * b + h0 + ENDPOINT_TOL
    # where psi(a) or psi(b) is -inf the endpoint lies outside the support and
    # the one-sided derivative there carries no constraint
    slope_ok = ((psi_a == -math.inf or m0 <= profile.right_derivative(a) + ENDPOINT_TOL)
                and (psi_b == -math.inf or m0 >= profile.left_derivative(b) - ENDPOINT_TOL))
    inter = count_intersections(profile, m0, h0, a, b)
    return LinearizationResult(m0, h0, mass_res, moment_res, inter, (a, b),
                               endpoint_ok, slope_ok, False, trace)
