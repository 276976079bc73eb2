"""Extremal half-plane configurations and the checks that bound them.

``R1(h, B) = {x <= B, y <= m x + h}`` and ``R2(h, A) = {x >= A, y <= m x + h}``.
For a centroid ``c`` the free end (``B`` or ``A``) is fixed by requiring the
Gaussian x-barycentre of the region to be ``c``.  Every planar integral here is
a one-dimensional integral of ``(x - c) Phi(m x + h)`` against ``mu_1``,
evaluated in closed form from ``line_mass`` and ``line_moment``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import gauss_core as gc
from .errors import (DomainError, GaussCorrError, InfeasibleError,
                     OutOfScopeError)
from .profiles import (ConcaveProfile, Layer, functionals, line_density, line_mass,
                       line_moment, match_layer)
from .quadrature import DEFAULT_TOL, expand_bracket, find_root, integrate, integrate_gauss

R1 = "R1"
R2 = "R2"
BOUNDARY_CAP = 40.0
GRID_POINTS = 17
DEFAULT_M = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_C = (-1.0, -0.5, -0.2, 0.0, 0.2, 0.5, 1.0)
DEFAULT_W = (0.1, 0.3, 0.5, 0.7, 0.9)
# Smallest half-plane mass Phi(h / r) admitted on scan grids: below it the
# centroid equation loses relative accuracy to absolute rounding.
MIN_HALFPLANE_MASS = 1e-4


class InvariantError(GaussCorrError):
    """A property that holds by construction failed; indicates a bug."""


def _clean(v: float):
    return v if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))


# --- moments of R1 --------------------------------------------------------------

def _n1(m: float, h: float, c: float, B: float) -> float:
    """Signed moment ``int_{-inf}^B (x - c) Phi(m x + h) dmu_1``."""
    return line_moment(m, h, -math.inf, B) - c * line_mass(m, h, -math.inf, B)


def halfplane_centroid(m: float, h: float) -> float:
    """x-barycentre of ``{y <= m x + h}``; 0 for the whole plane."""
    if h == math.inf:
        return 0.0
    if h == -math.inf:
        raise DomainError("the empty half-plane has no centroid")
    r = math.hypot(1.0, m)
    return m / r * gc.hazard(-h / r)


def _r1_boundary(m: float, h: float, c: float, tol: float) -> float:
    if h == -math.inf:
        raise InfeasibleError("empty region: h = -inf")
    c_full = halfplane_centroid(m, h)
    if c > c_full:
        raise InfeasibleError(
            f"centroid {c} exceeds the full half-plane centroid {c_full:.6g} (limit B = +inf)")
    if math.isclose(c, c_full, rel_tol=1e-14, abs_tol=1e-15):
        return math.inf

    def gap(B):
        return _n1(m, h, c, B)

    lo, hi = c, c + 1.0
    if gap(lo) >= 0.0:
        # N(c) < 0 exactly; a nonnegative value means the region's mass is
        # below what double precision resolves
        raise InfeasibleError(f"centroid equation unresolved: region mass {line_mass(m, h, -math.inf, math.inf):.3g}")
    while gap(hi) <= 0.0:
        if hi >= BOUNDARY_CAP:
            # the root escapes past the tail cutoff: limit configuration
            return math.inf
        lo, hi = hi, min(c + 2.0 * (hi - c), BOUNDARY_CAP)
    return find_root(gap, lo, hi, tol=min(tol, 1e-13)).root


def boundary_for_centroid(kind: str, m: float, h: float, c: float, tol: float = 1e-12) -> float:
    """Free end of ``R1`` (``B``) or ``R2`` (``A``) giving centroid ``c``.

    ``R2`` is handled by the reflection ``x -> -x``, which maps it to ``R1``
    with slope ``-m`` and centroid ``-c``.  Returns ``+inf`` for ``R1`` (``-inf``
    for ``R2``) when the region is the whole half-plane.
    """
    m, h, c = float(m), float(h), float(c)
    if kind == R1:
        return _r1_boundary(m, h, c, tol)
    if kind == R2:
        return -_r1_boundary(-m, h, -c, tol)
    raise DomainError(f"kind must be {R1!r} or {R2!r}, got {kind!r}")


@dataclass(frozen=True)
class ExtremalConfig:
    """``R1`` or ``R2`` with its slope, intercept, free end and centroid."""

    kind: str
    m: float
    h: float
    boundary: float
    c: float

    @classmethod
    def solve(cls, kind: str, m: float, h: float, c: float, tol: float = 1e-12) -> ExtremalConfig:
        return cls(kind, float(m), float(h), boundary_for_centroid(kind, m, h, c, tol), float(c))

    def _span(self) -> tuple[float, float]:
        return (-math.inf, self.boundary) if self.kind == R1 else (self.boundary, math.inf)

    def mass(self) -> float:
        s, t = self._span()
        return line_mass(self.m, self.h, s, t)

    def moment_residual(self) -> float:
        """``int_R (x - c) dmu_2``; zero for a correctly solved configuration."""
        s, t = self._span()
        return line_moment(self.m, self.h, s, t) - self.c * line_mass(self.m, self.h, s, t)

    def strip_mass(self, a: float, b: float) -> float:
        """Mass of ``R cap L(a, b)``."""
        s, t = self._span()
        return line_mass(self.m, self.h, max(s, a), min(t, b))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "m": self.m, "h": _clean(self.h),
                "boundary": _clean(self.boundary), "c": self.c}


# --- special intercepts ---------------------------------------------------------

def h_tilde(m: float, c: float) -> float:
    """Intercept at which ``B(h)`` reaches ``+inf`` (``R1`` hands over to ``R2``).

    This happens when the full half-plane has centroid ``c``, which is the
    closed equation ``(m / r) f(-h / r) = c`` with ``f`` the hazard rate.
    Returns ``+inf`` for ``c <= 0`` (``B`` stays finite) and ``-inf`` when
    ``m = 0`` and ``c > 0`` (no ``R1`` configuration exists).
    """
    m, c = float(m), float(c)
    if c <= 0.0:
        return math.inf
    if m <= 0.0:
        return -math.inf
    r = math.hypot(1.0, m)

    def gap(k):
        return m / r * gc.hazard(-k) - c

    lo, hi, _ = expand_bracket(gap, -1.0, 1.0)
    return find_root(gap, lo, hi, tol=1e-14).root * r


def b_tilde(m: float, c: float) -> float:
    """Limit ``B(+inf)``: the end of ``(-inf, B]`` whose truncated mean is ``c``."""
    return boundary_for_centroid(R1, m, math.inf, c)


def h_star(m: float, c: float, b: float, lower: float | None = None) -> float:
    """Intercept with ``B(h*) = b``; the smallest ``h`` with ``R1`` covering a layer ending at ``b``.

    ``B(h)`` increases from ``c`` (as ``h -> -inf``) towards ``B(h~)``, so the
    root is bracketed after mapping ``B`` through ``arctan`` to keep the
    ``+inf`` end finite.  The search stops at ``lower`` (default: half-plane
    mass ``1e-8``), below which the centroid equation cannot be resolved in
    double precision; a root beyond it raises ``InfeasibleError``.
    """
    m, c, b = float(m), float(c), float(b)
    if not b > c:
        raise InfeasibleError(f"layer end b = {b} must exceed the centroid {c}")
    top = h_tilde(m, c)
    cap = min(top, BOUNDARY_CAP)
    lo = halfplane_floor(m, 1e-8) if lower is None else float(lower)

    def gap(h):
        try:
            B = boundary_for_centroid(R1, m, h, c)
        except InfeasibleError:
            # only reachable within rounding of h~, where B = +inf
            B = math.inf
        return math.atan(B) - math.atan(b)

    if not lo < cap or gap(cap) < 0.0:
        raise InfeasibleError(f"B(h) stays below b = {b} for all h (B~ = {b_tilde(m, c):.6g})")
    if gap(lo) > 0.0:
        raise InfeasibleError(f"B(h) already exceeds b = {b} at the mass floor h = {lo:.6g}")
    return find_root(gap, lo, cap, tol=1e-13).root


# --- ratio functionals ------------------------------------------------------------

def f_ratio(config: ExtremalConfig, layer: Layer, tol: float = 1e-9,
            check_centroid: bool = True) -> float:
    """``mu_2(R) / (mu_2(R cap L) / mu_1(L))``; the correlation inequality for ``R`` is ``ratio <= 1``.

    ``check_centroid=False`` evaluates the ratio for a layer whose centroid
    differs from the configuration's (a diagnostic, not an instance of the inequality).
    """
    if check_centroid and abs(config.c - layer.centroid) > max(tol, 1e-9):
        raise DomainError(f"configuration centroid {config.c} differs from the layer's {layer.centroid}")
    if config.kind == R1 and config.boundary < layer.b - 1e-9:
        raise InfeasibleError(f"R1 boundary {config.boundary} ends before the layer end {layer.b}")
    if config.kind == R2 and config.boundary > layer.a + 1e-9:
        raise InfeasibleError(f"R2 boundary {config.boundary} starts after the layer start {layer.a}")
    den = config.strip_mass(layer.a, layer.b) / layer.weight
    if den < 1e-12:
        raise DomainError(f"degenerate denominator {den:.3g}")
    return config.mass() / den


def f1(m: float, h: float, layer: Layer) -> float:
    return f_ratio(ExtremalConfig.solve(R1, m, h, layer.centroid), layer)


def f2(m: float, h: float, layer: Layer) -> float:
    return f_ratio(ExtremalConfig.solve(R2, m, h, layer.centroid), layer)


def dF1_dh(m: float, h: float, layer: Layer) -> float:
    """Analytic ``dF1/dh`` with ``B`` moving along the centroid constraint.

    ``F1 = w N / D`` with ``N = int_{-inf}^B Phi dmu_1`` and
    ``D = int_a^b Phi dmu_1``.  Differentiating the centroid equation gives
    ``B' = -int_{-inf}^B (x - c) phi(m x + h) dmu_1 / ((B - c) Phi(m B + h) phi(B))``.
    """
    c, a, b, w = layer.centroid, layer.a, layer.b, layer.weight
    B = boundary_for_centroid(R1, m, h, c)
    N = line_mass(m, h, -math.inf, B)
    D = line_mass(m, h, a, b)
    dD = line_density(m, h, a, b)
    if math.isinf(B):
        dN = line_density(m, h, -math.inf, math.inf)
    else:
        r2 = 1.0 + m * m
        # int x phi(m x + h) dmu_1 over (-inf, B] via the Gaussian in x with
        # mean -m h / r^2 and variance 1 / r^2
        x_star = -m * h / r2
        sd = 1.0 / math.sqrt(r2)
        dens = line_density(m, h, -math.inf, B)
        first = x_star * dens - gc.std_pdf(h / math.sqrt(r2)) / math.sqrt(r2) * sd * gc.std_pdf((B - x_star) / sd)
        weight = (B - c) * gc.std_cdf(m * B + h) * gc.std_pdf(B)
        dB = -(first - c * dens) / weight
        dN = dens + gc.std_cdf(m * B + h) * gc.std_pdf(B) * dB
    return w * (dN * D - N * dD) / (D * D)


# --- scans -----------------------------------------------------------------------

@dataclass
class ScanPoint:
    params: dict
    value: float
    forward_difference: float | None = None

    def to_dict(self) -> dict:
        fd = self.forward_difference
        return {"params": {k: _clean(v) if isinstance(v, float) else v for k, v in self.params.items()},
                "value": _clean(self.value), "forward_difference": None if fd is None else _clean(fd)}


@dataclass
class ScanReport:
    """One monotonicity scan: values on a grid and their forward differences."""

    label: str
    params: dict
    points: list[ScanPoint] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    tol: float = 1e-8
    upper_bound: float | None = None
    monotone: bool = True

    @property
    def min_forward_difference(self) -> float:
        fds = [p.forward_difference for p in self.points if p.forward_difference is not None]
        return min(fds) if fds else math.inf

    @property
    def max_value(self) -> float:
        vals = [p.value for p in self.points if math.isfinite(p.value)]
        return max(vals) if vals else -math.inf

    @property
    def passed(self) -> bool:
        ok = not self.monotone or self.min_forward_difference >= -self.tol
        if self.upper_bound is not None:
            ok = ok and self.max_value <= self.upper_bound + self.tol
        return ok

    def to_dict(self) -> dict:
        return {"label": self.label, "params": self.params, "passed": self.passed,
                "min_forward_difference": _clean(self.min_forward_difference),
                "points": [p.to_dict() for p in self.points], "skipped": self.skipped}

    def to_json_array(self) -> str:
        return json.dumps([p.to_dict() for p in self.points])


def _forward_differences(points: list[ScanPoint]) -> None:
    for prev, cur in zip(points, points[1:]):
        if math.isinf(cur.value) and math.isinf(prev.value) and cur.value == prev.value:
            prev.forward_difference = 0.0
        else:
            prev.forward_difference = cur.value - prev.value


def log_grid(lo: float, hi: float, n: int = GRID_POINTS, dense_at: str = "lo") -> list[float]:
    """``n`` points from ``lo`` to ``hi`` with offsets log-spaced from the dense end."""
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    span = hi - lo
    offs = np.concatenate([[0.0], np.geomspace(1e-3 * span, span, n - 1)])
    pts = lo + offs if dense_at == "lo" else hi - offs[::-1]
    pts[0], pts[-1] = lo, hi
    return pts.tolist()


def halfplane_floor(m: float, mass: float = MIN_HALFPLANE_MASS) -> float:
    """Intercept at which the half-plane ``{y <= m x + h}`` has the given mass."""
    return gc.std_cdf_inv(mass) * math.hypot(1.0, m)


def lemma8_grid(kind: str, m: float, c: float, n: int = GRID_POINTS) -> list[float]:
    """Default ``h`` grid on which ``B(h)`` (``R1``) or ``A(h)`` (``R2``) is defined."""
    floor = halfplane_floor(m)
    top = h_tilde(m, c)
    if kind == R1:
        hi = top if math.isfinite(top) else floor + 20.0
        if not floor < hi:
            return []
        return log_grid(floor, hi, n, dense_at="hi" if math.isfinite(top) else "lo")
    # R2 lives above h~ (for c > 0, where A is finite)
    lo = max(top, floor) if math.isfinite(top) else floor
    if top == math.inf:
        return []
    return log_grid(lo, lo + 20.0, n, dense_at="lo")


def scan_lemma8(kind: str, m: float, c: float, h_grid: Sequence[float] | None = None,
                tol: float = 1e-8) -> ScanReport:
    """Monotonicity of the free end ``B(h)`` or ``A(h)`` in ``h``."""
    grid = lemma8_grid(kind, m, c) if h_grid is None else list(h_grid)
    rep = ScanReport(f"free-end-{kind}", {"kind": kind, "m": m, "c": c}, tol=tol)
    for h in grid:
        try:
            val = boundary_for_centroid(kind, m, h, c)
        except InfeasibleError as exc:
            rep.skipped.append({"h": h, "reason": str(exc)})
            continue
        rep.points.append(ScanPoint({"kind": kind, "m": m, "c": c, "h": float(h)}, val))
    _forward_differences(rep.points)
    return rep


def lemma9_start(m: float, c: float, b: float) -> float:
    """First scanned intercept: ``h*``, raised to the scan mass floor if needed."""
    floor = halfplane_floor(m)
    try:
        return h_star(m, c, b, lower=floor)
    except InfeasibleError:
        if boundary_for_centroid(R1, m, min(floor, h_tilde(m, c)), c) >= b:
            return floor
        raise


def lemma9_grid(m: float, c: float, layer: Layer, n: int = GRID_POINTS) -> list[float]:
    """Default ``h`` grid on ``[h*, h~]``.

    ``h*`` is raised to the scan floor when it lies below it, and an infinite
    ``h~`` is replaced by ``h* + 20``.
    """
    lo = lemma9_start(m, c, layer.b)
    top = h_tilde(m, c)
    hi = top if math.isfinite(top) else lo + 20.0
    if not lo < hi:
        return [lo]
    return log_grid(lo, hi, n, dense_at="lo")


def scan_lemma9(m: float, c: float, w: float, h_grid: Sequence[float] | None = None,
                tol: float = 1e-8) -> ScanReport:
    """``F1(h, w)`` along ``h`` with the layer fixed by ``(c, w)``; also checks ``F1 <= 1``."""
    rep = ScanReport("f1", {"m": m, "c": c, "w": w}, tol=tol, upper_bound=1.0)
    try:
        layer = match_layer(c, w)
        grid = lemma9_grid(m, c, layer) if h_grid is None else list(h_grid)
        lo = lemma9_start(m, c, layer.b)
    except InfeasibleError as exc:
        rep.skipped.append({"reason": str(exc)})
        return rep
    top = h_tilde(m, c)
    rep.params.update({"a": layer.a, "b": layer.b, "h_star": lo, "h_tilde": _clean(top)})
    for h in grid:
        if h < lo - 1e-9 or h > top:
            rep.skipped.append({"h": h, "reason": "outside [h*, h~]"})
            continue
        try:
            val = f1(m, h, layer)
        except (InfeasibleError, DomainError) as exc:
            rep.skipped.append({"h": h, "reason": str(exc)})
            continue
        rep.points.append(ScanPoint({"m": m, "c": c, "w": w, "h": float(h)}, val))
    _forward_differences(rep.points)
    return rep


def scan_f2(m: float, c: float, w: float, h_grid: Sequence[float] | None = None,
            tol: float = 1e-8) -> ScanReport:
    """``F2`` on the ``R2`` branch (``h >= h~``, ``c > 0``); only the bound ``F2 <= 1`` is asserted."""
    rep = ScanReport("f2", {"m": m, "c": c, "w": w}, tol=tol, upper_bound=1.0, monotone=False)
    try:
        layer = match_layer(c, w)
    except InfeasibleError as exc:
        rep.skipped.append({"reason": str(exc)})
        return rep
    grid = lemma8_grid(R2, m, c) if h_grid is None else list(h_grid)
    for h in grid:
        try:
            val = f2(m, h, layer)
        except (InfeasibleError, DomainError) as exc:
            rep.skipped.append({"h": h, "reason": str(exc)})
            continue
        rep.points.append(ScanPoint({"m": m, "c": c, "w": w, "h": float(h)}, val))
    _forward_differences(rep.points)
    return rep


@dataclass
class ScanSummary:
    reports: list[ScanReport]
    lemma8_min: float
    lemma9_min: float
    f1_max: float
    f2_max: float
    handoff_max_gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return (self.lemma8_min >= -self.tol and self.lemma9_min >= -self.tol
                and self.f1_max <= 1.0 + self.tol and self.f2_max <= 1.0 + self.tol
                and self.handoff_max_gap <= 1e-9)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "free_end_min_forward_difference": _clean(self.lemma8_min),
                "f1_min_forward_difference": _clean(self.lemma9_min),
                "f1_max": _clean(self.f1_max), "f2_max": _clean(self.f2_max),
                "handoff_max_gap": self.handoff_max_gap, "tol": self.tol,
                "reports": [r.to_dict() for r in self.reports]}


def run_scans(ms: Sequence[float] = DEFAULT_M, cs: Sequence[float] = DEFAULT_C,
              ws: Sequence[float] = DEFAULT_W, n: int = GRID_POINTS, tol: float = 1e-8) -> ScanSummary:
    """All free-end and ``F1`` monotonicity scans and the ``F1``/``F2`` bounds over a parameter grid."""
    reports: list[ScanReport] = []
    l8 = l9 = math.inf
    f1_max = f2_max = -math.inf
    handoff = 0.0
    for m in ms:
        for c in cs:
            for kind in (R1, R2):
                grid = lemma8_grid(kind, m, c, n)
                if not grid:
                    continue
                rep = scan_lemma8(kind, m, c, grid, tol)
                reports.append(rep)
                l8 = min(l8, rep.min_forward_difference)
            for w in ws:
                rep = scan_lemma9(m, c, w, None if n == GRID_POINTS else _l9_grid_or_none(m, c, w, n), tol)
                reports.append(rep)
                l9 = min(l9, rep.min_forward_difference)
                f1_max = max(f1_max, rep.max_value)
                if c > 0.0 and m > 0.0:
                    r2 = scan_f2(m, c, w, None, tol)
                    reports.append(r2)
                    f2_max = max(f2_max, r2.max_value)
                    try:
                        handoff = max(handoff, handoff_gap(m, c, w))
                    except InfeasibleError:
                        pass
    return ScanSummary(reports, l8, l9, f1_max, f2_max, handoff, tol)


def _l9_grid_or_none(m, c, w, n):
    try:
        return lemma9_grid(m, c, match_layer(c, w), n)
    except InfeasibleError:
        return None


def handoff_gap(m: float, c: float, w: float) -> float:
    """``|F1(h~) - F2(h~)|``: at ``h~`` both regions are the full half-plane."""
    layer = match_layer(c, w)
    top = h_tilde(m, c)
    if not math.isfinite(top):
        raise InfeasibleError("no handoff: h~ is infinite")
    lemma9_start(m, c, layer.b)  # raises if R1 never covers the layer
    v1 = f_ratio(ExtremalConfig(R1, m, top, math.inf, c), layer)
    v2 = f_ratio(ExtremalConfig(R2, m, top, -math.inf, c), layer)
    return abs(v1 - v2)


# --- R2 shift and the averaging inequality --------------------------------------------

@dataclass(frozen=True)
class ShiftReport:
    ratio_nonincreasing: bool
    mass_nondecreasing: bool
    ratios: list[float]
    masses: list[float]


def r2_shift_check(m: float, h: float, layer: Layer, a_grid: Sequence[float]) -> ShiftReport:
    """Moving ``A`` left lowers ``mu_2(R2 cap L) / mu_2(L)`` and raises ``mu_2(R2)``.

    ``a_grid`` is scanned from right to left; all entries must be ``<= layer.a``.
    """
    grid = sorted((float(v) for v in a_grid), reverse=True)
    if any(v > layer.a for v in grid):
        raise DomainError("R2 start points must not exceed the layer start")
    ratios = [line_mass(m, h, max(A, layer.a), layer.b) / layer.weight for A in grid]
    masses = [line_mass(m, h, A, math.inf) for A in grid]
    ratio_ok = all(r2 <= r1 + 1e-15 for r1, r2 in zip(ratios, ratios[1:]))
    mass_ok = all(m2 >= m1 - 1e-15 for m1, m2 in zip(masses, masses[1:]))
    return ShiftReport(ratio_ok, mass_ok, ratios, masses)


@dataclass(frozen=True)
class AveragingReport:
    """Weighted averages of a convex ``g`` over nested intervals."""

    status: str
    outer_average: float
    inner_average: float
    outer_barycenter: float
    inner_barycenter: float
    hypothesis_value: float
    margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def averaging_inequality_check(g: Callable, rho: Callable, outer, inner,
                               tol: float = 1e-10) -> AveragingReport:
    """Compare ``rho``-weighted averages of ``g`` on ``[alpha, beta]`` and ``[alpha', beta']``.

    The conclusion (outer average >= inner average) is asserted only when
    ``(bary_outer - bary_inner) * (g(beta') - g(alpha')) >= 0``; otherwise the
    status is ``"hypothesis not met"``.  Infinite outer ends are allowed for
    Gaussian-decaying weights.
    """
    al, be = (float(v) for v in outer)
    al2, be2 = (float(v) for v in inner)
    if not (al <= al2 < be2 <= be):
        raise DomainError("inner interval must be nested in the outer one")

    def avg(lo, hi):
        bps = [v for v in (al2, be2) if lo < v < hi]
        w = integrate(lambda x: np.asarray(rho(x), dtype=float), lo, hi, tol, bps).value
        gw = integrate(lambda x: np.asarray(g(x), dtype=float) * rho(x), lo, hi, tol, bps).value
        xw = integrate(lambda x: x * np.asarray(rho(x), dtype=float), lo, hi, tol, bps).value
        if not w > 0.0:
            raise DomainError("weight has zero mass on the interval")
        return gw / w, xw / w

    g_out, x_out = avg(al, be)
    g_in, x_in = avg(al2, be2)
    g_ends = np.asarray(g(np.array([al2, be2])), dtype=float)
    gb = float(g_ends[1] - g_ends[0])
    hyp = (x_out - x_in) * gb
    margin = g_out - g_in
    if hyp < -tol:
        status = "hypothesis not met"
    else:
        status = "pass" if margin >= -max(tol, 1e-9) else "fail"
    return AveragingReport(status, g_out, g_in, x_out, x_in, hyp, margin)


# --- the h < 0 case ---------------------------------------------------------------

@dataclass(frozen=True)
class FinalCaseGeometry:
    h0: float
    x0: float
    x1: float
    x2: float


@dataclass(frozen=True)
class FinalCaseReport:
    m: float
    h: float
    a: float
    b: float
    phi0: float
    geometry: FinalCaseGeometry
    average_margin: float
    reduced_margin: float | None
    reflection_gap: float | None
    triangle_margin: float | None
    trivial: bool
    tol: float

    @property
    def passed(self) -> bool:
        ok = self.average_margin >= -self.tol
        if self.reduced_margin is not None:
            ok = ok and self.reduced_margin >= -self.tol
        if self.triangle_margin is not None:
            ok = ok and self.triangle_margin >= -self.tol
        if self.reflection_gap is not None:
            ok = ok and abs(self.reflection_gap) <= 10 * self.tol
        return ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def final_case_geometry(m: float, h: float, a: float) -> FinalCaseGeometry:
    r = math.hypot(1.0, m)
    h0 = h / r
    x0 = (h0 - h) / m
    d = x0 - a
    return FinalCaseGeometry(h0, x0, x0 + d / r, x0 + r * d)


def final_case_check(m: float, h: float, a: float, b: float, tol: float = 1e-9) -> FinalCaseReport:
    """Layer average of ``Phi(m x + h)`` against the half-plane mass ``Phi(h / r)``.

    For ``m > 0`` and ``h < 0`` the line ``y = m x + h`` crosses the level
    ``y = h0 = h / r`` at ``x0``.  The average over ``[a, b]`` is at least
    ``Phi(h0)`` whenever the layer midpoint is at least ``x0``.  Besides the
    direct check, the reduced case ``b = 2 x0 - a`` is compared through its
    reflection across the line orthogonal to ``y = m x + h`` and the
    left-over triangle between ``x1`` and ``x2``.
    """
    m, h, a, b = float(m), float(h), float(a), float(b)
    if not m > 0.0:
        raise DomainError("final case needs m > 0")
    if not h < 0.0:
        raise DomainError("final case needs h < 0")
    if not a < b:
        raise DomainError("need a < b")
    geo = final_case_geometry(m, h, a)
    if 0.5 * (a + b) < geo.x0:
        raise OutOfScopeError(f"layer midpoint {(a + b) / 2:.6g} is left of x0 = {geo.x0:.6g}")
    r = math.hypot(1.0, m)
    phi0 = gc.std_cdf(geo.h0)
    qtol = 1e-13

    def line(x):
        return gc.std_cdf(m * x + h)

    def avg_margin(lo, hi):
        num = integrate_gauss(line, lo, hi, qtol).value
        return num / gc.gauss_interval(lo, hi) - phi0

    margin19 = avg_margin(a, b)
    if a >= geo.x0:
        return FinalCaseReport(m, h, a, b, phi0, geo, margin19, None, None, None, True, tol)

    x0, x1, x2 = geo.x0, geo.x1, geo.x2
    b_red = 2.0 * x0 - a

    def reflected(x):
        # reflection of the line across the orthogonal line through (x0, h0)
        return gc.std_cdf((x0 - x) / m + geo.h0 + r * (x0 - a) / m)

    def excess(f):
        return lambda x: f(x) - phi0

    def deficit(f):
        return lambda x: phi0 - f(x)

    right = integrate_gauss(excess(line), x0, b_red, qtol).value
    left = integrate_gauss(deficit(line), a, x0, qtol).value
    margin20 = right - left
    lhs21 = (integrate_gauss(excess(line), x0, x1, qtol).value
             + integrate_gauss(excess(reflected), x1, x2, qtol).value)
    reflection_gap = lhs21 - left
    # triangle comparison for the reduced layer
    tri = (integrate_gauss(lambda x: line(x) - reflected(x), x1, b_red, qtol).value
           - integrate_gauss(excess(reflected), b_red, x2, qtol).value) if b_red < x2 else None
    return FinalCaseReport(m, h, a, b, phi0, geo, margin19, margin20, reflection_gap, tri, False, tol)


@dataclass(frozen=True)
class AverageDecreaseReport:
    passed: bool
    averages: list[float]
    min_step: float


def halfplane_average_check(m: float, h: float, d_grid: Sequence[float]) -> AverageDecreaseReport:
    """``d -> mean of Phi(m x + h) over [-d, d]`` is nonincreasing for ``h >= 0``."""
    if h < 0.0:
        raise DomainError("the average-decrease property is stated for h >= 0")
    ds = sorted(float(d) for d in d_grid if d > 0.0)
    avgs = [line_mass(m, h, -d, d) / gc.gauss_interval(-d, d) for d in ds]
    steps = [y - x for x, y in zip(avgs, avgs[1:])]
    worst = max(steps) if steps else -math.inf
    return AverageDecreaseReport(worst <= 1e-14, avgs, -worst if steps else math.inf)


# --- support extension ------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionReport:
    A0: float
    B0: float
    left_line_mass: float
    left_profile_mass: float
    right_line_mass: float
    right_profile_mass: float
    centroid_residual: float
    final: ExtremalConfig | None
    tol: float

    @property
    def mass_ok(self) -> bool:
        return (self.left_line_mass >= self.left_profile_mass - self.tol
                and self.right_line_mass >= self.right_profile_mass - self.tol)

    def to_dict(self) -> dict:
        d = {k: _clean(v) if isinstance(v, float) else v for k, v in asdict(self).items() if k != "final"}
        d["final"] = self.final.to_dict() if self.final else None
        d["mass_ok"] = self.mass_ok
        return d


def _solve_side(func: Callable[[float], float], target: float, start: float, outward: float) -> float:
    """Point ``x`` beyond ``start`` (in direction ``outward``) with ``func(x) = target``.

    ``func(start) = 0`` and ``func`` moves monotonically towards its limit at
    infinity; returns the infinite end when the target is not reached before
    the tail cutoff.
    """
    far = outward * BOUNDARY_CAP
    if target == 0.0:
        return start
    if (func(far) - target) * (0.0 - target) > 0.0:
        return outward * math.inf
    return find_root(lambda x: func(x) - target, start, far, tol=1e-13).root


def extend_support(profile: ConcaveProfile, line: tuple[float, float], interval, c: float,
                   tol: float = DEFAULT_TOL) -> ExtensionReport:
    """Extend the line region beyond ``[a, b]`` so that each side matches ``C_psi``'s moment.

    Left: ``A0 <= a`` with ``int_{A0}^a (x - c) Phi(m x + h) = int_{-inf}^a (x - c) Phi(psi)``;
    right analogously with ``B0 >= b``.  The extended region then has the same
    centroid as ``C_psi`` and at least its mass.  The returned ``final``
    configuration continues the extension until one end reaches infinity.
    """
    m, h = (float(v) for v in line)
    a, b = (float(v) for v in interval)
    c = float(c)
    if not a < c < b:
        raise DomainError(f"centroid {c} must lie strictly inside ({a}, {b})")
    left_fn = functionals(profile, (-math.inf, a), tol) if profile.support[0] < a else None
    right_fn = functionals(profile, (b, math.inf), tol) if profile.support[1] > b else None
    t_left = (left_fn.moment - c * left_fn.mass) if left_fn else 0.0
    t_right = (right_fn.moment - c * right_fn.mass) if right_fn else 0.0

    def left_moment(A):
        return line_moment(m, h, A, a) - c * line_mass(m, h, A, a) if A < a else 0.0

    def right_moment(B):
        return line_moment(m, h, b, B) - c * line_mass(m, h, b, B) if B > b else 0.0

    A0 = _solve_side(left_moment, t_left, a, -1.0) if abs(t_left) > 1e-16 else a
    B0 = _solve_side(right_moment, t_right, b, 1.0) if abs(t_right) > 1e-16 else b
    lm = line_mass(m, h, A0, a)
    rm = line_mass(m, h, b, B0)
    pm_left = left_fn.mass if left_fn else 0.0
    pm_right = right_fn.mass if right_fn else 0.0
    resid = line_moment(m, h, A0, B0) - c * line_mass(m, h, A0, B0)
    report = ExtensionReport(A0, B0, lm, pm_left, rm, pm_right, resid, None, max(tol, 1e-9))
    if not report.mass_ok:
        raise InvariantError(f"extended line region has less mass than the profile: {report.to_dict()}")

    # continue symmetrically: whichever tail runs out first decides R1 or R2
    extra_left = line_moment(m, h, -math.inf, A0) - c * line_mass(m, h, -math.inf, A0)
    extra_right = line_moment(m, h, B0, math.inf) - c * line_mass(m, h, B0, math.inf)
    try:
        if -extra_left <= extra_right:
            final = ExtremalConfig.solve(R1, m, h, c)
        else:
            final = ExtremalConfig.solve(R2, m, h, c)
    except InfeasibleError:
        final = None
    return ExtensionReport(A0, B0, lm, pm_left, rm, pm_right, resid, final, report.tol)
