"""Concave profiles, layers, and the Gaussian mass/moment of regions under a profile.

A profile ``psi`` stands for the planar region ``{(x, y): y <= psi(x)}``.  Its
mass under the standard planar Gaussian is ``int Phi(psi(x)) dmu_1(x)``; its
first x-moment is ``int x Phi(psi(x)) dmu_1(x)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import gauss_core as gc
from .errors import DegenerateRegionError, DomainError, InfeasibleError
from .quadrature import DEFAULT_TOL, find_root, integrate, integrate_gauss

DEGENERATE_MASS = 1e-8
# Below this the bivariate-CDF difference in ``line_mass`` has lost too many
# digits and the mass is integrated directly instead.
SMALL_LINE_MASS = 1e-7


# --- regions under a straight line -------------------------------------------

def line_mass(m: float, h: float, s: float, t: float) -> float:
    """Gaussian mass of ``{s <= x <= t, y <= m x + h}`` in closed form."""
    if not s < t or h == -math.inf:
        return 0.0
    if h == math.inf:
        return gc.gauss_interval(s, t)
    r = math.hypot(1.0, m)
    k = h / r
    rho = -m / r
    if m == 0.0:
        return gc.std_cdf(k) * gc.gauss_interval(s, t)
    value = gc.bivariate_cdf(t, k, rho) - gc.bivariate_cdf(s, k, rho)
    if value < SMALL_LINE_MASS:
        return _small_line_mass(m, h, s, t)
    return value


def _small_line_mass(m: float, h: float, s: float, t: float) -> float:
    """``line_mass`` to full relative precision for tiny masses.

    The integrand ``Phi(m x + h) phi(x)`` is positive, so a trapezoid pass
    gives its size and the adaptive rule is then run to a tolerance relative
    to it.  ``x*`` is where ``phi(m x + h) phi(x)`` peaks.
    """
    r2 = 1.0 + m * m
    x_star = -m * h / r2

    def f(x):
        return gc.std_cdf(m * x + h) * gc.std_pdf(x)

    grid = np.linspace(max(s, -40.0), min(t, 40.0), 4001)
    rough = float(np.trapezoid(f(grid), grid))
    if not rough > 0.0:
        return 0.0
    res = integrate(f, s, t, tol=1e-13 * rough, breakpoints=(x_star, 0.0, -h / m))
    return max(res.value, 0.0)


def line_density(m: float, h: float, s: float, t: float) -> float:
    """``int_s^t phi(m x + h) dmu_1(x)``: the h-derivative of ``line_mass``."""
    if not s < t or math.isinf(h):
        return 0.0
    r = math.hypot(1.0, m)
    x_star = -m * h / (r * r)
    return gc.std_pdf(h / r) / r * gc.gauss_interval(r * (s - x_star), r * (t - x_star))


def _phi_cdf(x: float, m: float, h: float) -> float:
    if math.isinf(x):
        return 0.0
    return gc.std_pdf(x) * gc.std_cdf(m * x + h)


def line_moment(m: float, h: float, s: float, t: float) -> float:
    """``int_s^t x Phi(m x + h) dmu_1(x)`` in closed form (integration by parts)."""
    if not s < t or h == -math.inf:
        return 0.0
    if h == math.inf:
        return gc.std_pdf(s) - gc.std_pdf(t)
    return _phi_cdf(s, m, h) - _phi_cdf(t, m, h) + m * line_density(m, h, s, t)


# --- profiles ----------------------------------------------------------------

def _encode(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _decode(v) -> float:
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            return math.inf
        if v.strip().lower() in ("-inf", "-infinity"):
            return -math.inf
    return float(v)


@dataclass(frozen=True)
class ConcaveProfile:
    """Piecewise-linear concave function, ``-inf`` outside ``support``.

    ``points`` are the breakpoints ``(x, psi(x))``.  Beyond the first and last
    point the outermost pieces are extended linearly up to the support ends;
    a single point gives a constant.  ``+inf`` values are only allowed for the
    constant profile (every point ``+inf``).
    """

    support: tuple[float, float]
    points: tuple[tuple[float, float], ...]
    xs: np.ndarray = field(init=False, repr=False, compare=False)
    ys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A, B = (float(v) for v in self.support)
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "support", (A, B))
        object.__setattr__(self, "points", pts)
        if not A < B:
            raise DomainError(f"empty support [{A}, {B}]")
        if not pts:
            raise DomainError("a profile needs at least one point")
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        if np.any(~np.isfinite(xs)) or np.any(np.diff(xs) <= 0):
            raise DomainError("breakpoints must be finite and strictly increasing")
        if xs[0] < A or xs[-1] > B:
            raise DomainError("breakpoints must lie inside the support")
        if np.any(np.isnan(ys)) or np.any(np.isneginf(ys)):
            raise DomainError("profile values must be finite or +inf")
        if np.any(np.isposinf(ys)) and not np.all(np.isposinf(ys)):
            raise DomainError("+inf is only allowed for the constant +inf profile")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if not self.is_infinite and len(xs) > 2:
            s = self.slopes
            scale = 1.0 + np.abs(s[:-1]) + np.abs(s[1:])
            if np.any(np.diff(s) > 1e-9 * scale):
                raise DomainError("profile is not concave (slopes increase)")

    # constructors
    @classmethod
    def linear(cls, m: float, h: float, support=(-math.inf, math.inf)) -> ConcaveProfile:
        A, B = support
        x0 = A if math.isfinite(A) else (B - 1.0 if math.isfinite(B) else 0.0)
        x1 = B if math.isfinite(B) else x0 + 1.0
        return cls((A, B), ((x0, m * x0 + h), (x1, m * x1 + h)))

    @classmethod
    def constant(cls, value: float, support=(-math.inf, math.inf)) -> ConcaveProfile:
        A, B = support
        x0 = A if math.isfinite(A) else (B if math.isfinite(B) else 0.0)
        return cls((A, B), ((x0, value),))

    @classmethod
    def full(cls, support=(-math.inf, math.inf)) -> ConcaveProfile:
        """The profile identically ``+inf`` on ``support``."""
        return cls.constant(math.inf, support)

    # structure
    @property
    def is_infinite(self) -> bool:
        return bool(np.isposinf(self.ys[0]))

    @property
    def slopes(self) -> np.ndarray:
        if len(self.xs) < 2:
            return np.zeros(0)
        return np.diff(self.ys) / np.diff(self.xs)

    @property
    def left_slope(self) -> float:
        s = self.slopes
        return float(s[0]) if s.size else 0.0

    @property
    def right_slope(self) -> float:
        s = self.slopes
        return float(s[-1]) if s.size else 0.0

    @property
    def kinks(self) -> np.ndarray:
        """Interior breakpoints where the slope actually changes."""
        s = self.slopes
        if s.size < 2:
            return np.zeros(0)
        changed = np.abs(np.diff(s)) > 1e-12 * (1.0 + np.abs(s[1:]))
        return self.xs[1:-1][changed]

    def breakpoints(self) -> list[float]:
        A, B = self.support
        return [v for v in (A, *self.xs, B) if math.isfinite(v)]

    def pieces(self) -> Iterator[tuple[float, float, float, float]]:
        """Yield ``(lo, hi, slope, intercept)`` covering the support."""
        A, B = self.support
        if self.is_infinite:
            yield A, B, 0.0, math.inf
            return
        xs, ys = self.xs, self.ys
        if len(xs) == 1:
            yield A, B, 0.0, float(ys[0])
            return
        s = self.slopes
        knots = [A, *xs[1:-1], B]
        for i in range(len(s)):
            lo, hi = knots[i], knots[i + 1]
            if lo < hi:
                yield lo, hi, float(s[i]), float(ys[i] - s[i] * xs[i])

    def is_linear_on(self, a: float, b: float) -> bool:
        A, B = self.support
        if A > a or B < b or self.is_infinite:
            return False
        return not np.any((self.kinks > a) & (self.kinks < b))

    def line_at(self, x: float) -> tuple[float, float]:
        """``(slope, intercept)`` of the piece active just right of ``x``."""
        for lo, hi, m, h in self.pieces():
            if lo <= x < hi:
                return m, h
        lo, hi, m, h = list(self.pieces())[-1]
        return m, h

    def right_derivative(self, x: float) -> float:
        A, B = self.support
        if x < A:
            return math.inf
        if x >= B:
            return -math.inf
        for lo, hi, m, _ in self.pieces():
            if lo <= x < hi:
                return m
        return -math.inf

    def left_derivative(self, x: float) -> float:
        A, B = self.support
        if x > B:
            return -math.inf
        if x <= A:
            return math.inf
        for lo, hi, m, _ in self.pieces():
            if lo < x <= hi:
                return m
        return math.inf

    def __call__(self, x):
        return evaluate(self, x)

    # transforms
    def reflect(self) -> ConcaveProfile:
        """``x -> psi(-x)``."""
        A, B = self.support
        return ConcaveProfile((-B, -A), tuple((-x, y) for x, y in reversed(self.points)))

    def shift(self, delta: float) -> ConcaveProfile:
        return ConcaveProfile(self.support, tuple((x, y + delta) for x, y in self.points))

    def refine(self) -> ConcaveProfile:
        """Same function with every finite segment split at its midpoint."""
        if len(self.points) < 2:
            return self
        pts = []
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            pts += [(x0, y0), (0.5 * (x0 + x1), 0.5 * (y0 + y1))]
        pts.append(self.points[-1])
        return ConcaveProfile(self.support, tuple(pts))

    # serialisation
    def to_dict(self) -> dict:
        return {"support": [_encode(v) for v in self.support],
                "points": [[_encode(x), _encode(y)] for x, y in self.points]}

    @classmethod
    def from_dict(cls, data: dict) -> ConcaveProfile:
        support = tuple(_decode(v) for v in data["support"])
        points = tuple((_decode(x), _decode(y)) for x, y in data["points"])
        return cls(support, points)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> ConcaveProfile:
        return cls.from_dict(json.loads(text))


def evaluate(profile: ConcaveProfile, x):
    """Piecewise-linear interpolation inside the support, ``-inf`` outside."""
    x = np.asarray(x, dtype=float)
    A, B = profile.support
    if profile.is_infinite:
        out = np.full(x.shape, math.inf)
    else:
        xs, ys = profile.xs, profile.ys
        out = np.interp(x, xs, ys)
        out = np.where(x < xs[0], ys[0] + profile.left_slope * (x - xs[0]), out)
        out = np.where(x > xs[-1], ys[-1] + profile.right_slope * (x - xs[-1]), out)
    out = np.where((x < A) | (x > B), -math.inf, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GaussFunctionals:
    """Mass and first x-moment of the region under a profile over an interval."""

    mass: float
    moment: float
    error_estimate: float = 0.0


def functionals(profile: ConcaveProfile, interval=(-math.inf, math.inf),
                tol: float = DEFAULT_TOL, method: str = "quadrature") -> GaussFunctionals:
    """Mass and moment over ``interval``.

    ``method="quadrature"`` integrates ``Phi(psi)`` with the profile's
    breakpoints passed to the integrator; ``method="exact"`` sums the closed
    forms of each linear piece.
    """
    alpha, beta = (float(v) for v in interval)
    if not alpha < beta:
        raise DomainError(f"need alpha < beta, got [{alpha}, {beta}]")
    A, B = profile.support
    lo, hi = max(alpha, A), min(beta, B)
    if not lo < hi:
        return GaussFunctionals(0.0, 0.0)
    if method == "exact":
        mass = moment = 0.0
        for p_lo, p_hi, m, h in profile.pieces():
            s, t = max(lo, p_lo), min(hi, p_hi)
            if s < t:
                mass += line_mass(m, h, s, t)
                moment += line_moment(m, h, s, t)
        return GaussFunctionals(mass, moment)
    if method != "quadrature":
        raise DomainError(f"unknown method {method!r}")

    def under(x):
        return gc.std_cdf(evaluate(profile, x))

    bps = [p for p in profile.breakpoints() if lo < p < hi]
    m0 = integrate_gauss(under, lo, hi, tol, bps)
    m1 = integrate_gauss(lambda x: x * under(x), lo, hi, tol, bps)
    return GaussFunctionals(m0.value, m1.value, m0.error_estimate + m1.error_estimate)


def centroid_x(profile: ConcaveProfile, interval=(-math.inf, math.inf),
               tol: float = DEFAULT_TOL, method: str = "quadrature") -> float:
    """x-coordinate of the Gaussian centroid of the region under ``profile``."""
    fn = functionals(profile, interval, tol, method)
    if fn.mass < max(10.0 * tol, DEGENERATE_MASS):
        raise DegenerateRegionError(f"region mass {fn.mass:.3g} too small for a centroid")
    return fn.moment / fn.mass


# --- layers ------------------------------------------------------------------

@dataclass(frozen=True)
class Layer:
    """The slab ``a <= x <= b`` with its Gaussian weight and centroid."""

    a: float
    b: float
    weight: float
    centroid: float

    @classmethod
    def from_bounds(cls, a: float, b: float) -> Layer:
        a, b = float(a), float(b)
        if not a < b:
            raise DomainError(f"degenerate layer [{a}, {b}]")
        w = gc.gauss_interval(a, b)
        if w <= 0.0:
            raise DomainError(f"layer [{a}, {b}] has zero weight")
        return cls(a, b, w, gc.layer_centroid(a, b))

    def to_dict(self) -> dict:
        return {"a": _encode(self.a), "b": _encode(self.b),
                "weight": self.weight, "centroid": self.centroid}


def centroid_range(w: float) -> tuple[float, float]:
    """Open interval of centroids attainable by layers of weight ``w``."""
    if not 0.0 < w < 1.0:
        raise DomainError(f"weight must lie in (0, 1), got {w}")
    c_max = gc.layer_centroid(gc.std_cdf_inv(1.0 - w), math.inf)
    return -c_max, c_max


def match_layer(c: float, w: float, tol: float = 1e-12) -> Layer:
    """The unique layer of weight ``w`` whose Gaussian centroid is ``c``."""
    c, w = float(c), float(w)
    lo_c, hi_c = centroid_range(w)
    if not lo_c < c < hi_c:
        raise InfeasibleError(
            f"no layer of weight {w} has centroid {c}; attainable range is ({lo_c:.6g}, {hi_c:.6g})")
    if c > 0.0:
        mirror = match_layer(-c, w, tol)
        return Layer(-mirror.b, -mirror.a, mirror.weight, -mirror.centroid)

    def upper(a):
        return gc.std_cdf_inv(min(gc.std_cdf(a) + w, 1.0))

    def gap(a):
        return gc.layer_centroid(a, upper(a)) - c

    a_sym = -gc.std_cdf_inv(0.5 * (1.0 + w))
    if gap(a_sym) <= 0.0:
        # c = 0 up to rounding of the symmetric layer's centroid
        return Layer(a_sym, -a_sym, w, 0.0)
    a_low = -40.0
    if gap(a_low) >= 0.0:
        # centroid so close to the attainable limit that a is beyond the tail cutoff
        raise InfeasibleError(f"centroid {c} is within rounding of the weight-{w} limit {lo_c:.6g}")
    res = find_root(gap, a_low, a_sym, tol=min(tol, 1e-14))
    a = res.root
    return Layer.from_bounds(a, upper(a))


# --- random instances --------------------------------------------------------

@dataclass(frozen=True)
class ProfileBox:
    """Sampling ranges for ``random_profile``."""

    x_lo: float = -1.5
    x_hi: float = 1.5
    y_lo: float = -1.0
    y_hi: float = 1.5
    max_slope: float = 2.0
    max_overhang: float = 1.5


def random_profile(seed: int, pieces: int = 3, box: ProfileBox = ProfileBox()) -> ConcaveProfile:
    """Deterministic random concave piecewise-linear profile.

    Slopes are drawn uniformly and sorted decreasing; values follow by
    integrating them from a random anchor.  The support is either the whole
    line or a random finite interval, by a fair coin.
    """
    if pieces < 1:
        raise DomainError("pieces must be >= 1")
    rng = np.random.default_rng(seed)
    slopes = np.sort(rng.uniform(-box.max_slope, box.max_slope, pieces))[::-1]
    if pieces > 1 and np.any(np.diff(slopes) >= 0):
        slopes = slopes - 1e-9 * np.arange(pieces)
    breaks = np.sort(rng.uniform(box.x_lo, box.x_hi, pieces - 1))
    while pieces > 2 and np.any(np.diff(breaks) < 1e-6):
        breaks = np.sort(rng.uniform(box.x_lo, box.x_hi, pieces - 1))
    anchor_x = breaks[0] if pieces > 1 else rng.uniform(box.x_lo, box.x_hi)
    anchor_y = rng.uniform(box.y_lo, box.y_hi)
    finite = rng.random() < 0.5
    first = breaks[0] if pieces > 1 else anchor_x
    last = breaks[-1] if pieces > 1 else anchor_x
    if finite:
        A = first - rng.uniform(0.2, box.max_overhang)
        B = last + rng.uniform(0.2, box.max_overhang)
        xs = np.concatenate([[A], breaks, [B]])
    else:
        A, B = -math.inf, math.inf
        xs = np.concatenate([[first - 1.0], breaks, [last + 1.0]])
    # value at xs[0] from the anchor, then integrate the slopes forward
    ys = np.empty_like(xs)
    ys[0] = anchor_y - slopes[0] * (anchor_x - xs[0])
    for i in range(1, len(xs)):
        ys[i] = ys[i - 1] + slopes[i - 1] * (xs[i] - xs[i - 1])
    return ConcaveProfile((A, B), tuple(zip(xs.tolist(), ys.tolist())))


def load_profile(path: str) -> ConcaveProfile:
    with open(path, encoding="utf-8") as fh:
        return ConcaveProfile.from_json(fh.read())
