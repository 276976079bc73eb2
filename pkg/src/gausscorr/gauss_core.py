"""One-dimensional standard Gaussian primitives and the Mills-ratio tail bounds.

Everything here is vectorised over numpy arrays but returns plain floats for
scalar input.  Tail quantities are evaluated through the scaled complementary
error function so that nothing cancels for large arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
from scipy import special

from .errors import DomainError

SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI

# Table rows reproduced by ``error_table``: x -> (upper_new, upper_komatsu, lower),
# each a relative error rounded to two significant digits.
REFERENCE_TABLE: dict[float, tuple[float, float, float]] = {
    0.0: (0.13, 0.13, -0.20),
    2.0: (0.30e-2, 0.67e-1, -0.17e-1),
    4.0: (0.20e-3, 0.25e-1, -0.25e-2),
    6.0: (0.27e-4, 0.13e-1, -0.61e-3),
    8.0: (0.59e-5, 0.74e-2, -0.21e-3),
    10.0: (0.17e-5, 0.48e-2, -0.92e-4),
    20.0: (0.30e-7, 0.12e-2, -0.61e-5),
    30.0: (0.27e-8, 0.55e-3, -0.12e-5),
    40.0: (0.48e-9, 0.31e-3, -0.39e-6),
    50.0: (0.13e-9, 0.20e-3, -0.16e-6),
}
TABLE_XS: tuple[float, ...] = tuple(REFERENCE_TABLE)


def _out(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def std_pdf(x):
    x = np.asarray(x, dtype=float)
    return _out(INV_SQRT_2PI * np.exp(-0.5 * x * x))


def std_cdf(x):
    """Standard normal CDF, with ``std_cdf(-inf) == 0`` and ``std_cdf(inf) == 1``."""
    return _out(special.ndtr(np.asarray(x, dtype=float)))


def std_sf(x):
    """Upper tail ``1 - std_cdf(x)`` without cancellation."""
    return _out(special.ndtr(-np.asarray(x, dtype=float)))


def std_cdf_inv(p):
    """Standard normal quantile; ``0 -> -inf`` and ``1 -> +inf``."""
    p = np.asarray(p, dtype=float)
    if np.any(np.isnan(p)) or np.any((p < 0.0) | (p > 1.0)):
        raise DomainError(f"probability outside [0, 1]: {p}")
    return _out(special.ndtri(p))


def gauss_interval(a, b):
    """Gaussian weight ``Phi(b) - Phi(a)``, evaluated on the side that avoids cancellation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    right = special.ndtr(-a) - special.ndtr(-b)
    left = special.ndtr(b) - special.ndtr(a)
    middle = 1.0 - special.ndtr(a) - special.ndtr(-b)
    out = np.where(a >= 0.0, right, np.where(b <= 0.0, left, middle))
    return _out(np.maximum(out, 0.0))


def mills(x):
    """Mills ratio ``g(x) = exp(x^2/2) * int_x^inf exp(-t^2/2) dt``."""
    x = np.asarray(x, dtype=float)
    return _out(SQRT_HALF_PI * special.erfcx(x / math.sqrt(2.0)))


def hazard(x):
    """Gaussian hazard rate ``f(x) = 1 / g(x)``."""
    return _out(1.0 / np.asarray(mills(x), dtype=float))


def bivariate_cdf(x, y, rho):
    """``P(X <= x, Y <= y)`` for standard normals with correlation ``rho``.

    Owen's T-function representation; accurate to a few ulps in absolute terms.
    """
    if np.isscalar(x) and np.isscalar(y) and np.isscalar(rho):
        return _bvn_scalar(float(x), float(y), float(rho))
    x, y, rho = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, rho)))
    out = np.zeros(x.shape)
    s = np.sqrt(np.maximum(1.0 - rho * rho, 0.0))

    lo = np.isneginf(x) | np.isneginf(y)
    x_inf = np.isposinf(x) & ~lo
    y_inf = np.isposinf(y) & ~lo & ~x_inf
    out[x_inf] = special.ndtr(y[x_inf])
    out[y_inf] = special.ndtr(x[y_inf])
    rest = ~(lo | x_inf | y_inf)
    if np.any(rest & (s == 0.0)):
        raise DomainError("bivariate_cdf requires |rho| < 1")

    xr, yr, rr, sr = x[rest], y[rest], rho[rest], s[rest]
    with np.errstate(divide="ignore", invalid="ignore"):
        ax = np.where(xr == 0.0, np.copysign(np.inf, yr - rr * xr) * (yr - rr * xr != 0.0),
                      (yr - rr * xr) / (xr * sr))
        ay = np.where(yr == 0.0, np.copysign(np.inf, xr - rr * yr) * (xr - rr * yr != 0.0),
                      (xr - rr * yr) / (yr * sr))
    ax = np.nan_to_num(ax, nan=0.0)
    ay = np.nan_to_num(ay, nan=0.0)
    # signs rather than the product x*y, which underflows for tiny arguments
    sx, sy = np.sign(xr), np.sign(yr)
    beta = np.where((sx * sy > 0.0) | ((sx * sy == 0.0) & (sx + sy >= 0.0)), 0.0, 0.5)
    val = (0.5 * special.ndtr(xr) + 0.5 * special.ndtr(yr)
           - special.owens_t(xr, ax) - special.owens_t(yr, ay) - beta)
    both_zero = (xr == 0.0) & (yr == 0.0)
    val = np.where(both_zero, 0.25 + np.arcsin(rr) / (2.0 * math.pi), val)
    out[rest] = np.clip(val, 0.0, 1.0)
    return _out(out)


def _owen_arg(u: float, v: float, rho: float, s: float) -> float:
    num = v - rho * u
    if u == 0.0:
        return 0.0 if num == 0.0 else math.copysign(math.inf, num)
    return num / (u * s)


def _bvn_scalar(x: float, y: float, rho: float) -> float:
    if x == -math.inf or y == -math.inf:
        return 0.0
    if x == math.inf:
        return float(special.ndtr(y))
    if y == math.inf:
        return float(special.ndtr(x))
    s = math.sqrt(max(1.0 - rho * rho, 0.0))
    if s == 0.0:
        raise DomainError("bivariate_cdf requires |rho| < 1")
    if x == 0.0 and y == 0.0:
        return 0.25 + math.asin(rho) / (2.0 * math.pi)
    sx, sy = np.sign(x), np.sign(y)
    beta = 0.0 if (sx * sy > 0.0 or (sx * sy == 0.0 and sx + sy >= 0.0)) else 0.5
    val = (0.5 * special.ndtr(x) + 0.5 * special.ndtr(y)
           - special.owens_t(x, _owen_arg(x, y, rho, s))
           - special.owens_t(y, _owen_arg(y, x, rho, s)) - beta)
    return min(max(float(val), 0.0), 1.0)


def layer_centroid(a: float, b: float) -> float:
    """Mean of the standard normal truncated to ``[a, b]``.

    Endpoints may be infinite.  Deep tails are handled by factoring out the
    density at the endpoint nearer the origin.
    """
    a = float(a)
    b = float(b)
    if not a < b:
        raise DomainError(f"degenerate interval [{a}, {b}]")
    if b <= 0.0:
        return -layer_centroid(-b, -a)
    if a >= 0.0:
        # (phi(a) - phi(b)) / (Q(a) - Q(b)) with phi(a) divided out
        ratio = 0.0 if math.isinf(b) else math.exp(-0.5 * (b - a) * (b + a))
        num = -math.expm1(-0.5 * (b - a) * (b + a)) if not math.isinf(b) else 1.0
        den = mills(a) - (0.0 if math.isinf(b) else mills(b) * ratio)
        if den <= 0.0:
            raise DomainError(f"interval [{a}, {b}] has zero Gaussian measure")
        return num / den
    w = gauss_interval(a, b)
    if w <= 0.0:
        raise DomainError(f"interval [{a}, {b}] has zero Gaussian measure")
    return (std_pdf(a) - std_pdf(b)) / w


@dataclass(frozen=True)
class TailBoundSet:
    """The two Komatsu bounds and the sharper upper bound at one point.

    ``valid`` is False when ``x <= -1``; ``upper_new`` is then ``+inf`` and the
    set must not be used in comparisons.
    """

    x: float
    lower: float
    upper_new: float
    upper_komatsu: float
    valid: bool = True


@dataclass(frozen=True)
class ErrorTableRow:
    x: float
    err_upper_new: float
    err_upper_komatsu: float
    err_lower: float

    def rounded(self, digits: int = 2) -> tuple[float, float, float]:
        return (round_sig(self.err_upper_new, digits),
                round_sig(self.err_upper_komatsu, digits),
                round_sig(self.err_lower, digits))


def lower_bound(x):
    """Komatsu lower bound ``2 / (x + sqrt(x^2 + 4))``, valid for every real x."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x * x + 4.0)
    # rationalised form for x < 0 avoids cancellation in the denominator
    return _out(np.where(x >= 0.0, 2.0 / (x + r), 0.5 * (r - x)))


def upper_komatsu(x):
    """Komatsu upper bound ``2 / (x + sqrt(x^2 + 2))``."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x * x + 2.0)
    return _out(np.where(x >= 0.0, 2.0 / (x + r), r - x))


def upper_new(x):
    """Sharper upper bound ``4 / (3x + sqrt(x^2 + 8))``; ``+inf`` for ``x <= -1``."""
    x = np.asarray(x, dtype=float)
    den = 3.0 * x + np.sqrt(x * x + 8.0)
    with np.errstate(divide="ignore"):
        val = 4.0 / den
    return _out(np.where(x > -1.0, val, np.inf))


def upper_new_derivative(x):
    """Exact derivative of ``upper_new`` for ``x > -1``."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x * x + 8.0)
    den = 3.0 * x + r
    return _out(-4.0 * (3.0 + x / r) / (den * den))


def tail_bounds(x: float) -> TailBoundSet:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise DomainError(f"tail bounds need a finite x, got {x}")
    return TailBoundSet(x=x, lower=lower_bound(x), upper_new=upper_new(x),
                        upper_komatsu=upper_komatsu(x), valid=x > -1.0)


def relative_error(bound, exact):
    return _out(np.asarray(bound, dtype=float) / np.asarray(exact, dtype=float) - 1.0)


def error_table(xs=TABLE_XS) -> list[ErrorTableRow]:
    """Relative errors ``(bound - g) / g`` of the three bounds at each x."""
    rows = []
    for x in xs:
        x = float(x)
        if not x > -1.0:
            raise DomainError(f"error table rows need x > -1, got {x}")
        g = mills(x)
        b = tail_bounds(x)
        rows.append(ErrorTableRow(x, relative_error(b.upper_new, g),
                                  relative_error(b.upper_komatsu, g),
                                  relative_error(b.lower, g)))
    return rows


def round_sig(value: float, digits: int = 2) -> float:
    """Round to ``digits`` significant digits, halves away from zero."""
    if value == 0.0 or not math.isfinite(value):
        return value
    d = Decimal(repr(value))
    exponent = d.adjusted() - digits + 1
    return float(d.quantize(Decimal(1).scaleb(exponent), rounding=ROUND_HALF_UP))


def format_sig(value: float, digits: int = 2) -> str:
    """Render like the published table: ``.30e-2``, ``-.17e-1``, ``.13``."""
    v = round_sig(value, digits)
    if v == 0.0:
        return "0"
    sign = "-" if v < 0 else ""
    mant, exp = f"{abs(v):.{digits - 1}e}".split("e")
    exp = int(exp) + 1
    body = "." + mant.replace(".", "")
    return f"{sign}{body}" if exp == 0 else f"{sign}{body}e{exp}"


def upper_new_ode_gap(x):
    """``x g+(x) - 1 - g+'(x)`` for the sharper upper bound ``g+``, ``x > -1``.

    With ``r = sqrt(x^2 + 8)`` and ``u = x / r`` the gap simplifies exactly to
    ``4 (1 - u)^2 / ((1 + u) (3x + r)^2)`` where ``1 - u = 8 / (r (r + x))``.
    This form has no cancellation and is visibly nonnegative.
    """
    x = np.asarray(x, dtype=float)
    r = np.sqrt(x * x + 8.0)
    one_minus_u = 8.0 / (r * (r + x))
    den = 3.0 * x + r
    return _out(4.0 * one_minus_u ** 2 / ((2.0 - one_minus_u) * den * den))


# --- property suites -----------------------------------------------------------

@dataclass(frozen=True)
class PropertyCheck:
    """One invariant evaluated on a grid; ``worst`` is the largest violation."""

    name: str
    passed: bool
    worst: float
    location: float
    points: int


def _worst(name: str, xs: np.ndarray, violation: np.ndarray, tol: float) -> PropertyCheck:
    k = int(np.argmax(violation))
    return PropertyCheck(name, bool(violation[k] <= tol), float(violation[k]), float(xs[k]), int(xs.size))


def sandwich_grid(n: int = 10_000) -> np.ndarray:
    """``n`` points on ``(-1 + 1e-6, 60]``, log-spaced in the distance to ``-1``."""
    return -1.0 + np.geomspace(1e-6, 61.0, n)


def check_sandwich(xs=None, rel_tol: float = 1e-12) -> list[PropertyCheck]:
    """``lower <= g <= upper_new`` (relative), and ``upper_new <= upper_komatsu`` for ``x >= 0``."""
    xs = sandwich_grid() if xs is None else np.asarray(xs, dtype=float)
    g = mills(xs)
    out = [_worst("lower <= g", xs, (lower_bound(xs) - g) / g, rel_tol),
           _worst("g <= upper_new", xs, (g - upper_new(xs)) / g, rel_tol)]
    pos = xs[xs >= 0.0]
    if pos.size:
        un, uk = upper_new(pos), upper_komatsu(pos)
        out.append(_worst("upper_new <= upper_komatsu", pos, (un - uk) / uk, 1e-15))
        out.append(_worst("g <= 1/x", pos[pos > 0], mills(pos[pos > 0]) * pos[pos > 0] - 1.0, 1e-15)
                   if np.any(pos > 0) else PropertyCheck("g <= 1/x", True, -math.inf, math.nan, 0))
    return out


def check_mills_ode(xs=None, step: float = 1e-5, tol: float = 1e-6,
                    upper_tol: float = 1e-12, normalise: bool = False) -> list[PropertyCheck]:
    """``g' = x g - 1`` by central differences, and ``g+' <= x g+ - 1`` for ``x > -1``.

    With ``normalise=True`` the identity error is divided by ``max(1, g)``,
    which is needed far left where ``g`` itself is huge.
    """
    xs = sandwich_grid() if xs is None else np.asarray(xs, dtype=float)
    g = mills(xs)
    fd = (mills(xs + step) - mills(xs - step)) / (2.0 * step)
    err = np.abs(fd - (xs * g - 1.0))
    if normalise:
        err = err / np.maximum(1.0, g)
    out = [_worst("g' = x g - 1", xs, err, tol)]
    right = xs[xs > -1.0]
    out.append(_worst("g+' <= x g+ - 1", right, -upper_new_ode_gap(right), upper_tol))
    return out


def check_hazard(xs=None, step: float = 1e-3, tol: float = 1e-8,
                 tail=None) -> list[PropertyCheck]:
    """Hazard rate ``f = 1/g``: increasing, convex, ``x - f`` increasing, ``|x - f|`` decreasing on the tail."""
    xs = np.arange(-10.0, 10.0 + step / 2, step) if xs is None else np.asarray(xs, dtype=float)
    f = hazard(xs)
    h = np.diff(xs)
    d1 = np.diff(f) / h
    d2 = np.diff(d1) / (0.5 * (h[1:] + h[:-1]))
    dxf = np.diff(xs - f) / h
    tail = np.arange(1.0, 40.0 + 0.25, 0.5) if tail is None else np.asarray(tail, dtype=float)
    gap = np.abs(tail - hazard(tail))
    return [_worst("f' >= 0", xs[:-1], -d1, tol),
            _worst("f'' >= 0", xs[1:-1], -d2, tol),
            _worst("(x - f)' >= 0", xs[:-1], -dxf, tol),
            # strict decrease: a zero or positive step is a violation
            _worst("|x - f| decreasing", tail[1:], np.diff(gap), -1e-300)]
