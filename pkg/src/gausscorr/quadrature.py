"""Adaptive Gauss-Kronrod integration and bracketing root finding.

Integrands are called with 1-D numpy arrays and must return arrays of the
same shape (a scalar return is broadcast).  All panels of one refinement
pass are evaluated in a single call, left to right, so results do not depend
on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .errors import BracketError, ConvergenceError, DomainError, QuadratureError
from .gauss_core import INV_SQRT_2PI

DEFAULT_TOL = 1e-10
TAIL_CUTOFF = 40.0
DEFAULT_MAX_EVALS = 400_000

# Kronrod 15-point nodes (non-negative half) and weights; Gauss 7-point weights
# sit on the odd-indexed Kronrod nodes.
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KWEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])

_GAUSS_SEEDS = (-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0)


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    bracket: tuple[float, float]
    iterations: int


def _clip(a: float, b: float, cutoff: float | None) -> tuple[float, float]:
    if cutoff is not None:
        a = max(a, -cutoff)
        b = min(b, cutoff)
    if math.isinf(a) or math.isinf(b):
        raise DomainError("infinite limits need a tail cutoff")
    return a, b


def integrate(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
              breakpoints: Sequence[float] = (), *, cutoff: float | None = TAIL_CUTOFF,
              max_evals: int = DEFAULT_MAX_EVALS) -> IntegrationResult:
    """Integrate ``f`` over ``[a, b]`` against Lebesgue measure.

    Infinite endpoints are replaced by ``+-cutoff``; this is only sensible for
    integrands that decay like a Gaussian.  Panels are bisected until each
    one's Kronrod-Gauss difference is below its width share of ``tol``.
    """
    a, b = float(a), float(b)
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not a < b:
        raise DomainError(f"need a < b, got [{a}, {b}]")
    lo, hi = _clip(a, b, cutoff)
    if not lo < hi:
        return IntegrationResult(0.0, 0.0, 1)
    cuts = sorted({lo, hi, *(float(p) for p in breakpoints if lo < p < hi)})
    left = np.array(cuts[:-1])
    right = np.array(cuts[1:])
    total_width = hi - lo

    value = 0.0
    error = 0.0
    evals = 0
    while left.size:
        if evals + 15 * left.size > max_evals:
            raise QuadratureError(
                f"no convergence on [{a}, {b}] within {max_evals} evaluations "
                f"({left.size} panels still open, error so far {error:.3g})")
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.broadcast_to(np.asarray(f(x.ravel()), dtype=float), (x.size,)).reshape(x.shape)
        evals += x.size
        kron = half * (fx @ _KWEIGHTS)
        gauss = half * (fx @ _GWEIGHTS)
        err = np.abs(kron - gauss)
        if not np.all(np.isfinite(kron)):
            raise QuadratureError(f"non-finite integrand values on [{a}, {b}]")
        share = np.maximum(tol * (2.0 * half) / total_width, 50.0 * np.finfo(float).eps * np.abs(kron))
        tiny = 2.0 * half <= 1e-12 * max(1.0, abs(mid).max())
        done = (err <= share) | tiny
        value += float(np.sum(kron[done]))
        error += float(np.sum(err[done]))
        keep = ~done
        left = np.concatenate([left[keep], mid[keep]])
        right = np.concatenate([mid[keep], right[keep]])
        order = np.argsort(left, kind="stable")
        left, right = left[order], right[order]
    if error > tol and error > 1e-12 * abs(value):
        raise QuadratureError(f"error estimate {error:.3g} exceeds tol {tol:.3g} on [{a}, {b}]")
    return IntegrationResult(value, error, evals)


def integrate_gauss(f: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
                    breakpoints: Sequence[float] = (), *,
                    max_evals: int = DEFAULT_MAX_EVALS) -> IntegrationResult:
    """``int_a^b f(x) dmu_1(x)`` for the standard Gaussian measure ``mu_1``.

    Tails beyond ``|x| = 40`` carry less than ``1e-300`` of the mass and are
    dropped.
    """
    def weighted(x):
        return np.asarray(f(x), dtype=float) * (INV_SQRT_2PI * np.exp(-0.5 * x * x))

    seeds = (*breakpoints, *_GAUSS_SEEDS)
    return integrate(weighted, a, b, tol, seeds, cutoff=TAIL_CUTOFF, max_evals=max_evals)


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
              max_iter: int = 200) -> RootResult:
    """Brent's method on a bracket with a strict sign change.

    An endpoint that is an exact zero is returned as is, unless both are zero,
    which is treated as a missing sign change.
    """
    lo, hi = float(lo), float(hi)
    if not tol > 0:
        raise DomainError("tol must be positive")
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = float(f(lo)), float(f(hi))
    if math.isnan(flo) or math.isnan(fhi):
        raise BracketError(f"f is NaN at a bracket endpoint [{lo}, {hi}]")
    if flo == 0.0 and fhi == 0.0:
        raise BracketError(f"f vanishes at both ends of [{lo}, {hi}]; no sign change")
    if flo == 0.0:
        return RootResult(lo, 0.0, (lo, hi), 0)
    if fhi == 0.0:
        return RootResult(hi, 0.0, (lo, hi), 0)
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {flo:.3g}, {fhi:.3g}")
    xtol = min(tol, 1e-12 * max(1.0, abs(lo), abs(hi)))
    try:
        root, info = optimize.brentq(f, lo, hi, xtol=xtol, maxiter=max_iter,
                                     full_output=True, disp=False)
    except RuntimeError as exc:  # pragma: no cover - brentq raises only with disp=True
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(f"root finder did not converge in {max_iter} iterations on [{lo}, {hi}]")
    root = min(max(root, lo), hi)
    return RootResult(root, float(f(root)), (lo, hi), info.iterations)


def expand_bracket(f: Callable[[float], float], lo: float, hi: float, *,
                   factor: float = 2.0, max_expansions: int = 60,
                   lower_limit: float = -math.inf, upper_limit: float = math.inf):
    """Grow ``[lo, hi]`` geometrically until ``f`` changes sign.

    Returns ``(lo, hi, trace)`` where ``trace`` lists every ``(lo, hi, f(lo),
    f(hi))`` tried.  Each end moves away from the other by ``factor`` times
    the current width, clamped to the given limits.
    """
    trace = []
    flo, fhi = float(f(lo)), float(f(hi))
    for _ in range(max_expansions + 1):
        trace.append((lo, hi, flo, fhi))
        if (flo <= 0) != (fhi <= 0) or flo == 0.0 or fhi == 0.0:
            return lo, hi, trace
        width = hi - lo
        if abs(flo) < abs(fhi) and lo > lower_limit:
            lo = max(lo - factor * width, lower_limit)
            flo = float(f(lo))
        elif hi < upper_limit:
            hi = min(hi + factor * width, upper_limit)
            fhi = float(f(hi))
        elif lo > lower_limit:
            lo = max(lo - factor * width, lower_limit)
            flo = float(f(lo))
        else:
            break
    raise BracketError(f"no sign change found after expanding to [{lo}, {hi}]", trace)
