"""End-to-end checks of the correlation inequality ``mu(K cap L) >= mu(K) mu(L)``.

Quadrature harnesses for profiles and polygons, Monte Carlo harnesses for the
jointly-Gaussian restatement and for symmetric layers, and an exploratory
search over pairs of polygons with coinciding Gaussian centroids.

Monte Carlo draws are organised in fixed-size chunks; chunk ``k`` of stream
``s`` under master seed ``seed`` always comes from a Philox generator keyed by
``(seed, s, k)``.  Results are accumulated in chunk order, so running chunks
in parallel does not change a single bit of the output.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import gauss_core as gc
from .errors import (ConvergenceError, DegenerateRegionError, DomainError, InfeasibleError,
                     OutOfScopeError)
from .extremal import extend_support, final_case_geometry
from .polygon import ConvexPolygon, random_polygon
from .profiles import (ConcaveProfile, Layer, functionals, line_mass, match_layer)
from .quadrature import DEFAULT_TOL, integrate_gauss
from .reduction import ehrhard_profile, linearize

__all__ = [
    "match_layer", "VerificationReport", "GaussianVector", "mc_generator",
    "verify_theorem1", "verify_theorem1a", "verify_sidak", "search_problem2",
    "Problem2Report", "cross_validate_mass", "reduction_chain", "relaxed_halfplane_check",
    "write_jsonl", "ChainReport", "theorem1_batch", "sidak_instance", "match_centroid",
    "problem2_margin",
]

CHUNK = 1 << 16
THEOREM1_TOL = 1e-7
STREAM_THEOREM1A = 1
STREAM_SIDAK = 2
STREAM_PROBLEM2 = 3
STREAM_CROSS = 4


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.generic):
        return _clean(v.item())
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    return v


# --- reports ----------------------------------------------------------------------

@dataclass
class VerificationReport:
    """Outcome of one inequality check ``lhs >= rhs``.

    ``status`` is ``pass`` iff ``margin >= -tolerance`` for quadrature and
    ``margin >= -3 * mc_std_error`` for Monte Carlo; ``inconclusive`` is used
    when a Monte Carlo hypothesis could not be confirmed.
    """

    instance: dict
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    method: str
    mc_std_error: float | None = None
    status: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.status:
            self.status = self.judge()

    def judge(self) -> str:
        if self.method == "quadrature":
            return "pass" if self.margin >= -self.tolerance else "fail"
        return "pass" if self.margin >= -3.0 * (self.mc_std_error or 0.0) else "fail"

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return _clean(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def write_jsonl(reports: Iterable, path) -> None:
    """One JSON object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write((rep.to_json() if hasattr(rep, "to_json") else json.dumps(_clean(rep))) + "\n")


# --- random numbers ----------------------------------------------------------------

def mc_generator(seed: int, stream: int, chunk: int) -> np.random.Generator:
    """Counter-based generator for one chunk of one stream."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream), int(chunk)])))


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(int(n), CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def mc_sums(n: int, dim: int, seed: int, stream: int,
            statistic: Callable[[np.ndarray], np.ndarray], workers: int = 1) -> np.ndarray:
    """Sum of ``statistic(z)`` over ``n`` standard normal draws in ``R^dim``.

    ``statistic`` maps a ``(size, dim)`` sample block to a ``(size, k)`` array;
    the column sums of each chunk are added in chunk order.
    """
    sizes = _chunk_sizes(n)
    if not sizes:
        raise DomainError("need at least one sample")

    def run(k):
        z = mc_generator(seed, stream, k).standard_normal((sizes[k], dim))
        return np.asarray(statistic(z), dtype=float).sum(axis=0)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    total = np.zeros_like(parts[0])
    for p in parts:
        total = total + p
    return total


# --- Gaussian vectors -----------------------------------------------------------------

@dataclass(frozen=True)
class GaussianVector:
    """Jointly Gaussian vector with a positive-semidefinite covariance."""

    covariance: np.ndarray
    mean: np.ndarray | None = None

    def __post_init__(self):
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if cov.shape[0] != cov.shape[1]:
            raise DomainError("covariance must be square")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
            raise DomainError("covariance is not symmetric")
        eig = np.linalg.eigvalsh(cov)
        if eig.min() < -1e-12 * max(1.0, abs(eig).max()):
            raise DomainError(f"covariance is not positive semidefinite (min eigenvalue {eig.min():.3g})")
        mean = np.zeros(cov.shape[0]) if self.mean is None else np.asarray(self.mean, dtype=float)
        if mean.shape != (cov.shape[0],):
            raise DomainError("mean has the wrong dimension")
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def dimension(self) -> int:
        return self.covariance.shape[0]

    def factor(self) -> np.ndarray:
        """``F`` with ``F F^T = covariance``; Cholesky, or a symmetric square root if singular."""
        try:
            return np.linalg.cholesky(self.covariance)
        except np.linalg.LinAlgError:
            w, v = np.linalg.eigh(self.covariance)
            return v * np.sqrt(np.clip(w, 0.0, None))

    def transform(self, z: np.ndarray) -> np.ndarray:
        return self.mean + z @ self.factor().T


# --- centred layers by quadrature ------------------------------------------------------------

def _polygon_functionals(polygon: ConvexPolygon, u, interval, tol):
    """Mass and moment of ``K cap {alpha <= <x,u> <= beta}`` from its Ehrhard profile."""
    lo, hi = polygon.projection(u)
    lo, hi = max(lo, interval[0]), min(hi, interval[1])
    if not lo < hi:
        return 0.0, 0.0
    bps = sorted(set((polygon.array @ (np.asarray(u) / np.hypot(*u))).tolist()))

    def weight(t):
        psi = ehrhard_profile(polygon, u, grid=t).psi
        return gc.std_cdf(psi)

    m0 = integrate_gauss(weight, lo, hi, tol, bps).value
    m1 = integrate_gauss(lambda t: t * weight(t), lo, hi, tol, bps).value
    return m0, m1


def verify_theorem1(K, w: float, tol: float = THEOREM1_TOL, direction=None,
                    quad_tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check ``mu(C cap L) >= mu(C) w`` for the layer ``L`` of weight ``w`` sharing ``C``'s centroid.

    ``K`` is a ``ConcaveProfile`` (the region under it) or a ``ConvexPolygon``
    together with a unit ``direction``.  Raises ``InfeasibleError`` when no
    layer of weight ``w`` has that centroid.
    """
    if isinstance(K, ConvexPolygon):
        u = np.asarray((1.0, 0.0) if direction is None else direction, dtype=float)
        u = u / np.hypot(*u)
        mass, moment = _polygon_functionals(K, u, (-math.inf, math.inf), quad_tol)
        instance = {"polygon": K.to_dict(), "direction": u.tolist(), "w": w}
    elif isinstance(K, ConcaveProfile):
        fn = functionals(K, (-math.inf, math.inf), quad_tol)
        mass, moment = fn.mass, fn.moment
        instance = {"profile": K.to_dict(), "w": w}
    else:
        raise DomainError(f"unsupported body type {type(K).__name__}")
    if mass < 1e-8:
        raise DegenerateRegionError(f"body mass {mass:.3g} too small for a centroid")
    c = moment / mass
    layer = match_layer(c, w)
    if isinstance(K, ConvexPolygon):
        lhs, _ = _polygon_functionals(K, u, (layer.a, layer.b), quad_tol)
    else:
        lhs = functionals(K, (layer.a, layer.b), quad_tol).mass
    rhs = mass * layer.weight
    instance["layer"] = layer.to_dict()
    return VerificationReport(instance, lhs, rhs, lhs - rhs, tol, "quadrature",
                              extra={"mass": mass, "centroid": c})


# --- Gaussian-vector form by Monte Carlo ----------------------------------------------------------

def _ratio_se(s_w: float, s_wy: float, s_wy2: float, n: int) -> tuple[float, float]:
    """Ratio estimate ``sum(W Y) / sum(W)`` and its delta-method standard error."""
    if s_w <= 0.0:
        raise DegenerateRegionError("conditioning event was never observed")
    ratio = s_wy / s_w
    resid2 = s_wy2 - 2.0 * ratio * s_wy + ratio * ratio * s_w
    p = s_w / n
    var = max(resid2 / n, 0.0) / (p * p) / n
    return ratio, math.sqrt(var)


def verify_theorem1a(X: GaussianVector, thresholds: Sequence[float], y_index: int, w: float,
                     mc: int = 100_000, seed: int = 0, layer: Layer | None = None,
                     hypothesis: str = "centroid", workers: int = 1) -> VerificationReport:
    """``P(rect, a <= Y <= b) >= P(rect) P(a <= Y <= b)`` by Monte Carlo.

    ``rect = {X_i <= b_i, i != y_index}``.  Without an explicit ``layer`` the
    band is chosen from a pilot run so that its centroid equals the estimated
    ``E(Y | rect)``.  The hypothesis tested on the main run is
    ``E(Y | rect) = E(Y | band)`` (``hypothesis="centroid"``) or the literal
    ``E(Y | rect, band) = E(Y | band)`` (``hypothesis="conditional"``).  The
    inequality is judged only when the hypothesis residual is within three
    standard errors of zero; otherwise the report is ``inconclusive``.
    """
    if mc < 100_000:
        raise DomainError("Gaussian-vector checks need at least 1e5 samples")
    if hypothesis not in ("centroid", "conditional"):
        raise DomainError(f"unknown hypothesis reading {hypothesis!r}")
    n = X.dimension
    thr = np.asarray(thresholds, dtype=float)
    others = [i for i in range(n) if i != y_index]
    if thr.shape != (len(others),):
        raise DomainError(f"need {len(others)} thresholds, got {thr.shape}")
    if np.any(np.isneginf(thr)):
        raise DegenerateRegionError("a threshold of -inf gives an empty rectangle")
    F = X.factor()
    mu = X.mean
    sd_y = math.sqrt(X.covariance[y_index, y_index])
    if sd_y == 0.0:
        raise DegenerateRegionError("Y has zero variance")

    def coords(z):
        v = mu + z @ F.T
        rect = np.all(v[:, others] <= thr, axis=1) if others else np.ones(len(v), dtype=bool)
        return v[:, y_index], rect.astype(float)

    if layer is None:
        def pilot(z):
            y, r = coords(z)
            return np.column_stack([r, r * y])

        s = mc_sums(mc, n, seed, STREAM_THEOREM1A * 10, pilot, workers)
        if s[0] <= 0.0:
            raise DegenerateRegionError("rectangle has zero estimated probability")
        c_target = (s[1] / s[0] - mu[y_index]) / sd_y
        std_layer = match_layer(c_target, w)
    else:
        std_layer = layer
    a = mu[y_index] + sd_y * std_layer.a
    b = mu[y_index] + sd_y * std_layer.b
    band_p = std_layer.weight
    band_mean = mu[y_index] + sd_y * std_layer.centroid

    def stats(z):
        y, r = coords(z)
        band = ((y >= a) & (y <= b)).astype(float)
        cond = r if hypothesis == "centroid" else r * band
        diff = r * (band - band_p)
        return np.column_stack([cond, cond * y, cond * y * y, diff, diff * diff, r, r * band])

    s = mc_sums(mc, n, seed, STREAM_THEOREM1A, stats, workers)
    cond_mean, cond_se = _ratio_se(s[0], s[1], s[2], mc)
    residual = cond_mean - band_mean
    margin = s[3] / mc
    se = math.sqrt(max(s[4] / mc - margin * margin, 0.0) / mc)
    p_rect = s[5] / mc
    lhs = s[6] / mc
    instance = {"covariance": X.covariance.tolist(), "mean": X.mean.tolist(),
                "thresholds": thr.tolist(), "y_index": y_index, "w": w, "mc": mc, "seed": seed,
                "layer": [a, b], "hypothesis": hypothesis}
    extra = {"hypothesis_residual": residual, "hypothesis_se": cond_se, "p_rect": p_rect}
    rep = VerificationReport(instance, lhs, p_rect * band_p, margin, 3.0 * se, "monte-carlo", se,
                             extra=extra)
    if abs(residual) > 3.0 * cond_se:
        rep.status = "inconclusive"
    return rep


# --- symmetric layers -----------------------------------------------------------------------

def verify_sidak(directions, radii, mc: int = 1_000_000, seed: int = 0,
                 workers: int = 1) -> VerificationReport:
    """``mu(cap_i {|<x, u_i>| <= t_i}) >= prod_i mu(...)`` by Monte Carlo.

    Each factor is exact: ``<Z, u_i>`` is normal with variance ``|u_i|^2``, so
    ``mu(K_i) = 2 Phi(t_i / |u_i|) - 1``.
    """
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    t = np.asarray(radii, dtype=float)
    if U.shape[0] < 2:
        raise DomainError("need at least two layers")
    if t.shape != (U.shape[0],) or np.any(t <= 0.0):
        raise DomainError("need one positive radius per direction")
    norms = np.linalg.norm(U, axis=1)
    if np.any(norms == 0.0):
        raise DomainError("directions must be nonzero")
    singles = np.asarray(gc.gauss_interval(-t / norms, t / norms))
    rhs = float(np.prod(singles))

    def stat(z):
        inside = np.all(np.abs(z @ U.T) <= t, axis=1).astype(float)
        return inside[:, None]

    hits = float(mc_sums(mc, U.shape[1], seed, STREAM_SIDAK, stat, workers)[0])
    p = hits / mc
    se = math.sqrt(max(p * (1.0 - p), 1.0 / mc) / mc)
    instance = {"directions": U.tolist(), "radii": t.tolist(), "mc": mc, "seed": seed}
    return VerificationReport(instance, p, rhs, p - rhs, 3.0 * se, "monte-carlo", se,
                              extra={"layer_measures": singles.tolist()})


# --- cross-validation -----------------------------------------------------------------------

def cross_validate_mass(polygon: ConvexPolygon, mc: int = 1_000_000, seed: int = 0,
                        quad_tol: float = DEFAULT_TOL, workers: int = 1) -> VerificationReport:
    """Monte Carlo estimate of ``mu_2(K)`` against quadrature of its slice profile.

    ``margin`` is the difference of the two and ``status`` is ``pass`` when
    it lies within three standard errors.
    """
    quad, _ = _polygon_functionals(polygon, (1.0, 0.0), (-math.inf, math.inf), quad_tol)

    def stat(z):
        return polygon.contains(z).astype(float)[:, None]

    p = float(mc_sums(mc, 2, seed, STREAM_CROSS, stat, workers)[0]) / mc
    se = math.sqrt(max(p * (1.0 - p), 1.0 / mc) / mc)
    diff = p - quad
    rep = VerificationReport({"polygon": polygon.to_dict(), "mc": mc, "seed": seed},
                             p, quad, diff, 3.0 * se, "monte-carlo", se)
    rep.status = "pass" if abs(diff) <= 3.0 * se else "fail"
    return rep


# --- centroid-matched polygon search -------------------------------------------------------------------------

def match_centroid(moving: ConvexPolygon, target: np.ndarray, tol: float = 1e-11,
                   max_iter: int = 60) -> tuple[ConvexPolygon, np.ndarray]:
    """Translate ``moving`` so that its Gaussian centroid equals ``target``.

    Damped Newton on the translation with a forward-difference Jacobian of
    the closed-form centroid; the step is halved until the residual shrinks.
    """
    shift = np.asarray(target, dtype=float) - moving.gaussian_centroid()

    def residual(v):
        poly = moving.translate(v)
        if poly.gaussian_mass() < 1e-12:
            raise DegenerateRegionError("translated polygon lost its mass")
        return poly.gaussian_centroid() - target

    r = residual(shift)
    for _ in range(max_iter):
        norm = float(np.hypot(*r))
        if norm <= tol:
            return moving.translate(shift), r
        h = 1e-7
        J = np.column_stack([(residual(shift + h * e) - r) / h for e in np.eye(2)])
        step = np.linalg.solve(J, -r)
        lam = 1.0
        while True:
            trial = shift + lam * step
            try:
                r_new = residual(trial)
            except DegenerateRegionError:
                r_new = None
            if r_new is not None and np.hypot(*r_new) < norm:
                shift, r = trial, r_new
                break
            lam *= 0.5
            if lam < 1e-6:
                raise ConvergenceError(f"centroid matching stalled at residual {norm:.3g}")
    if np.hypot(*r) <= tol:
        return moving.translate(shift), r
    raise ConvergenceError(f"centroid matching did not converge (residual {np.hypot(*r):.3g})")


def problem2_margin(K1: ConvexPolygon, K2: ConvexPolygon) -> dict:
    """``mu(K1 cap K2) - mu(K1) mu(K2)`` with exact polygon masses."""
    m1, m2 = K1.gaussian_mass(), K2.gaussian_mass()
    inter = K1.intersection(K2)
    mi = inter.gaussian_mass() if inter is not None else 0.0
    return {"mass_1": m1, "mass_2": m2, "mass_intersection": mi, "margin": mi - m1 * m2}


@dataclass
class Problem2Report:
    """Ranked outcome of the search; nothing here is asserted."""

    trials: int
    seed: int
    instances: list[dict]
    skipped: int
    skip_reasons: dict

    @property
    def min_margin(self) -> float:
        return self.instances[0]["margin"] if self.instances else math.nan

    @property
    def min_margin_se(self) -> float | None:
        return self.instances[0].get("mc_std_error") if self.instances else None

    def to_dict(self, top: int | None = None) -> dict:
        rows = self.instances if top is None else self.instances[:top]
        return _clean({"trials": self.trials, "seed": self.seed, "completed": len(self.instances),
                       "skipped": self.skipped, "skip_reasons": self.skip_reasons,
                       "min_margin": self.min_margin, "min_margin_se": self.min_margin_se,
                       "instances": rows})

    def to_json(self, top: int | None = None) -> str:
        return json.dumps(self.to_dict(top), sort_keys=True)


def search_problem2(trials: int, seed: int = 0, tol: float = 1e-11, mc_check: int = 0,
                    mc_samples: int = 200_000) -> Problem2Report:
    """Random polygon pairs with matched Gaussian centroids, ranked by margin.

    Each trial draws two hulls of Gaussian clouds (3 to 12 vertices) and
    translates the second onto the first's centroid.  Masses are exact; for
    the ``mc_check`` most negative margins the intersection mass is also
    estimated by Monte Carlo, and its standard error is recorded.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    rows: list[dict] = []
    reasons: dict[str, int] = {}
    for i in range(trials):
        rng = mc_generator(seed, STREAM_PROBLEM2, i)
        K1 = random_polygon(rng)
        K2 = random_polygon(rng)
        try:
            target = K1.gaussian_centroid()
            K2m, resid = match_centroid(K2, target, tol)
        except (ConvergenceError, DegenerateRegionError, DomainError, np.linalg.LinAlgError) as exc:
            key = type(exc).__name__
            reasons[key] = reasons.get(key, 0) + 1
            continue
        row = {"trial": i, "K1": K1.to_dict(), "K2": K2m.to_dict(),
               "centroid_residual": float(np.hypot(*resid)), **problem2_margin(K1, K2m)}
        rows.append(row)
    rows.sort(key=lambda r: (r["margin"], r["trial"]))
    for row in rows[:mc_check]:
        K1 = ConvexPolygon.from_dict(row["K1"])
        K2 = ConvexPolygon.from_dict(row["K2"])

        def stat(z, K1=K1, K2=K2):
            a, b = K1.contains(z), K2.contains(z)
            d = (a & b).astype(float) - row["mass_1"] * b.astype(float)
            return np.column_stack([d, d * d])

        s = mc_sums(mc_samples, 2, seed, STREAM_PROBLEM2 * 1000 + row["trial"], stat)
        est = s[0] / mc_samples
        row["mc_margin"] = est
        # floor the variance at 1/n so an instance no sample reaches keeps a nonzero SE
        row["mc_std_error"] = math.sqrt(max(s[1] / mc_samples - est * est, 1.0 / mc_samples) / mc_samples)
    return Problem2Report(trials, seed, rows, trials - len(rows), reasons)


# --- reduction chain and relaxed half-plane checks -----------------------------------------

@dataclass
class ChainReport:
    direct_margin: float
    extremal_margin: float
    config: dict | None
    layer: dict

    @property
    def consistent(self) -> bool:
        return self.direct_margin >= self.extremal_margin - 2.0 * THEOREM1_TOL

    def to_dict(self) -> dict:
        d = _clean(asdict(self))
        d["consistent"] = self.consistent
        return d


def reduction_chain(profile: ConcaveProfile, w: float, tol: float = DEFAULT_TOL) -> ChainReport:
    """Compare the correlation margin of ``C_psi`` with that of its extremal replacement.

    The profile is linearised on the matched layer, the line region extended
    to keep the centroid, and the extension continued to an ``R1``/``R2``
    configuration.  That configuration keeps the mass inside the layer and
    has at least the total mass, so its margin can only be smaller.
    """
    rep = verify_theorem1(profile, w, quad_tol=tol)
    layer = Layer(**{k: float(v) for k, v in rep.instance["layer"].items()})
    c = rep.extra["centroid"]
    lin = linearize(profile, (layer.a, layer.b), tol)
    if math.isinf(lin.h0):
        return ChainReport(rep.margin, rep.margin, None, layer.to_dict())
    ext = extend_support(profile, (lin.m0, lin.h0), (layer.a, layer.b), c, tol)
    cfg = ext.final
    if cfg is None:
        raise InfeasibleError("extended configuration has no R1/R2 limit")
    inside = cfg.strip_mass(layer.a, layer.b)
    return ChainReport(rep.margin, inside - cfg.mass() * layer.weight, cfg.to_dict(), layer.to_dict())


def relaxed_halfplane_check(m: float, h: float, a: float, b: float,
                            tol: float = 1e-12) -> VerificationReport:
    """The inequality for the half-plane ``{y <= m x + h}`` and an arbitrary layer.

    The centroid condition is relaxed to ``(a + b)/2 >= 0`` when ``h >= 0`` and
    to ``(a + b)/2 >= x0`` when ``h < 0``; other layers raise ``OutOfScopeError``.
    """
    if m < 0.0:
        raise DomainError("reflect first: the relaxed check assumes m >= 0")
    mid = 0.5 * (a + b)
    if h >= 0.0 and mid < 0.0:
        raise OutOfScopeError("h >= 0 needs (a + b)/2 >= 0")
    if h < 0.0 and m > 0.0 and mid < final_case_geometry(m, h, a).x0:
        raise OutOfScopeError("h < 0 needs (a + b)/2 >= x0")
    r = math.hypot(1.0, m)
    lhs = line_mass(m, h, a, b)
    rhs = gc.std_cdf(h / r) * gc.gauss_interval(a, b)
    return VerificationReport({"m": m, "h": h, "a": a, "b": b}, lhs, rhs, lhs - rhs, tol, "quadrature")


def theorem1_batch(profiles: Iterable[ConcaveProfile], weights: Sequence[float],
                   tol: float = THEOREM1_TOL) -> tuple[list[VerificationReport], list[dict]]:
    """``verify_theorem1`` over a grid; infeasible (centroid, weight) pairs are listed, not failed."""
    reports, skipped = [], []
    for idx, prof in enumerate(profiles):
        for w in weights:
            try:
                reports.append(verify_theorem1(prof, w, tol))
            except (InfeasibleError, DegenerateRegionError) as exc:
                skipped.append({"index": idx, "w": w, "reason": str(exc)})
    return reports, skipped


def sidak_instance(rng: np.random.Generator, n: int = 5, N: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Random unit directions and radii giving layer measures between 0.3 and 0.95."""
    U = rng.normal(size=(N, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    t = gc.std_cdf_inv(0.5 * (1.0 + rng.uniform(0.3, 0.95, N)))
    return U, np.asarray(t)

