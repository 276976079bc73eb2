"""Convex polygons in the plane and their standard Gaussian mass and moments.

The mass is a signed sum over edges of the Gaussian measure of the triangle
spanned by the origin and the edge, each one an Owen's T expression.  First
moments follow from the divergence theorem: ``int_K x dmu = -oint phi_2 n ds``,
and along a line at distance ``d`` from the origin ``phi_2 = phi(d) phi(s)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.spatial import ConvexHull, QhullError

from . import gauss_core as gc
from .errors import DomainError


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex polygon with counterclockwise vertices."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DomainError("a polygon needs at least 3 vertices")
        v = self.array
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = np.max(np.abs(v)) + 1.0
        if np.any(cross <= 1e-14 * scale * scale):
            raise DomainError("vertices are not in strictly convex counterclockwise order")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @classmethod
    def hull(cls, points) -> ConvexPolygon:
        """Convex hull of a point cloud; rejects clouds with empty interior."""
        pts = np.asarray(points, dtype=float)
        try:
            hull = ConvexHull(pts)
        except (QhullError, ValueError) as exc:
            raise DomainError(f"point set has empty interior: {exc}") from None
        return cls(tuple(map(tuple, pts[hull.vertices])))

    @classmethod
    def box(cls, x_lo: float, x_hi: float, y_lo: float, y_hi: float) -> ConvexPolygon:
        return cls(((x_lo, y_lo), (x_hi, y_lo), (x_hi, y_hi), (x_lo, y_hi)))

    def translate(self, v) -> ConvexPolygon:
        dx, dy = (float(c) for c in v)
        return ConvexPolygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def projection(self, u) -> tuple[float, float]:
        t = self.array @ np.asarray(u, dtype=float)
        return float(t.min()), float(t.max())

    def _edges(self):
        p = self.array
        q = np.roll(p, -1, axis=0)
        e = q - p
        length = np.hypot(e[:, 0], e[:, 1])
        unit = e / length[:, None]
        d = (p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]) / length
        s_p = np.einsum("ij,ij->i", p, unit)
        s_q = np.einsum("ij,ij->i", q, unit)
        return unit, d, s_p, s_q

    def contains(self, points) -> np.ndarray:
        """Boolean mask of points lying in the closed polygon."""
        pts = np.asarray(points, dtype=float)
        p = self.array
        e = np.roll(p, -1, axis=0) - p
        inside = np.ones(pts.shape[0], dtype=bool)
        for (px, py), (ex, ey) in zip(p, e):
            inside &= ex * (pts[:, 1] - py) - ey * (pts[:, 0] - px) >= 0.0
        return inside

    def gaussian_mass(self) -> float:
        _, d, s_p, s_q = self._edges()
        ad = np.abs(d)
        ok = ad > 0.0
        lo = np.where(ok, s_p / np.where(ok, ad, 1.0), 0.0)
        hi = np.where(ok, s_q / np.where(ok, ad, 1.0), 0.0)
        tri = ((np.arctan(hi) - np.arctan(lo)) / (2.0 * math.pi)
               - (special.owens_t(ad, hi) - special.owens_t(ad, lo)))
        return float(np.sum(np.where(ok, np.sign(d) * tri, 0.0)))

    def gaussian_moment(self) -> np.ndarray:
        unit, d, s_p, s_q = self._edges()
        normal = np.column_stack([unit[:, 1], -unit[:, 0]])
        flux = gc.std_pdf(d) * np.asarray(gc.gauss_interval(s_p, s_q))
        return -(normal * flux[:, None]).sum(axis=0)

    def gaussian_centroid(self) -> np.ndarray:
        mass = self.gaussian_mass()
        if mass <= 0.0:
            raise DomainError("polygon has zero Gaussian mass")
        return self.gaussian_moment() / mass

    def slices(self, t, u=(1.0, 0.0)):
        """Chord ``[y1, y2]`` of ``K`` on the line ``<x, u> = t``.

        ``y`` is the coordinate along ``u_perp = (-u_2, u_1)``.  Lines missing
        the polygon give ``nan`` for both ends.
        """
        u = np.asarray(u, dtype=float)
        u = u / np.hypot(*u)
        perp = np.array([-u[1], u[0]])
        p = self.array
        q = np.roll(p, -1, axis=0)
        tp, tq = p @ u, q @ u
        sp, sq = p @ perp, q @ perp
        t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
        span = tq - tp
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = (t - tp) / span
        hit = (span != 0.0) & (frac >= 0.0) & (frac <= 1.0)
        s = np.where(hit, sp + frac * (sq - sp), np.nan)
        # edges orthogonal to the slicing lines contribute their endpoints
        flat = (span == 0.0) & np.isclose(t, tp, rtol=0.0, atol=1e-15)
        s_flat = np.concatenate([np.where(flat, sp, np.nan), np.where(flat, sq, np.nan)], axis=1)
        s_all = np.concatenate([s, s_flat], axis=1)
        with warnings.catch_warnings():
            # all-nan rows (lines missing the polygon) are expected
            warnings.simplefilter("ignore", RuntimeWarning)
            y1 = np.nanmin(s_all, axis=1)
            y2 = np.nanmax(s_all, axis=1)
        return y1, y2

    def slice_measure(self, t, u=(1.0, 0.0)):
        """One-dimensional Gaussian measure of each chord: ``Phi(psi(t))``."""
        y1, y2 = self.slices(t, u)
        empty = np.isnan(y1)
        out = np.asarray(gc.gauss_interval(np.where(empty, 0.0, y1), np.where(empty, 0.0, y2)))
        return np.where(empty, 0.0, out)

    def intersection(self, other: ConvexPolygon) -> ConvexPolygon | None:
        """Intersection with another convex polygon, ``None`` if it has no interior."""
        from shapely.geometry import Polygon

        inter = Polygon(self.vertices).intersection(Polygon(other.vertices))
        if inter.is_empty or inter.area <= 0.0 or inter.geom_type != "Polygon":
            return None
        try:
            return ConvexPolygon.hull(np.asarray(inter.exterior.coords)[:-1])
        except DomainError:
            return None

    def to_dict(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_dict(cls, data: dict) -> ConvexPolygon:
        verts = np.asarray(data["vertices"], dtype=float)
        poly = cls.hull(verts)
        if len(poly.vertices) != len(verts):
            raise DomainError("polygon vertices are not in convex position")
        return poly


def random_polygon(rng: np.random.Generator, n_min: int = 3, n_max: int = 12,
                   scale: float = 1.0, spread: float = 1.0) -> ConvexPolygon:
    """Convex hull of a Gaussian cloud, redrawn until it has 3..n_max vertices.

    The cloud gets a random linear distortion and offset so that elongated and
    off-centre shapes appear.
    """
    while True:
        k = int(rng.integers(n_min, n_max + 1))
        pts = rng.normal(size=(k, 2))
        stretch = np.diag(np.exp(rng.normal(scale=0.6, size=2)))
        theta = rng.uniform(0.0, math.pi)
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        pts = scale * pts @ (rot @ stretch).T + rng.normal(scale=spread, size=2)
        try:
            return ConvexPolygon.hull(pts)
        except DomainError:
            continue
