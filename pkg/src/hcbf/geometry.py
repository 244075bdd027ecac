"""Obstacle shapes, convex hulls and angle-dependent support distances.

All shapes are described in a body frame.  Support distances and sampled
boundaries are reported relative to the shape's reference point ``p_o``, which
is what an :class:`~hcbf.barrier.ObstacleState` places in the world.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

TWO_PI = 2.0 * math.pi
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class GeometryError(ValueError):
    """Invalid shape or degenerate geometric input."""


class InsideHullError(GeometryError):
    """A query point lies inside (or on) an obstacle's convex hull."""


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise convex hull by Andrew's monotone chain.

    Points are sorted by x, ties by y.  Collinear boundary points are dropped,
    so the result holds only strict corners.  Raises :class:`GeometryError`
    for fewer than three points or an all-collinear input.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("points must have shape (n, 2)")
    if len(pts) < 3:
        raise GeometryError("convex hull needs at least 3 points")
    uniq = sorted(set(map(tuple, pts.tolist())))
    if len(uniq) < 3:
        raise GeometryError("convex hull needs at least 3 distinct points")

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise GeometryError("points are collinear")
    return np.array(hull, dtype=float)


def unit_vectors(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _point_in_convex(vertices: np.ndarray, p) -> bool:
    """True if p is inside or on the CCW convex polygon."""
    nxt = np.roll(vertices, -1, axis=0)
    edge = nxt - vertices
    rel = np.asarray(p, dtype=float) - vertices
    cross = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    return bool(np.all(cross >= 0.0))


def _nearest_on_polygon(vertices: np.ndarray, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    ab = b - a
    t = np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t[:, None] * ab
    d2 = np.sum((proj - p) ** 2, axis=1)
    return proj[int(np.argmin(d2))]


def golden_section(f, lo: float, hi: float, tol: float, max_iter: int = 200):
    """Minimize a unimodal scalar function on [lo, hi].

    Returns ``(x, f(x))`` for the best point evaluated.
    """
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


class _PolygonalShape:
    """Shared behaviour for shapes that reduce to a convex polygon."""

    @cached_property
    def hull(self) -> np.ndarray:
        return convex_hull(self._raw_points())

    @cached_property
    def reference_point(self) -> np.ndarray:
        return self.hull.mean(axis=0)

    @cached_property
    def local_hull(self) -> np.ndarray:
        """Hull vertices relative to the reference point."""
        return self.hull - self.reference_point

    def support(self, theta):
        n = unit_vectors(theta)
        return np.max(n @ self.local_hull.T, axis=-1)

    def kink_angles(self) -> np.ndarray:
        """Edge-normal angles, where the support function has corners."""
        edges = np.roll(self.local_hull, -1, axis=0) - self.local_hull
        return np.mod(np.arctan2(-edges[:, 0], edges[:, 1]), TWO_PI)

    def outline(self, n: int = 0) -> np.ndarray:
        return self.local_hull.copy()

    def boundary_samples(self, n: int) -> np.ndarray:
        """Points spread along the hull perimeter, relative to p_o."""
        v = self.local_hull
        w = np.roll(v, -1, axis=0)
        lengths = np.linalg.norm(w - v, axis=1)
        s = np.linspace(0.0, lengths.sum(), n, endpoint=False)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
        t = (s - cum[idx]) / lengths[idx]
        return v[idx] + t[:, None] * (w[idx] - v[idx])

    def contains(self, q) -> bool:
        return _point_in_convex(self.local_hull, q)

    def nearest_boundary(self, q) -> np.ndarray:
        return _nearest_on_polygon(self.local_hull, q)


@dataclass(frozen=True)
class Disc:
    radius: float

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise GeometryError("disc radius must be positive")

    @property
    def reference_point(self) -> np.ndarray:
        return np.zeros(2)

    def support(self, theta):
        return np.full(np.shape(theta), float(self.radius))

    def outline(self, n: int = 64) -> np.ndarray:
        return self.radius * unit_vectors(np.linspace(0, TWO_PI, n, endpoint=False))

    boundary_samples = outline

    def contains(self, q) -> bool:
        return float(np.hypot(*q)) <= self.radius

    def nearest_boundary(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        d = math.hypot(q[0], q[1])
        if d == 0.0:
            return np.array([self.radius, 0.0])
        return q * (self.radius / d)


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float
    beta: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.a, self.b, self.beta)):
            raise GeometryError("ellipse parameters must be finite")
        if not (self.a >= self.b > 0):
            raise GeometryError("ellipse needs a >= b > 0")

    @property
    def reference_point(self) -> np.ndarray:
        return np.zeros(2)

    def support(self, theta):
        # Maximizer of n(t)^T (a cos g, b sin g) sits at the eccentric anomaly
        # g = atan2(b sin t, a cos t), with t measured in the ellipse frame.
        t = np.asarray(theta, dtype=float) - self.beta
        ct, st = np.cos(t), np.sin(t)
        g = np.arctan2(self.b * st, self.a * ct)
        return self.a * ct * np.cos(g) + self.b * st * np.sin(g)

    def point(self, gamma) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=float)
        cb, sb = math.cos(self.beta), math.sin(self.beta)
        x = self.a * np.cos(gamma)
        y = self.b * np.sin(gamma)
        return np.stack([cb * x - sb * y, sb * x + cb * y], axis=-1)

    def outline(self, n: int = 96) -> np.ndarray:
        return self.point(np.linspace(0, TWO_PI, n, endpoint=False))

    boundary_samples = outline

    def to_local(self, q) -> np.ndarray:
        cb, sb = math.cos(self.beta), math.sin(self.beta)
        q = np.asarray(q, dtype=float)
        return np.array([cb * q[0] + sb * q[1], -sb * q[0] + cb * q[1]])

    def contains(self, q) -> bool:
        x, y = self.to_local(q)
        return (x / self.a) ** 2 + (y / self.b) ** 2 <= 1.0

    def nearest_boundary(self, q, seeds: int = 720, tol: float = 1e-10) -> np.ndarray:
        # Distance along the boundary is not unimodal in the eccentric
        # anomaly, so seed on a grid and refine the best cell only.
        x, y = self.to_local(q)
        a, b = self.a, self.b

        def d2(g):
            return (a * math.cos(g) - x) ** 2 + (b * math.sin(g) - y) ** 2

        grid = np.linspace(0.0, TWO_PI, seeds, endpoint=False)
        vals = (a * np.cos(grid) - x) ** 2 + (b * np.sin(grid) - y) ** 2
        k = int(np.argmin(vals))
        cell = TWO_PI / seeds
        g, _ = golden_section(d2, grid[k] - cell, grid[k] + cell, tol)
        return self.point(g)


@dataclass(frozen=True)
class Polygon(_PolygonalShape):
    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise GeometryError("polygon vertices must be finite")
        self.hull  # noqa: B018 - validates non-collinearity eagerly

    def _raw_points(self):
        return np.array(self.vertices)


@dataclass(frozen=True)
class GeneralRadial(_PolygonalShape):
    """Star-shaped boundary ``r(phi)`` around the body origin.

    The samples are convexified: only the hull of the sampled boundary is
    used for support and distance queries.
    """

    angles: tuple
    radii: tuple

    def __post_init__(self):
        phi = tuple(float(x) for x in self.angles)
        r = tuple(float(x) for x in self.radii)
        object.__setattr__(self, "angles", phi)
        object.__setattr__(self, "radii", r)
        if len(phi) != len(r):
            raise GeometryError("angles and radii differ in length")
        if len(phi) < 8:
            raise GeometryError("general radial shape needs at least 8 samples")
        if not all(math.isfinite(x) for x in phi + r):
            raise GeometryError("radial samples must be finite")
        if any(x <= 0 for x in r):
            raise GeometryError("radii must be positive")
        if phi[0] < 0 or phi[-1] >= TWO_PI or any(b <= a for a, b in zip(phi, phi[1:])):
            raise GeometryError("angles must be strictly increasing in [0, 2pi)")
        self.hull  # noqa: B018

    def _raw_points(self):
        return np.asarray(self.radii)[:, None] * unit_vectors(self.angles)

    def raw_outline(self) -> np.ndarray:
        """Sampled (possibly concave) boundary relative to p_o."""
        return self._raw_points() - self.reference_point


Shape = Union[Disc, Ellipse, Polygon, GeneralRadial]


def support_distance(shape: Shape, theta):
    """Farthest extent of the shape's hull beyond p_o along n(theta)."""
    out = shape.support(theta)
    return float(out) if np.ndim(out) == 0 else out


def closest_point(shape: Shape, position, p) -> np.ndarray:
    """Nearest point of the hull of ``shape`` placed with p_o at ``position``.

    Raises :class:`InsideHullError` when ``p`` is not strictly outside.
    """
    q = np.asarray(p, dtype=float) - np.asarray(position, dtype=float)
    if shape.contains(q):
        raise InsideHullError("point lies inside the obstacle hull")
    return np.asarray(position, dtype=float) + shape.nearest_boundary(q)


def signed_distance(shape: Shape, position, p) -> float:
    """Euclidean distance from ``p`` to the hull, negative inside."""
    q = np.asarray(p, dtype=float) - np.asarray(position, dtype=float)
    d = float(np.linalg.norm(q - shape.nearest_boundary(q)))
    return -d if shape.contains(q) else d


class SupportKind(enum.Enum):
    EXACT_DISC = "exact-disc"
    EXACT_ELLIPSE = "exact-ellipse"
    EXACT_POLYGON = "exact-polygon"
    FOURIER = "fourier"


@dataclass(frozen=True, eq=False)
class SupportModel:
    """Angle-dependent safety distance between an agent and one obstacle.

    ``distance(theta)`` is the obstacle-only part (exact support, or the
    truncated Fourier series plus its margin); ``total(theta)`` adds the
    agent radius.
    """

    kind: SupportKind
    shape: Shape
    agent_radius: float = 0.0
    a0: float = 0.0
    an: np.ndarray = field(default_factory=lambda: np.zeros(0))
    bn: np.ndarray = field(default_factory=lambda: np.zeros(0))
    margin: float = 0.0
    max_residual: float = 0.0
    _grid_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_terms(self) -> int:
        return len(self.an)

    def series(self, theta):
        """Truncated Fourier series without the margin."""
        theta = np.asarray(theta, dtype=float)
        if not self.n_terms:
            return np.full(theta.shape, 0.5 * self.a0)
        n = np.arange(1, self.n_terms + 1)
        nt = theta[..., None] * n
        return 0.5 * self.a0 + np.cos(nt) @ self.an + np.sin(nt) @ self.bn

    def distance(self, theta):
        if self.kind is SupportKind.FOURIER:
            out = self.series(theta) + self.margin
        else:
            out = self.shape.support(theta)
        return float(out) if np.ndim(out) == 0 else out

    def total(self, theta):
        return self.agent_radius + self.distance(theta)

    def grid(self, resolution: int):
        """Uniform theta grid on [0, 2pi) with total safety distances, cached."""
        hit = self._grid_cache.get(resolution)
        if hit is None:
            thetas = np.linspace(0.0, TWO_PI, resolution, endpoint=False)
            hit = (thetas, np.ascontiguousarray(self.total(thetas), dtype=float))
            self._grid_cache[resolution] = hit
        return hit


def exact_support(shape: Shape, agent_radius: float = 0.0) -> SupportModel:
    if isinstance(shape, Disc):
        kind = SupportKind.EXACT_DISC
    elif isinstance(shape, Ellipse):
        kind = SupportKind.EXACT_ELLIPSE
    else:
        kind = SupportKind.EXACT_POLYGON
    return SupportModel(kind=kind, shape=shape, agent_radius=float(agent_radius))


def fit_fourier(
    shape: Shape,
    n_terms: int = 16,
    grid: int = 720,
    verify_grid: int | None = None,
    agent_radius: float = 0.0,
) -> SupportModel:
    """Fit a truncated Fourier series to the support distance of ``shape``.

    Coefficients come from the discrete projection of ``grid`` uniform
    samples.  The margin is the largest shortfall of the series below the
    exact support over a verification grid of ``verify_grid`` points (10x the
    fit grid by default), augmented with the hull's corner directions for
    polygonal shapes.
    """
    if n_terms < 0:
        raise GeometryError("n_terms must be non-negative")
    if grid < 4 * n_terms + 4:
        raise GeometryError(f"fit grid of {grid} points is too coarse for {n_terms} terms "
                            f"(need >= {4 * n_terms + 4})")
    if verify_grid is None:
        verify_grid = 10 * grid
    if verify_grid < 10 * grid:
        raise GeometryError("verification grid must be at least 10x the fit grid")

    thetas = np.linspace(0.0, TWO_PI, grid, endpoint=False)
    spectrum = np.fft.rfft(shape.support(thetas))
    a = 2.0 * spectrum.real / grid
    b = -2.0 * spectrum.imag / grid
    model = SupportModel(
        kind=SupportKind.FOURIER,
        shape=shape,
        agent_radius=float(agent_radius),
        a0=float(a[0]),
        an=a[1:n_terms + 1].copy(),
        bn=b[1:n_terms + 1].copy(),
    )

    check = np.linspace(0.0, TWO_PI, verify_grid, endpoint=False)
    resid = shape.support(check) - model.series(check)
    extra = [_refine_peaks(lambda t: shape.support(t) - model.series(t), check, resid)]
    low = _refine_peaks(lambda t: model.series(t) - shape.support(t), check, -resid)
    if isinstance(shape, _PolygonalShape):
        extra.append(shape.kink_angles())
    extra = np.concatenate(extra)
    resid_hi = np.concatenate([resid, shape.support(extra) - model.series(extra)])
    resid_lo = model.series(low) - shape.support(low)
    object.__setattr__(model, "margin", float(np.max(resid_hi)))
    object.__setattr__(model, "max_residual",
                       float(max(np.max(np.abs(resid)), np.max(resid_hi), np.max(resid_lo, initial=0.0))))
    return model


def _refine_peaks(f, grid, values, iters: int = 60) -> np.ndarray:
    """Golden-section refinement of every local maximum of a sampled
    periodic function within one cell either side; returns the refined angles."""
    peaks = np.flatnonzero((values >= np.roll(values, 1)) & (values >= np.roll(values, -1)))
    if not len(peaks):
        return np.zeros(0)
    cell = grid[1] - grid[0]
    lo = grid[peaks] - cell
    hi = grid[peaks] + cell
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        left = f1 >= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - GOLDEN * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + GOLDEN * (hi - lo))
        nf1 = np.where(left, np.nan, f2)
        nf2 = np.where(left, f1, np.nan)
        x1, x2 = nx1, nx2
        fresh1, fresh2 = np.isnan(nf1), np.isnan(nf2)
        nf1[fresh1] = f(x1[fresh1])
        nf2[fresh2] = f(x2[fresh2])
        f1, f2 = nf1, nf2
    return np.where(f1 >= f2, x1, x2)
