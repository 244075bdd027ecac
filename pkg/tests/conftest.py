"""Shared independent oracles for the test suite."""
import math

import numpy as np
import pytest


def hull_oracle(points):
    """Quadratic-time hull: a point is a vertex if some pair edge through it
    keeps every other point strictly on one side, checked over all pairs."""
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    verts = set()
    n = len(pts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = pts[j] - pts[i]
            rel = pts - pts[i]
            cross = d[0] * rel[:, 1] - d[1] * rel[:, 0]
            if np.all(cross >= -1e-12):
                # Edge i->j has everything on its left; keep the endpoints
                # only if no third point lies strictly between them.
                on = np.abs(cross) <= 1e-12
                t = rel[on] @ d / (d @ d)
                if np.all((t <= 1e-12) | (t >= 1 - 1e-12)):
                    verts.add(i)
                    verts.add(j)
    return pts[sorted(verts)]


def ellipse_grid_support(a, b, beta, theta, n=1_000_000):
    g = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    cb, sb = math.cos(beta), math.sin(beta)
    x, y = a * np.cos(g), b * np.sin(g)
    px, py = cb * x - sb * y, sb * x + cb * y
    # The maximum is smooth in g, so grid error is O(a * step**2) ~ 1e-10.
    return float(np.max(math.cos(theta) * px + math.sin(theta) * py))


def random_convex_polygon(rng, n=None):
    n = n or int(rng.integers(3, 10))
    ang = np.sort(rng.uniform(0, 2 * math.pi, n))
    rad = rng.uniform(0.4, 1.5, n)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
