import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ellipse_grid_support, hull_oracle, random_convex_polygon
from hcbf.geometry import (Disc, Ellipse, GeneralRadial, GeometryError, InsideHullError,
                           Polygon, SupportKind, closest_point, convex_hull, exact_support,
                           fit_fourier, signed_distance, support_distance)

SQUARE = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
DENSE = np.linspace(0.0, 2 * math.pi, 3600, endpoint=False)


def _same_polygon(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and set(map(tuple, np.round(a, 12))) == set(map(tuple, np.round(b, 12)))


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


# --- convex hull -----------------------------------------------------------

def test_hull_drops_interior_point():
    hull = convex_hull(SQUARE + [(0.0, 0.0)])
    assert _same_polygon(hull, SQUARE)


def test_hull_triangle_ccw():
    hull = convex_hull([(0, 0), (1, 0), (0, 1)])
    assert _same_polygon(hull, [(0, 0), (1, 0), (0, 1)])
    assert _signed_area(hull) > 0


@pytest.mark.parametrize("seed", range(10))
def test_hull_matches_pairwise_oracle(seed):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 1, 50))
    a = rng.uniform(0, 2 * math.pi, 50)
    pts = np.column_stack([r * np.cos(a), r * np.sin(a)])
    hull = convex_hull(pts)
    assert _same_polygon(hull, hull_oracle(pts))
    assert _signed_area(hull) > 0


def test_hull_drops_collinear_points():
    hull = convex_hull([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)])
    assert len(hull) == 4


@pytest.mark.parametrize("pts", [[(0, 0), (1, 1)], [(0, 0), (1, 1), (2, 2)], [(1, 1)] * 5])
def test_hull_degenerate(pts):
    with pytest.raises(GeometryError):
        convex_hull(pts)


# --- shape validation --------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: Disc(0.0),
    lambda: Disc(-1.0),
    lambda: Disc(math.nan),
    lambda: Ellipse(1.0, 2.0),
    lambda: Ellipse(1.0, 0.0),
    lambda: Polygon([(0, 0), (1, 0)]),
    lambda: Polygon([(0, 0), (1, 1), (2, 2)]),
    lambda: GeneralRadial(np.linspace(0, 6, 7), np.ones(7)),
    lambda: GeneralRadial(np.linspace(0, 6, 8), -np.ones(8)),
    lambda: GeneralRadial(np.linspace(0, 2 * math.pi, 8), np.ones(8)),
    lambda: GeneralRadial(np.linspace(0, 6, 8)[::-1], np.ones(8)),
    lambda: GeneralRadial(np.linspace(0, 6, 8), np.ones(9)),
])
def test_invalid_shapes(make):
    with pytest.raises(GeometryError):
        make()


def test_reference_point_interior():
    rng = np.random.default_rng(3)
    for _ in range(20):
        poly = Polygon(random_convex_polygon(rng) + rng.uniform(-3, 3, 2))
        assert poly.contains(np.zeros(2))
        assert np.all(poly.support(DENSE) > 0)


# --- support distance --------------------------------------------------------

def test_ellipse_support_major_axis():
    assert support_distance(Ellipse(2.0, 1.0), 0.0) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.7, 2.0, -1.3, 5.9])
def test_ellipse_circle_case(theta):
    assert support_distance(Ellipse(1.5, 1.5, 0.4), theta) == pytest.approx(1.5, abs=1e-12)


def test_ellipse_support_grid_oracle():
    th = math.pi / 4
    val = support_distance(Ellipse(2.0, 1.0), th)
    assert abs(val - ellipse_grid_support(2.0, 1.0, 0.0, th)) <= 1e-9
    assert abs(val - math.sqrt(4 * math.cos(th) ** 2 + math.sin(th) ** 2)) <= 1e-9


def test_square_face_support():
    assert support_distance(Polygon(SQUARE), 0.0) == pytest.approx(0.5, abs=1e-15)
    assert support_distance(Polygon(SQUARE), math.pi / 4) == pytest.approx(math.sqrt(0.5), abs=1e-15)


def test_polygon_reference_point_is_vertex_centroid():
    tri = Polygon([(0, 0), (3, 0), (0, 3)])
    assert np.allclose(tri.reference_point, [1.0, 1.0])
    # Shifting the input does not change supports about p_o.
    moved = Polygon([(10, 5), (13, 5), (10, 8)])
    assert np.allclose(tri.support(DENSE), moved.support(DENSE), atol=1e-12)


def _shapes():
    rng = np.random.default_rng(7)
    out = [Disc(0.8), Ellipse(2.0, 0.5, 0.3), Polygon(SQUARE)]
    out += [Polygon(random_convex_polygon(rng)) for _ in range(5)]
    phi = np.linspace(0, 2 * math.pi, 24, endpoint=False)
    out.append(GeneralRadial(phi, 1.0 + 0.3 * np.cos(3 * phi)))
    return out


@pytest.mark.parametrize("shape", _shapes(), ids=lambda s: type(s).__name__)
def test_support_property(shape):
    """Every boundary point lies on or below each supporting line, and some
    boundary point touches it."""
    pts = shape.boundary_samples(4000) if not isinstance(shape, (Disc, Ellipse)) else shape.outline(20000)
    n = np.stack([np.cos(DENSE), np.sin(DENSE)], axis=1)
    proj = n @ pts.T
    sup = shape.support(DENSE)
    assert np.all(proj.max(axis=1) <= sup + 1e-9)
    # Sampled boundary gets within the sampling error of the support.
    assert np.all(sup - proj.max(axis=1) <= 1e-3)


@pytest.mark.parametrize("shape", _shapes(), ids=lambda s: type(s).__name__)
def test_support_periodic(shape):
    for model in (exact_support(shape), fit_fourier(shape, 16)):
        a = model.distance(DENSE)
        b = model.distance(DENSE + 2 * math.pi)
        c = model.distance(DENSE - 4 * math.pi)
        assert np.max(np.abs(a - b)) <= 1e-12
        assert np.max(np.abs(a - c)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.1, 5.0), ratio=st.floats(0.05, 1.0), beta=st.floats(-4, 4),
       theta=st.floats(-10, 10))
def test_ellipse_closed_form(a, ratio, beta, theta):
    b = a * ratio
    t = theta - beta
    expect = math.sqrt(a * a * math.cos(t) ** 2 + b * b * math.sin(t) ** 2)
    assert abs(Ellipse(a, b, beta).support(theta) - expect) <= 1e-9 * max(1.0, a)


def test_general_radial_uses_hull():
    phi = np.linspace(0, 2 * math.pi, 16, endpoint=False)
    r = np.where(np.arange(16) % 2, 0.5, 1.0)  # star: inner points are concave
    shape = GeneralRadial(phi, r)
    assert len(shape.hull) == 8
    assert shape.support(0.0) == pytest.approx(1.0 - shape.reference_point[0], abs=1e-12)


# --- Fourier model -----------------------------------------------------------

def _direct_projection(shape, n_terms, grid):
    th = np.linspace(0, 2 * math.pi, grid, endpoint=False)
    f = shape.support(th)
    n = np.arange(0, n_terms + 1)
    a = 2.0 / grid * np.cos(np.outer(n, th)) @ f
    b = 2.0 / grid * np.sin(np.outer(n, th)) @ f
    return a, b[1:]


def test_fourier_disc_constant():
    m = fit_fourier(Disc(0.7), 8)
    assert 0.5 * m.a0 == pytest.approx(0.7, abs=1e-9)
    assert np.all(np.abs(m.an) <= 1e-9) and np.all(np.abs(m.bn) <= 1e-9)
    assert abs(m.margin) <= 1e-9
    assert m.kind is SupportKind.FOURIER


def test_fourier_matches_direct_projection():
    shape = Polygon(random_convex_polygon(np.random.default_rng(11)))
    m = fit_fourier(shape, 12, grid=360)
    a, b = _direct_projection(shape, 12, 360)
    assert m.a0 == pytest.approx(a[0], abs=1e-12)
    assert np.allclose(m.an, a[1:], atol=1e-12)
    assert np.allclose(m.bn, b, atol=1e-12)


def test_fourier_point_symmetric_odd_terms_vanish():
    rect = Polygon([(-1.5, -0.4), (1.5, -0.4), (1.5, 0.4), (-1.5, 0.4)])
    a, b = _direct_projection(rect, 16, 720)
    assert np.all(np.abs(a[1::2]) <= 1e-9) and np.all(np.abs(b[0::2]) <= 1e-9)
    m = fit_fourier(rect, 16)
    assert np.all(np.abs(m.an[0::2]) <= 1e-9) and np.all(np.abs(m.bn[0::2]) <= 1e-9)


def test_fourier_unit_square():
    shape = Polygon(SQUARE)
    m = fit_fourier(shape, 16)
    th = np.linspace(0, 2 * math.pi, 100_000, endpoint=False)
    exact = shape.support(th)
    assert np.max(np.abs(exact - m.series(th))) < 0.02
    assert np.all(m.distance(th) >= exact - 1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_fourier_conservative_random(seed):
    rng = np.random.default_rng(100 + seed)
    shape = Polygon(random_convex_polygon(rng))
    m = fit_fourier(shape, 16)
    th = np.linspace(0, 2 * math.pi, 7200, endpoint=False)
    assert np.all(m.distance(th) >= shape.support(th) - 1e-9)
    assert np.all(m.distance(shape.kink_angles()) >= shape.support(shape.kink_angles()) - 1e-12)


def test_fourier_grid_too_coarse():
    with pytest.raises(GeometryError):
        fit_fourier(Polygon(SQUARE), 16, grid=60)
    with pytest.raises(GeometryError):
        fit_fourier(Polygon(SQUARE), 4, grid=100, verify_grid=500)


def test_support_model_total_adds_agent_radius():
    m = exact_support(Disc(1.0), agent_radius=0.25)
    assert m.total(0.3) == pytest.approx(1.25)
    th, d = m.grid(16)
    assert len(th) == 16 and np.allclose(d, 1.25)
    assert m.grid(16)[1] is d


# --- closest point -----------------------------------------------------------

def test_closest_point_disc():
    assert np.allclose(closest_point(Disc(1.0), (0, 0), (3, 0)), [1, 0])


def test_closest_point_square_corner():
    assert np.allclose(closest_point(Polygon(SQUARE), (0, 0), (2, 2)), [0.5, 0.5])


def test_closest_point_square_face_world_pose():
    assert np.allclose(closest_point(Polygon(SQUARE), (4, 1), (4.2, 3)), [4.2, 1.5])


def _grid_nearest(e, p, n=1_000_000):
    """Nearest of 10^6 boundary samples, then of 10^6 more spanning the
    winning sample's neighbours (one grid alone resolves only ~1e-5)."""
    g = np.linspace(0, 2 * math.pi, n, endpoint=False)
    k = np.argmin(np.sum((e.point(g) - p) ** 2, axis=1))
    fine = np.linspace(g[k] - 2 * math.pi / n, g[k] + 2 * math.pi / n, n)
    pts = e.point(fine)
    return pts[np.argmin(np.sum((pts - p) ** 2, axis=1))]


def test_closest_point_ellipse_grid_oracle():
    e = Ellipse(2.0, 1.0)
    q = closest_point(e, (0, 0), (3, 1))
    assert np.max(np.abs(q - _grid_nearest(e, np.array([3.0, 1.0])))) <= 1e-6


def test_closest_point_rotated_ellipse():
    e = Ellipse(2.0, 0.5, 1.0)
    p = np.array([1.0, 3.0])
    q = closest_point(e, (0, 0), p)
    assert np.max(np.abs(q - _grid_nearest(e, p))) <= 1e-6


@pytest.mark.parametrize("shape,p", [(Disc(1.0), (0.5, 0)), (Polygon(SQUARE), (0.1, 0.2)),
                                     (Ellipse(2, 1), (1.9, 0.0)), (Polygon(SQUARE), (0.5, 0.0))])
def test_closest_point_inside_raises(shape, p):
    with pytest.raises(InsideHullError):
        closest_point(shape, (0, 0), p)


def test_signed_distance():
    assert signed_distance(Disc(1.0), (1, 1), (1, 4)) == pytest.approx(2.0)
    assert signed_distance(Polygon(SQUARE), (0, 0), (0.25, 0)) == pytest.approx(-0.25)
