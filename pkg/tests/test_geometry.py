import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from illume import Ball, DirectionGrid, Ellipsoid, Polytope, RadialFourier2D, body_from_dict, square
from illume.bodies import integrate_pieces, spherical_triangle_areas
from illume.errors import InvalidBody, OriginNotInterior, UnsupportedDimension

from oracles import ellipse_perimeter, polygon_hull_area, shoelace, solid_angle


def perimeter(K):
    return integrate_pieces(K.pieces(), lambda s: np.ones(len(s.points)), tol=1e-13)


def test_ball_basic_quantities():
    K = Ball([0.0, 0.0], 2.0)
    assert K.volume() == pytest.approx(4 * math.pi, rel=1e-14)
    assert perimeter(K) == pytest.approx(4 * math.pi, rel=1e-12)
    assert K.diameter() == pytest.approx(4.0)
    assert K.radial(np.array([0.6, 0.8])) == pytest.approx(2.0, rel=1e-14)


def test_ball_3d_area_and_volume():
    K = Ball([0.0, 0.0, 0.0], 1.5)
    assert K.volume() == pytest.approx(4 / 3 * math.pi * 1.5 ** 3, rel=1e-13)
    assert perimeter(K) == pytest.approx(4 * math.pi * 1.5 ** 2, rel=1e-10)


def test_ellipse_perimeter_against_quadrature():
    K = Ellipsoid([0.1, -0.2], [1.5, 0.7])
    assert perimeter(K) == pytest.approx(ellipse_perimeter(1.5, 0.7), rel=1e-11)


def test_ellipse_curvature_integrates_to_two_pi():
    th = 0.4
    Q = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    K = Ellipsoid([0.0, 0.0], [2.0, 0.5], Q)
    tot = integrate_pieces(K.pieces(), lambda s: s.curvature, tol=1e-13)
    assert tot == pytest.approx(2 * math.pi, rel=1e-10)


def test_ellipsoid_gauss_curvature_integrates_to_four_pi():
    K = Ellipsoid([0.0, 0.0, 0.0], [1.0, 1.3, 0.6])
    tot = integrate_pieces(K.pieces(), lambda s: s.curvature, tol=1e-11)
    assert tot == pytest.approx(4 * math.pi, rel=1e-8)


def test_square_pieces_and_curvature():
    K = square()
    assert K.volume() == pytest.approx(4.0)
    assert perimeter(K) == pytest.approx(8.0)
    s = K.sample_boundary(64)
    assert np.all(np.nan_to_num(s.curvature, nan=0.0) == 0.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=6, max_size=20))
def test_polytope_volume_matches_independent_hull(pts):
    P = np.array(pts)
    try:
        K = Polytope(P)
    except InvalidBody:
        return
    assert K.volume() == pytest.approx(polygon_hull_area(P), rel=1e-9, abs=1e-12)


def test_polytope_3d_cube():
    V = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-0.5, 0.5)], float)
    K = Polytope(V)
    assert K.volume() == pytest.approx(4.0)
    assert perimeter(K) == pytest.approx(2 * (4 + 2 + 2))


def test_polytope_rejects_flat_input():
    with pytest.raises(InvalidBody):
        Polytope([[0, 0], [1, 1], [2, 2]])


def test_radial_fourier_area():
    K = RadialFourier2D([1.0, 0.0, 0.1], [0.0, 0.05])
    # 1/2 int rho^2 dt with rho = 1 + 0.1 cos 2t + 0.05 sin t
    assert K.volume() == pytest.approx(math.pi * (1 + 0.005 + 0.00125), rel=1e-10)


def test_radial_function_requires_interior_origin():
    K = Ball([5.0, 0.0], 1.0)
    with pytest.raises(OriginNotInterior):
        K.radial(np.array([1.0, 0.0]))


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_support_dominates_boundary(t, a, b):
    K = Ellipsoid([0.3, -0.1], [a, b])
    u = np.array([math.cos(t), math.sin(t)])
    pts = K.sample_boundary(256).points
    assert float(K.support(u[None, :])[0]) >= float(np.max(pts @ u)) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi))
def test_radial_point_is_on_boundary(t):
    K = Ellipsoid([0.2, 0.1], [1.4, 0.8])
    u = np.array([math.cos(t), math.sin(t)])
    x = K.radial(u) * u
    assert abs(K.depth(x[None, :])[0]) < 1e-12


def test_translate_roundtrip_and_dict():
    K = Ellipsoid([0.0, 0.0], [1.0, 2.0])
    L = body_from_dict(K.translate([1.0, 1.0]).to_dict())
    assert np.allclose(L.center, [1.0, 1.0])
    assert L.volume() == pytest.approx(K.volume())


def test_body_from_dict_errors():
    with pytest.raises(InvalidBody):
        body_from_dict({"kind": "torus"})
    with pytest.raises(InvalidBody):
        body_from_dict({"kind": "ball", "center": [0, 0]})
    with pytest.raises(InvalidBody):
        body_from_dict({"kind": "ellipsoid", "center": [0, 0], "semi_axes": [1, -1]})
    with pytest.raises(UnsupportedDimension):
        Ball([0, 0, 0, 0], 1.0)


def test_direction_grid_weights():
    g = DirectionGrid.uniform(64)
    assert g.weights.sum() == pytest.approx(2 * math.pi)
    h = DirectionGrid.for_dimension(3, 642)
    assert h.m == 642
    assert h.weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_spherical_triangle_area_against_girard(seed):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(3, 3))
    V /= np.linalg.norm(V, axis=1)[:, None]
    a = spherical_triangle_areas(V[:1], V[1:2], V[2:])[0]
    if a < 1e-6 or a > math.pi - 1e-6:
        return
    assert a == pytest.approx(solid_angle(*V), abs=1e-9)


def test_shoelace_oracle_itself():
    assert shoelace([[0, 0], [2, 0], [0, 3]]) == pytest.approx(3.0)
