import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from illume import (Ball, Ellipsoid, HilbertDomain, finsler_density, finsler_surface_area,
                    finsler_weight, hilbert_distance, hilbert_norm, square)
from illume.errors import PointOnBoundary

from oracles import klein_distance_disk

DISK = HilbertDomain(Ball([0.0, 0.0], 1.0))

inner = st.tuples(st.floats(0, 2 * math.pi), st.floats(0, 0.95)).map(
    lambda a: np.array([a[1] * math.cos(a[0]), a[1] * math.sin(a[0])]))


@settings(max_examples=100, deadline=None)
@given(inner, inner)
def test_disk_distance_is_klein(p, q):
    assert hilbert_distance(DISK, p, q) == pytest.approx(klein_distance_disk(p, q), abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(inner, inner, inner)
def test_triangle_inequality_in_square(p, q, r):
    X = HilbertDomain(square())
    p, q, r = 0.7 * p, 0.7 * q, 0.7 * r
    d = hilbert_distance
    assert d(X, p, r) <= d(X, p, q) + d(X, q, r) + 1e-10


@settings(max_examples=60, deadline=None)
@given(inner, inner, st.floats(0, math.pi))
def test_affine_invariance(p, q, th):
    # the ellipse is the image of the unit disk under y -> c + R diag(s) y
    c = np.array([0.3, -0.2])
    s = np.array([2.0, 0.7])
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    E = HilbertDomain(Ellipsoid(c, s, R))
    M = R * s[None, :]
    assert hilbert_distance(E, c + M @ p, c + M @ q) == pytest.approx(
        hilbert_distance(DISK, p, q), abs=1e-9)


def test_norm_values():
    assert hilbert_norm(DISK, np.zeros(2), np.array([0.3, 0.4])) == pytest.approx(0.5)
    # at x on the axis: t+ = 1 - x, t- = 1 + x
    x = 0.5
    v = hilbert_norm(DISK, np.array([x, 0.0]), np.array([1.0, 0.0]))
    assert v == pytest.approx(0.5 * (1 / (1 - x) + 1 / (1 + x)))
    V = hilbert_norm(DISK, np.zeros(2), np.array([[1.0, 0.0], [0.0, 0.0]]))
    assert V[1] == 0.0


def test_norm_is_derivative_of_distance():
    p = np.array([0.2, -0.3])
    v = np.array([0.6, 0.1])
    h = 1e-6
    X = HilbertDomain(square())
    fd = hilbert_distance(X, p, p + h * v) / h
    assert fd == pytest.approx(hilbert_norm(X, p, v), rel=1e-5)


def test_boundary_points_rejected():
    with pytest.raises(PointOnBoundary):
        hilbert_distance(DISK, np.array([1.0, 0.0]), np.zeros(2))


@pytest.mark.parametrize("kind,tol", [("busemann", 1e-12), ("holmes-thompson", 1e-4),
                                      ("gromov-mass", 1e-10), ("gromov-comass", 1e-10)])
def test_disk_densities_are_hyperbolic(kind, tol):
    X = HilbertDomain(Ball([0.0, 0.0], 1.0))
    p = np.array([0.3, 0.2])
    assert finsler_density(X, kind, p) == pytest.approx((1 - 0.13) ** -1.5, rel=tol)


def test_square_densities_at_center():
    X = HilbertDomain(square())
    # unit ball at o is the square itself; its polar is the cross polytope.
    # both are resolved on the sampled direction grid
    assert finsler_density(X, "busemann", np.zeros(2)) == pytest.approx(math.pi / 4, rel=1e-4)
    assert finsler_density(X, "holmes-thompson", np.zeros(2)) == pytest.approx(2 / math.pi, rel=1e-3)


def test_finsler_surface_area_of_disk_ball():
    X = HilbertDomain(Ball([0.0, 0.0], 1.0))
    # Busemann density equals the hyperbolic one, so this is the hyperbolic floating area
    rho = math.atanh(0.3)
    ref = 2 * math.pi * math.sinh(rho) * (1 / math.tanh(rho)) ** (1 / 3)
    assert ref == pytest.approx(2.951707657811812, rel=1e-14)
    assert finsler_surface_area(Ball([0.0, 0.0], 0.3), X) == pytest.approx(ref, rel=1e-9)


def test_interpolated_weight_tracks_exact_density():
    X = HilbertDomain(Ball([0.0, 0.0], 1.0))
    phi = finsler_weight(X, "busemann", half_width=0.6)
    P = np.array([[0.1, 0.2], [-0.4, 0.3], [0.5, -0.05]])
    ref = (1 - np.sum(P * P, axis=1)) ** -1.5
    assert np.allclose(phi(P), ref, rtol=1e-6)
