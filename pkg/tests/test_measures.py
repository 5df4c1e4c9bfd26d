import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from illume import Ball, QuadratureSpec, custom, dual_weight, space_form_density, square
from illume import uniform_density, weighted_volume
from illume.errors import InvalidParameter
from illume.measures import BallDomain, BoxDomain, segment_moment

from oracles import hyperbolic_disk_area


def test_uniform_volume_is_euclidean():
    K = Ball([0.2, 0.0], 0.7)
    assert weighted_volume(K, uniform_density(2)) == pytest.approx(math.pi * 0.49)


def test_hyperbolic_disk_volume():
    K = Ball([0.0, 0.0], 0.6)
    v = weighted_volume(K, space_form_density(-1.0, 2), QuadratureSpec(tol=1e-12))
    assert v == pytest.approx(hyperbolic_disk_area(0.6), rel=1e-10)


def test_sphere_chart_disk_volume():
    # gnomonic ball of chart radius r is a cap of angular radius atan r
    r = 0.8
    K = Ball([0.0, 0.0], r)
    v = weighted_volume(K, space_form_density(1.0, 2), QuadratureSpec(tol=1e-12))
    assert v == pytest.approx(2 * math.pi * (1 - math.cos(math.atan(r))), rel=1e-10)


def test_space_form_volume_3d():
    r = 0.5
    K = Ball([0.0, 0.0, 0.0], r)
    v = weighted_volume(K, space_form_density(-1.0, 3), QuadratureSpec(tol=1e-11))
    rho = math.atanh(r)
    ref = math.pi * (math.sinh(2 * rho) - 2 * rho)
    assert v == pytest.approx(ref, rel=1e-9)


def test_box_restricted_uniform():
    K = square()
    phi = uniform_density(2, BoxDomain([0.0, 0.0], [5.0, 5.0]))
    assert weighted_volume(K, phi) == pytest.approx(1.0, rel=1e-10)


def test_dual_weight_volume_is_dual_volume():
    # int_K (|q|/n) |x|^(q-n) dx = (1/n) int rho^q du for star bodies about o
    K = Ball([0.0, 0.0], 1.3)
    phi = dual_weight(3.0, 1e-9, 2)
    v = weighted_volume(K, phi, QuadratureSpec(tol=1e-12))
    assert v == pytest.approx(2 * math.pi * 1.3 ** 3 / 2, rel=1e-9)


def test_dual_weight_rejects_bad_parameters():
    with pytest.raises(InvalidParameter):
        dual_weight(0.0, 0.1)
    with pytest.raises(InvalidParameter):
        dual_weight(1.0, 0.0)


def test_custom_density_rejects_nonpositive():
    with pytest.raises(InvalidParameter):
        custom(lambda x: x[:, 0], 2)


@pytest.mark.parametrize("body", [Ball([0.0, 0.0], 0.5), square(0.4)])
@pytest.mark.parametrize("lam", [None, -1.0, 1.0])
def test_monte_carlo_agrees_with_tensor(body, lam):
    phi = uniform_density(2) if lam is None else space_form_density(lam, 2)
    t = weighted_volume(body, phi, QuadratureSpec(tol=1e-11))
    mc = weighted_volume(body, phi, QuadratureSpec("monte-carlo", samples=100_000, seed=3))
    assert abs(mc.value - t) <= 3 * mc.stderr + 1e-12


def test_monte_carlo_is_reproducible():
    K = Ball([0.0, 0.0], 0.5)
    a = weighted_volume(K, uniform_density(2), QuadratureSpec("monte-carlo", samples=5000, seed=7))
    b = weighted_volume(K, uniform_density(2), QuadratureSpec("monte-carlo", samples=5000, seed=7))
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.9), st.floats(0.05, 0.9))
def test_segment_moment_radial_hyperbolic(a, b):
    X = np.array([[a, 0.0], [0.0, b]])
    phi = space_form_density(-1.0, 2)
    m = segment_moment(phi, np.zeros(2), X)
    for r, got in zip((a, b), m):
        # int_0^1 t (1 - r^2 t^2)^(-3/2) dt = (1/r^2)(1/sqrt(1 - r^2) - 1)
        assert got == pytest.approx((1 / math.sqrt(1 - r * r) - 1) / (r * r), rel=1e-10)


def test_ball_domain_contains_and_exit():
    D = BallDomain(1.0, n=2)
    assert D.contains(np.array([0.5, 0.5]))
    assert not D.contains(np.array([0.9, 0.9]))
    assert D.ray_exit(np.array([0.5, 0.0]), np.array([1.0, 0.0])) == pytest.approx(0.5)
