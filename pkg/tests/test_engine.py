import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from illume import (Ball, DirectionGrid, Ellipsoid, QuadratureSpec, RadialFourier2D, cap_volume,
                    convexity_check, illumination_body, illumination_radius, limit_mass,
                    space_form_density, square, uniform_cap_volume, uniform_density,
                    weighted_volume_difference)
from illume.engine import profile_csv, profile_svg, star_polygon_radius
from illume.errors import InvalidParameter, OriginNotInterior, ProfileUnbounded
from illume.measures import BoxDomain

from oracles import disk_cap, hyperbolic_ball_cap, invert_disk_cap, shoelace


def ball3_cap(R):
    a = 1.0 / R
    h2 = 1.0 - a * a
    cone = math.pi * h2 * (R - a) / 3.0
    t = 1.0 - a
    return cone - math.pi * t * t * (3.0 - t) / 3.0


@pytest.mark.parametrize("R", [1.0001, 1.3, 2.0, 7.5])
def test_disk_cap_closed_form(R):
    K = Ball([0.0, 0.0], 1.0)
    z = np.array([R * 0.6, R * 0.8])
    ref = disk_cap(float(np.hypot(*z)))
    assert cap_volume(K, None, z) == pytest.approx(ref, rel=1e-11)
    # the boundary route cancels vol(K)/2, so only absolute accuracy survives near K
    assert uniform_cap_volume(K, z) == pytest.approx(ref, rel=1e-11, abs=1e-14)


@pytest.mark.parametrize("R", [1.1, 2.5])
def test_ball3_cap_closed_form(R):
    K = Ball([0.0, 0.0, 0.0], 1.0)
    z = R * np.array([2.0, -1.0, 2.0]) / 3.0
    assert cap_volume(K, None, z, tol=1e-11) == pytest.approx(ball3_cap(R), rel=1e-9)


def test_square_cap_shoelace():
    K = square()
    z = np.array([3.0, 0.5])
    # z sees the vertices (1, -1) and (1, 1) together with the right edge
    hull = np.array([[-1, -1], [1, -1], [3, 0.5], [1, 1], [-1, 1]])
    assert cap_volume(K, None, z) == pytest.approx(shoelace(hull) - 4.0, rel=1e-12)


def test_cap_volume_zero_inside_and_methods():
    K = Ball([0.0, 0.0], 1.0)
    assert cap_volume(K, None, [0.2, 0.1]) == 0.0
    with pytest.raises(InvalidParameter):
        cap_volume(K, None, [2.0, 0.0], method="simpson")


def test_hyperbolic_cap_against_intrinsic_formula():
    rK, r = 0.4, 0.7
    K = Ball([0.0, 0.0], rK)
    v = cap_volume(K, space_form_density(-1.0, 2), [0.0, r])
    assert v == pytest.approx(hyperbolic_ball_cap(math.atanh(rK), math.atanh(r)), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(1.05, 4.0), st.floats(0.4, 2.0), st.floats(0.4, 2.0))
def test_frontside_equals_boundary_route(t, s, a, b):
    K = Ellipsoid([0.1, 0.0], [a, b])
    u = np.array([math.cos(t), math.sin(t)])
    z = s * K.radial(u) * u
    f = cap_volume(K, space_form_density(1.0, 2), z, "frontside")
    g = cap_volume(K, space_form_density(1.0, 2), z, "boundary")
    assert abs(f - g) <= 1e-8 * (1 + f)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.01, 3.0))
def test_cap_volume_monotone_along_rays(t, dr):
    K = square()
    phi = uniform_density(2)
    u = np.array([math.cos(t), math.sin(t)])
    r0 = K.radial(u)
    a = cap_volume(K, phi, (r0 + dr) * u)
    b = cap_volume(K, phi, (r0 + 1.5 * dr) * u)
    assert b >= a - 1e-13


def test_radial_fourier_cap_monte_carlo():
    K = RadialFourier2D([1.0, 0.0, 0.08])
    z = np.array([0.3, 1.8])
    v = cap_volume(K, None, z)
    mc = cap_volume(K, None, z, "monte-carlo", mc=QuadratureSpec("monte-carlo", 200_000, seed=5))
    assert abs(v - mc.value) <= 3 * mc.stderr


@pytest.mark.parametrize("delta", [1e-4, 0.01, 0.5])
def test_disk_illumination_radius(delta):
    K = Ball([0.0, 0.0], 1.0)
    res = illumination_radius(K, None, delta, np.array([0.0, 1.0]), tol=1e-12)
    assert res.flag == "finite"
    assert res.rho == pytest.approx(invert_disk_cap(delta), rel=1e-11)


def test_radius_needs_interior_origin():
    with pytest.raises(OriginNotInterior):
        illumination_radius(Ball([3.0, 0.0], 1.0), None, 0.1, np.array([1.0, 0.0]))
    with pytest.raises(InvalidParameter):
        illumination_radius(Ball([0.0, 0.0], 1.0), None, -0.1, np.array([1.0, 0.0]))


def test_weighted_square_limit_masses_and_flags():
    K = square()
    phi = uniform_density(2, BoxDomain([-2.0, -2.0], [2.0, 2.0]))
    e1 = np.array([1.0, 0.0])
    dg = np.array([1.0, 1.0]) / math.sqrt(2)
    assert limit_mass(K, phi, e1) == pytest.approx(2.0, rel=1e-12)
    assert limit_mass(K, phi, dg) == pytest.approx(4.0, rel=1e-12)
    assert illumination_radius(K, phi, 2.0, e1).flag == "unbounded"
    assert illumination_radius(K, phi, 3.9, dg).flag == "finite"
    assert illumination_radius(K, phi, 4.0, dg).flag == "unbounded"


def test_sphere_chart_overflow_flag():
    K = Ball([0.0, 0.0], 0.5)
    res = illumination_radius(K, space_form_density(1.0, 2), 1.5, np.array([1.0, 0.0]))
    assert res.flag == "chart-overflow"
    assert math.isinf(res.rho)


def test_profile_volume_difference_disk():
    K = Ball([0.0, 0.0], 1.0)
    prof = illumination_body(K, None, 0.01, DirectionGrid.uniform(16))
    R = invert_disk_cap(0.01)
    assert weighted_volume_difference(K, prof) == pytest.approx(math.pi * (R * R - 1), rel=1e-9)


def test_profile_volume_difference_3d():
    K = Ball([0.0, 0.0, 0.0], 1.0)
    prof = illumination_body(K, None, 0.01, DirectionGrid.icosphere(1))
    R = prof.rho.mean()
    assert np.ptp(prof.rho) < 1e-10
    assert weighted_volume_difference(K, prof) == pytest.approx(4 / 3 * math.pi * (R ** 3 - 1),
                                                                rel=1e-8)


def test_convexity_check_disk_and_raises_on_unbounded():
    K = Ball([0.0, 0.0], 1.0)
    prof = illumination_body(K, None, 0.05, DirectionGrid.uniform(32))
    assert convexity_check(prof).convex
    phi = uniform_density(2, BoxDomain([-2.0, -2.0], [2.0, 2.0]))
    bad = illumination_body(square(), phi, 2.5, DirectionGrid.uniform(8))
    assert not bad.all_finite
    with pytest.raises(ProfileUnbounded):
        convexity_check(bad)


def test_star_polygon_radius_on_square():
    P = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], float)
    q = np.array([[1.0, 1.0]])
    assert star_polygon_radius(P, q)[0] == pytest.approx(math.sqrt(2) / 2)


def test_profile_outputs():
    K = Ball([0.0, 0.0], 1.0)
    prof = illumination_body(K, None, 0.1, DirectionGrid.uniform(8))
    csv = profile_csv(prof)
    lines = csv.strip().splitlines()
    assert lines[0] == "u0,u1,rho,flag"
    assert len(lines) == 9 and lines[1].endswith(",finite")
    assert profile_svg(prof).lstrip().startswith("<svg")


def test_hyperbolic_cap_near_ideal_boundary():
    rK = 0.3
    K = Ball([0.0, 0.0], rK)
    phi = space_form_density(-1.0, 2)
    for gap in (1e-4, 1e-8, 1e-12):
        v = cap_volume(K, phi, [1.0 - gap, 0.0])
        assert v == pytest.approx(hyperbolic_ball_cap(math.atanh(rK), math.atanh(1.0 - gap)),
                                  rel=1e-10)


def test_hyperbolic_radius_unbounded_past_ideal_limit():
    rho = math.atanh(0.3)
    # cap of the geodesic disk seen from an ideal point
    v_inf = math.pi - 2.0 * math.acos(math.tanh(rho)) * math.cosh(rho)
    K = Ball([0.0, 0.0], 0.3)
    phi = space_form_density(-1.0, 2)
    u = np.array([0.6, 0.8])
    near = illumination_radius(K, phi, 0.999 * v_inf, u)
    assert near.flag == "finite"
    assert hyperbolic_ball_cap(rho, math.atanh(near.rho)) == pytest.approx(0.999 * v_inf, rel=1e-9)
    assert illumination_radius(K, phi, 1.00001 * v_inf, u).flag == "unbounded"
