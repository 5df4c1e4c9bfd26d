import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from illume import (Ball, DirectionGrid, Ellipsoid, affine_surface_area_p, c_n,
                    dual_derivative_integral, dual_volume, floating_area, illumination_body,
                    lp_limit_check, space_form_density, square, weighted_limit_integral)
from illume.errors import (InvalidParameter, OriginNotInterior, ProfileUnbounded,
                           UnsupportedBody)
from illume.functionals import lp_weight
from illume.measures import BoxDomain, uniform_density

# frozen from 0.5 * (n(n+1)/kappa_{n-1})^(2/(n+1)) evaluated by hand
C2 = 1.040041911525952
C3 = 0.9772050238058398


def test_c_n_values():
    assert c_n(2) == pytest.approx(C2, rel=1e-15)
    assert c_n(3) == pytest.approx(C3, rel=1e-15)
    # kappa_1 = 2: c_2 = 0.5 * 3^(2/3)
    assert c_n(2) == pytest.approx(0.5 * 3 ** (2 / 3), rel=1e-15)
    # the disk limit pi 3^(2/3) equals c_2 2 pi
    assert 2 * math.pi * c_n(2) == pytest.approx(math.pi * 3 ** (2 / 3), rel=1e-15)
    with pytest.raises(InvalidParameter):
        c_n(1)
    with pytest.raises(InvalidParameter):
        c_n(2.5)


def test_limit_integral_disk_and_ball():
    assert weighted_limit_integral(Ball([0.0, 0.0], 1.0)) == pytest.approx(2 * math.pi * C2)
    # sphere of radius r: H = r^-2, area 4 pi r^2
    r = 1.7
    v = weighted_limit_integral(Ball([0.0, 0.0, 0.0], r), tol=1e-11)
    assert v == pytest.approx(C3 * 4 * math.pi * r ** 2 * r ** -0.5, rel=1e-9)


def test_limit_integral_polygon_is_zero():
    assert weighted_limit_integral(square()) == 0.0


def test_limit_integral_space_form_is_floating_area():
    K = Ellipsoid([0.05, 0.0], [0.4, 0.25])
    for lam in (-1.0, 1.0):
        phi = space_form_density(lam, 2)
        assert weighted_limit_integral(K, phi, phi) == pytest.approx(
            C2 * floating_area(K, lam), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0, math.pi),
       st.sampled_from([0.5, 1.0, 2.0, 4.0, -1.0]))
def test_lp_affine_area_of_centered_ellipses(a, b, th, p):
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    K = Ellipsoid([0.0, 0.0], [a, b], R)
    # SL(2) invariance about o: as_p(E) = 2 pi (ab)^((n-p)/(n+p))
    ref = 2 * math.pi * (a * b) ** ((2 - p) / (2 + p))
    assert affine_surface_area_p(K, p) == pytest.approx(ref, rel=1e-9)


def test_affine_area_translation_invariant_for_p1():
    K = Ellipsoid([0.4, -0.2], [1.5, 0.8])
    assert affine_surface_area_p(K, 1) == pytest.approx(2 * math.pi * 1.2 ** (1 / 3), rel=1e-10)


def test_affine_area_3d_ball():
    # H^(1/4) = r^(-1/2) over an area of 4 pi r^2
    r = 2.0
    v = affine_surface_area_p(Ball([0.0, 0.0, 0.0], r), 1, tol=1e-11)
    assert v == pytest.approx(4 * math.pi * r ** 1.5, rel=1e-9)


def test_affine_area_errors():
    with pytest.raises(InvalidParameter):
        affine_surface_area_p(Ball([0.0, 0.0], 1.0), -2)
    with pytest.raises(OriginNotInterior):
        affine_surface_area_p(Ball([3.0, 0.0], 1.0), 1)
    assert affine_surface_area_p(square(), 1) == 0.0


@pytest.mark.parametrize("q", [1.0, 2.0, -1.0, 3.5])
def test_dual_derivative_disk(q):
    r = 1.3
    v = dual_derivative_integral(Ball([0.0, 0.0], r), q)
    # H^(1/3) r^(q-2) over a circle of length 2 pi r
    assert v == pytest.approx(C2 * q / 2 * 2 * math.pi * r * r ** (-1 / 3) * r ** (q - 2), rel=1e-11)


def test_dual_volume_routes():
    r = 0.9
    assert dual_volume(Ball([0.0, 0.0], r), 2.0) == pytest.approx(math.pi * r * r, rel=1e-12)
    assert dual_volume(Ball([0.0, 0.0, 0.0], r), 3.0) == pytest.approx(4 / 3 * math.pi * r ** 3,
                                                                      rel=1e-12)
    prof = illumination_body(Ball([0.0, 0.0], 1.0), None, 0.01, DirectionGrid.uniform(16))
    assert dual_volume(prof, 1.0) == pytest.approx(math.pi * prof.rho[0], rel=1e-12)


def test_dual_volume_rejects_unbounded_profiles():
    phi = uniform_density(2, BoxDomain([-2.0, -2.0], [2.0, 2.0]))
    prof = illumination_body(square(), phi, 2.5, DirectionGrid.uniform(8))
    with pytest.raises(ProfileUnbounded):
        dual_volume(prof, 1.0)
    with pytest.raises(InvalidParameter):
        dual_volume(Ball([0.0, 0.0], 1.0), 0)


def test_lp_weight_on_boundary():
    a, b = 1.5, 1.0
    K = Ellipsoid([0.0, 0.0], [a, b])
    psi = lp_weight(K, 1.0)
    # p = 1: exponent of x.n vanishes, psi = H^(1/3 - 1/3) = 1
    P = np.array([[a, 0.0], [2.0, 1.0], [0.0, -3.0]])
    assert np.allclose(psi(P), 1.0)
    psi2 = lp_weight(K, 2.0)
    # p = 2 at (a, 0): H = a / b^2, x.n = a
    assert psi2(np.array([[a * 1.5, 0.0]]))[0] == pytest.approx(
        (a / b ** 2) ** (0.5 - 1 / 3) / a ** 0.5, rel=1e-12)


def test_lp_limit_check_ellipse():
    K = Ellipsoid([0.1, 0.0], [1.5, 1.0])
    res = lp_limit_check(K, 2.0, deltas=(1e-3, 1e-5))
    assert res.rel_errors[-1] < 2e-3
    assert res.rel_errors[-1] < res.rel_errors[0]
    with pytest.raises(UnsupportedBody):
        lp_limit_check(square(), 1.0)
