"""Weighted illumination bodies of convex bodies in Euclidean space, space forms
and Hilbert geometries."""

from .bodies import (Ball, BoundarySample, DirectionGrid, Ellipsoid, Polytope,
                     RadialFourier2D, body_from_dict, square)
from .engine import (RadialProfile, cap_volume, convexity_check, illumination_body,
                     illumination_radius, limit_mass, uniform_cap_volume,
                     weighted_volume_difference)
from .errors import *  # noqa: F401,F403
from .functionals import (affine_surface_area_p, c_n, dual_derivative_integral, dual_volume,
                          lp_limit_check, weighted_limit_integral)
from .hilbert import (HilbertDomain, finsler_density, finsler_surface_area, finsler_weight,
                      hilbert_distance, hilbert_norm)
from .measures import (QuadratureSpec, custom, dual_weight, space_form_density,
                       uniform_density, weighted_volume)
from .spaceforms import (boundary_measure_factor, curvature_transform, floating_area,
                         hull_volume_along_geodesic, hyperbolic_triangle_tau,
                         spherical_excess, spherical_triangle_profile)

__version__ = "0.1.0"
