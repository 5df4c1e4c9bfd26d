"""Space forms in the projective chart, and triangle-area toolkits on S^2 and H^2.

In the chart of curvature ``lam`` geodesics are straight chords and the volume
density is ``(1 + lam |p|^2)^(-(n+1)/2)``; for lam < 0 the chart is the open ball
of radius 1/sqrt(-lam) (Beltrami-Klein), for lam > 0 it is the gnomonic image
of an open hemisphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .bodies import Body, integrate_pieces
from .engine import cap_volume
from .errors import (DegenerateTriangle, GeodesicMeetsBody, InvalidParameter, OutOfChart)
from .measures import space_form_density, weighted_volume


def _check_chart(lam, x):
    if lam < 0:
        r2 = np.einsum("...i,...i->...", x, x)
        if np.any(r2 * -lam >= 1.0):
            raise OutOfChart(f"point outside the chart ball of radius {1 / math.sqrt(-lam):g}")


def boundary_measure_factor(lam, x, n_e):
    """Ratio of the chart boundary measure to the Euclidean one."""
    x = np.asarray(x, float)
    n_e = np.asarray(n_e, float)
    _check_chart(lam, x)
    n = x.shape[-1]
    xn = np.einsum("...i,...i->...", n_e, x)
    r2 = np.einsum("...i,...i->...", x, x)
    return np.sqrt((1.0 + lam * xn ** 2) / (1.0 + lam * r2) ** n)


def curvature_transform(lam, x, n_e, H_e):
    """Gauss-Kronecker curvature in the chart metric from the Euclidean one."""
    x = np.asarray(x, float)
    n_e = np.asarray(n_e, float)
    _check_chart(lam, x)
    n = x.shape[-1]
    xn = np.einsum("...i,...i->...", n_e, x)
    r2 = np.einsum("...i,...i->...", x, x)
    return np.asarray(H_e) * ((1.0 + lam * r2) / (1.0 + lam * xn ** 2)) ** ((n + 1) / 2.0)


def floating_area(K: Body, lam, route="composed", tol=1e-12):
    """Integral of H_lam^(1/(n+1)) against the chart boundary measure.

    ``composed`` uses the single Euclidean integrand H_e^(1/(n+1)) phi_lam^((n-1)/(n+1));
    ``factors`` multiplies the transformed curvature and the boundary-measure factor.
    Nodes with undefined curvature contribute nothing.
    """
    lam = float(lam)
    n = K.dim
    if lam < 0:
        E = np.eye(n)
        reach = max(float(np.max(K.support(E))), float(np.max(K.support(-E))))
        # the support bound is only a box test; check the farthest boundary point too
        pts = K.sample_boundary(256).points
        if float(np.max(np.linalg.norm(pts, axis=1))) * math.sqrt(-lam) >= 1.0 or reach <= 0:
            raise OutOfChart("body leaves the chart")

    if route == "composed":
        def f(s):
            H = np.nan_to_num(s.curvature, nan=0.0)
            r2 = np.einsum("ij,ij->i", s.points, s.points)
            phi = (1.0 + lam * r2) ** (-(n + 1) / 2.0)
            return H ** (1.0 / (n + 1)) * phi ** ((n - 1) / (n + 1))
    elif route == "factors":
        def f(s):
            H = np.nan_to_num(s.curvature, nan=0.0)
            Hl = curvature_transform(lam, s.points, s.normals, H)
            return Hl ** (1.0 / (n + 1)) * boundary_measure_factor(lam, s.points, s.normals)
    else:
        raise InvalidParameter(f"unknown route {route!r}")
    return integrate_pieces(K.pieces(), f, tol=tol)


# --------------------------------------------------------------------------
# spherical triangles
# --------------------------------------------------------------------------

def spherical_excess(A, B, C):
    """Area of the spherical triangle with unit-vector vertices A, B, C."""
    A, B, C = (np.asarray(v, float) for v in (A, B, C))
    for v in (A, B, C):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise InvalidParameter("vertices must be unit vectors")
    det = float(np.dot(A, np.cross(B, C)))
    den = 1.0 + float(A @ B + B @ C + C @ A)
    if den == 0.0 and det == 0.0:
        raise DegenerateTriangle("triangle contains antipodal vertices")
    return 2.0 * math.atan2(abs(det), den)


@dataclass(frozen=True)
class SphericalTriangleProfile:
    phi: float
    theta: float

    def vertices(self, t):
        c, s = math.cos, math.sin
        p = np.array([c(self.theta) * c(self.phi), s(self.phi), s(self.theta) * c(self.phi)])
        q = np.array([c(self.theta) * c(self.phi), -s(self.phi), s(self.theta) * c(self.phi)])
        g = np.array([c(t), s(t), 0.0])
        return g, p, q

    def tan_half(self, t):
        ph, th = self.phi, self.theta
        return np.sin(ph) * np.sin(th) * np.cos(t) / (np.cos(ph) + np.cos(th) * np.cos(t))

    def A(self, t):
        ph, th = self.phi, self.theta
        num = np.sin(ph) * np.sin(th) * np.cos(t)
        den = np.cos(ph) + np.cos(th) * np.cos(t)
        return 2.0 * np.arctan2(num, den)

    @property
    def A0(self):
        return float(self.A(0.0))

    def local_max_certificate(self, hs=None):
        hs = np.geomspace(0.5, 1e-6, 25) if hs is None else np.asarray(hs)
        a0 = self.A0
        return bool(np.all(self.A(hs) < a0) and np.all(self.A(-hs) < a0))


def spherical_triangle_profile(phi, theta):
    if not (0.0 < phi < math.pi / 2):
        raise InvalidParameter("phi must lie in (0, pi/2)")
    if not (0.0 < theta < math.pi - phi):
        raise InvalidParameter("theta must lie in (0, pi - phi)")
    return SphericalTriangleProfile(float(phi), float(theta))


# --------------------------------------------------------------------------
# hyperbolic triangles, upper half plane
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicTau:
    """Rational function tau = alpha / beta for the triangle (i e^t, p, q), q = (x0, 1)."""
    x1: float
    y1: float
    x0: float

    @property
    def alpha(self):
        x1, y1, x0 = self.x1, self.y1, self.x0
        return Polynomial([x1 * (x0 ** 2 + 1) - x0 * (x1 ** 2 + y1 ** 2), 0.0, x0 - x1])

    @property
    def beta(self):
        x1, y1, x0 = self.x1, self.y1, self.x0
        return Polynomial([y1 * (x0 ** 2 + 1) + x1 ** 2 + y1 ** 2,
                           (x0 - x1) ** 2 + (1 + y1) ** 2, 1 + y1])

    @property
    def mu(self):
        x1, y1, x0 = self.x1, self.y1, self.x0
        return Polynomial([-x1 * (x0 ** 2 + 1) + x0 * (x1 ** 2 + y1 ** 2),
                           2 * (x0 * y1 - x1), x0 - x1])

    @property
    def k(self):
        return (self.x0 - self.x1) ** 2 + (1 + self.y1) ** 2

    def tau(self, s):
        return self.alpha(s) / self.beta(s)

    def dtau(self, s):
        """The closed form k mu / beta^2."""
        return self.k * self.mu(s) / self.beta(s) ** 2

    def dtau_quotient(self, s):
        a, b = self.alpha, self.beta
        return (a.deriv()(s) * b(s) - a(s) * b.deriv()(s)) / b(s) ** 2

    def d2tau(self, s):
        a, b = self.alpha, self.beta
        num = a.deriv() * b - a * b.deriv()
        return (num.deriv()(s) * b(s) - 2.0 * num(s) * b.deriv()(s)) / b(s) ** 3

    def A(self, t):
        return 2.0 * np.arctan(np.abs(self.tau(np.exp(t))))

    def mu_roots(self):
        r = self.mu.roots()
        r = np.real(r[np.abs(np.imag(r)) < 1e-12])
        return np.sort(r[r > 0])

    def sign_certificate(self):
        """(s0, sgn tau'', sgn tau) at every positive root of mu with tau != 0."""
        out = []
        for s0 in self.mu_roots():
            t = self.tau(s0)
            if abs(t) < 1e-14:
                continue
            out.append((float(s0), int(np.sign(self.d2tau(s0))), int(np.sign(t))))
        return out

    def scan_no_local_max(self, t_grid):
        """Indices of interior strict local maxima of A on the grid (empty when none)."""
        a = self.A(np.asarray(t_grid, float))
        i = np.arange(1, len(a) - 1)
        return [int(k) for k in i[(a[i] > a[i - 1]) & (a[i] > a[i + 1])]]


def hyperbolic_triangle_tau(p, q):
    x1, y1 = map(float, p)
    x0, yq = map(float, q)
    if y1 <= 0:
        raise InvalidParameter("p must lie in the upper half plane")
    if yq != 1.0:
        raise InvalidParameter("q must have height 1")
    return HyperbolicTau(x1, y1, x0)


# --------------------------------------------------------------------------
# hull area along a chart geodesic
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicScan:
    t: np.ndarray
    B: np.ndarray
    local_max: list


def hull_volume_along_geodesic(K: Body, lam, point, direction, t_grid, rel_tol=1e-10):
    """B(t) = vol_lam(conv({gamma(t)} u K)) along the chord gamma(t) = point + t direction.

    Chords are geodesics in the chart, so the linear parameter is a monotone
    reparametrisation of arclength; local maxima are unaffected.
    """
    if K.dim != 2:
        raise InvalidParameter("only planar bodies are supported")
    t = np.asarray(t_grid, float)
    G = np.asarray(point, float)[None, :] + t[:, None] * np.asarray(direction, float)[None, :]
    if np.any(K.contains(G)):
        raise GeodesicMeetsBody("the geodesic meets the body on the grid")
    phi = space_form_density(lam, 2)
    base = weighted_volume(K, phi)
    B = np.array([base + cap_volume(K, phi, g) for g in G])
    i = np.arange(1, len(B) - 1)
    noise = rel_tol * np.abs(B).max()
    lm = i[(B[i] > B[i - 1] + noise) & (B[i] > B[i + 1] + noise)]
    return GeodesicScan(t, B, [int(k) for k in lm])
