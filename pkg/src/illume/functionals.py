"""Boundary functionals that appear as limits of illumination difference quotients."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bodies import Ball, Body, DirectionGrid, Ellipsoid, integrate_pieces
from .engine import RadialProfile, illumination_body, weighted_volume_difference
from .errors import (InvalidParameter, OriginNotInterior, ProfileUnbounded,
                     UnsupportedBody)
from .measures import WeightDensity, Whole, custom, uniform_density


def _kappa(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def c_n(n):
    """0.5 * (n (n+1) / kappa_{n-1})^(2/(n+1))."""
    if int(n) != n or n < 2:
        raise InvalidParameter("dimension must be an integer >= 2")
    n = int(n)
    return 0.5 * (n * (n + 1) / _kappa(n - 1)) ** (2.0 / (n + 1))


def _curv(s):
    return np.nan_to_num(s.curvature, nan=0.0)


def weighted_limit_integral(K: Body, phi: WeightDensity | None = None,
                            psi: WeightDensity | None = None, tol=1e-12):
    """c_n times the boundary integral of H^(1/(n+1)) phi^(-2/(n+1)) psi."""
    n = K.dim
    phi = phi or uniform_density(n)
    psi = psi or uniform_density(n)

    def f(s):
        H = _curv(s)
        out = np.zeros(len(H))
        live = H > 0
        if live.any():
            x = s.points[live]
            out[live] = H[live] ** (1.0 / (n + 1)) * phi(x) ** (-2.0 / (n + 1)) * psi(x)
        return out

    return c_n(n) * integrate_pieces(K.pieces(), f, tol=tol)


def _require_origin(K):
    if not K.origin_interior():
        raise OriginNotInterior("the origin must lie in the interior of the body")


def affine_surface_area_p(K: Body, p, tol=1e-12):
    """L_p affine surface area; p = 1 is the classical affine surface area."""
    n = K.dim
    if p == -n:
        raise InvalidParameter("p = -n is excluded")
    _require_origin(K)
    e = p / (n + p)

    def f(s):
        H = _curv(s)
        xn = np.einsum("ij,ij->i", s.points, s.normals)
        with np.errstate(divide="ignore"):
            g = (H / xn ** (n + 1)) ** e * xn
        # a flat piece contributes nothing when the exponent is positive
        return np.where(np.isfinite(g), g, 0.0)

    return integrate_pieces(K.pieces(), f, tol=tol)


def dual_derivative_integral(K: Body, q, tol=1e-12):
    """c_n (q/n) times the boundary integral of H^(1/(n+1)) |x|^(q-n)."""
    if q == 0:
        raise InvalidParameter("q must be nonzero")
    _require_origin(K)
    n = K.dim

    def f(s):
        H = _curv(s)
        r = np.linalg.norm(s.points, axis=1)
        return H ** (1.0 / (n + 1)) * r ** (q - n)

    return c_n(n) * (q / n) * integrate_pieces(K.pieces(), f, tol=tol)


def dual_volume(L, q, resolution=None):
    """(1/n) times the integral of rho(L, u)^q over the sphere.

    ``L`` is a RadialProfile (its own grid is used) or a body, sampled on a
    direction grid of the given resolution.
    """
    if q == 0:
        raise InvalidParameter("q must be nonzero")
    if isinstance(L, RadialProfile):
        if not L.all_finite:
            raise ProfileUnbounded("profile has non-finite radii")
        grid, rho = L.grid, L.rho
    else:
        _require_origin(L)
        if resolution is None:
            resolution = 1024 if L.dim == 2 else 2562
        grid = DirectionGrid.for_dimension(L.dim, resolution)
        rho = np.asarray(L.radial(grid.units))
    n = grid.dim
    return math.fsum((rho ** q * grid.weights).tolist()) / n


# --------------------------------------------------------------------------
# L_p limit experiment
# --------------------------------------------------------------------------

def _ellipsoid_foot(K: Ellipsoid, Y):
    """Nearest boundary point, outward normal and curvature for points outside K."""
    a2 = K.semi_axes ** 2
    y = (Y - K.center) @ K.rotation      # local coordinates
    t = np.zeros(len(y))
    # g(t) = sum a^2 y^2/(a^2+t)^2 - 1 is convex decreasing, Newton from 0 is monotone
    for _ in range(100):
        d = a2[None, :] + t[:, None]
        g = np.sum(a2 * y ** 2 / d ** 2, axis=1) - 1.0
        dg = -2.0 * np.sum(a2 * y ** 2 / d ** 3, axis=1)
        step = g / dg
        t = t - step
        if np.all(np.abs(step) <= 1e-15 * (1.0 + np.abs(t))):
            break
    x = a2 * y / (a2[None, :] + t[:, None])
    g = x / a2
    gn = np.linalg.norm(g, axis=1)
    n_loc = g / gn[:, None]
    m = K.dim
    H = 1.0 / (np.prod(a2) * np.sum(x ** 2 / a2 ** 2, axis=1) ** ((m + 1) / 2.0))
    return x @ K.rotation.T + K.center, n_loc @ K.rotation.T, H


def lp_weight(K: Ellipsoid, p):
    """psi_p on the complement of K, constant along outward normals.

    On the boundary it equals H^(p/(n+p) - 1/(n+1)) / (x.n)^(n(p-1)/(n+p)).
    Inside K it is given the value at the radial boundary point; the shell
    integrals never look there.
    """
    n = K.dim
    e1 = p / (n + p) - 1.0 / (n + 1)
    e2 = n * (p - 1) / (n + p)

    def f(Y):
        Y = np.atleast_2d(Y)
        inside = np.asarray(K.contains(Y))
        Z = Y.copy()
        if inside.any():
            r = np.linalg.norm(Y[inside], axis=1)
            r = np.where(r == 0, 1.0, r)
            U = Y[inside] / r[:, None]
            U = np.where(np.linalg.norm(U, axis=1)[:, None] == 0, np.eye(n)[0], U)
            Z[inside] = U * np.asarray(K.radial(U))[:, None] * (1.0 + 1e-12)
        x, nrm, H = _ellipsoid_foot(K, Z)
        xn = np.einsum("ij,ij->i", x, nrm)
        return H ** e1 / xn ** e2

    return custom(f, n, Whole(n), label=f"lp_weight(p={p})",
                  params={"kind": "lp", "p": p, "extension": "normal-constant"})


@dataclass(frozen=True)
class LpLimitCheck:
    p: float
    deltas: tuple
    quotients: tuple
    target: float
    as_p: float
    extension: str = "normal-constant"

    @property
    def rel_errors(self):
        return tuple(abs(q - self.target) / abs(self.target) for q in self.quotients)


def lp_limit_check(K: Body, p, deltas=(1e-3, 1e-4, 1e-5), directions=64, tol=1e-12):
    """Difference quotients with phi = 1 and psi = psi_p, against c_n as_p(K)."""
    if not isinstance(K, (Ball, Ellipsoid)):
        raise UnsupportedBody("the L_p limit check needs a smooth body with positive curvature")
    n = K.dim
    if p == -n:
        raise InvalidParameter("p = -n is excluded")
    asp = affine_surface_area_p(K, p)
    psi = lp_weight(K, p)
    grid = DirectionGrid.for_dimension(n, directions)
    qs = []
    for d in deltas:
        prof = illumination_body(K, None, d, grid)
        qs.append(weighted_volume_difference(K, prof, psi, tol=tol) / d ** (2.0 / (n + 1)))
    return LpLimitCheck(float(p), tuple(map(float, deltas)), tuple(qs), c_n(n) * asp, asp)
