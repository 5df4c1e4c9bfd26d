"""Closed-form illumination examples: weighted square, geodesic balls, spherical
square and wedge, horoball and ideal triangle.

Examples that leave the projective charts are computed intrinsically: the
wedge on the unit sphere in geodesic polar coordinates about the exterior
point, the horoball and ideal triangle in the upper half plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import dblquad, quad

from .bodies import Ball, DirectionGrid, square
from .engine import (CHART_OVERFLOW, UNBOUNDED, cap_volume, illumination_radius,
                     limit_mass)
from .errors import (ChartOverflow, DeltaOutOfRange, InvalidParameter, Saturated)
from .measures import BoxDomain, space_form_density, uniform_density


def _kappa(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _omega(n):
    """Surface area of the unit n-sphere in R^(n+1)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


# --------------------------------------------------------------------------
# spherical wedge
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WedgeRadius:
    R: float
    delta_alpha: float
    nonconvex: bool


def _check_alpha(alpha):
    if not (0.0 < alpha < math.pi / 2):
        raise InvalidParameter("alpha must lie in (0, pi/2)")


def wedge_illumination_radius(alpha, delta, n=2):
    """Half-width of the illumination wedge of W(alpha) on S^n.

    Beyond delta_alpha the sublevel set saturates to the union of the two
    half-spheres, which is reported as DeltaOutOfRange.
    """
    _check_alpha(alpha)
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    k = _kappa(n - 1)
    d_alpha = (math.pi - 2.0 * alpha) * k
    if not (0.0 < delta < d_alpha):
        raise DeltaOutOfRange(f"delta must lie in (0, {d_alpha:.12g})")
    R = alpha + delta / k
    return WedgeRadius(R, d_alpha, bool(delta > d_alpha / 2.0))


def wedge_volume(alpha, n=2):
    return 2.0 * alpha * _kappa(n - 1)


def _wedge_normals(alpha):
    # W = {p.x >= 0, q.x >= 0}, the lune of longitudes [-alpha, alpha] about e1
    p = np.array([math.sin(alpha), -math.cos(alpha), 0.0])
    q = np.array([math.sin(alpha), math.cos(alpha), 0.0])
    return p, q


def wedge_case_volume(alpha, z, n=2):
    """Cap volume of W(alpha) by the four-case analysis; z a unit vector in R^3."""
    _check_alpha(alpha)
    z = np.asarray(z, float)
    p, q = _wedge_normals(alpha)
    inp, inq = p @ z >= 0, q @ z >= 0
    k = _kappa(n - 1)
    if inp and inq:
        return 0.0
    if not inp and not inq:
        return _omega(n) - wedge_volume(alpha, n)
    lon = math.atan2(z[1], z[0])
    # distance of the projection to the far center, less pi/2, is |lon| - alpha
    return k * (abs(lon) - alpha)


def _first_entry(alpha, z, V):
    """First parameter s in (0, pi) where cos s z + sin s v enters the lune, else nan."""
    arcs = []
    for m in _wedge_normals(alpha):
        th = np.arctan2(V @ m, np.full(len(V), m @ z))
        arcs.append(np.mod(th - np.pi / 2, 2 * np.pi))
    a1, a2 = arcs
    in2 = np.mod(a1 - a2, 2 * np.pi) <= np.pi
    in1 = np.mod(a2 - a1, 2 * np.pi) <= np.pi
    c1 = np.where(in2, a1, np.inf)
    c2 = np.where(in1, a2, np.inf)
    s = np.minimum(c1, c2)
    which = np.where(c1 <= c2, 1, 2)
    s = np.where(s < np.pi, s, np.nan)
    return s, np.where(np.isnan(s), 0, which)


def wedge_cap_volume_intrinsic(alpha, z, probes=4096):
    """Area of [z, W(alpha)] minus W(alpha) on S^2 by geodesic polar coordinates about z.

    Each direction v at z contributes 1 - cos s(v), s the distance to the first
    point of W along v. The integrand is smooth between the directions where
    the entry face changes or the ray stops reaching W; those are located by
    bisection and each panel is integrated adaptively.
    """
    _check_alpha(alpha)
    z = np.asarray(z, float)
    z = z / np.linalg.norm(z)
    p, q = _wedge_normals(alpha)
    if p @ z >= 0 and q @ z >= 0:
        return 0.0
    e = np.eye(3)[int(np.argmin(np.abs(z)))]
    ea = np.cross(z, e)
    ea /= np.linalg.norm(ea)
    eb = np.cross(z, ea)

    def dirs(psi):
        psi = np.atleast_1d(psi)
        return np.cos(psi)[:, None] * ea + np.sin(psi)[:, None] * eb

    def state(psi):
        return _first_entry(alpha, z, dirs(psi))[1]

    grid = np.linspace(0.0, 2 * np.pi, probes + 1)
    st = state(grid)
    breaks = [0.0]
    for i in np.nonzero(st[1:] != st[:-1])[0]:
        lo, hi = grid[i], grid[i + 1]
        slo = st[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if state(mid)[0] == slo:
                lo = mid
            else:
                hi = mid
        breaks.append(0.5 * (lo + hi))
    breaks.append(2 * np.pi)

    def f(t):
        s, _ = _first_entry(alpha, z, dirs(t))
        return 0.0 if np.isnan(s[0]) else 1.0 - math.cos(s[0])

    parts = [quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
             for a, b in zip(breaks[:-1], breaks[1:])]
    return math.fsum(parts)


def sphere_point(lon, lat):
    return np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])


def wedge_verify(alpha, delta, lats=(0.0, 0.3, -0.7, 1.2)):
    """Intrinsic cap volumes at points of the predicted level set (n = 2)."""
    R = wedge_illumination_radius(alpha, delta, 2).R
    out = []
    for lat in lats:
        for sgn in (1.0, -1.0):
            out.append(wedge_cap_volume_intrinsic(alpha, sphere_point(sgn * R, lat)))
    return np.array(out)


# --------------------------------------------------------------------------
# horoball
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HoroballThreshold:
    value: float
    direct: float
    substitution: float
    bound: float


def horoball_threshold(n=2):
    """kappa_{n-1} * int_0^1 h^-n (1 - sqrt(1 - h^2))^(n-1) dh, by two routes."""
    if int(n) != n or n < 2:
        raise InvalidParameter("n must be an integer >= 2")
    n = int(n)
    k = _kappa(n - 1)

    def direct(h):
        # 1 - sqrt(1 - h^2) = h^2 / (1 + sqrt(1 - h^2)), stable near 0
        r = h * h / (1.0 + math.sqrt(max(0.0, 1.0 - h * h)))
        return h ** (-n) * r ** (n - 1) if h > 0 else (0.5 ** (n - 1) if n == 2 else 0.0)

    def subst(t):
        # h = sin t
        s, c = math.sin(t), math.cos(t)
        r = 2.0 * math.sin(t / 2) ** 2
        return s ** (-n) * r ** (n - 1) * c if s > 0 else (0.5 ** (n - 1) if n == 2 else 0.0)

    d = k * quad(direct, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    s = k * quad(subst, 0.0, math.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    return HoroballThreshold(s, d, s, k / (n - 1))


# --------------------------------------------------------------------------
# ideal triangle
# --------------------------------------------------------------------------

def ideal_triangle_level(delta):
    if not (0.0 < delta < math.pi):
        raise DeltaOutOfRange("delta must lie in (0, pi)")
    return math.sin(delta / 2.0)


def uhp_triangle_area_to_side(z):
    """Hyperbolic area of conv{z, 0, inf} in the upper half plane, x_z > 0.

    The region is bounded by the imaginary axis, the vertical geodesic up from
    z and the circular geodesic from z to 0 (center c = |z|^2 / (2 x_z)).
    Integrating dy / y^2 first leaves int_0^{x_z} dx / sqrt(2 c x - x^2), and
    x = u^2 removes the endpoint singularity.
    """
    x, y = float(z[0]), float(z[1])
    if x <= 0 or y <= 0:
        raise InvalidParameter("z must lie in the quadrant x > 0, y > 0")
    c = (x * x + y * y) / (2.0 * x)
    val, _ = quad(lambda u: 2.0 / math.sqrt(2.0 * c - u * u), 0.0, math.sqrt(x),
                  epsabs=1e-14, epsrel=1e-13)
    return val


def ideal_triangle_area():
    """Area of the ideal triangle (-1, 0, inf): int_{-1}^0 dx / y_arc(x)."""
    # 1 / sqrt(1/4 - (x + 1/2)^2) = 1 / sqrt((x + 1)(-x)), algebraic endpoint weights
    val, _ = quad(lambda x: 1.0, -1.0, 0.0, weight="alg", wvar=(-0.5, -0.5),
                  epsabs=1e-14)
    return val


def ideal_triangle_level_points(delta, count=20, spread=(1e-2, 1e2)):
    """Points of the predicted level set beyond the side [0, inf] of the ideal
    triangle with vertices -1, 0, inf.

    The level set is the ray at angle arccos(lambda) from the positive real
    axis, whose points lie at distance artanh(lambda) from the side.
    """
    lam = ideal_triangle_level(delta)
    th = math.acos(lam)
    r = np.geomspace(spread[0], spread[1], count)
    return np.column_stack([r * math.cos(th), r * math.sin(th)])


def ideal_triangle_verify(delta, count=20):
    """Cap volumes at the level points, with the distance law checked alongside.

    Returns (V values, max |cosh h sin(theta/2) - 1|), theta = pi - delta the
    interior angle at z and h the distance to the side.
    """
    P = ideal_triangle_level_points(delta, count)
    V = np.array([uhp_triangle_area_to_side(p) for p in P])
    h = np.arcsinh(P[:, 0] / P[:, 1])
    theta = math.pi - delta
    law = float(np.max(np.abs(np.cosh(h) * math.sin(theta / 2) - 1.0)))
    return V, law


def uhp_to_klein(P):
    """Upper half plane to Klein disk via the Poincare disk."""
    w = np.asarray(P, float)[:, 0] + 1j * np.asarray(P, float)[:, 1]
    d = (w - 1j) / (w + 1j)
    k = 2.0 * d / (1.0 + np.abs(d) ** 2)
    return np.column_stack([k.real, k.imag])


# --------------------------------------------------------------------------
# spherical square
# --------------------------------------------------------------------------

def _phi_s(s, t):
    return (1.0 + s * s + t * t) ** -1.5


@dataclass(frozen=True)
class SquareWitness:
    r: float
    V_z: float
    V_zp: float

    @property
    def margin(self):
        return self.V_z - self.V_zp

    @property
    def interval(self):
        return (self.V_zp, self.V_z)


def square_cap_volume_axis(r, tol=1e-12):
    """V at z = (r, 0) for the gnomonic spherical square."""
    v, _ = dblquad(lambda t, s: _phi_s(s, t), 1.0, r,
                   lambda s: -(r - s) / (r - 1.0), lambda s: (r - s) / (r - 1.0),
                   epsabs=tol, epsrel=tol)
    return v


def square_cap_volume_corner(r, tol=1e-12):
    """V at z' = (r, 1) for the gnomonic spherical square."""
    v, _ = dblquad(lambda t, s: _phi_s(s, t), 1.0, r,
                   lambda s: (2.0 * s - (r + 1.0)) / (r - 1.0), lambda s: 1.0,
                   epsabs=tol, epsrel=tol)
    return v


def spherical_square_witness(r):
    if not r > 1.0:
        raise InvalidParameter("r must exceed 1")
    return SquareWitness(float(r), square_cap_volume_axis(r), square_cap_volume_corner(r))


# --------------------------------------------------------------------------
# geodesic balls in space forms
# --------------------------------------------------------------------------

def sphere_saturation(lam, r_chart):
    """Half the sphere area less the ball area, for the chart ball of radius r_chart."""
    rho = math.atan(math.sqrt(lam) * r_chart) / math.sqrt(lam)
    return 2.0 * math.pi / lam * math.cos(math.sqrt(lam) * rho)


@dataclass(frozen=True)
class GeodesicBallProfile:
    lam: float
    r_K: float
    delta: float
    r_delta: float
    radii: tuple
    spread: float


def geodesic_ball_profile(lam, r_K, delta, directions=8, tol=1e-12):
    """Chart radius of the illumination body of the chart ball Ball(o, r_K)."""
    lam = float(lam)
    if not r_K > 0 or not delta > 0:
        raise InvalidParameter("r_K and delta must be positive")
    if lam < 0 and r_K * math.sqrt(-lam) >= 1.0:
        raise InvalidParameter("the ball leaves the hyperbolic chart")
    if lam > 0:
        sat = sphere_saturation(lam, r_K)
        if delta >= sat:
            raise Saturated(f"delta >= {sat:.12g}: the body is constant from here on")
    K = Ball([0.0, 0.0], r_K)
    phi = space_form_density(lam, 2)
    grid = DirectionGrid.uniform(directions, offset=0.1234)
    radii = []
    for u in grid.units:
        res = illumination_radius(K, phi, delta, u, tol=tol)
        if res.flag == CHART_OVERFLOW:
            raise ChartOverflow("the level set leaves the chart cutoff")
        radii.append(res.rho)
    radii = np.array(radii)
    spread = float((radii.max() - radii.min()) / radii.mean())
    return GeodesicBallProfile(lam, float(r_K), float(delta), float(np.median(radii)),
                               tuple(radii.tolist()), spread)


def disk_cap_volume(R, r=1.0):
    """Euclidean cap volume of the disk of radius r from distance R >= r."""
    if R <= r:
        return 0.0
    x = R / r
    return r * r * (math.sqrt(x * x - 1.0) - math.acos(1.0 / x))


# --------------------------------------------------------------------------
# weighted square
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedSquare:
    mass_e1: float
    mass_diag: float
    flag_e1: str
    flag_diag: str


def weighted_square(delta_e1=2.0, delta_diag=3.9):
    K = square()
    phi = uniform_density(2, BoxDomain([-2.0, -2.0], [2.0, 2.0]))
    e1 = np.array([1.0, 0.0])
    dg = np.array([1.0, 1.0]) / math.sqrt(2.0)
    return WeightedSquare(limit_mass(K, phi, e1), limit_mass(K, phi, dg),
                          illumination_radius(K, phi, delta_e1, e1).flag,
                          illumination_radius(K, phi, delta_diag, dg).flag)


# --------------------------------------------------------------------------
# golden suite
# --------------------------------------------------------------------------

@dataclass
class GoldenCase:
    name: str
    expected: float
    computed: float
    tol: float
    note: str = ""

    @property
    def error(self):
        return abs(self.computed - self.expected)

    @property
    def passed(self):
        return bool(self.error <= self.tol)

    def to_dict(self):
        return {"case": self.name, "expected": self.expected, "computed": self.computed,
                "error": self.error, "tol": self.tol, "pass": self.passed, "note": self.note}


@dataclass
class GoldenReport:
    cases: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.cases)

    def table(self):
        rows = [f"{'case':<34} {'expected':>16} {'computed':>16} {'|error|':>10}  result"]
        for c in self.cases:
            rows.append(f"{c.name:<34} {c.expected:>16.10g} {c.computed:>16.10g} "
                        f"{c.error:>10.2e}  {'PASS' if c.passed else 'FAIL'}")
        return "\n".join(rows)

    def to_dict(self):
        return {"schema_version": 1, "passed": self.passed,
                "cases": [c.to_dict() for c in self.cases]}


def golden_suite():
    rep = GoldenReport()
    add = rep.cases.append

    ws = weighted_square()
    add(GoldenCase("weighted square mass e1", 2.0, ws.mass_e1, 1e-10))
    add(GoldenCase("weighted square hull mass diagonal", 8.0, ws.mass_diag + 4.0, 1e-10,
                   "limit of the whole hull, K included"))
    add(GoldenCase("weighted square e1 unbounded at 2", 1.0, float(ws.flag_e1 == UNBOUNDED), 0.0))
    add(GoldenCase("weighted square diag finite at 3.9", 1.0,
                   float(ws.flag_diag != UNBOUNDED), 0.0))

    hb = horoball_threshold(2)
    add(GoldenCase("horoball threshold n=2", 2.0 - math.pi / 2, hb.value, 1e-6,
                   "displayed integral evaluates to pi - 2"))
    add(GoldenCase("horoball routes agree n=3", horoball_threshold(3).direct,
                   horoball_threshold(3).substitution, 1e-8))

    wr = wedge_illumination_radius(0.5, 0.3, 2)
    add(GoldenCase("wedge radius alpha=0.5 delta=0.3", 0.65, wr.R, 1e-15))
    Vw = wedge_verify(0.5, 0.3)
    add(GoldenCase("wedge level set alpha=0.5 delta=0.3", 0.3,
                   0.3 + float(np.max(np.abs(Vw - 0.3))), 1e-6))
    d_a = wr.delta_alpha
    add(GoldenCase("wedge saturation case (i)", 4 * math.pi - 4 * 0.5,
                   wedge_cap_volume_intrinsic(0.5, sphere_point(math.pi, 0.2)), 1e-6))
    add(GoldenCase("wedge non-convex flag past half", 1.0,
                   float(wedge_illumination_radius(0.5, 0.5 * d_a * 1.01).nonconvex
                         and not wedge_illumination_radius(0.5, 0.5 * d_a * 0.99).nonconvex), 0.0))

    add(GoldenCase("ideal triangle area", math.pi, ideal_triangle_area(), 1e-6))
    add(GoldenCase("ideal triangle level delta=pi/2", math.sqrt(0.5), ideal_triangle_level(math.pi / 2), 1e-15))
    for d in (0.5, 1.0, 2.0):
        V, _ = ideal_triangle_verify(d)
        add(GoldenCase(f"ideal triangle level set delta={d:g}", d,
                       d + float(np.max(np.abs(V - d))), 1e-5))

    sw = spherical_square_witness(1.5)
    add(GoldenCase("spherical square margin r=1.5 > 0", 1.0, float(sw.margin > 1e-4), 0.0))
    V_eng = cap_volume(square(), space_form_density(1.0, 2), [1.5, 0.0])
    add(GoldenCase("spherical square engine vs integral", sw.V_z, V_eng, 1e-7))

    gb = geodesic_ball_profile(0.0, 1.0, disk_cap_volume(1.5))
    add(GoldenCase("geodesic ball lambda=0 radius", 1.5, gb.r_delta, 1e-8))
    gh = geodesic_ball_profile(-1.0, 0.3, 0.1)
    add(GoldenCase("geodesic ball lambda=-1 spread", 0.0, gh.spread, 1e-6))
    return rep
