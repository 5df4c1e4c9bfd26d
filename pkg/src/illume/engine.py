"""Cap volumes, illumination bodies as radial profiles, and volume differences.

The cap volume of a point z outside K is the weighted volume of
conv({z} u K) minus K. Three independent routes are provided:

* ``frontside`` integrates over the part of the boundary facing z only;
  no large terms cancel, so this is the default for root finding.
* ``boundary`` integrates |(z - x) . n| over the whole boundary and subtracts
  half the weighted volume of K.
* ``monte-carlo`` samples the hull region directly.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bodies import (Arc, Body, CapPatch, DirectionGrid, Ellipsoid, Polytope, RadialFourier2D,
                     integrate_pieces)
from .errors import (InvalidParameter, NumericalFailure, OriginNotInterior,
                     ProfileUnbounded, UnsupportedBody)
from .measures import (MCResult, QuadratureSpec, WeightDensity, Whole, body_bbox,
                       philox_chunks, segment_moment, uniform_density, weighted_volume)
from .quadrature import gauss_legendre, integrate_segments, triangle_rule

log = logging.getLogger(__name__)

FINITE, UNBOUNDED, CHART_OVERFLOW = "finite", "unbounded", "chart-overflow"
METHODS = ("frontside", "boundary", "monte-carlo")


def _dots(a, b):
    return np.einsum("ij,ij->i", a, b)


def _outside_singular(phi, z):
    return phi.boundary_singular and not bool(phi.domain.contains(np.asarray(z, float)))


# --------------------------------------------------------------------------
# cap volume
# --------------------------------------------------------------------------

def cap_volume(K: Body, phi: WeightDensity | None, z, method="frontside", tol=1e-12,
               mc: QuadratureSpec | None = None):
    """Weighted volume of conv({z} u K) \\ K.

    Returns a float, except for ``method="monte-carlo"`` which returns an
    ``MCResult`` carrying the standard error.
    """
    if method not in METHODS:
        raise InvalidParameter(f"unknown cap-volume method {method!r}")
    phi = phi or uniform_density(K.dim)
    z = np.asarray(z, float)
    if K.contains(z):
        return MCResult(0.0, 0.0) if method == "monte-carlo" else 0.0
    if _outside_singular(phi, z):
        return MCResult(math.inf, 0.0) if method == "monte-carlo" else math.inf
    if method == "monte-carlo":
        return _cap_mc(K, phi, z, mc or QuadratureSpec(method="monte-carlo"))
    front, back = K.split_boundary(z)

    def absint(s):
        h = np.abs(_dots(z[None, :] - s.points, s.normals))
        return h * segment_moment(phi, z, s.points, tol=tol * 1e-2)

    if method == "frontside":
        return max(integrate_pieces(front, absint, tol=tol), 0.0)
    vol = weighted_volume(K, phi, QuadratureSpec(tol=tol))
    total = integrate_pieces(front, absint, tol=tol) + integrate_pieces(back, absint, tol=tol)
    return max(-0.5 * vol + 0.5 * total, 0.0)


def uniform_cap_volume(K: Body, z, tol=1e-13):
    """Unweighted cap volume: -vol(K)/2 + (1/2n) int |(z - x) . n| over the boundary."""
    z = np.asarray(z, float)
    if K.contains(z):
        return 0.0
    n = K.dim
    front, back = K.split_boundary(z)

    def h(s):
        return np.abs(_dots(z[None, :] - s.points, s.normals))

    total = integrate_pieces(front, h, tol=tol) + integrate_pieces(back, h, tol=tol)
    return max(-0.5 * K.volume() + total / (2.0 * n), 0.0)


def hull_membership(K: Body, z, y):
    """Boolean mask: rows of y lying in conv({z} u K) \\ K (z outside K)."""
    z = np.asarray(z, float)
    inK = K.contains(y)
    if isinstance(K, RadialFourier2D):
        # the cap is the triangle (z, T1, T2) minus K
        T = K.tangent_points_2d(z)
        tri = np.array([z, T[0], T[1]])
        return _in_triangle(y, tri) & ~inK
    lo, hi = K.ray_interval(np.broadcast_to(z, y.shape), y - z)
    hit = ~np.isnan(hi) & (hi >= 1.0)
    return hit & ~inK


def _in_triangle(y, tri):
    a, b, c = tri

    def side(p, q):
        return (q[0] - p[0]) * (y[:, 1] - p[1]) - (q[1] - p[1]) * (y[:, 0] - p[0])
    s1, s2, s3 = side(a, b), side(b, c), side(c, a)
    return ((s1 >= 0) & (s2 >= 0) & (s3 >= 0)) | ((s1 <= 0) & (s2 <= 0) & (s3 <= 0))


def _cap_mc(K, phi, z, q: QuadratureSpec):
    lo, hi = body_bbox(K)
    lo = np.minimum(lo, z)
    hi = np.maximum(hi, z)
    box = float(np.prod(hi - lo))
    acc = []
    for u in philox_chunks(q.seed, q.samples, K.dim):
        y = lo + u * (hi - lo)
        m = hull_membership(K, z, y)
        vals = np.zeros(len(y))
        if m.any():
            vals[m] = phi(y[m])
        acc.append(vals)
    v = np.concatenate(acc)
    return MCResult(box * float(v.mean()), box * float(v.std(ddof=1)) / math.sqrt(len(v)))


# --------------------------------------------------------------------------
# limit mass along a ray
# --------------------------------------------------------------------------

def _direction_front(K: Body, u):
    """Boundary pieces with u . n > 0 (the frontside seen from infinity along u)."""
    u = np.asarray(u, float)
    if isinstance(K, Polytope):
        return [pc for pc, nrm, _ in K._facet_pieces() if float(nrm @ u) > 0]
    if isinstance(K, Ellipsoid):
        # a far point along u sees exactly this hemisphere in unit coordinates
        return _ellipsoid_half(K, u)
    if isinstance(K, RadialFourier2D):
        t = np.linspace(0.0, 2.0 * np.pi, 4 * K.grid + 1)
        g = lambda s: _dots(np.tile(u, (np.size(s), 1)), K._arc_eval(np.atleast_1d(s))[1])
        vals = g(t)
        ups, downs = [], []
        for i in range(len(t) - 1):
            if vals[i] * vals[i + 1] < 0:
                r = brentq(lambda s: float(g(s)[0]), t[i], t[i + 1], xtol=1e-15)
                (ups if vals[i + 1] > 0 else downs).append(r)
        a, b = ups[0], downs[0]
        if b < a:
            b += 2.0 * np.pi
        return [Arc(K, a, b)]
    raise UnsupportedBody(type(K).__name__)


def _ellipsoid_half(K, u):
    w = K.Ainv @ u                         # u . A^{-T} y = (A^{-1} u) . y
    if K.dim == 2:
        ph = math.atan2(w[1], w[0])
        return [Arc(K, ph - np.pi / 2, ph + np.pi / 2)]
    return [CapPatch(K, w, 0.0, np.pi / 2)]


def limit_mass(K: Body, phi: WeightDensity, u, tol=1e-12):
    """Weighted volume of (K + R_+ u) \\ K, the supremum of the cap volume along the ray."""
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    dom = phi.domain
    if not dom.bounded:
        return math.inf

    def integrand(s):
        x = s.points
        far = np.array([dom.ray_exit(p, u) for p in x])
        far = np.maximum(far, 0.0)
        if phi.is_uniform:
            inner = far
        else:
            def g(t):
                pts = x[:, None, :] + t[:, :, None] * u[None, None, :]
                return phi(pts)
            inner = integrate_segments(g, np.zeros(len(x)), far, tol=tol)
        return _dots(s.normals, np.tile(u, (len(x), 1))) * inner

    return integrate_pieces(_direction_front(K, u), integrand, tol=tol)


# --------------------------------------------------------------------------
# radii and profiles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialResult:
    rho: float
    flag: str = FINITE
    warning: bool = False


def illumination_radius(K: Body, phi: WeightDensity | None, delta, u, tol=1e-10,
                        rmax_factor=1e6, quad_tol=1e-13):
    """Radius of the delta-sublevel set of the cap volume along the ray through u."""
    if not delta > 0:
        raise InvalidParameter("delta must be positive")
    if not K.origin_interior():
        raise OriginNotInterior("the origin must be an interior point of K")
    phi = phi or uniform_density(K.dim)
    u = np.asarray(u, float)
    u = u / np.linalg.norm(u)
    t0 = float(K.radial(u))
    diam = K.diameter()

    def V(t):
        return cap_volume(K, phi, t * u, "frontside", tol=quad_tol)

    t_cap = t0 + rmax_factor * diam
    overflow_possible = phi.chart_radius is not None and phi.chart_radius < t_cap
    if overflow_possible:
        t_cap = phi.chart_radius
    edge = phi.domain.ray_exit(np.zeros(K.dim), u) if phi.boundary_singular else math.inf

    step = 0.1 * diam
    lo, hi = t0, None
    for k in range(200):
        if math.isfinite(edge):
            t = min(t0 + step * 2.0 ** k, edge - (edge - t0) * 2.0 ** (-(k + 1)))
        else:
            t = min(t0 + step * 2.0 ** k, t_cap)
        v = V(t)
        if v >= delta:
            hi = t
            break
        lo = t
        if not math.isfinite(edge) and t >= t_cap:
            break
        if math.isfinite(edge) and edge - t <= 1e-15 * edge:
            break
    if hi is None and math.isfinite(edge):
        # the cap volume has a finite limit at the ideal boundary; the last probe
        # sits within about 1e-8 of it
        if delta >= v * (1.0 + 1e-6):
            return RadialResult(math.inf, UNBOUNDED)
        log.warning("delta %.6g is within the margin of the limit %.6g at the domain edge; "
                    "reporting the last probe as a lower bound", delta, v)
        return RadialResult(t, FINITE, warning=True)
    if hi is None:
        if overflow_possible:
            return RadialResult(math.inf, CHART_OVERFLOW)
        vlim = limit_mass(K, phi, u) if phi.domain.bounded else V(t_cap)
        if delta >= vlim * (1.0 - 1e-10):
            return RadialResult(math.inf, UNBOUNDED)
        log.warning("delta %.6g is within the R_max margin of the ray mass %.6g; "
                    "reporting R_max as a lower bound", delta, vlim)
        return RadialResult(t_cap, FINITE, warning=True)

    root = brentq(lambda t: V(t) - delta, lo, hi, xtol=1e-15 * max(1.0, hi), rtol=1e-15,
                  maxiter=500)
    resid = abs(V(root) - delta)
    if resid > tol * delta:
        # near the edge of a singular domain V is steep in the chart and one ulp
        # of t moves V by more than tol * delta; accept a root bracketed at ulp scale
        h = 4.0 * math.ulp(root)
        if (V(root - h) - delta) * (V(root + h) - delta) > 0:
            raise NumericalFailure(f"bisection residual {resid:.3g} exceeds {tol * delta:.3g}")
    warn = False
    if phi.domain.bounded and not phi.boundary_singular:
        vlim = limit_mass(K, phi, u)
        warn = vlim - delta <= 1e-6 * delta
    return RadialResult(float(root), FINITE, warn)


@dataclass(frozen=True)
class RadialProfile:
    grid: DirectionGrid
    rho: np.ndarray
    flags: tuple
    delta: float
    rho_body: np.ndarray
    warnings: tuple = ()
    body_ref: dict = field(default_factory=dict, compare=False)
    weight_ref: dict = field(default_factory=dict, compare=False)

    @property
    def all_finite(self):
        return all(f == FINITE for f in self.flags)

    def points(self):
        return self.rho[:, None] * self.grid.units


def illumination_body(K: Body, phi: WeightDensity | None, delta, grid: DirectionGrid, tol=1e-10,
                      quad_tol=1e-13):
    phi = phi or uniform_density(K.dim)
    if not K.origin_interior():
        raise OriginNotInterior("the origin must be an interior point of K")
    res = [illumination_radius(K, phi, delta, u, tol=tol, quad_tol=quad_tol) for u in grid.units]
    return RadialProfile(grid, np.array([r.rho for r in res]), tuple(r.flag for r in res),
                         float(delta), np.asarray(K.radial(grid.units)),
                         tuple(r.warning for r in res), K.to_dict(), phi.to_dict())


# --------------------------------------------------------------------------
# convexity scan
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexityReport:
    convex: bool
    witness: tuple | None        # (i, j, margin)
    max_violation: float


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def star_polygon_radius(P, query):
    """Radial function, in the directions of ``query`` rows, of the star polygon through P."""
    ang = np.arctan2(P[:, 1], P[:, 0])
    order = np.argsort(ang)
    Ps, As = P[order], ang[order]
    qa = np.arctan2(query[:, 1], query[:, 0])
    k = np.searchsorted(As, qa, side="right") - 1      # -1 wraps to the last edge
    a = Ps[k % len(Ps)]
    b = Ps[(k + 1) % len(Ps)]
    qn = query / np.linalg.norm(query, axis=1)[:, None]
    D = b - a
    return _cross(a, D) / _cross(qn, D)


def _star_mesh_radius(P, faces, query):
    qn = query / np.linalg.norm(query, axis=1)[:, None]
    M = np.stack([P[faces[:, 0]], P[faces[:, 1]], P[faces[:, 2]]], axis=2)   # (F, 3, 3) columns
    Minv = np.linalg.inv(M)
    out = np.full(len(qn), np.nan)
    for s in range(0, len(qn), 512):
        lam = np.einsum("fij,qj->qfi", Minv, qn[s:s + 512])
        ok = np.all(lam >= -1e-12, axis=2)
        f = np.argmax(ok, axis=1)
        tot = lam[np.arange(len(f)), f].sum(axis=1)
        out[s:s + 512] = 1.0 / tot
    return out


def convexity_check(profile: RadialProfile, tol=1e-8):
    """Midpoint test over every pair of profile points (chords are straight in the chart)."""
    if not profile.all_finite:
        raise ProfileUnbounded("profile has non-finite entries")
    P = profile.points()
    m = len(P)
    i, j = np.triu_indices(m, k=1)
    if profile.grid.faces is None:
        adj = (j - i == 1) | ((i == 0) & (j == m - 1))
        i, j = i[~adj], j[~adj]
    M = 0.5 * (P[i] + P[j])
    r = np.linalg.norm(M, axis=1)
    live = r > 1e-14
    i, j, M, r = i[live], j[live], M[live], r[live]
    if profile.grid.faces is None:
        rp = star_polygon_radius(P, M)
    else:
        rp = _star_mesh_radius(P, profile.grid.faces, M)
    viol = r - rp
    scale = tol * float(np.max(np.linalg.norm(P, axis=1)))
    bad = np.flatnonzero(viol > scale)
    if len(bad) == 0:
        return ConvexityReport(True, None, float(max(viol.max(initial=0.0), 0.0)))
    k = bad[0]
    return ConvexityReport(False, (int(i[k]), int(j[k]), float(viol[k])), float(viol.max()))


# --------------------------------------------------------------------------
# volume difference by radial shells
# --------------------------------------------------------------------------

def _excess_2d(profile):
    th = profile.grid.angles
    order = np.argsort(th)
    th = th[order]
    e = (profile.rho - profile.rho_body)[order]
    thp = np.concatenate([th, [th[0] + 2.0 * np.pi]])
    ep = np.concatenate([e, [e[0]]])
    return thp, ep


def weighted_volume_difference(K: Body, profile: RadialProfile, psi: WeightDensity | None = None,
                               tol=1e-12):
    """vol^psi(L) - vol^psi(K) for the star body L recorded in ``profile``.

    Integrates, over boundary points x of K, the shell integral of psi along
    the ray through x from |x| to the radius of L, against the cone measure
    x . n / |x|^n dH. The cone measure equals the spherical measure of the
    direction x / |x|, which is how the integral is parametrised here. The
    radius of L is |x| plus the excess interpolated from the profile grid
    (linear in angle in the plane, barycentric on the icosphere in space).
    """
    if not profile.all_finite:
        raise ProfileUnbounded("profile has non-finite entries")
    psi = psi or uniform_density(K.dim)
    n = K.dim

    def shell(rk, rl, u):
        if psi.is_uniform and isinstance(psi.domain, Whole):
            return (rl ** n - rk ** n) / n

        def g(t):
            pts = t[:, :, None] * u[:, None, :]
            return psi(pts)
        return integrate_segments(g, rk, rl, weight_power=n - 1, tol=tol)

    if n == 2:
        thp, ep = _excess_2d(profile)
        breaks = list(thp)
        if isinstance(K, Polytope):
            va = np.arctan2(K.vertices[:, 1], K.vertices[:, 0])
            va = np.where(va < thp[0], va + 2.0 * np.pi, va)
            breaks += list(va[(va > thp[0]) & (va < thp[-1])])
        breaks = np.unique(breaks)
        x, w = gauss_legendre(24)
        a, b = breaks[:-1], breaks[1:]
        t = (a[:, None] + (b - a)[:, None] * x[None, :]).ravel()
        wt = ((b - a)[:, None] * w[None, :]).ravel()
        u = np.column_stack([np.cos(t), np.sin(t)])
        rk = np.asarray(K.radial(u))
        e = np.interp(t, thp, ep)
        vals = shell(rk, rk + e, u)
        return math.fsum((vals * wt).tolist())

    faces = profile.grid.faces
    U = profile.grid.units
    ex = profile.rho - profile.rho_body
    ref, w = triangle_rule(8)
    total = []
    for f in faces:
        A, B, C = U[f]
        nf = np.cross(B - A, C - A)
        area2 = np.linalg.norm(nf)
        nf = nf / area2
        if nf @ (A + B + C) < 0:
            nf = -nf
        p = A + ref[:, :1] * (B - A) + ref[:, 1:] * (C - A)
        pn = np.linalg.norm(p, axis=1)
        u = p / pn[:, None]
        domega = (p @ nf) / pn ** 3 * w * area2
        bary = np.column_stack([1.0 - ref.sum(axis=1), ref[:, 0], ref[:, 1]])
        e = bary @ ex[f]
        rk = np.asarray(K.radial(u))
        total.append(float(np.dot(shell(rk, rk + e, u), domega)))
    return math.fsum(total)


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def profile_csv(profile: RadialProfile):
    buf = io.StringIO()
    n = profile.grid.dim
    cols = [f"u{k}" for k in range(n)] + ["rho", "flag"]
    buf.write(",".join(cols) + "\n")
    for u, r, f in zip(profile.grid.units, profile.rho, profile.flags):
        buf.write(",".join(f"{c:.12g}" for c in u) + f",{r:.12g},{f}\n")
    return buf.getvalue()


def profile_svg(profile: RadialProfile, size=400):
    """Body outline and illumination boundary on a fixed viewport (plane only)."""
    if profile.grid.dim != 2:
        raise InvalidParameter("SVG output is only available in the plane")
    order = np.argsort(profile.grid.angles)
    U = profile.grid.units[order]
    body = profile.rho_body[order][:, None] * U
    fin = np.isfinite(profile.rho[order])
    ill = profile.rho[order][fin][:, None] * U[fin]
    ext = max(float(np.abs(body).max()), float(np.abs(ill).max()) if len(ill) else 0.0) * 1.1
    s = size / (2.0 * ext)

    def path(P):
        pts = [f"{(x + ext) * s:.6f},{(ext - y) * s:.6f}" for x, y in P]
        return "M" + " L".join(pts) + " Z"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<path d="{path(body)}" fill="none" stroke="black"/>']
    if len(ill) > 2:
        out.append(f'<path d="{path(ill)}" fill="none" stroke="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
