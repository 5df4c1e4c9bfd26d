"""Hilbert geometries on bounded convex domains and their Finsler volume densities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.optimize import minimize, minimize_scalar

from .bodies import Body, DirectionGrid, integrate_pieces
from .errors import (BodyTouchesDomain, InvalidParameter, PointOnBoundary,
                     UnsupportedDimension)
from .measures import BodyDomain, WeightDensity

KINDS = ("busemann", "holmes-thompson", "gromov-mass", "gromov-comass")


def _kappa(n):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


@dataclass(eq=False)
class HilbertDomain:
    """Interior of a bounded convex body X with its Hilbert metric."""
    X: Body
    directions: int = 512
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.n = self.X.dim
        self.grid = DirectionGrid.for_dimension(self.n, self.directions)

    def check_interior(self, p):
        p = np.atleast_2d(np.asarray(p, float))
        if np.any(np.asarray(self.X.depth(p)) <= 1e-9 * self.X.diameter()):
            raise PointOnBoundary("point is not interior to the Hilbert domain")

    def exits(self, P, V):
        """(t_plus, t_minus) in units of V along rows."""
        lo, hi = self.X.ray_interval(P, V)
        return hi, -lo


def hilbert_norm(X: HilbertDomain, p, v):
    """Harmonic-mean norm 0.5 (1/t_plus + 1/t_minus); vectorised over rows of v."""
    p = np.asarray(p, float)
    X.check_interior(p)
    v = np.asarray(v, float)
    V = np.atleast_2d(v)
    zero = np.all(V == 0, axis=1)
    Vs = np.where(zero[:, None], 1.0, V)
    tp, tm = X.exits(np.broadcast_to(p, Vs.shape), Vs)
    out = 0.5 * (1.0 / tp + 1.0 / tm)
    out = np.where(zero, 0.0, out)
    return float(out[0]) if v.ndim == 1 else out


def hilbert_distance(X: HilbertDomain, p, q):
    """Half log of the cross ratio of (a, p, q, b), a and b the boundary hits of the line."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    X.check_interior(np.vstack([p, q]))
    d = q - p
    L = float(np.linalg.norm(d))
    if L == 0.0:
        return 0.0
    u = d / L
    lo, hi = X.X.ray_interval(p[None, :], u[None, :])
    ap = -float(lo[0])        # |a - p|
    bp = float(hi[0])         # |b - p|
    aq = ap + L
    bq = bp - L
    return 0.5 * math.log((aq * bp) / (ap * bq))


# --------------------------------------------------------------------------
# volume densities
# --------------------------------------------------------------------------

def _radii(X: HilbertDomain, P):
    """Radial function of the unit balls B_p on the direction grid, shape (N, m)."""
    U = X.grid.units
    N, m = len(P), len(U)
    PP = np.repeat(P, m, axis=0)
    UU = np.tile(U, (N, 1))
    tp, tm = X.exits(PP, UU)
    H = 0.5 * (1.0 / tp + 1.0 / tm)
    return (1.0 / H).reshape(N, m)


def _support_from_points(pts, U):
    return np.max(U @ pts.T, axis=1)


def _gromov_mass_2d(X, p, rho):
    th = np.arctan2(X.grid.units[:, 1], X.grid.units[:, 0])
    # grid search over pairs, then a local refinement with exact radii
    S = np.abs(np.sin(th[None, :] - th[:, None]))
    val = rho[:, None] * rho[None, :] * S
    i, j = np.unravel_index(np.argmax(val), val.shape)

    def f(a):
        u = np.array([[math.cos(a[0]), math.sin(a[0])], [math.cos(a[1]), math.sin(a[1])]])
        r = 1.0 / hilbert_norm(X, p, u)
        return -r[0] * r[1] * abs(math.sin(a[1] - a[0]))

    res = minimize(f, [th[i], th[j]], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000})
    best = max(-res.fun, float(val[i, j]))
    return 1.0 / best


def _gromov_comass_2d(X, p, rho):
    U = X.grid.units
    pts = rho[:, None] * U
    th = np.arctan2(U[:, 1], U[:, 0])

    def h_exact(a):
        # support of B_p in direction a, refined around the best sampled point
        u = np.array([math.cos(a), math.sin(a)])
        k = int(np.argmax(pts @ u))
        step = 2.0 * np.pi / len(U)

        def g(b):
            v = np.array([math.cos(b), math.sin(b)])
            return -float(v @ u) / hilbert_norm(X, p, v)
        r = minimize_scalar(g, bounds=(th[k] - step, th[k] + step), method="bounded",
                            options={"xatol": 1e-12})
        return max(-r.fun, float(pts[k] @ u))

    h = _support_from_points(pts, U)
    S = np.abs(np.sin(th[None, :] - th[:, None]))
    val = S / (h[:, None] * h[None, :])
    i, j = np.unravel_index(np.argmax(val), val.shape)

    def f(a):
        return -abs(math.sin(a[1] - a[0])) / (h_exact(a[0]) * h_exact(a[1]))

    res = minimize(f, [th[i], th[j]], method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 1000})
    return max(-res.fun, float(f([th[i], th[j]]) * -1))


def finsler_density_many(X: HilbertDomain, kind, P):
    if kind not in KINDS:
        raise InvalidParameter(f"unknown Finsler volume {kind!r}")
    P = np.atleast_2d(np.asarray(P, float))
    X.check_interior(P)
    n = X.n
    if kind.startswith("gromov") and n != 2:
        raise UnsupportedDimension("Gromov densities are implemented in the plane only")
    out = np.empty(len(P))
    todo = []
    for k, p in enumerate(P):
        key = (kind, p.tobytes())
        if key in X._cache:
            out[k] = X._cache[key]
        else:
            todo.append(k)
    for s in range(0, len(todo), 256):
        idx = np.array(todo[s:s + 256])
        rho = _radii(X, P[idx])
        w = X.grid.weights
        if kind == "busemann":
            vals = _kappa(n) / ((rho ** n) @ w / n)
        elif kind == "holmes-thompson":
            U = X.grid.units
            vals = np.empty(len(idx))
            for r, row in enumerate(rho):
                h = _support_from_points(row[:, None] * U, U)
                vals[r] = ((h ** -n) @ w / n) / _kappa(n)
        elif kind == "gromov-mass":
            vals = np.array([_gromov_mass_2d(X, P[i], row) for i, row in zip(idx, rho)])
        else:
            vals = np.array([_gromov_comass_2d(X, P[i], row) for i, row in zip(idx, rho)])
        out[idx] = vals
        for i, v in zip(idx, vals):
            X._cache[(kind, P[i].tobytes())] = float(v)
    return out


def finsler_density(X: HilbertDomain, kind, p):
    return float(finsler_density_many(X, kind, np.asarray(p, float)[None, :])[0])


def finsler_weight(X: HilbertDomain, kind="busemann", half_width=None, nodes=121):
    """WeightDensity for a Finsler volume.

    In the plane the density is tabulated on a square grid and evaluated by a
    bicubic spline there; points off the grid use the exact density.
    """
    n = X.n
    dom = BodyDomain(X.X)
    if n == 2:
        if half_width is None:
            E = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]) / math.sqrt(2.0)
            half_width = 0.9 * float(np.min(X.X.support(E))) / math.sqrt(2.0)
        g = np.linspace(-half_width, half_width, nodes)
        GX, GY = np.meshgrid(g, g, indexing="ij")
        vals = finsler_density_many(X, kind, np.column_stack([GX.ravel(), GY.ravel()]))
        spline = RectBivariateSpline(g, g, vals.reshape(nodes, nodes), kx=3, ky=3)

        def f(x):
            x = np.atleast_2d(x)
            inside = np.all(np.abs(x) <= half_width, axis=1)
            out = np.empty(len(x))
            if inside.any():
                out[inside] = spline.ev(x[inside, 0], x[inside, 1])
            if (~inside).any():
                out[~inside] = finsler_density_many(X, kind, x[~inside])
            return out
    else:
        def f(x):
            return finsler_density_many(X, kind, np.atleast_2d(x))

    return WeightDensity(dom, f, f"finsler({kind})", n, boundary_singular=True,
                         params={"kind": "finsler", "volume": kind, "domain": X.X.to_dict()})


def finsler_surface_area(K: Body, X: HilbertDomain, kind="busemann", tol=1e-10):
    """Integral of H^(1/(n+1)) phi_F^((n-1)/(n+1)) over the boundary of K."""
    n = K.dim
    pts = K.sample_boundary(512).points
    if np.any(np.asarray(X.X.depth(pts)) <= 1e-9 * X.X.diameter()):
        raise BodyTouchesDomain("the body must lie in the interior of the domain")

    def f(s):
        H = np.nan_to_num(s.curvature, nan=0.0)
        out = np.zeros(len(H))
        live = H > 0
        if live.any():
            phi = finsler_density_many(X, kind, s.points[live])
            out[live] = H[live] ** (1.0 / (n + 1)) * phi ** ((n - 1) / (n + 1))
        return out

    return integrate_pieces(K.pieces(), f, tol=tol, max_order=128)
