"""Convex bodies in R^2 and R^3.

Every body exposes containment, support and radial functions, ray clipping,
curvature, and a decomposition of its boundary into smooth *pieces*. A piece
knows how to produce a Gauss-Legendre style rule ``(points, normals, weights,
curvature)`` of a requested order, which is what all boundary integrals in the
library consume. ``split_boundary`` cuts the boundary at the tangency set seen
from an exterior point, so integrands never carry a kink inside a piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial import ConvexHull

from .errors import (InvalidBody, NotOnBoundary, OriginNotInterior,
                     UnsupportedDimension)
from .quadrature import gauss_legendre, triangle_rule

GEOM_RTOL = 1e-9


# --------------------------------------------------------------------------
# boundary samples
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPoint:
    x: np.ndarray
    n: np.ndarray
    H: float          # nan marks an undefined (ridge) curvature
    w: float


@dataclass(frozen=True)
class BoundarySample:
    """Quadrature nodes on a boundary. ``curvature`` is nan where undefined."""
    points: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return BoundaryPoint(self.points[i], self.normals[i],
                             float(self.curvature[i]), float(self.weights[i]))

    @staticmethod
    def concat(parts):
        parts = list(parts)
        if not parts:
            return BoundarySample(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros(0), np.zeros(0))
        return BoundarySample(np.concatenate([p.points for p in parts]),
                              np.concatenate([p.normals for p in parts]),
                              np.concatenate([p.curvature for p in parts]),
                              np.concatenate([p.weights for p in parts]))


# --------------------------------------------------------------------------
# boundary pieces
# --------------------------------------------------------------------------

class Arc:
    """Smooth planar arc ``t -> x(t)`` for t in [a, b]."""

    def __init__(self, body, a, b):
        self.body = body
        self.a = float(a)
        self.b = float(b)

    def rule(self, order, panels=1):
        x, w = gauss_legendre(order)
        edges = np.linspace(self.a, self.b, panels + 1)
        h = np.diff(edges)
        t = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
        wt = (h[:, None] * w[None, :]).ravel()
        pts, nrm, speed, curv = self.body._arc_eval(t)
        return BoundarySample(pts, nrm, curv, wt * speed)


class Segment:
    """Straight polygon edge from p to q with constant outward normal."""

    def __init__(self, p, q, normal):
        self.p = np.asarray(p, float)
        self.q = np.asarray(q, float)
        self.normal = np.asarray(normal, float)

    def rule(self, order, panels=1):
        x, w = gauss_legendre(order)
        edges = np.linspace(0.0, 1.0, panels + 1)
        h = np.diff(edges)
        s = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
        ws = (h[:, None] * w[None, :]).ravel()
        pts = self.p[None, :] + s[:, None] * (self.q - self.p)[None, :]
        L = float(np.linalg.norm(self.q - self.p))
        m = len(s)
        return BoundarySample(pts, np.tile(self.normal, (m, 1)), np.zeros(m), ws * L)


class Triangle:
    """Flat triangle of a 3D polytope boundary."""

    def __init__(self, a, b, c, normal):
        self.v = np.array([a, b, c], float)
        self.normal = np.asarray(normal, float)

    def rule(self, order, panels=1):
        ref, w = triangle_rule(order)
        a, b, c = self.v
        pts = a[None, :] + ref[:, :1] * (b - a)[None, :] + ref[:, 1:] * (c - a)[None, :]
        area2 = float(np.linalg.norm(np.cross(b - a, c - a)))
        m = len(w)
        return BoundarySample(pts, np.tile(self.normal, (m, 1)), np.zeros(m), w * area2)


class CapPatch:
    """Zone ``g0 <= angle(y, axis) <= g1`` of the unit sphere, mapped onto an ellipsoid.

    Gauss-Legendre in the polar angle, trapezoid (spectral for periodic data) in azimuth.
    """

    def __init__(self, body, axis, g0, g1):
        self.body = body
        self.g0 = float(g0)
        self.g1 = float(g1)
        self.frame = _frame(axis)

    def rule(self, order, panels=1):
        x, w = gauss_legendre(order)
        edges = np.linspace(self.g0, self.g1, panels + 1)
        h = np.diff(edges)
        g = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
        wg = (h[:, None] * w[None, :]).ravel()
        m = 2 * len(g)
        psi = 2.0 * np.pi * np.arange(m) / m
        e1, e2, e3 = self.frame
        sg, cg = np.sin(g), np.cos(g)
        y = (cg[:, None, None] * e3[None, None, :]
             + sg[:, None, None] * (np.cos(psi)[None, :, None] * e1[None, None, :]
                                    + np.sin(psi)[None, :, None] * e2[None, None, :]))
        y = y.reshape(-1, 3)
        wy = (wg * sg)[:, None] * np.full((1, m), 2.0 * np.pi / m)
        pts, nrm, jac, curv = self.body._sphere_map(y)
        return BoundarySample(pts, nrm, curv, wy.ravel() * jac)


def _frame(axis):
    e3 = np.asarray(axis, float)
    e3 = e3 / np.linalg.norm(e3)
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - (helper @ e3) * e3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def integrate_pieces(pieces, integrand, tol=1e-12, start_order=16, max_order=512):
    """Integrate ``integrand(sample) -> values`` over a union of pieces.

    Orders double until two successive totals agree to ``tol`` relative to the
    total (absolute floor 1e-300). Returns the last estimate.
    """
    pieces = list(pieces)
    if not pieces:
        return 0.0

    def total(order):
        acc = []
        for pc in pieces:
            s = pc.rule(order)
            acc.append(np.dot(integrand(s), s.weights))
        return math.fsum(acc)

    order = start_order
    prev = total(order)
    while order < max_order:
        order *= 2
        cur = total(order)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


# --------------------------------------------------------------------------
# bodies
# --------------------------------------------------------------------------

class Body:
    kind = "body"
    dim = 2

    # subclasses implement: contains, support, ray_interval, pieces,
    # split_boundary, gauss_kronecker, volume, diameter, centroid, translate, to_dict

    def radial(self, u):
        """Radial function from the origin, vectorised over rows of ``u``."""
        if not self.origin_interior():
            raise OriginNotInterior(f"{self.kind}: origin is not an interior point")
        u = np.asarray(u, float)
        single = u.ndim == 1
        U = np.atleast_2d(u)
        _, hi = self.ray_interval(np.zeros((len(U), self.dim)), U)
        return float(hi[0]) if single else hi

    def origin_interior(self):
        return self.depth(np.zeros(self.dim)) > GEOM_RTOL * self.diameter()

    def interior_point(self):
        return self.centroid()

    def sample_boundary(self, resolution=512):
        if self.dim > 3:
            raise UnsupportedDimension("only n in {2, 3} is supported")
        return self._sample(int(resolution))

    def boundary_tol(self):
        return GEOM_RTOL * self.diameter()

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


def _check_dim(n):
    if n not in (2, 3):
        raise UnsupportedDimension(f"dimension {n} not in {{2, 3}}")


class Ellipsoid(Body):
    """Image of the unit ball under ``y -> center + rotation @ diag(semi_axes) @ y``."""

    kind = "ellipsoid"

    def __init__(self, center, semi_axes, rotation=None):
        c = np.asarray(center, float)
        a = np.asarray(semi_axes, float)
        if c.ndim != 1 or a.shape != c.shape:
            raise InvalidBody("center and semi_axes must be vectors of equal length")
        _check_dim(len(c))
        if np.any(~np.isfinite(a)) or np.any(a <= 0):
            raise InvalidBody("semi-axes must be positive")
        Q = np.eye(len(c)) if rotation is None else np.asarray(rotation, float)
        if Q.shape != (len(c), len(c)) or not np.allclose(Q.T @ Q, np.eye(len(c)), atol=1e-10):
            raise InvalidBody("rotation must be an orthogonal matrix")
        self.center, self.semi_axes, self.rotation = c, a, Q
        self.dim = len(c)
        self.A = Q * a[None, :]
        self.Ainv = (Q / a[None, :]).T

    # -- basic queries
    def _to_unit(self, x):
        return (np.asarray(x, float) - self.center) @ self.Ainv.T

    def contains(self, x):
        y = self._to_unit(x)
        r = np.linalg.norm(np.atleast_2d(y), axis=-1)
        out = r <= 1.0 + 1e-14
        return bool(out[0]) if np.ndim(x) == 1 else out

    def depth(self, x):
        """Positive inside; lower bound on the distance to the boundary."""
        y = self._to_unit(x)
        return (1.0 - np.linalg.norm(y, axis=-1)) * self.semi_axes.min()

    def support(self, u):
        u = np.asarray(u, float)
        return u @ self.center + np.linalg.norm(u @ self.A, axis=-1)

    def ray_interval(self, p, d):
        """Parameters ``[lo, hi]`` with ``p + t d`` in the body; nan where the ray misses."""
        p = np.atleast_2d(np.asarray(p, float))
        d = np.atleast_2d(np.asarray(d, float))
        y0 = (p - self.center) @ self.Ainv.T
        yd = d @ self.Ainv.T
        A = np.einsum("ij,ij->i", yd, yd)
        B = np.einsum("ij,ij->i", y0, yd)
        C = np.einsum("ij,ij->i", y0, y0) - 1.0
        disc = B * B - A * C
        with np.errstate(invalid="ignore"):
            sq = np.sqrt(disc)
            # stable quadratic roots
            q = -(B + np.copysign(sq, B))
            r1 = q / A
            r2 = np.where(q != 0, C / np.where(q == 0, 1.0, q), -r1)
        lo = np.minimum(r1, r2)
        hi = np.maximum(r1, r2)
        miss = ~(disc >= 0)
        lo[miss] = np.nan
        hi[miss] = np.nan
        return lo, hi

    def volume(self):
        n = self.dim
        kappa = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
        return kappa * float(np.prod(self.semi_axes))

    def diameter(self):
        return 2.0 * float(self.semi_axes.max())

    def centroid(self):
        return self.center.copy()

    def translate(self, v):
        return Ellipsoid(self.center + np.asarray(v, float), self.semi_axes, self.rotation)

    def to_dict(self):
        return {"kind": "ellipsoid", "center": self.center.tolist(),
                "semi_axes": self.semi_axes.tolist(), "rotation": self.rotation.tolist()}

    # -- curvature and parametrisation
    def _curvature_unit(self, y):
        n = self.dim
        a = self.semi_axes
        s = np.sum((y / a) ** 2, axis=-1)
        return 1.0 / (np.prod(a) ** 2 * s ** ((n + 1) / 2))

    def _sphere_map(self, y):
        pts = self.center + y @ self.A.T
        g = y @ self.Ainv          # A^{-T} y as rows
        gn = np.linalg.norm(g, axis=-1)
        nrm = g / gn[:, None]
        jac = abs(np.prod(self.semi_axes)) * gn
        return pts, nrm, jac, self._curvature_unit(y)

    def _arc_eval(self, t):
        y = np.column_stack([np.cos(t), np.sin(t)])
        dy = np.column_stack([-np.sin(t), np.cos(t)])
        pts = self.center + y @ self.A.T
        speed = np.linalg.norm(dy @ self.A.T, axis=-1)
        g = y @ self.Ainv
        nrm = g / np.linalg.norm(g, axis=-1)[:, None]
        return pts, nrm, speed, self._curvature_unit(y)

    def pieces(self):
        if self.dim == 2:
            return [Arc(self, 0.0, 2.0 * np.pi)]
        return [CapPatch(self, [0.0, 0.0, 1.0], 0.0, np.pi)]

    def _sample(self, resolution):
        if self.dim == 2:
            order = 16
            return Arc(self, 0.0, 2.0 * np.pi).rule(order, max(1, resolution // order))
        order = 16
        ng = max(order, int(math.ceil(math.sqrt(resolution / 2.0))))
        return CapPatch(self, [0.0, 0.0, 1.0], 0.0, np.pi).rule(order, max(1, ng // order))

    def split_boundary(self, z):
        """(frontside pieces, backside pieces) as seen from an exterior point z."""
        zp = self._to_unit(z)
        r = float(np.linalg.norm(zp))
        if r <= 1.0:
            return [], self.pieces()
        beta = math.acos(1.0 / r)
        if self.dim == 2:
            phi = math.atan2(zp[1], zp[0])
            return ([Arc(self, phi - beta, phi + beta)],
                    [Arc(self, phi + beta, phi - beta + 2.0 * np.pi)])
        return ([CapPatch(self, zp, 0.0, beta)], [CapPatch(self, zp, beta, np.pi)])

    def tangent_points_2d(self, z):
        zp = self._to_unit(z)
        r = float(np.linalg.norm(zp))
        beta = math.acos(1.0 / r)
        phi = math.atan2(zp[1], zp[0])
        t = np.array([phi - beta, phi + beta])
        return self.center + np.column_stack([np.cos(t), np.sin(t)]) @ self.A.T

    def gauss_kronecker(self, x):
        y = self._to_unit(x)
        if abs(np.linalg.norm(y) - 1.0) * self.semi_axes.min() > self.boundary_tol():
            raise NotOnBoundary("point is not on the boundary")
        y = y / np.linalg.norm(y)
        return float(self._curvature_unit(y[None, :])[0])

    def normal(self, x):
        y = self._to_unit(x)
        g = self.Ainv.T @ y
        return g / np.linalg.norm(g)


class Ball(Ellipsoid):
    kind = "ball"

    def __init__(self, center, radius):
        c = np.asarray(center, float)
        if not (radius > 0 and math.isfinite(radius)):
            raise InvalidBody("radius must be positive")
        super().__init__(c, np.full(len(c), float(radius)))
        self.radius = float(radius)

    def translate(self, v):
        return Ball(self.center + np.asarray(v, float), self.radius)

    def to_dict(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


class Polytope(Body):
    """Convex hull of a finite vertex list (must be full dimensional)."""

    kind = "polytope"

    def __init__(self, vertices):
        V = np.asarray(vertices, float)
        if V.ndim != 2:
            raise InvalidBody("vertices must be a 2D array")
        _check_dim(V.shape[1])
        self.dim = V.shape[1]
        if len(V) < self.dim + 1:
            raise InvalidBody("not enough vertices for a full-dimensional polytope")
        diam = float(np.max(np.linalg.norm(V[:, None] - V[None, :], axis=-1)))
        if diam <= 0:
            raise InvalidBody("degenerate vertex set")
        dist = np.linalg.norm(V[:, None] - V[None, :], axis=-1)
        np.fill_diagonal(dist, np.inf)
        if np.min(dist) <= 1e-12 * diam:
            raise InvalidBody("duplicate vertices")
        try:
            hull = ConvexHull(V)
        except Exception as exc:  # qhull raises on flat input
            raise InvalidBody(f"vertices are not full dimensional: {exc}") from None
        self.input_vertices = V
        self.hull = hull
        self.vertices = V[hull.vertices]       # ccw in 2D
        eq = hull.equations
        self.normals = eq[:, :-1]
        self.offsets = -eq[:, -1]              # n . x <= offset
        self._diam = diam
        # distinct facet normals, used to decide ridge membership
        _, idx = np.unique(np.round(eq, 10), axis=0, return_index=True)
        self._facets = eq[np.sort(idx)]

    def contains(self, x):
        x = np.asarray(x, float)
        vals = np.atleast_2d(x) @ self.normals.T - self.offsets
        out = np.all(vals <= GEOM_RTOL * self._diam, axis=-1)
        return bool(out[0]) if x.ndim == 1 else out

    def depth(self, x):
        x = np.asarray(x, float)
        vals = self.offsets - np.atleast_2d(x) @ self.normals.T
        out = vals.min(axis=-1)
        return float(out[0]) if x.ndim == 1 else out

    def support(self, u):
        return np.max(np.asarray(u, float) @ self.vertices.T, axis=-1)

    def ray_interval(self, p, d):
        p = np.atleast_2d(np.asarray(p, float))
        d = np.atleast_2d(np.asarray(d, float))
        num = self.offsets[None, :] - p @ self.normals.T
        den = d @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = num / den
        hi = np.where(den > 0, t, np.inf).min(axis=1)
        lo = np.where(den < 0, t, -np.inf).max(axis=1)
        parallel_out = np.any((den == 0) & (num < 0), axis=1)
        miss = (lo > hi) | parallel_out
        lo[miss] = np.nan
        hi[miss] = np.nan
        return lo, hi

    def volume(self):
        return float(self.hull.volume)

    def diameter(self):
        return self._diam

    def centroid(self):
        if self.dim == 2:
            P = self.vertices
            Q = np.roll(P, -1, axis=0)
            cr = P[:, 0] * Q[:, 1] - Q[:, 0] * P[:, 1]
            A = cr.sum() / 2.0
            return ((P + Q) * cr[:, None]).sum(axis=0) / (6.0 * A)
        c0 = self.vertices.mean(axis=0)
        tot, acc = 0.0, np.zeros(3)
        for s in self.hull.simplices:
            a, b, c = self.hull.points[s]
            v = abs(np.dot(a - c0, np.cross(b - c0, c - c0))) / 6.0
            tot += v
            acc += v * (a + b + c + c0) / 4.0
        return acc / tot

    def translate(self, v):
        return Polytope(self.vertices + np.asarray(v, float))

    def to_dict(self):
        return {"kind": "polytope", "vertices": self.vertices.tolist()}

    def _facet_pieces(self, mask=None):
        out = []
        if self.dim == 2:
            P = self.vertices
            m = len(P)
            for i in range(m):
                p, q = P[i], P[(i + 1) % m]
                e = q - p
                nrm = np.array([e[1], -e[0]]) / np.linalg.norm(e)
                h = float(nrm @ p)
                out.append((Segment(p, q, nrm), nrm, h))
        else:
            for k, s in enumerate(self.hull.simplices):
                nrm = self.normals[k]
                out.append((Triangle(*self.hull.points[s], nrm), nrm, self.offsets[k]))
        return out

    def pieces(self):
        return [pc for pc, _, _ in self._facet_pieces()]

    def _sample(self, resolution):
        pcs = self.pieces()
        if self.dim == 2:
            order = 8
            per = max(1, resolution // (order * len(pcs)))
            return BoundarySample.concat(pc.rule(order, per) for pc in pcs)
        order = max(2, int(math.sqrt(max(resolution, 1) / len(pcs))))
        return BoundarySample.concat(pc.rule(order) for pc in pcs)

    def split_boundary(self, z):
        z = np.asarray(z, float)
        front, back = [], []
        for pc, nrm, h in self._facet_pieces():
            (front if float(nrm @ z) - h > 0 else back).append(pc)
        return front, back

    def tangent_points_2d(self, z):
        front = [pc for pc in self.split_boundary(z)[0]]
        # the frontside is a connected chain of edges; its two ends are the tangent points
        starts = {tuple(pc.p) for pc in front}
        ends = {tuple(pc.q) for pc in front}
        a = [p for p in starts if p not in ends][0]
        b = [q for q in ends if q not in starts][0]
        return np.array([a, b])

    def gauss_kronecker(self, x):
        x = np.asarray(x, float)
        vals = self._facets[:, :-1] @ x + self._facets[:, -1]
        tol = self.boundary_tol()
        if np.any(vals > tol) or np.all(vals < -tol):
            raise NotOnBoundary("point is not on the boundary")
        active = np.sum(np.abs(vals) <= tol)
        return 0.0 if active == 1 else float("nan")


class RadialFourier2D(Body):
    """Star body ``rho(t) = a0 + sum_k a_k cos(kt) + b_k sin(kt)`` in the plane.

    ``cos`` holds a_0..a_M, ``sin`` holds b_1..b_M. Convexity is checked on a
    grid four times finer than ``grid``.
    """

    kind = "radial_fourier_2d"
    dim = 2

    def __init__(self, cos, sin=(), grid=256):
        a = np.asarray(cos, float).ravel()
        b = np.asarray(sin, float).ravel()
        if len(a) == 0:
            raise InvalidBody("need at least the constant coefficient")
        M = max(len(a) - 1, len(b))
        self.a = np.zeros(M + 1)
        self.a[:len(a)] = a
        self.b = np.zeros(M + 1)
        self.b[1:len(b) + 1] = b
        self.k = np.arange(M + 1)
        self.grid = int(grid)
        t = np.linspace(0.0, 2.0 * np.pi, 4 * self.grid, endpoint=False)
        r, r1, r2 = self._series(t)
        if np.any(r <= 0):
            raise InvalidBody("radial function must be positive")
        num = r * r + 2 * r1 * r1 - r * r2
        if np.any(num < -1e-9 * np.max(r) ** 2):
            raise InvalidBody("curve is not convex at grid resolution")
        self._rmax = float(r.max())
        self._rmin = float(r.min())

    def _series(self, t):
        t = np.asarray(t, float)
        kt = np.multiply.outer(t, self.k)
        c, s = np.cos(kt), np.sin(kt)
        r = c @ self.a + s @ self.b
        r1 = s @ (-self.k * self.a) + c @ (self.k * self.b)
        r2 = -(c @ (self.k ** 2 * self.a) + s @ (self.k ** 2 * self.b))
        return r, r1, r2

    def rho(self, t):
        return self._series(t)[0]

    def _arc_eval(self, t):
        r, r1, r2 = self._series(t)
        u = np.column_stack([np.cos(t), np.sin(t)])
        up = np.column_stack([-np.sin(t), np.cos(t)])
        pts = r[:, None] * u
        tan = r1[:, None] * u + r[:, None] * up
        speed = np.sqrt(r * r + r1 * r1)
        nrm = np.column_stack([tan[:, 1], -tan[:, 0]]) / speed[:, None]
        curv = (r * r + 2 * r1 * r1 - r * r2) / speed ** 3
        return pts, nrm, speed, curv

    def contains(self, x):
        x = np.asarray(x, float)
        X = np.atleast_2d(x)
        t = np.arctan2(X[:, 1], X[:, 0])
        out = np.linalg.norm(X, axis=1) <= self.rho(t) * (1 + 1e-14)
        return bool(out[0]) if x.ndim == 1 else out

    def depth(self, x):
        X = np.atleast_2d(np.asarray(x, float))
        t = np.arctan2(X[:, 1], X[:, 0])
        # radial gap scaled to a conservative distance bound
        gap = (self.rho(t) - np.linalg.norm(X, axis=1)) * (self._rmin / self._rmax)
        return float(gap[0]) if np.ndim(x) == 1 else gap

    def origin_interior(self):
        return True

    def radial(self, u):
        u = np.asarray(u, float)
        U = np.atleast_2d(u)
        r = self.rho(np.arctan2(U[:, 1], U[:, 0]))
        return float(r[0]) if u.ndim == 1 else r

    def support(self, u):
        u = np.asarray(u, float)
        U = np.atleast_2d(u)
        t = np.linspace(0.0, 2.0 * np.pi, 4 * self.grid, endpoint=False)
        pts = self.rho(t)[:, None] * np.column_stack([np.cos(t), np.sin(t)])
        out = []
        for v in U:
            k = int(np.argmax(pts @ v))
            h = 2.0 * np.pi / len(t)

            def f(s):
                return -float(self.rho(s) * (math.cos(s) * v[0] + math.sin(s) * v[1]))
            res = minimize_scalar(f, bounds=(t[k] - h, t[k] + h), method="bounded",
                                  options={"xatol": 1e-13})
            out.append(max(-res.fun, float(pts[k] @ v)))
        out = np.array(out)
        return float(out[0]) if u.ndim == 1 else out

    def ray_interval(self, p, d):
        raise NotImplementedError("ray clipping is only available from the origin")

    def volume(self):
        # trapezoid is exact for trigonometric polynomials of degree < m/2
        m = 4 * len(self.k) + 8
        t = 2.0 * np.pi * np.arange(m) / m
        return float(0.5 * np.mean(self.rho(t) ** 2) * 2.0 * np.pi)

    def diameter(self):
        t = np.linspace(0.0, 2.0 * np.pi, 4 * self.grid, endpoint=False)
        pts = self.rho(t)[:, None] * np.column_stack([np.cos(t), np.sin(t)])
        hull = pts[ConvexHull(pts).vertices]
        return float(np.max(np.linalg.norm(hull[:, None] - hull[None, :], axis=-1)))

    def centroid(self):
        m = 6 * len(self.k) + 8
        t = 2.0 * np.pi * np.arange(m) / m
        r = self.rho(t)
        A = np.mean(r ** 2) * np.pi
        cx = np.mean(r ** 3 * np.cos(t)) * 2.0 * np.pi / 3.0
        cy = np.mean(r ** 3 * np.sin(t)) * 2.0 * np.pi / 3.0
        return np.array([cx, cy]) / A

    def translate(self, v):
        raise NotImplementedError("a translated radial Fourier body is not a radial Fourier body")

    def to_dict(self):
        return {"kind": "radial_fourier_2d", "cos": self.a.tolist(), "sin": self.b[1:].tolist()}

    def pieces(self):
        return [Arc(self, 0.0, 2.0 * np.pi)]

    def _sample(self, resolution):
        order = 16
        return Arc(self, 0.0, 2.0 * np.pi).rule(order, max(1, resolution // order))

    def _tangency(self, z):
        z = np.asarray(z, float)
        m = 4 * self.grid
        t = np.linspace(0.0, 2.0 * np.pi, m + 1)

        def g(s):
            pts, nrm, _, _ = self._arc_eval(np.atleast_1d(s))
            return np.einsum("ij,ij->i", z[None, :] - pts, nrm)

        vals = g(t)
        roots = []
        for i in range(m):
            if vals[i] == 0.0:
                roots.append((t[i], vals[i + 1] > 0))
            elif vals[i] * vals[i + 1] < 0:
                r = brentq(lambda s: float(g(s)[0]), t[i], t[i + 1], xtol=1e-15, rtol=1e-15)
                roots.append((r, vals[i + 1] > 0))
        up = [r for r, rising in roots if rising]
        down = [r for r, rising in roots if not rising]
        if len(up) != 1 or len(down) != 1:
            raise InvalidBody("tangency set from this point is not two points")
        a, b = up[0], down[0]
        if b < a:
            b += 2.0 * np.pi
        return a, b

    def split_boundary(self, z):
        if self.contains(z):
            return [], self.pieces()
        a, b = self._tangency(z)
        return [Arc(self, a, b)], [Arc(self, b, a + 2.0 * np.pi)]

    def tangent_points_2d(self, z):
        a, b = self._tangency(z)
        return self._arc_eval(np.array([a, b]))[0]

    def gauss_kronecker(self, x):
        x = np.asarray(x, float)
        t = math.atan2(x[1], x[0])
        if abs(np.linalg.norm(x) - float(self.rho(t))) > self.boundary_tol():
            raise NotOnBoundary("point is not on the boundary")
        return float(self._arc_eval(np.array([t]))[3][0])


# --------------------------------------------------------------------------
# direction grids
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionGrid:
    """Unit vectors with quadrature weights on S^{n-1}.

    ``faces`` is the icosphere triangulation for n = 3 and None for n = 2.
    """
    units: np.ndarray
    weights: np.ndarray
    scheme: str
    faces: np.ndarray | None = None

    @property
    def m(self):
        return len(self.units)

    @property
    def dim(self):
        return self.units.shape[1]

    @property
    def angles(self):
        return np.arctan2(self.units[:, 1], self.units[:, 0])

    def mesh_width(self):
        if self.faces is None:
            return 2.0 * np.pi / self.m
        U = self.units
        e = np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]], self.faces[:, [2, 0]]])
        c = np.clip(np.einsum("ij,ij->i", U[e[:, 0]], U[e[:, 1]]), -1, 1)
        return float(np.arccos(c).max())

    @staticmethod
    def uniform(m, offset=0.0):
        t = offset + 2.0 * np.pi * np.arange(m) / m
        return DirectionGrid(np.column_stack([np.cos(t), np.sin(t)]),
                             np.full(m, 2.0 * np.pi / m), "uniform-angle")

    @staticmethod
    def icosphere(level):
        V, F = _icosahedron()
        for _ in range(level):
            V, F = _subdivide(V, F)
        areas = spherical_triangle_areas(V[F[:, 0]], V[F[:, 1]], V[F[:, 2]])
        w = np.zeros(len(V))
        for j in range(3):
            np.add.at(w, F[:, j], areas / 3.0)
        return DirectionGrid(V, w, "subdivided-icosahedron", F)

    @staticmethod
    def for_dimension(n, resolution):
        """Grid for dimension n: ``resolution`` directions in 2D, icosphere level in 3D."""
        if n == 2:
            return DirectionGrid.uniform(int(resolution))
        if n == 3:
            level = 0
            while 10 * 4 ** level + 2 < resolution and level < 7:
                level += 1
            return DirectionGrid.icosphere(level)
        raise UnsupportedDimension(f"dimension {n} not in {{2, 3}}")


def spherical_triangle_areas(A, B, C):
    """Spherical excess of triangles with unit-vector vertices (rows)."""
    det = np.einsum("ij,ij->i", A, np.cross(B, C))
    den = 1.0 + np.einsum("ij,ij->i", A, B) + np.einsum("ij,ij->i", B, C) + np.einsum("ij,ij->i", C, A)
    return 2.0 * np.arctan2(np.abs(det), den)


def _icosahedron():
    p = (1.0 + math.sqrt(5.0)) / 2.0
    V = np.array([[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
                  [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
                  [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]], float)
    V /= np.linalg.norm(V, axis=1)[:, None]
    F = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                  [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                  [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                  [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])
    return V, F


def _subdivide(V, F):
    verts = [v for v in V]
    cache = {}

    def mid(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = V[i] + V[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in F:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
    return np.array(verts), np.array(out)


# --------------------------------------------------------------------------
# serialisation
# --------------------------------------------------------------------------

def body_from_dict(d):
    try:
        kind = d["kind"]
        if kind == "ball":
            return Ball(d["center"], float(d["radius"]))
        if kind == "ellipsoid":
            return Ellipsoid(d["center"], d["semi_axes"], d.get("rotation"))
        if kind == "polytope":
            return Polytope(d["vertices"])
        if kind == "radial_fourier_2d":
            return RadialFourier2D(d["cos"], d.get("sin", ()), int(d.get("grid", 256)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidBody):
            raise
        raise InvalidBody(f"malformed body description: {exc}") from None
    raise InvalidBody(f"unknown body kind {d.get('kind')!r}")


def square(half=1.0):
    h = float(half)
    return Polytope([[-h, -h], [h, -h], [h, h], [-h, h]])
