"""Weight densities on open domains and weighted volumes.

A density is zero outside its domain. Segment integrals clip the segment to
the (convex) domain first, so quadrature never straddles the jump.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .bodies import Body, integrate_pieces
from .errors import InvalidParameter
from .quadrature import integrate_segments

DEFAULT_CHART_RADIUS = 1e3


# --------------------------------------------------------------------------
# domains
# --------------------------------------------------------------------------

class Whole:
    bounded = False

    def __init__(self, n):
        self.n = n

    def contains(self, x):
        x = np.asarray(x, float)
        return np.ones(x.shape[:-1], bool) if x.ndim > 1 else True

    def segment_clip(self, Z, X):
        m = np.broadcast_shapes(np.shape(Z), np.shape(X))[0]
        return np.zeros(m), np.ones(m)

    def ray_exit(self, p, u):
        return math.inf

    def bounding_box(self):
        return None

    def to_dict(self):
        return {"kind": "whole"}


class BallDomain:
    """Open ball ``|x - center| < radius``."""
    bounded = True

    def __init__(self, radius, center=None, n=2):
        self.radius = float(radius)
        self.center = np.zeros(n) if center is None else np.asarray(center, float)
        self.n = len(self.center)

    def contains(self, x):
        x = np.asarray(x, float)
        r = np.linalg.norm(x - self.center, axis=-1)
        return r < self.radius

    def _line(self, P, D):
        P = np.atleast_2d(P) - self.center
        D = np.atleast_2d(D)
        A = np.einsum("ij,ij->i", D, D)
        B = np.einsum("ij,ij->i", P, D)
        C = np.einsum("ij,ij->i", P, P) - self.radius ** 2
        disc = B * B - A * C
        sq = np.sqrt(np.clip(disc, 0, None))
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = (-B - sq) / A
            hi = (-B + sq) / A
        lo = np.where(disc > 0, lo, np.inf)
        hi = np.where(disc > 0, hi, -np.inf)
        return lo, hi

    def segment_clip(self, Z, X):
        Z = np.atleast_2d(np.asarray(Z, float))
        X = np.atleast_2d(np.asarray(X, float))
        Z, X = np.broadcast_arrays(Z, X)
        lo, hi = self._line(Z, X - Z)
        return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

    def ray_exit(self, p, u):
        lo, hi = self._line(p, u)
        return float(hi[0])

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def to_dict(self):
        return {"kind": "ball", "radius": self.radius, "center": self.center.tolist()}


class BoxDomain:
    """Open axis-parallel box ``lo < x < hi``."""
    bounded = True

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, float)
        self.hi = np.asarray(hi, float)
        self.n = len(self.lo)
        if np.any(self.hi <= self.lo):
            raise InvalidParameter("empty box")

    def contains(self, x):
        x = np.asarray(x, float)
        return np.all((x > self.lo) & (x < self.hi), axis=-1)

    def _line(self, P, D):
        P = np.atleast_2d(P)
        D = np.atleast_2d(D)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = (self.lo - P) / D
            t2 = (self.hi - P) / D
        tmin = np.where(D != 0, np.minimum(t1, t2), -np.inf)
        tmax = np.where(D != 0, np.maximum(t1, t2), np.inf)
        inside = (P > self.lo) & (P < self.hi)
        tmin = np.where((D == 0) & ~inside, np.inf, tmin)
        tmax = np.where((D == 0) & ~inside, -np.inf, tmax)
        return tmin.max(axis=1), tmax.min(axis=1)

    def segment_clip(self, Z, X):
        Z = np.atleast_2d(np.asarray(Z, float))
        X = np.atleast_2d(np.asarray(X, float))
        Z, X = np.broadcast_arrays(Z, X)
        lo, hi = self._line(Z, X - Z)
        return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

    def ray_exit(self, p, u):
        return float(self._line(p, u)[1][0])

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def to_dict(self):
        return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class BodyDomain:
    """Interior of a convex body (used for Hilbert domains)."""
    bounded = True

    def __init__(self, body: Body):
        self.body = body
        self.n = body.dim

    def contains(self, x):
        return np.asarray(self.body.depth(x)) > 0

    def segment_clip(self, Z, X):
        Z = np.atleast_2d(np.asarray(Z, float))
        X = np.atleast_2d(np.asarray(X, float))
        Z, X = np.broadcast_arrays(Z, X)
        lo, hi = self.body.ray_interval(Z, X - Z)
        lo = np.where(np.isnan(lo), np.inf, lo)
        hi = np.where(np.isnan(hi), -np.inf, hi)
        return np.clip(lo, 0.0, 1.0), np.clip(hi, 0.0, 1.0)

    def ray_exit(self, p, u):
        return float(self.body.ray_interval(np.atleast_2d(p), np.atleast_2d(u))[1][0])

    def bounding_box(self):
        E = np.eye(self.n)
        return -self.body.support(-E), self.body.support(E)

    def to_dict(self):
        return {"kind": "body", "body": self.body.to_dict()}


# --------------------------------------------------------------------------
# densities
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightDensity:
    """Positive continuous density on an open domain, zero outside.

    ``boundary_singular`` marks densities that are not integrable up to the
    domain boundary (hyperbolic volume); ``chart_radius`` is set for the
    gnomonic sphere chart, where radii beyond it are reported as overflow.
    """
    domain: object
    func: Callable = field(repr=False)
    label: str
    n: int
    is_uniform: bool = False
    boundary_singular: bool = False
    chart_radius: float | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self._spot_check()

    def __call__(self, x):
        x = np.asarray(x, float)
        inside = self.domain.contains(x)
        if self.is_uniform:
            return np.where(inside, 1.0, 0.0) if x.ndim > 1 else float(inside)
        if x.ndim == 1:
            return float(self.func(x[None, :])[0]) if inside else 0.0
        flat = x.reshape(-1, x.shape[-1])
        ins = np.asarray(inside).reshape(-1)
        out = np.zeros(len(flat))
        if ins.any():
            out[ins] = self.func(flat[ins])
        return out.reshape(x.shape[:-1])

    def _spot_check(self, count=10_000):
        n = self.n
        box = self.domain.bounding_box()
        lo, hi = (np.full(n, -10.0), np.full(n, 10.0)) if box is None else box
        pts = qmc.scale(qmc.Halton(d=n, seed=0).random(count), lo, hi)
        if isinstance(self.domain, BallDomain):
            # pull samples into the open ball so the check covers the whole domain
            c = self.domain.center
            r = np.linalg.norm(pts - c, axis=1)
            scale = np.where(r > 0, np.minimum(1.0, 0.999 * self.domain.radius / np.maximum(r, 1e-300)), 1.0)
            pts = c + (pts - c) * scale[:, None]
        pts = pts[np.asarray(self.domain.contains(pts))]
        if len(pts) == 0:
            return
        vals = self.func(pts) if not self.is_uniform else np.ones(len(pts))
        vals = np.asarray(vals, float)
        if not np.all(np.isfinite(vals) & (vals > 0)):
            raise InvalidParameter(f"density {self.label!r} is not positive on its domain")

    def to_dict(self):
        return dict(self.params)


@lru_cache(maxsize=8)
def _uniform_whole(n):
    return WeightDensity(Whole(n), lambda x: np.ones(len(x)), "uniform", n, is_uniform=True,
                         params={"kind": "uniform"})


def uniform_density(n=2, domain=None):
    if domain is None:
        return _uniform_whole(n)
    dom = domain
    return WeightDensity(dom, lambda x: np.ones(len(x)), "uniform", n, is_uniform=True,
                         params={"kind": "uniform", "domain": dom.to_dict()})


def space_form_density(lam, n=2, chart_radius=DEFAULT_CHART_RADIUS):
    """Volume density of curvature ``lam`` in the projective (gnomonic / Klein) chart."""
    lam = float(lam)
    params = {"kind": "space_form", "lambda": lam}
    if lam == 0.0:
        return WeightDensity(Whole(n), lambda x: np.ones(len(x)), "space_form(0)", n,
                             is_uniform=True, params=params)
    expo = -(n + 1) / 2.0

    def f(x):
        return (1.0 + lam * np.einsum("ij,ij->i", x, x)) ** expo

    if lam < 0:
        return WeightDensity(BallDomain(1.0 / math.sqrt(-lam), n=n), f, f"space_form({lam:g})", n,
                             boundary_singular=True, params=params)
    return WeightDensity(Whole(n), f, f"space_form({lam:g})", n,
                         chart_radius=float(chart_radius), params=params)


def dual_weight(q, rho_floor, n=2):
    """(|q|/n) max(|x|, rho_floor)^(q-n)."""
    q = float(q)
    if q == 0.0:
        raise InvalidParameter("q must be nonzero")
    if not rho_floor > 0:
        raise InvalidParameter("rho_floor must be positive")
    c = abs(q) / n
    e = q - n
    if e == 0.0:
        return WeightDensity(Whole(n), lambda x: np.full(len(x), c), f"dual(q={q:g})", n,
                             is_uniform=(c == 1.0),
                             params={"kind": "dual", "q": q, "rho_floor": float(rho_floor)})

    def f(x):
        r = np.maximum(np.linalg.norm(x, axis=1), rho_floor)
        return c * r ** e

    return WeightDensity(Whole(n), f, f"dual(q={q:g})", n,
                         params={"kind": "dual", "q": q, "rho_floor": float(rho_floor)})


def custom(func, n=2, domain=None, label="custom", **kw):
    """Wrap a vectorised field ``func(points (m, n)) -> values (m,)``."""
    dom = Whole(n) if domain is None else domain
    return WeightDensity(dom, func, label, n, **kw)


# --------------------------------------------------------------------------
# segment integrals and weighted volumes
# --------------------------------------------------------------------------

def segment_moment(phi: WeightDensity, Z, X, tol=1e-12):
    """Row-wise ``int_0^1 phi((1-s) z + s x) s^(n-1) ds`` with phi zero outside its domain."""
    X = np.atleast_2d(np.asarray(X, float))
    Z = np.broadcast_to(np.asarray(Z, float), X.shape)
    n = X.shape[1]
    s0, s1 = phi.domain.segment_clip(Z, X)
    s1 = np.maximum(s0, s1)
    if phi.is_uniform:
        return (s1 ** n - s0 ** n) / n
    D = X - Z
    out = np.zeros(len(X))
    live = s1 > s0
    if live.any():
        idx = np.flatnonzero(live)

        def g(s):
            pts = Z[idx][:, None, :] + s[:, :, None] * D[idx][:, None, :]
            return phi.func(pts.reshape(-1, n)).reshape(s.shape)
        a, L = s0[idx], s1[idx] - s0[idx]
        parts = []
        for e0, e1 in _graded_edges(phi, Z[idx]):
            parts.append(integrate_segments(g, a + e0 * L, a + e1 * L, weight_power=n - 1,
                                            tol=tol, start_order=8))
        out[idx] = np.sum(parts, axis=0)
    return out


def _graded_edges(phi, Z):
    """Panels of [0, 1] refined geometrically towards s = 0.

    A boundary-singular density blows up at the domain edge, and along a chord
    it is largest at an endpoint. When z sits close to the edge the integrand
    is nearly singular at s = 0; panels [10^-(k+1), 10^-k] resolve it.
    """
    if not (phi.boundary_singular and isinstance(phi.domain, BallDomain)):
        return [(0.0, 1.0)]
    R = phi.domain.radius
    gap = 1.0 - float(np.max(np.linalg.norm(Z - phi.domain.center, axis=1))) / R
    if gap >= 0.5:
        return [(0.0, 1.0)]
    m = min(int(math.ceil(-math.log10(max(gap, 1e-17)))) + 1, 18)
    edges = [0.0] + [10.0 ** -k for k in range(m, 0, -1)] + [1.0]
    return list(zip(edges[:-1], edges[1:]))


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "tensor"           # "tensor" or "monte-carlo"
    samples: int = 200_000
    seed: int = 0
    tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("tensor", "monte-carlo"):
            raise InvalidParameter(f"unknown quadrature method {self.method!r}")
        if self.samples < 1:
            raise InvalidParameter("sample count must be positive")


@dataclass(frozen=True)
class MCResult:
    value: float
    stderr: float


def philox_chunks(seed, total, dim, chunk=65_536):
    """Uniform [0,1)^dim samples in chunks; chunk k is keyed by (seed, k)."""
    done = 0
    k = 0
    while done < total:
        m = min(chunk, total - done)
        gen = np.random.Generator(np.random.Philox(key=np.array([seed, k], dtype=np.uint64)))
        yield gen.random((m, dim))
        done += m
        k += 1


def body_bbox(K: Body):
    E = np.eye(K.dim)
    return -np.asarray(K.support(-E), float), np.asarray(K.support(E), float)


def weighted_volume(K: Body, phi: WeightDensity, q: QuadratureSpec | None = None):
    """``int_{K cap U} phi``. Tensor rule returns a float, Monte-Carlo an MCResult."""
    q = q or QuadratureSpec()
    phi = phi or uniform_density(K.dim)
    if q.method == "monte-carlo":
        lo, hi = body_bbox(K)
        box = float(np.prod(hi - lo))
        acc = []
        for u in philox_chunks(q.seed, q.samples, K.dim):
            y = lo + u * (hi - lo)
            acc.append(np.where(K.contains(y), phi(y), 0.0))
        v = np.concatenate(acc)
        return MCResult(box * float(v.mean()), box * float(v.std(ddof=1)) / math.sqrt(len(v)))
    if phi.is_uniform and isinstance(phi.domain, Whole):
        return K.volume()
    c = K.interior_point()

    def integrand(s):
        h = np.einsum("ij,ij->i", s.points - c, s.normals)
        return h * segment_moment(phi, c, s.points, tol=q.tol * 1e-2)

    return integrate_pieces(K.pieces(), integrand, tol=q.tol)
