"""Gauss-Legendre helpers used by the boundary and segment integrals."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_nodes(a: float, b: float, panels: int, order: int = 16):
    """Composite Gauss-Legendre rule on [a, b] with equal panels."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + h[:, None] * x[None, :]).ravel()
    weights = (h[:, None] * w[None, :]).ravel()
    return nodes, weights


def fsum(values) -> float:
    """Compensated sum, independent of evaluation order up to rounding of the inputs."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def integrate_segments(f, lo, hi, *, weight_power: int = 0, tol: float = 1e-12,
                       start_order: int = 16, max_order: int = 256):
    """Vectorised adaptive Gauss-Legendre for many 1D integrals at once.

    Computes ``I_k = int_{lo_k}^{hi_k} f(s)[k, :] * s**weight_power ds`` where ``f``
    receives an array of shape (K, m) of abscissae and returns values of the same
    shape. The order doubles until successive estimates agree to ``tol`` (relative
    to the largest integral) or ``max_order`` is hit.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    length = np.clip(hi - lo, 0.0, None)

    def estimate(order):
        x, w = gauss_legendre(order)
        s = lo[:, None] + length[:, None] * x[None, :]
        vals = f(s)
        if weight_power:
            vals = vals * s ** weight_power
        return (vals * w[None, :]).sum(axis=1) * length

    order = start_order
    prev = estimate(order)
    while order < max_order:
        order *= 2
        cur = estimate(order)
        scale = max(float(np.max(np.abs(cur), initial=0.0)), 1e-300)
        if float(np.max(np.abs(cur - prev), initial=0.0)) <= tol * scale:
            return cur
        prev = cur
    return prev


def triangle_rule(order: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Collapsed (Duffy) tensor rule on the reference triangle (0,0),(1,0),(0,1).

    Returns barycentric-style coordinates (m, 2) and weights summing to 1/2.
    """
    x, w = gauss_legendre(order)
    u = np.repeat(x, order)
    v = np.tile(x, order)
    wu = np.repeat(w, order)
    wv = np.tile(w, order)
    pts = np.column_stack([u, v * (1.0 - u)])
    weights = wu * wv * (1.0 - u)
    return pts, weights
