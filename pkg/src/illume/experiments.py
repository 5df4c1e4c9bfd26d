"""Convergence runs: difference quotients of illumination bodies against their limits."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bodies import Body, DirectionGrid, Ellipsoid, Polytope
from .engine import illumination_body, weighted_volume_difference
from .errors import InvalidParameter, ProfileUnbounded
from .functionals import c_n, dual_derivative_integral, weighted_limit_integral
from .hilbert import HilbertDomain, finsler_surface_area, finsler_weight
from .measures import WeightDensity, dual_weight, space_form_density, uniform_density
from .spaceforms import floating_area

SCHEMA_VERSION = 1


def default_deltas(count=12, start=1e-1):
    """Geometric sequence with ratio 10^(-1/2)."""
    return [start * 10.0 ** (-k / 2.0) for k in range(count)]


@dataclass
class ExperimentReport:
    body: dict
    geometry: str
    phi: str
    psi: str
    deltas: list
    quotients: list
    target: float
    target_checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    directions: int = 0
    timing: float | None = field(default=None, compare=False)

    @property
    def rel_errors(self):
        if self.target == 0.0:
            return [abs(q) for q in self.quotients]
        return [abs(q - self.target) / abs(self.target) for q in self.quotients]

    def trend(self, last=4):
        """True when the errors over the last ``last`` points are nonincreasing."""
        e = self.rel_errors[-last:]
        return all(b <= a for a, b in zip(e[:-1], e[1:]))

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "body": self.body,
            "geometry": self.geometry,
            "weight_phi": self.phi,
            "weight_psi": self.psi,
            "directions": self.directions,
            "delta_sequence": self.deltas,
            "quotients": self.quotients,
            "target": self.target,
            "target_checks": self.target_checks,
            "relative_errors": self.rel_errors,
            "monotone_last4": self.trend(),
            "notes": self.notes,
        }

    def to_json(self):
        # timing stays out so reports are reproducible byte for byte
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _quotients(K, phi, psi, deltas, grid, tol, quad_tol, sign=1.0):
    n = K.dim
    out = []
    for d in deltas:
        prof = illumination_body(K, phi, d, grid, tol=tol, quad_tol=quad_tol)
        if not prof.all_finite:
            bad = [i for i, f in enumerate(prof.flags) if f != "finite"]
            raise ProfileUnbounded(f"delta={d:g}: non-finite radii in directions {bad[:8]}")
        out.append(sign * weighted_volume_difference(K, prof, psi, tol=quad_tol) / d ** (2.0 / (n + 1)))
    return out


def run_convergence(K: Body, geometry="euclid", phi: WeightDensity | None = None,
                    psi: WeightDensity | None = None, deltas=None, directions=None,
                    tol=1e-10, dual_q=None, hilbert: HilbertDomain | None = None,
                    finsler_volume="busemann", quad_tol=None):
    """Difference quotients (vol^psi(I_delta) - vol^psi(K)) / delta^(2/(n+1)).

    ``geometry`` is "euclid", "spaceform:<lam>" or "hilbert"; the last needs a
    HilbertDomain. With ``dual_q`` set the run tracks the dual volume of order
    q along classical illumination bodies instead. The interpolated Finsler
    density is only C^2, so its default quadrature tolerance is looser.
    """
    t0 = time.perf_counter()
    n = K.dim
    deltas = list(default_deltas() if deltas is None else deltas)
    if any(b >= a for a, b in zip(deltas[:-1], deltas[1:])) or deltas[-1] <= 0:
        raise InvalidParameter("delta sequence must be positive and strictly decreasing")
    if directions is None:
        directions = 64 if n == 2 else 642
    grid = DirectionGrid.for_dimension(n, directions)
    notes = []
    checks = {}
    sign = 1.0

    if dual_q is not None:
        q = float(dual_q)
        if geometry != "euclid":
            raise InvalidParameter("dual volumes are tracked in the Euclidean geometry")
        rmin = float(np.min(K.radial(grid.units)))
        phi = uniform_density(n)
        psi = dual_weight(q, 0.5 * rmin, n)
        sign = math.copysign(1.0, q)
        target = dual_derivative_integral(K, q)
        notes.append(f"dual volume q={q:g}, psi floor {0.5 * rmin:.6g}")
    elif geometry == "euclid":
        phi = phi or uniform_density(n)
        psi = psi or uniform_density(n)
        target = weighted_limit_integral(K, phi, psi)
    elif geometry.startswith("spaceform:"):
        lam = float(geometry.split(":", 1)[1])
        phi = psi = space_form_density(lam, n)
        composed = floating_area(K, lam, "composed")
        factors = floating_area(K, lam, "factors")
        target = c_n(n) * composed
        checks = {"floating_area_composed": composed, "floating_area_factors": factors}
    elif geometry == "hilbert":
        if hilbert is None:
            raise InvalidParameter("hilbert geometry needs a domain")
        phi = psi = finsler_weight(hilbert, finsler_volume)
        omega = finsler_surface_area(K, hilbert, finsler_volume)
        target = c_n(n) * omega
        checks = {"finsler_area_exact_density": omega,
                  "finsler_area_interpolated": weighted_limit_integral(K, phi, psi) / c_n(n)}
        if isinstance(hilbert.X, Polytope):
            notes.append("polygonal Hilbert domain: smoothness hypotheses on F do not hold")
        elif not isinstance(hilbert.X, Ellipsoid):
            notes.append("Hilbert domain smoothness not verified")
    else:
        raise InvalidParameter(f"unknown geometry {geometry!r}")

    if quad_tol is None:
        quad_tol = 1e-10 if geometry == "hilbert" else 1e-13
    if isinstance(K, Polytope):
        notes.append("polytope: the limit is zero")
    qs = _quotients(K, phi, psi, deltas, grid, tol, quad_tol, sign)
    rep = ExperimentReport(K.to_dict(), geometry, phi.label, psi.label, deltas, qs, float(target),
                           checks, notes, grid.m)
    rep.timing = time.perf_counter() - t0
    return rep
