"""Command line front end.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 golden-suite failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .appendix import golden_suite
from .bodies import DirectionGrid
from .config import (body_summary, geometry_weight, load_body, load_json, parse_geometry,
                     parse_weight_arg, weight_from_dict)
from .engine import (METHODS, cap_volume, convexity_check, illumination_body, profile_csv,
                     profile_svg)
from .errors import IllumeError, NumericalFailure
from .experiments import run_convergence
from .hilbert import KINDS, finsler_density, hilbert_distance, hilbert_norm
from .measures import QuadratureSpec

log = logging.getLogger("illume")

CSV_HELP = ("CSV columns: u0, u1[, u2] (unit direction), rho (radius of the illumination "
            "body, inf when unbounded), flag (finite | unbounded | chart-overflow)")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _point(s):
    try:
        return np.array([float(v) for v in s.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated point: {s!r}") from None


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _weight(args, n):
    if getattr(args, "weight", None):
        return parse_weight_arg(args.weight, n)
    geom = parse_geometry(args.geometry, args.resolution or 512)
    return geometry_weight(geom, n, args.finsler_volume)


def cmd_body(args):
    K, shift = load_body(args.body, recenter=False)
    d = body_summary(K)
    _emit(json.dumps(d, sort_keys=True, indent=2), args.out)
    return 0


def cmd_capvol(args):
    K, shift = load_body(args.body)
    z = args.z if shift is None else args.z + np.asarray(shift)
    phi = _weight(args, K.dim)
    mc = QuadratureSpec(method="monte-carlo", samples=args.samples, seed=args.seed)
    v = cap_volume(K, phi, z, args.method, tol=args.tol or 1e-12, mc=mc)
    if args.method == "monte-carlo":
        _emit(f"{v.value:.12g} +- {v.stderr:.3g}", args.out)
    else:
        _emit(repr(float(f"{v:.12g}")), args.out)
    return 0


def _profile(args):
    K, shift = load_body(args.body)
    phi = _weight(args, K.dim)
    grid = DirectionGrid.for_dimension(K.dim, args.resolution or (256 if K.dim == 2 else 642))
    return K, illumination_body(K, phi, args.delta, grid, tol=args.tol or 1e-10)


def cmd_illuminate(args):
    K, prof = _profile(args)
    _emit(profile_csv(prof), args.out)
    if args.svg:
        if K.dim != 2:
            raise InputError("SVG output is available in the plane only")
        with open(args.svg, "w") as fh:
            fh.write(profile_svg(prof))
    return 0


def cmd_check_convexity(args):
    K, prof = _profile(args)
    rep = convexity_check(prof)
    d = {"convex": rep.convex, "max_violation": rep.max_violation, "delta": args.delta}
    if rep.witness is not None:
        i, j, m = rep.witness
        d["witness"] = {"i": i, "j": j, "margin": m,
                        "u_i": prof.grid.units[i].tolist(), "u_j": prof.grid.units[j].tolist()}
    _emit(json.dumps(d, sort_keys=True, indent=2), args.out)
    return 0


def cmd_converge(args):
    cfg = load_json(args.config) if args.config else {}
    body = cfg.get("body", args.body)
    if body is None:
        raise InputError("a body is required (--body or config 'body')")
    K, shift = load_body(body)
    geometry = cfg.get("geometry", args.geometry) or "euclid"
    n = K.dim
    phi = psi = None
    hilbert = None
    kind = geometry
    if geometry.startswith("hilbert:"):
        hilbert = parse_geometry(geometry, cfg.get("grid", args.resolution) or 512).hilbert
        kind = "hilbert"
    elif geometry == "euclid":
        phi = weight_from_dict(cfg.get("weight_phi"), n)
        psi = weight_from_dict(cfg.get("weight_psi"), n)
    deltas = cfg.get("delta_sequence")
    rep = run_convergence(K, kind, phi, psi, deltas=deltas,
                          directions=cfg.get("directions", args.resolution),
                          tol=cfg.get("tol", args.tol) or 1e-10, dual_q=cfg.get("dual_q"),
                          hilbert=hilbert,
                          finsler_volume=cfg.get("finsler_volume", args.finsler_volume))
    d = rep.to_dict()
    if shift is not None:
        d["notes"].append(f"body translated by {shift}")
    _emit(json.dumps(d, sort_keys=True, indent=2), args.out)
    return 0


def cmd_golden(args):
    rep = golden_suite()
    if args.json:
        _emit(json.dumps(rep.to_dict(), sort_keys=True, indent=2), args.out)
    else:
        _emit(rep.table(), args.out)
    return 0 if rep.passed else 3


def cmd_hilbert(args):
    geom = parse_geometry(args.geometry if args.domain is None else f"hilbert:{args.domain}",
                          args.resolution or 512)
    if geom.kind != "hilbert":
        raise InputError("a Hilbert domain is required (--domain or --geometry hilbert:...)")
    X = geom.hilbert
    out = {}
    if args.distance:
        out["distance"] = hilbert_distance(X, args.distance[0], args.distance[1])
    if args.norm:
        out["norm"] = hilbert_norm(X, args.norm[0], args.norm[1])
    if args.density is not None:
        out["density"] = finsler_density(X, args.finsler_volume, args.density)
        out["volume"] = args.finsler_volume
    if not out:
        raise InputError("nothing to do: give --distance, --norm or --density")
    _emit(json.dumps(out, sort_keys=True, indent=2), args.out)
    return 0


def build_parser():
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--geometry", default="euclid",
                   help="euclid | spaceform:<lambda> | hilbert:<body.json>")
    g.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo sampling")
    g.add_argument("--tol", type=float, default=None, help="root-finding / quadrature tolerance")
    g.add_argument("--resolution", type=int, default=None, help="number of directions")
    g.add_argument("--out", default=None, help="write output here instead of stdout")
    g.add_argument("--finsler-volume", default="busemann", choices=KINDS)
    g.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="illume", description="Weighted illumination bodies.",
                epilog=CSV_HELP)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("body", parents=[common], help="validate and describe a body")
    s.add_argument("--body", required=True)
    s.set_defaults(func=cmd_body)

    s = sub.add_parser("capvol", parents=[common], help="one cap-volume evaluation")
    s.add_argument("--body", required=True)
    s.add_argument("--weight", default=None,
                   help="uniform | space_form:<lambda> | dual:<q>:<floor> | JSON | expression")
    s.add_argument("--z", type=_point, required=True)
    s.add_argument("--method", choices=METHODS, default="frontside")
    s.add_argument("--samples", type=int, default=200_000)
    s.set_defaults(func=cmd_capvol)

    for name, func, hlp in (("illuminate", cmd_illuminate, "radial profile as CSV (and SVG)"),
                            ("check-convexity", cmd_check_convexity, "midpoint convexity scan")):
        s = sub.add_parser(name, parents=[common], help=hlp, epilog=CSV_HELP)
        s.add_argument("--body", required=True)
        s.add_argument("--delta", type=float, required=True)
        s.add_argument("--weight", default=None)
        if name == "illuminate":
            s.add_argument("--svg", default=None, help="also write an SVG outline here")
        s.set_defaults(func=func)

    s = sub.add_parser("converge", parents=[common], help="difference-quotient experiment")
    s.add_argument("--config", default=None,
                   help="JSON {body, geometry, weight_phi, weight_psi, delta_sequence, "
                        "directions, tol, seed, dual_q, finsler_volume}")
    s.add_argument("--body", default=None)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("golden", parents=[common], help="run the closed-form example suite")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_golden)

    s = sub.add_parser("hilbert", parents=[common], help="Hilbert distance, norm and density")
    s.add_argument("--domain", default=None, help="body JSON of the domain")
    s.add_argument("--distance", nargs=2, type=_point, metavar=("P", "Q"))
    s.add_argument("--norm", nargs=2, type=_point, metavar=("P", "V"))
    s.add_argument("--density", type=_point, metavar="P")
    s.set_defaults(func=cmd_hilbert)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"illume: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="illume: %(message)s")
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"illume: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (InputError, IllumeError, ValueError, KeyError, OSError) as exc:
        print(f"illume: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
