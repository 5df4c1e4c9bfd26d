"""JSON configuration: bodies, weight densities, geometries and a small expression language."""

from __future__ import annotations

import ast
import json
import logging
import math
import operator
from dataclasses import dataclass

import numpy as np

from .bodies import Body, body_from_dict
from .errors import InvalidBody, InvalidParameter
from .hilbert import HilbertDomain
from .measures import (BallDomain, BoxDomain, Whole, custom, dual_weight,
                       space_form_density, uniform_density)

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# expressions
# --------------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_COORDS = ("x", "y", "z")


def _norm(*args):
    if len(args) == 1:
        return np.abs(args[0])
    return np.sqrt(sum(a * a for a in args))


_FUNCS = {"exp": np.exp, "sqrt": np.sqrt, "pow": np.power, "norm": _norm}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_expression(src, n):
    """Vectorised field from an arithmetic expression in x, y (and z when n = 3).

    Allowed: numbers, + - * / ** and unary minus, the functions exp, sqrt, pow
    and norm (norm() with no arguments is the Euclidean norm of the point),
    and the constants pi and e.
    """
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise InvalidParameter(f"cannot parse expression {src!r}: {exc.msg}") from None
    names = dict(_CONSTS)

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return
        if isinstance(node, ast.Name):
            if node.id in _CONSTS or node.id in _COORDS[:n]:
                return
            raise InvalidParameter(f"unknown name {node.id!r} in expression")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
            return
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            check(node.operand)
            return
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            for a in node.args:
                check(a)
            return
        raise InvalidParameter(f"unsupported construct {type(node).__name__} in expression")

    check(tree)

    def ev(node, env):
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return env[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.UnaryOp):
            return _UNOPS[type(node.op)](ev(node.operand, env))
        args = [ev(a, env) for a in node.args]
        if node.func.id == "norm" and not args:
            args = [env[c] for c in _COORDS[:n]]
        return _FUNCS[node.func.id](*args)

    def f(P):
        P = np.atleast_2d(P)
        env = dict(names)
        env.update({c: P[:, i] for i, c in enumerate(_COORDS[:n])})
        with np.errstate(all="ignore"):
            out = ev(tree, env)
        return np.broadcast_to(np.asarray(out, float), (len(P),)).copy()

    return f


# --------------------------------------------------------------------------
# densities and domains
# --------------------------------------------------------------------------

def domain_from_dict(d, n):
    if d is None:
        return Whole(n)
    kind = d.get("kind")
    if kind == "whole":
        return Whole(n)
    if kind == "ball":
        return BallDomain(float(d["radius"]), d.get("center"), n)
    if kind == "box":
        return BoxDomain(d["lo"], d["hi"])
    raise InvalidParameter(f"unknown domain kind {kind!r}")


def weight_from_dict(d, n):
    if d is None or d == "uniform":
        return uniform_density(n)
    if not isinstance(d, dict):
        raise InvalidParameter(f"weight must be an object, got {d!r}")
    kind = d.get("kind")
    try:
        if kind == "uniform":
            dom = d.get("domain")
            return uniform_density(n, None if dom is None else domain_from_dict(dom, n))
        if kind == "space_form":
            return space_form_density(float(d["lambda"]), n)
        if kind == "dual":
            return dual_weight(float(d["q"]), float(d["rho_floor"]), n)
        if kind == "expression":
            dom = domain_from_dict(d.get("domain"), n)
            return custom(compile_expression(d["expr"], n), n, dom, label=d["expr"],
                          params=dict(d))
    except KeyError as exc:
        raise InvalidParameter(f"weight {kind!r} is missing {exc}") from None
    raise InvalidParameter(f"unknown weight kind {kind!r}")


def parse_weight_arg(s, n):
    """CLI shorthand: uniform, space_form:<lam>, dual:<q>:<floor>, or an expression."""
    if s is None or s == "uniform":
        return uniform_density(n)
    if s.startswith("{"):
        return weight_from_dict(json.loads(s), n)
    if s.startswith("space_form:"):
        return space_form_density(float(s.split(":", 1)[1]), n)
    if s.startswith("dual:"):
        _, q, fl = s.split(":")
        return dual_weight(float(q), float(fl), n)
    return custom(compile_expression(s, n), n, label=s, params={"kind": "expression", "expr": s})


# --------------------------------------------------------------------------
# bodies and geometry
# --------------------------------------------------------------------------

def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidBody(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InvalidParameter(f"cannot read {path}: {exc.strerror}") from None


def load_body(spec, recenter=True):
    """Body from a dict or a JSON path; moved to its centroid when o is not interior."""
    d = load_json(spec) if isinstance(spec, str) else spec
    if not isinstance(d, dict):
        raise InvalidBody("body description must be a JSON object")
    K = body_from_dict(d)
    shift = None
    if recenter and not K.origin_interior():
        c = np.asarray(K.centroid(), float)
        K = K.translate(0.0 - c)
        shift = (0.0 - c).tolist()
        log.warning("origin not interior: body translated by %s", shift)
    return K, shift


@dataclass
class Geometry:
    kind: str                 # euclid | spaceform | hilbert
    lam: float = 0.0
    hilbert: HilbertDomain | None = None

    @property
    def label(self):
        if self.kind == "spaceform":
            return f"spaceform:{self.lam:g}"
        return self.kind


def parse_geometry(s, resolution=512):
    if s is None or s == "euclid":
        return Geometry("euclid")
    if s.startswith("spaceform:"):
        try:
            return Geometry("spaceform", float(s.split(":", 1)[1]))
        except ValueError:
            raise InvalidParameter(f"bad curvature in {s!r}") from None
    if s.startswith("hilbert:"):
        ref = s.split(":", 1)[1]
        X, _ = load_body(ref if not ref.lstrip().startswith("{") else json.loads(ref),
                         recenter=False)
        return Geometry("hilbert", hilbert=HilbertDomain(X, directions=resolution))
    raise InvalidParameter(f"unknown geometry {s!r}")


def geometry_weight(geom: Geometry, n, finsler_volume="busemann"):
    from .hilbert import finsler_weight
    if geom.kind == "euclid":
        return None
    if geom.kind == "spaceform":
        return space_form_density(geom.lam, n)
    return finsler_weight(geom.hilbert, finsler_volume)


def body_summary(K: Body):
    out = {"body": K.to_dict(), "dimension": K.dim, "volume": K.volume(),
           "diameter": K.diameter(), "centroid": np.asarray(K.centroid()).tolist(),
           "origin_interior": bool(K.origin_interior())}
    return out
