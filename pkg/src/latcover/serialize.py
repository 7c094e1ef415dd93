"""JSON instance schema: exact rationals as "num/den" strings.

Instances carry a lattice basis (list of basis vectors), a body as a
tagged union, and an optional target point. Everything round-trips
exactly; floats never appear in instance files.
"""

import json
from fractions import Fraction

from . import linalg as la
from .bodies import EllipsoidBody, LpBall, PolytopeBody
from .ellipsoid import Ellipsoid
from .errors import SchemaError
from .lattice import LatticeBasis


def rational_to_str(x) -> str:
    x = la.frac(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s, field="rational") -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise SchemaError(f"expected rational string, got {type(s).__name__}", field)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {s!r}: {exc}", field) from exc


def vec_to_json(v):
    return [rational_to_str(x) for x in v]


def vec_from_json(data, field="vector"):
    if not isinstance(data, list):
        raise SchemaError("expected a list", field)
    return la.vec([rational_from_str(x, field) for x in data])


def mat_to_json(m):
    return [vec_to_json(row) for row in m]


def mat_from_json(data, field="matrix"):
    if not isinstance(data, list) or not data:
        raise SchemaError("expected a non-empty list of rows", field)
    return la.mat([vec_from_json(row, field) for row in data])


def body_to_json(body):
    if isinstance(body, LpBall):
        p = "inf" if body.p == float("inf") else (
            body.p.numerator if body.p.denominator == 1 else rational_to_str(body.p))
        return {"type": "lp", "dimension": body.dimension, "p": p,
                "scale": rational_to_str(body.scale)}
    if isinstance(body, PolytopeBody):
        return {"type": "polytope", "A": mat_to_json(body.a_rows),
                "b": vec_to_json(body.b)}
    if isinstance(body, EllipsoidBody):
        return {"type": "ellipsoid", "shape": mat_to_json(body.ellipsoid.shape),
                "center": vec_to_json(body.ellipsoid.center)}
    raise SchemaError(f"cannot serialize body {type(body).__name__}", "body")


def body_from_json(data, dimension=None):
    if not isinstance(data, dict) or "type" not in data:
        raise SchemaError("body must be a tagged object", "body")
    kind = data["type"]
    if kind == "lp":
        n = data.get("dimension", dimension)
        if n is None:
            raise SchemaError("lp body needs a dimension", "body.dimension")
        p = data.get("p")
        if p is None:
            raise SchemaError("lp body needs p", "body.p")
        if isinstance(p, str) and p != "inf":
            p = rational_from_str(p, "body.p")
        scale = rational_from_str(data.get("scale", "1/1"), "body.scale")
        return LpBall(int(n), p, scale)
    if kind == "polytope":
        a = mat_from_json(data.get("A"), "body.A")
        b = vec_from_json(data.get("b"), "body.b")
        return PolytopeBody(a, b)
    if kind == "ellipsoid":
        shape = mat_from_json(data.get("shape"), "body.shape")
        center = data.get("center")
        center_vec = vec_from_json(center, "body.center") if center is not None else None
        if center_vec is not None and any(c != 0 for c in center_vec):
            raise SchemaError("ellipsoid bodies must be origin-centered", "body.center")
        return EllipsoidBody(Ellipsoid(shape))
    raise SchemaError(f"unknown body type {kind!r}", "body.type")


def parse_instance(data):
    """(LatticeBasis, body, optional target) from a parsed JSON object."""
    if not isinstance(data, dict):
        raise SchemaError("instance must be an object", "instance")
    if "lattice" not in data:
        raise SchemaError("missing lattice", "lattice")
    cols = [vec_from_json(c, "lattice") for c in data["lattice"]]
    if not cols:
        raise SchemaError("lattice needs at least one basis vector", "lattice")
    lattice = LatticeBasis(la.from_columns(cols))
    body = None
    if "body" in data:
        body = body_from_json(data["body"], dimension=lattice.dimension)
        if body.dimension != lattice.dimension:
            raise SchemaError("body and lattice dimensions differ", "body")
    target = None
    if data.get("target") is not None:
        target = vec_from_json(data["target"], "target")
        if len(target) != lattice.dimension:
            raise SchemaError("target dimension mismatch", "target")
    return lattice, body, target


def load_instance(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(str(exc), "instance") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON at line {exc.lineno}: {exc.msg}",
                          "instance") from exc
    return parse_instance(data)


def points_to_json(points):
    return [vec_to_json(p) for p in points]


def dump_canonical(obj) -> str:
    """Stable serialization for byte-identical reports."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
