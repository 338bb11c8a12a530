"""Expression JSON: a tagged union keyed by ``"type"``.

Rationals are written as ``"p/q"`` strings and floats as JSON numbers, so a
document read back reproduces the arithmetic mode it was written in.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .._scalar import from_json_value, to_json_value
from .expr import Base, Convex, CopulaExpr, Ordinal, OrdinalBlock, Reflect
from .shuffle import ShuffleOfM


class SchemaError(ValueError):
    """The document does not follow the expression schema."""


def to_dict(expr: CopulaExpr) -> dict:
    if isinstance(expr, Base):
        return {"type": expr.kind}
    if isinstance(expr, ShuffleOfM):
        return {
            "type": "shuffle",
            "splits": [to_json_value(x) for x in expr.splits],
            "perm": list(expr.perm),
            "flips": list(expr.flips),
        }
    if isinstance(expr, Ordinal):
        return {
            "type": "ordinal",
            "blocks": [
                {"a": to_json_value(b.a), "b": to_json_value(b.b), "summand": to_dict(b.summand)}
                for b in expr.blocks
            ],
        }
    if isinstance(expr, Reflect):
        return {"type": "reflect", "axis": expr.axis, "of": to_dict(expr.of)}
    if isinstance(expr, Convex):
        return {"type": "convex", "parts": [{"w": to_json_value(w), "of": to_dict(c)} for w, c in expr.parts]}
    raise TypeError(f"cannot serialise {type(expr).__name__}")


def _field(doc: Mapping, key: str) -> Any:
    try:
        return doc[key]
    except (KeyError, TypeError):
        raise SchemaError(f"missing field {key!r} in {doc!r}") from None


def from_dict(doc: Mapping) -> CopulaExpr:
    """Parse a decoded JSON document.

    Raises :class:`SchemaError` for structural problems; semantic problems
    (weights not summing to one, overlapping blocks) surface as
    :class:`~concordia.exceptions.ValidationError` from the node constructors.
    """
    if not isinstance(doc, Mapping):
        raise SchemaError(f"expected an object, got {doc!r}")
    kind = _field(doc, "type")
    if kind in ("M", "W", "Pi"):
        return Base(kind)
    try:
        if kind == "shuffle":
            return ShuffleOfM(
                tuple(_num(x) for x in _field(doc, "splits")),
                tuple(_int(x) for x in _field(doc, "perm")),
                tuple(_int(x) for x in _field(doc, "flips")),
            )
        if kind == "ordinal":
            return Ordinal(
                tuple(
                    OrdinalBlock(
                        _num(_field(b, "a")),
                        _num(_field(b, "b")),
                        from_dict(_field(b, "summand")),
                    )
                    for b in _field(doc, "blocks")
                )
            )
        if kind == "reflect":
            return Reflect(_int(_field(doc, "axis")), from_dict(_field(doc, "of")))
        if kind == "convex":
            return Convex(
                tuple((_num(_field(p, "w")), from_dict(_field(p, "of"))) for p in _field(doc, "parts"))
            )
    except TypeError as exc:
        raise SchemaError(str(exc)) from exc
    raise SchemaError(f"unknown expression type {kind!r}")


def _num(x):
    try:
        return from_json_value(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad number {x!r}: {exc}") from None


def _int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"expected an integer, got {x!r}")
    return x


def dumps(expr: CopulaExpr, **kwargs) -> str:
    return json.dumps(to_dict(expr), **kwargs)


def loads(text: str) -> CopulaExpr:
    return from_dict(json.loads(text))
