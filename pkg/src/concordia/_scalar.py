"""Dual-mode scalars.

Exact values are :class:`fractions.Fraction` (ints are promoted); anything
else is a Python float.  Arithmetic between the two falls back to float, so
one float parameter anywhere in an expression switches the whole computation
to float mode, while an all-rational expression stays exact end to end.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]

FLOAT_TOL = 1e-12


def as_scalar(x) -> Scalar:
    """Coerce *x* into a Fraction (ints, ``"p/q"`` strings) or a float."""
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        text = x.strip()
        if "/" in text or _is_int_literal(text):
            return Fraction(text)
        return float(text)
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, numbers.Real):
        value = float(x)
        if not math.isfinite(value):
            raise ValueError(f"non-finite scalar {x!r}")
        return value
    raise TypeError(f"cannot interpret {x!r} as a scalar")


def _is_int_literal(text: str) -> bool:
    body = text[1:] if text[:1] in "+-" else text
    return body.isdigit()


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, numbers.Integral)) and not isinstance(x, bool)


def to_rational(x) -> Fraction:
    """Exact rational value of *x* (floats convert without rounding)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(float(x))


def sqrt(x) -> Scalar:
    """Square root that stays rational when *x* is a rational perfect square."""
    if x < 0:
        raise ValueError(f"sqrt of negative value {x!r}")
    if isinstance(x, Fraction):
        p, q = x.numerator, x.denominator
        rp, rq = math.isqrt(p), math.isqrt(q)
        if rp * rp == p and rq * rq == q:
            return Fraction(rp, rq)
    return math.sqrt(float(x))


def clamp(x, lo, hi):
    return lo if x < lo else hi if x > hi else x


def close(a, b, tol=FLOAT_TOL) -> bool:
    """Exact equality for rationals, absolute tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(a - b) <= tol


def to_json_value(x):
    """Rationals serialise as ``"p/q"`` strings, floats as JSON numbers."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, numbers.Integral) and not isinstance(x, bool):
        return str(int(x))
    return float(x)


def from_json_value(x) -> Scalar:
    if isinstance(x, bool) or x is None:
        raise TypeError(f"expected a number or 'p/q' string, got {x!r}")
    return as_scalar(x)
