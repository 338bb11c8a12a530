"""Parametric shuffle families and their ordinal/reflected variants.

``C_b``, ``D_b``, ``G_b`` and ``L_{a,b}`` are explicit shuffles of M; the
two-parameter families nest them into the middle of the unit square and
optionally reflect the result in the second coordinate:

==========  =======================================  ===================
family      construction                             parameter domain
==========  =======================================  ===================
``Cb``      shuffle, 6 pieces                        b in [0, 1/4]
``Db``      shuffle, 3 pieces                        b in [0, 1/2]
``Gb``      shuffle, 6 pieces                        b in [0, 1/4]
``Lab``     shuffle, 10 pieces                       0 <= a <= b <= 1/4
``Aab``     nest(a, C_b)                             a in [0, 1/2], b in [0, 1/4]
``Eab``     nest(a, reflect(D_b, 2))                 a, b in [0, 1/2]
``Fab``     reflect(E_{a,b}, 2)                      a, b in [0, 1/2]
``Hab``     nest(a, G_b)                             a in [0, 1/2], b in [0, 1/4]
``Kab``     reflect(H_{a,b}, 2)                      a in [0, 1/2], b in [0, 1/4]
``Mab``     reflect(L_{a,b}, 2)                      0 <= a <= b <= 1/4
==========  =======================================  ===================
"""

from __future__ import annotations

import enum
from fractions import Fraction

from ._scalar import FLOAT_TOL, as_scalar, is_exact
from .core.expr import CopulaExpr, nest_middle, reflect
from .core.shuffle import ShuffleOfM
from .exceptions import ValidationError

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class FamilyId(str, enum.Enum):
    Cb = "Cb"
    Db = "Db"
    Gb = "Gb"
    Lab = "Lab"
    Aab = "Aab"
    Eab = "Eab"
    Fab = "Fab"
    Hab = "Hab"
    Kab = "Kab"
    Mab = "Mab"
    NestMiddle = "NestMiddle"


def _in_range(name, x, lo, hi):
    x = as_scalar(x)
    slack = 0 if is_exact(x) else FLOAT_TOL
    if not lo - slack <= x <= hi + slack:
        raise ValidationError(f"{name}={x} outside [{lo}, {hi}]")
    if x < lo:
        return lo if is_exact(lo) and is_exact(x) else float(lo)
    if x > hi:
        return hi if is_exact(hi) and is_exact(x) else float(hi)
    return x


def c_b(b) -> ShuffleOfM:
    b = _in_range("b", b, 0, QUARTER)
    return ShuffleOfM((b, HALF - b, HALF, HALF + b, 1 - b), (3, 5, 1, 6, 2, 4), (1, 1, 1, 1, 1, 1))


def d_b(b) -> ShuffleOfM:
    b = _in_range("b", b, 0, HALF)
    return ShuffleOfM((b, 1 - b), (1, 2, 3), (-1, 1, -1))


def g_b(b) -> ShuffleOfM:
    b = _in_range("b", b, 0, QUARTER)
    return ShuffleOfM((b, HALF - b, HALF, HALF + b, 1 - b), (3, 2, 1, 6, 5, 4), (1, -1, 1, 1, -1, 1))


def l_ab(a, b) -> ShuffleOfM:
    b = _in_range("b", b, 0, QUARTER)
    a = _in_range("a", a, 0, b)
    splits = (a, b, HALF - b, HALF - b + a, HALF, HALF + b - a, HALF + b, 1 - b, 1 - a)
    return ShuffleOfM(splits, (7, 5, 8, 10, 2, 9, 1, 3, 6, 4), (-1, 1, 1, -1, 1, 1, -1, 1, 1, -1))


def nest(a, summand: CopulaExpr) -> CopulaExpr:
    return nest_middle(_in_range("a", a, 0, HALF), summand)


def a_ab(a, b) -> CopulaExpr:
    return nest(a, c_b(b))


def e_ab(a, b) -> CopulaExpr:
    return nest(a, reflect(d_b(b), 2))


def f_ab(a, b) -> CopulaExpr:
    return reflect(e_ab(a, b), 2)


def h_ab(a, b) -> CopulaExpr:
    return nest(a, g_b(b))


def k_ab(a, b) -> CopulaExpr:
    return reflect(h_ab(a, b), 2)


def m_ab(a, b) -> CopulaExpr:
    return reflect(l_ab(a, b), 2)


_BUILDERS = {
    FamilyId.Cb: (c_b, ("b",)),
    FamilyId.Db: (d_b, ("b",)),
    FamilyId.Gb: (g_b, ("b",)),
    FamilyId.Lab: (l_ab, ("a", "b")),
    FamilyId.Aab: (a_ab, ("a", "b")),
    FamilyId.Eab: (e_ab, ("a", "b")),
    FamilyId.Fab: (f_ab, ("a", "b")),
    FamilyId.Hab: (h_ab, ("a", "b")),
    FamilyId.Kab: (k_ab, ("a", "b")),
    FamilyId.Mab: (m_ab, ("a", "b")),
}


def make_family(family, **params) -> CopulaExpr:
    """Build a member of a named family, e.g. ``make_family("Lab", a=0, b=1/8)``.

    ``NestMiddle`` takes ``a`` and a ``summand`` expression.
    """
    family = FamilyId(family)
    if family is FamilyId.NestMiddle:
        return nest(params["a"], params["summand"])
    builder, names = _BUILDERS[family]
    missing = set(names) - set(params)
    extra = set(params) - set(names)
    if missing or extra:
        raise ValidationError(f"{family.value} takes parameters {names}, got {sorted(params)}")
    return builder(*(params[n] for n in names))
