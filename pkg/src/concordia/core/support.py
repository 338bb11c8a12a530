"""Support decomposition of copula measures.

Every expression in the algebra has a measure that is a finite mixture of
uniform distributions on straight segments (from M, W and shuffles) and on
axis-parallel rectangles (from Pi, possibly rescaled by ordinal sums and
mirrored by reflections).  With that decomposition

    integral C2 dC1 = P(X2 <= X1, Y2 <= Y1),   (X1, Y1) ~ C1, (X2, Y2) ~ C2,

splits into pairwise probabilities between pieces, each of which is a
polygon area or the integral of a piecewise quadratic.  Both are evaluated
exactly (shoelace formula, Simpson's rule on the quadratic pieces).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from .._scalar import Scalar
from .expr import Base, Convex, CopulaExpr, Ordinal, Reflect
from .sections import PathPiece
from .shuffle import ShuffleOfM

ONE = Fraction(1)
ZERO = Fraction(0)


@dataclass(frozen=True)
class Segment:
    """Mass spread uniformly along the segment ``(x0, y0) -> (x1, y1)``."""

    mass: Scalar
    x0: Scalar
    y0: Scalar
    x1: Scalar
    y1: Scalar

    def scaled(self, a, w, factor):
        return Segment(self.mass * factor, a + w * self.x0, a + w * self.y0, a + w * self.x1, a + w * self.y1)

    def mirrored(self, axis):
        if axis == 1:
            return Segment(self.mass, 1 - self.x0, self.y0, 1 - self.x1, self.y1)
        return Segment(self.mass, self.x0, 1 - self.y0, self.x1, 1 - self.y1)


@dataclass(frozen=True)
class Box:
    """Mass spread uniformly over ``[x0, x1] x [y0, y1]``."""

    mass: Scalar
    x0: Scalar
    x1: Scalar
    y0: Scalar
    y1: Scalar

    def scaled(self, a, w, factor):
        return Box(self.mass * factor, a + w * self.x0, a + w * self.x1, a + w * self.y0, a + w * self.y1)

    def mirrored(self, axis):
        if axis == 1:
            return Box(self.mass, 1 - self.x1, 1 - self.x0, self.y0, self.y1)
        return Box(self.mass, self.x0, self.x1, 1 - self.y1, 1 - self.y0)


Atom = Union[Segment, Box]


def decompose(expr: CopulaExpr) -> List[Atom]:
    """Mixture atoms of the measure of *expr*; masses sum to one."""
    if isinstance(expr, Base):
        if expr.kind == "M":
            return [Segment(ONE, ZERO, ZERO, ONE, ONE)]
        if expr.kind == "W":
            return [Segment(ONE, ZERO, ONE, ONE, ZERO)]
        return [Box(ONE, ZERO, ONE, ZERO, ONE)]
    if isinstance(expr, ShuffleOfM):
        return [Segment(p.width, *p.endpoints()) for p in expr.pieces if p.width > 0]
    if isinstance(expr, Ordinal):
        out: List[Atom] = []
        cursor = ZERO
        for blk in expr.blocks:
            if blk.a > cursor:
                out.append(Segment(blk.a - cursor, cursor, cursor, blk.a, blk.a))
            out.extend(atom.scaled(blk.a, blk.width, blk.width) for atom in decompose(blk.summand))
            cursor = blk.b
        if cursor < 1:
            out.append(Segment(1 - cursor, cursor, cursor, ONE, ONE))
        return out
    if isinstance(expr, Reflect):
        return [atom.mirrored(expr.axis) for atom in decompose(expr.of)]
    if isinstance(expr, Convex):
        return [
            atom.scaled(ZERO, ONE, w) for w, c in expr.parts if w != 0 for atom in decompose(c)
        ]
    raise TypeError(f"cannot decompose {type(expr).__name__}")


def _clip(poly, a, b, c):
    """Part of a convex polygon where ``a + b*s + c*r >= 0``."""
    out = []
    n = len(poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        fp = a + b * p[0] + c * p[1]
        fq = a + b * q[0] + c * q[1]
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            lam = fp / (fp - fq)
            out.append((p[0] + lam * (q[0] - p[0]), p[1] + lam * (q[1] - p[1])))
    return out


def _area(poly):
    if len(poly) < 3:
        return ZERO
    twice = 0
    for k in range(len(poly)):
        (x0, y0), (x1, y1) = poly[k], poly[(k + 1) % len(poly)]
        twice += x0 * y1 - x1 * y0
    return abs(twice) / 2


def _cdf_1d(x, lo, hi):
    """CDF at *x* of the uniform law on ``[lo, hi]`` (a point mass if lo == hi)."""
    if x <= lo:
        return 1 if (x == lo and lo == hi) else 0 * x
    if x >= hi:
        return 0 * x + 1
    return (x - lo) / (hi - lo)


def _simpson(f, breaks):
    total = ZERO
    for a, b in zip(breaks, breaks[1:]):
        if b > a:
            total += (b - a) * (f(a) + 4 * f((a + b) / 2) + f(b)) / 6
    return total


def _breaks_on_unit(start, slope, levels):
    out = {ZERO, ONE}
    if slope != 0:
        for lv in levels:
            s = (lv - start) / slope
            if 0 < s < 1:
                out.add(s)
    return sorted(out)


def _seg_seg(p: Segment, q: Segment):
    # area of {(s, r) in [0,1]^2 : q(r) <= p(s) componentwise}
    poly = [(ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE)]
    poly = _clip(poly, p.x0 - q.x0, p.x1 - p.x0, -(q.x1 - q.x0))
    if poly:
        poly = _clip(poly, p.y0 - q.y0, p.y1 - p.y0, -(q.y1 - q.y0))
    return _area(poly)


def _seg_box(p: Segment, q: Box):
    # P(Xq <= xp(s), Yq <= yp(s)) averaged over s
    dx, dy = p.x1 - p.x0, p.y1 - p.y0
    breaks = sorted(
        set(_breaks_on_unit(p.x0, dx, (q.x0, q.x1))) | set(_breaks_on_unit(p.y0, dy, (q.y0, q.y1)))
    )

    def f(s):
        return _cdf_1d(p.x0 + s * dx, q.x0, q.x1) * _cdf_1d(p.y0 + s * dy, q.y0, q.y1)

    return _simpson(f, breaks)


def _box_seg(p: Box, q: Segment):
    # P(xq(r) <= Xp, yq(r) <= Yp) averaged over r
    dx, dy = q.x1 - q.x0, q.y1 - q.y0
    breaks = sorted(
        set(_breaks_on_unit(q.x0, dx, (p.x0, p.x1))) | set(_breaks_on_unit(q.y0, dy, (p.y0, p.y1)))
    )

    def f(r):
        return (1 - _cdf_1d(q.x0 + r * dx, p.x0, p.x1)) * (1 - _cdf_1d(q.y0 + r * dy, p.y0, p.y1))

    return _simpson(f, breaks)


def _uniform_le(lo_q, hi_q, lo_p, hi_p):
    """P(A <= B) for independent A ~ U[lo_q, hi_q], B ~ U[lo_p, hi_p]."""
    breaks = sorted({lo_p, hi_p} | {x for x in (lo_q, hi_q) if lo_p < x < hi_p})
    return _simpson(lambda x: _cdf_1d(x, lo_q, hi_q), breaks) / (hi_p - lo_p)


def _box_box(p: Box, q: Box):
    return _uniform_le(q.x0, q.x1, p.x0, p.x1) * _uniform_le(q.y0, q.y1, p.y0, p.y1)


def prob_dominated(p: Atom, q: Atom):
    """P(Xq <= Xp and Yq <= Yp) for independent draws from unit-mass atoms."""
    if isinstance(p, Segment):
        return _seg_seg(p, q) if isinstance(q, Segment) else _seg_box(p, q)
    return _box_seg(p, q) if isinstance(q, Segment) else _box_box(p, q)


def expectation(atoms1: Sequence[Atom], atoms2: Sequence[Atom]):
    """``integral C2 dC1`` from the atoms of ``C1`` and ``C2``."""
    total = ZERO
    for p in atoms1:
        for q in atoms2:
            total += p.mass * q.mass * prob_dominated(p, q)
    return total


def integral_against(c1: CopulaExpr, c2: CopulaExpr):
    """``integral C2 dC1`` for arbitrary expressions."""
    return expectation(decompose(c1), decompose(c2))


def path_integral(expr: CopulaExpr, path: Iterable[PathPiece]):
    """Exact ``integral C(x(t), y(t)) dt`` along a polygonal path, any expression."""
    atoms = decompose(expr)
    total = ZERO
    for piece in path:
        length = piece.t1 - piece.t0
        if length == 0:
            continue
        carrier = Segment(ONE, piece.x0, piece.y0, piece.x1, piece.y1)
        total += length * expectation([carrier], atoms)
    return total


def box_integral(expr: CopulaExpr, x0, x1, y0, y1):
    """Exact double integral of C over ``[x0, x1] x [y0, y1]``."""
    area = (x1 - x0) * (y1 - y0)
    return area * expectation([Box(ONE, x0, x1, y0, y1)], decompose(expr))
