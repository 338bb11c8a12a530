"""Shuffles of M and the shuffle normal form of expressions."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .._scalar import FLOAT_TOL, Scalar, as_scalar, is_exact
from ..exceptions import ConsistencyError, NotAShuffle, ValidationError
from .expr import Base, Convex, CopulaExpr, Ordinal, Reflect


class Piece(NamedTuple):
    """One diagonal of the support: ``[u_lo, u_hi]`` onto ``[v_lo, v_hi]``."""

    u_lo: Scalar
    u_hi: Scalar
    v_lo: Scalar
    v_hi: Scalar
    flip: int

    @property
    def width(self):
        return self.u_hi - self.u_lo

    def endpoints(self):
        """Support segment as ``(x0, y0, x1, y1)`` oriented left to right."""
        if self.flip == 1:
            return self.u_lo, self.v_lo, self.u_hi, self.v_hi
        return self.u_lo, self.v_hi, self.u_hi, self.v_lo


@dataclass(frozen=True)
class ShuffleOfM(CopulaExpr):
    """Shuffle of M given by interior split points, a permutation and flips.

    ``splits`` holds the ``n - 1`` interior breakpoints, ``perm`` the images
    ``(pi(1), ..., pi(n))`` (1-based) and ``flips`` the orientations in
    ``{-1, +1}``.  Zero-width pieces are allowed; :func:`as_shuffle` drops them.
    """

    splits: Tuple[Scalar, ...]
    perm: Tuple[int, ...]
    flips: Tuple[int, ...]
    pieces: Tuple[Piece, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        splits = tuple(as_scalar(x) for x in self.splits)
        perm = tuple(int(p) for p in self.perm)
        flips = tuple(int(f) for f in self.flips)
        n = len(perm)
        if n == 0:
            raise ValidationError("a shuffle needs at least one piece")
        if len(splits) != n - 1:
            raise ValidationError(f"{n} pieces need {n - 1} split points, got {len(splits)}")
        if sorted(perm) != list(range(1, n + 1)):
            raise ValidationError(f"perm {perm} is not a permutation of 1..{n}")
        if len(flips) != n or any(f not in (-1, 1) for f in flips):
            raise ValidationError(f"flips must be {n} values in {{-1, +1}}, got {flips}")
        zero = Fraction(0)
        u = (zero,) + splits + (Fraction(1),)
        if any(b < a for a, b in zip(u, u[1:])):
            raise ValidationError(f"split points must be nondecreasing in [0, 1]: {splits}")
        widths = [b - a for a, b in zip(u, u[1:])]
        inverse = [0] * n
        for i, p in enumerate(perm):
            inverse[p - 1] = i
        v = [zero]
        for j in range(n):
            v.append(v[-1] + widths[inverse[j]])
        v[-1] = Fraction(1) if all(is_exact(x) for x in splits) else 1.0
        pieces = tuple(
            Piece(u[i], u[i + 1], v[perm[i] - 1], v[perm[i]], flips[i]) for i in range(n)
        )
        object.__setattr__(self, "splits", splits)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "flips", flips)
        object.__setattr__(self, "pieces", pieces)

    @property
    def n(self) -> int:
        return len(self.perm)

    @property
    def breakpoints(self) -> Tuple[Scalar, ...]:
        """Domain breakpoints ``u_0 = 0, ..., u_n = 1``."""
        return (Fraction(0),) + self.splits + (Fraction(1),)

    @property
    def images(self) -> Tuple[Scalar, ...]:
        """Image breakpoints ``v_0 = 0, ..., v_n = 1``."""
        v = sorted({p.v_lo for p in self.pieces} | {p.v_hi for p in self.pieces})
        return tuple(v)

    def own_params(self):
        return self.splits

    def _piece_index(self, u) -> int:
        i = bisect_right(self.breakpoints, u) - 1
        i = min(max(i, 0), self.n - 1)
        while self.pieces[i].width == 0 and i > 0:
            i -= 1
        return i

    def h(self, u) -> Scalar:
        """The measure-preserving bijection, pieces taken half-open ``[u_lo, u_hi)``."""
        p = self.pieces[self._piece_index(u)]
        if p.flip == 1:
            return (u - p.u_lo) + p.v_lo
        return p.v_hi - (u - p.u_lo)

    def h_array(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        bounds = np.array([float(x) for x in self.breakpoints])
        idx = np.clip(np.searchsorted(bounds, u, side="right") - 1, 0, self.n - 1)
        # route indices that land on zero-width pieces (only possible at u = 1)
        effective = np.arange(self.n)
        for i in range(1, self.n):
            if self.pieces[i].width == 0:
                effective[i] = effective[i - 1]
        idx = effective[idx]
        u_lo = np.array([float(p.u_lo) for p in self.pieces])[idx]
        v_lo = np.array([float(p.v_lo) for p in self.pieces])[idx]
        v_hi = np.array([float(p.v_hi) for p in self.pieces])[idx]
        flip = np.array([p.flip for p in self.pieces])[idx]
        return np.where(flip == 1, (u - u_lo) + v_lo, v_hi - (u - u_lo))

    def cdf(self, u, v):
        total = 0 * u
        for p in self.pieces:
            if p.width == 0 or u <= p.u_lo:
                continue
            if p.flip == 1:
                length = min(u, p.u_hi, v - p.v_lo + p.u_lo) - p.u_lo
            else:
                length = min(u, p.u_hi) - max(p.u_lo, p.u_lo + p.v_hi - v)
            if length > 0:
                total += length
        return total

    def cdf_array(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.zeros(np.broadcast(u, v).shape)
        for p in self.pieces:
            if p.width == 0:
                continue
            u_lo, u_hi, v_lo, v_hi = float(p.u_lo), float(p.u_hi), float(p.v_lo), float(p.v_hi)
            if p.flip == 1:
                length = np.minimum(np.minimum(u, u_hi), v - v_lo + u_lo) - u_lo
            else:
                length = np.minimum(u, u_hi) - np.maximum(u_lo, u_lo + v_hi - v)
            out += np.maximum(length, 0.0)
        return out

    def _sample(self, rng, count):
        u = rng.random(count)
        return u, self.h_array(u)

    def reflected(self, axis: int) -> "ShuffleOfM":
        """The reflected shuffle, piece for piece (no normalisation)."""
        n = self.n
        if axis == 2:
            return ShuffleOfM(self.splits, tuple(n + 1 - p for p in self.perm), tuple(-f for f in self.flips))
        if axis == 1:
            splits = tuple(1 - x for x in reversed(self.splits))
            perm = tuple(reversed(self.perm))
            flips = tuple(-f for f in reversed(self.flips))
            return ShuffleOfM(splits, perm, flips)
        raise ValidationError(f"reflection axis must be 1 or 2, got {axis!r}")


IDENTITY = ShuffleOfM((), (1,), (1,))
ANTI_IDENTITY = ShuffleOfM((), (1,), (-1,))


def h_map(s: ShuffleOfM, u) -> Scalar:
    return s.h(as_scalar(u))


def _same(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(a - b) <= FLOAT_TOL


def _pieces(expr: CopulaExpr) -> List[Piece]:
    if isinstance(expr, ShuffleOfM):
        return list(expr.pieces)
    if isinstance(expr, Base):
        if expr.kind == "M":
            return list(IDENTITY.pieces)
        if expr.kind == "W":
            return list(ANTI_IDENTITY.pieces)
        raise NotAShuffle("the product copula has no shuffle normal form")
    if isinstance(expr, Ordinal):
        out = []
        cursor = Fraction(0)
        for blk in expr.blocks:
            if blk.a > cursor:
                out.append(Piece(cursor, blk.a, cursor, blk.a, 1))
            a, w = blk.a, blk.width
            for p in _pieces(blk.summand):
                out.append(Piece(a + w * p.u_lo, a + w * p.u_hi, a + w * p.v_lo, a + w * p.v_hi, p.flip))
            cursor = blk.b
        if cursor < 1:
            out.append(Piece(cursor, Fraction(1), cursor, Fraction(1), 1))
        return out
    if isinstance(expr, Reflect):
        inner = _pieces(expr.of)
        if expr.axis == 2:
            return [Piece(p.u_lo, p.u_hi, 1 - p.v_hi, 1 - p.v_lo, -p.flip) for p in inner]
        return [Piece(1 - p.u_hi, 1 - p.u_lo, p.v_lo, p.v_hi, -p.flip) for p in inner]
    if isinstance(expr, Convex):
        live = [c for w, c in expr.parts if w != 0]
        if len(live) == 1:
            return _pieces(live[0])
        raise NotAShuffle("a proper mixture is not supported on a graph")
    raise NotAShuffle(f"{type(expr).__name__} has no shuffle normal form")


def from_pieces(pieces: Sequence[Piece]) -> ShuffleOfM:
    """Canonical shuffle from support pieces: drop empty pieces, merge collinear neighbours.

    In float mode pieces narrower than the float tolerance count as empty.
    """
    live = sorted((p for p in pieces if p.width > 0 and not _same(p.u_lo, p.u_hi)), key=lambda p: p.u_lo)
    if not live:
        raise ConsistencyError("no pieces with positive width")
    merged = [live[0]]
    for p in live[1:]:
        q = merged[-1]
        if not _same(q.u_hi, p.u_lo):
            raise ConsistencyError(f"pieces do not tile the domain near {p.u_lo}")
        joins = p.flip == q.flip and (
            _same(q.v_hi, p.v_lo) if p.flip == 1 else _same(q.v_lo, p.v_hi)
        )
        if joins:
            lo, hi = (q.v_lo, p.v_hi) if p.flip == 1 else (p.v_lo, q.v_hi)
            merged[-1] = Piece(q.u_lo, p.u_hi, lo, hi, p.flip)
        else:
            merged.append(p)
    order = sorted(range(len(merged)), key=lambda i: merged[i].v_lo)
    perm = [0] * len(merged)
    for rank, i in enumerate(order):
        perm[i] = rank + 1
    splits = tuple(p.u_hi for p in merged[:-1])
    result = ShuffleOfM(splits, tuple(perm), tuple(p.flip for p in merged))
    for mine, theirs in zip(result.pieces, merged):
        if not _same(mine.v_lo, theirs.v_lo):
            raise ConsistencyError("image bands of the pieces do not tile [0, 1]")
    return result


def as_shuffle(expr: CopulaExpr) -> ShuffleOfM:
    """Canonical shuffle-of-M form of *expr*, or :class:`NotAShuffle`."""
    return from_pieces(_pieces(expr))


def is_shuffle(expr: CopulaExpr) -> bool:
    try:
        _pieces(expr)
    except NotAShuffle:
        return False
    return True
