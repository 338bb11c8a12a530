"""Copula expression trees.

Every node is an immutable dataclass that evaluates to a bivariate copula.
Scalar evaluation (:meth:`CopulaExpr.cdf`) keeps rational inputs exact;
:meth:`CopulaExpr.cdf_array` is the vectorised float64 path used by the
checkerboard oracle and by plotting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Tuple

import numpy as np

from .._scalar import FLOAT_TOL, Scalar, as_scalar, is_exact
from ..exceptions import ValidationError

HALF = Fraction(1, 2)


class CopulaExpr:
    """Common base of all expression nodes."""

    __slots__ = ()

    def cdf(self, u, v) -> Scalar:
        raise NotImplementedError

    def cdf_array(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _sample(self, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def children(self) -> Tuple["CopulaExpr", ...]:
        return ()

    def own_params(self) -> Tuple[Scalar, ...]:
        return ()

    def __call__(self, u, v) -> Scalar:
        return self.cdf(u, v)


def iter_params(expr: CopulaExpr) -> Iterator[Scalar]:
    yield from expr.own_params()
    for child in expr.children():
        yield from iter_params(child)


def is_rational(expr: CopulaExpr) -> bool:
    """True when every numeric parameter of *expr* is an exact rational."""
    return all(is_exact(p) for p in iter_params(expr))


@dataclass(frozen=True)
class Base(CopulaExpr):
    """One of the three fundamental copulas ``M``, ``W`` and ``Pi``."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("M", "W", "Pi"):
            raise ValidationError(f"unknown base copula {self.kind!r}")

    def cdf(self, u, v):
        if self.kind == "M":
            return min(u, v)
        if self.kind == "W":
            return max(u + v - 1, 0 * u)
        return u * v

    def cdf_array(self, u, v):
        if self.kind == "M":
            return np.minimum(u, v)
        if self.kind == "W":
            return np.maximum(u + v - 1.0, 0.0)
        return u * v

    def _sample(self, rng, count):
        u = rng.random(count)
        if self.kind == "M":
            return u, u.copy()
        if self.kind == "W":
            return u, 1.0 - u
        return u, rng.random(count)

    def __repr__(self):
        return self.kind


M = Base("M")
W = Base("W")
Pi = Base("Pi")


@dataclass(frozen=True)
class OrdinalBlock:
    a: Scalar
    b: Scalar
    summand: CopulaExpr

    def __post_init__(self):
        object.__setattr__(self, "a", as_scalar(self.a))
        object.__setattr__(self, "b", as_scalar(self.b))
        if not (0 <= self.a < self.b <= 1):
            raise ValidationError(
                f"ordinal block needs 0 <= a < b <= 1, got ({self.a}, {self.b})"
            )
        if not isinstance(self.summand, CopulaExpr):
            raise ValidationError("ordinal summand must be a copula expression")

    @property
    def width(self):
        return self.b - self.a


@dataclass(frozen=True)
class Ordinal(CopulaExpr):
    """M-ordinal sum: ``M`` outside the squares ``[a_k, b_k]^2``, rescaled summands inside."""

    blocks: Tuple[OrdinalBlock, ...]

    def __post_init__(self):
        blocks = tuple(sorted(self.blocks, key=lambda blk: blk.a))
        if not blocks:
            raise ValidationError("ordinal sum needs at least one block")
        for left, right in zip(blocks, blocks[1:]):
            if right.a < left.b:
                raise ValidationError(
                    f"ordinal blocks ({left.a}, {left.b}) and ({right.a}, {right.b}) overlap"
                )
        object.__setattr__(self, "blocks", blocks)

    def children(self):
        return tuple(blk.summand for blk in self.blocks)

    def own_params(self):
        return tuple(x for blk in self.blocks for x in (blk.a, blk.b))

    def cdf(self, u, v):
        for blk in self.blocks:
            if blk.a <= u <= blk.b and blk.a <= v <= blk.b:
                w = blk.width
                return blk.a + w * blk.summand.cdf((u - blk.a) / w, (v - blk.a) / w)
        return min(u, v)

    def cdf_array(self, u, v):
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        out = np.array(np.minimum(u, v), dtype=float)
        for blk in self.blocks:
            a, b = float(blk.a), float(blk.b)
            mask = (u >= a) & (u <= b) & (v >= a) & (v <= b)
            if np.any(mask):
                w = b - a
                out[mask] = a + w * blk.summand.cdf_array((u[mask] - a) / w, (v[mask] - a) / w)
        return out

    def _sample(self, rng, count):
        u = rng.random(count)
        v = u.copy()
        for blk in self.blocks:
            a, b = float(blk.a), float(blk.b)
            idx = np.nonzero((u >= a) & (u < b))[0]
            if idx.size:
                s, r = blk.summand._sample(rng, idx.size)
                u[idx] = a + (b - a) * s
                v[idx] = a + (b - a) * r
        return u, v


@dataclass(frozen=True)
class Reflect(CopulaExpr):
    """``axis=1``: ``v - C(1-u, v)``; ``axis=2``: ``u - C(u, 1-v)``."""

    axis: int
    of: CopulaExpr

    def __post_init__(self):
        if self.axis not in (1, 2):
            raise ValidationError(f"reflection axis must be 1 or 2, got {self.axis!r}")
        if not isinstance(self.of, CopulaExpr):
            raise ValidationError("reflect needs a copula expression")

    def children(self):
        return (self.of,)

    def cdf(self, u, v):
        if self.axis == 1:
            return v - self.of.cdf(1 - u, v)
        return u - self.of.cdf(u, 1 - v)

    def cdf_array(self, u, v):
        if self.axis == 1:
            return v - self.of.cdf_array(1.0 - u, v)
        return u - self.of.cdf_array(u, 1.0 - v)

    def _sample(self, rng, count):
        u, v = self.of._sample(rng, count)
        if self.axis == 1:
            return 1.0 - u, v
        return u, 1.0 - v


@dataclass(frozen=True)
class Convex(CopulaExpr):
    """Finite mixture ``sum_i w_i C_i`` with nonnegative weights summing to one."""

    parts: Tuple[Tuple[Scalar, CopulaExpr], ...]

    def __post_init__(self):
        parts = tuple((as_scalar(w), c) for w, c in self.parts)
        if not parts:
            raise ValidationError("convex combination needs at least one part")
        for w, c in parts:
            if w < 0:
                raise ValidationError(f"negative mixture weight {w}")
            if not isinstance(c, CopulaExpr):
                raise ValidationError("mixture parts must be copula expressions")
        total = sum(w for w, _ in parts)
        if all(is_exact(w) for w, _ in parts):
            if total != 1:
                raise ValidationError(f"mixture weights sum to {total}, not 1")
        elif abs(total - 1) > FLOAT_TOL:
            raise ValidationError(f"mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "parts", parts)

    @property
    def weights(self):
        return tuple(w for w, _ in self.parts)

    def children(self):
        return tuple(c for _, c in self.parts)

    def own_params(self):
        return self.weights

    def cdf(self, u, v):
        return sum((w * c.cdf(u, v) for w, c in self.parts), 0 * u)

    def cdf_array(self, u, v):
        out = np.zeros(np.broadcast(u, v).shape)
        for w, c in self.parts:
            out += float(w) * c.cdf_array(u, v)
        return out

    def _sample(self, rng, count):
        weights = np.array([float(w) for w in self.weights])
        choice = rng.choice(len(self.parts), size=count, p=weights / weights.sum())
        u = np.empty(count)
        v = np.empty(count)
        for k, (_, c) in enumerate(self.parts):
            idx = np.nonzero(choice == k)[0]
            if idx.size:
                u[idx], v[idx] = c._sample(rng, idx.size)
        return u, v


def ordinal(blocks: Sequence) -> Ordinal:
    """Build an ordinal sum from ``(a, b, summand)`` triples or blocks."""
    return Ordinal(tuple(blk if isinstance(blk, OrdinalBlock) else OrdinalBlock(*blk) for blk in blocks))


def nest_middle(a, summand: CopulaExpr) -> CopulaExpr:
    """Ordinal sum of a single copula on the centred interval ``(a, 1 - a)``.

    For ``a = 1/2`` the interval is empty and the result is ``M``.
    """
    a = as_scalar(a)
    if not 0 <= a <= HALF:
        raise ValidationError(f"nest_middle needs a in [0, 1/2], got {a}")
    if a == HALF or (not is_exact(a) and abs(a - 0.5) <= FLOAT_TOL):
        return M
    return Ordinal((OrdinalBlock(a, 1 - a, summand),))


def reflect(expr: CopulaExpr, axis: int) -> Reflect:
    return Reflect(axis, expr)


def convex(parts: Sequence) -> Convex:
    return Convex(tuple((w, c) for w, c in parts))


def evaluate(expr: CopulaExpr, u, v) -> Scalar:
    """C(u, v) for scalar arguments in the unit square."""
    u, v = as_scalar(u), as_scalar(v)
    if not (0 <= u <= 1 and 0 <= v <= 1):
        raise ValueError(f"({u}, {v}) lies outside the unit square")
    return expr.cdf(u, v)


def rect_volume(expr: CopulaExpr, u1, u2, v1, v2) -> Scalar:
    """C-volume of the rectangle ``[u1, u2] x [v1, v2]``."""
    u1, u2, v1, v2 = (as_scalar(x) for x in (u1, u2, v1, v2))
    if u1 > u2 or v1 > v2:
        raise ValueError(f"inverted rectangle [{u1}, {u2}] x [{v1}, {v2}]")
    return (
        evaluate(expr, u2, v2) - evaluate(expr, u2, v1) - evaluate(expr, u1, v2) + evaluate(expr, u1, v1)
    )


def sample(expr: CopulaExpr, seed: int, count: int) -> np.ndarray:
    """Draw ``count`` pairs from *expr*; an array of shape ``(count, 2)``.

    The stream is ``numpy.random.Generator(Philox(SeedSequence(seed)))``, so a
    fixed seed reproduces the same pairs bit for bit.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    if count == 0:
        return np.empty((0, 2))
    u, v = expr._sample(rng, count)
    return np.column_stack([u, v])
