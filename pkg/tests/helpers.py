"""Random copula expressions for property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from concordia.core import M, Pi, ShuffleOfM, W, convex, ordinal, reflect

BASES = (M, W, Pi)


def random_shuffle(rng: random.Random, max_pieces: int = 6, denom: int = 48) -> ShuffleOfM:
    n = rng.randint(1, max_pieces)
    cuts = sorted(Fraction(rng.randint(0, denom), denom) for _ in range(n - 1))
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    flips = tuple(rng.choice((1, -1)) for _ in range(n))
    return ShuffleOfM(tuple(cuts), tuple(perm), flips)


def random_float_shuffle(rng: random.Random, max_pieces: int = 6) -> ShuffleOfM:
    n = rng.randint(1, max_pieces)
    cuts = sorted(rng.random() for _ in range(n - 1))
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return ShuffleOfM(tuple(cuts), tuple(perm), tuple(rng.choice((1, -1)) for _ in range(n)))


def random_graph_expr(rng: random.Random, depth: int = 2):
    """Expression with a shuffle normal form (no mixtures, no Pi)."""
    roll = rng.random()
    if depth == 0 or roll < 0.4:
        return rng.choice((M, W, random_shuffle(rng)))
    if roll < 0.75:
        return random_ordinal(rng, lambda: random_graph_expr(rng, depth - 1))
    return reflect(random_graph_expr(rng, depth - 1), rng.choice((1, 2)))


def random_ordinal(rng: random.Random, leaf, max_blocks: int = 3, denom: int = 24):
    k = rng.randint(1, max_blocks)
    pts = sorted({Fraction(rng.randint(0, denom), denom) for _ in range(2 * k)})
    blocks = []
    for a, b in zip(pts[0::2], pts[1::2]):
        if a < b:
            blocks.append((a, b, leaf()))
    if not blocks:
        blocks.append((Fraction(0), Fraction(1), leaf()))
    return ordinal(blocks)


def random_expr(rng: random.Random, depth: int = 2, mixtures: bool = True):
    """Any expression: shuffles, bases, ordinal sums, reflections, mixtures."""
    roll = rng.random()
    if depth == 0 or roll < 0.35:
        return rng.choice(BASES + (random_shuffle(rng, 4),))
    if roll < 0.6:
        return random_ordinal(rng, lambda: random_expr(rng, depth - 1, mixtures))
    if roll < 0.8 or not mixtures:
        return reflect(random_expr(rng, depth - 1, mixtures), rng.choice((1, 2)))
    w = Fraction(rng.randint(1, 7), 8)
    return convex([(w, random_expr(rng, depth - 1, False)), (1 - w, random_expr(rng, depth - 1, False))])


@st.composite
def shuffles(draw, max_pieces: int = 6, denom: int = 64):
    n = draw(st.integers(1, max_pieces))
    cuts = sorted(draw(st.lists(st.integers(0, denom), min_size=n - 1, max_size=n - 1)))
    perm = draw(st.permutations(list(range(1, n + 1))))
    flips = draw(st.lists(st.sampled_from((1, -1)), min_size=n, max_size=n))
    return ShuffleOfM(tuple(Fraction(c, denom) for c in cuts), tuple(perm), tuple(flips))


@st.composite
def expressions(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_expr(random.Random(seed))


@st.composite
def graph_expressions(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_graph_expr(random.Random(seed))
