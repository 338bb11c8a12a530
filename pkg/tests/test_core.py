import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from concordia.core import (
    ANTI_DIAGONAL,
    DIAGONAL,
    M,
    Pi,
    ShuffleOfM,
    W,
    as_shuffle,
    convex,
    diagonal,
    evaluate,
    h_map,
    is_shuffle,
    line_integral,
    opposite_diagonal,
    ordinal,
    rect_volume,
    reflect,
    sample,
    support_path,
)
from concordia.exceptions import NotAShuffle, ValidationError
from concordia.families import c_b, d_b

from helpers import expressions, random_shuffle, shuffles
from oracles import rasterize_shuffle, trapezoid_along

C14 = c_b(F(1, 4))
GRID = np.linspace(0, 1, 101)
UU, VV = np.meshgrid(GRID, GRID, indexing="ij")


def grid_equal(a, b, tol=1e-12):
    assert_allclose(a.cdf_array(UU, VV), b.cdf_array(UU, VV), atol=tol, rtol=0)


# ---------------------------------------------------------------- evaluation


@pytest.mark.parametrize(
    "expr, u, v, expected",
    [
        (M, F(3, 10), F(7, 10), F(3, 10)),
        (W, F(3, 10), F(3, 5), 0),
        (C14, F(1, 2), F(1, 2), F(1, 2)),
        (C14, F(1, 4), F(1, 4), 0),
        (ordinal([(F(1, 4), F(3, 4), Pi)]), F(1, 2), F(1, 2), F(3, 8)),
        (Pi, F(1, 3), F(3, 4), F(1, 4)),
    ],
)
def test_evaluate_examples(expr, u, v, expected):
    assert evaluate(expr, u, v) == expected


def test_float_inputs_give_floats():
    assert isinstance(evaluate(M, 0.3, 0.7), float)
    assert evaluate(M, 0.3, 0.7) == 0.3


@pytest.mark.parametrize(
    "expr, box, expected",
    [
        (Pi, (0, F(1, 2), 0, F(1, 2)), F(1, 4)),
        (M, (0, F(1, 2), F(1, 2), 1), 0),
        (C14, (0, F(1, 4), F(1, 4), F(1, 2)), F(1, 4)),
    ],
)
def test_rect_volume_examples(expr, box, expected):
    assert rect_volume(expr, *box) == expected


def test_rect_volume_matches_rasterised_segments():
    mass = rasterize_shuffle(C14, 8)
    for i in range(8):
        for j in range(8):
            vol = rect_volume(C14, F(i, 8), F(i + 1, 8), F(j, 8), F(j + 1, 8))
            assert float(vol) == pytest.approx(mass[i, j], abs=1e-12)


def test_rect_volume_rejects_reversed_box():
    with pytest.raises(ValueError):
        rect_volume(M, F(1, 2), 0, 0, 1)


# ---------------------------------------------------------------- shuffles


@pytest.mark.parametrize("u, expected", [(F(1, 10), F(7, 20)), (F(3, 10), F(1, 20))])
def test_h_map_examples(u, expected):
    assert h_map(C14, u) == expected


def test_h_map_identity():
    assert h_map(ShuffleOfM((), (1,), (1,)), 0.42) == 0.42


def test_h_map_breakpoint_convention():
    # pieces are half-open on the right, so a breakpoint belongs to the next piece
    s = ShuffleOfM((F(1, 2),), (2, 1), (1, 1))
    assert h_map(s, F(1, 2)) == 0
    assert h_map(s, 1) == F(1, 2)


@pytest.mark.parametrize(
    "splits, perm, flips",
    [
        ((F(1, 2),), (1, 1), (1, 1)),
        ((F(1, 2),), (1, 2), (1,)),
        ((F(3, 4), F(1, 4)), (1, 2, 3), (1, 1, 1)),
        ((F(1, 2),), (1, 2), (1, 0)),
        ((F(3, 2),), (1, 2), (1, 1)),
    ],
)
def test_shuffle_validation(splits, perm, flips):
    with pytest.raises(ValidationError):
        ShuffleOfM(splits, perm, flips)


def test_reflect_basics():
    grid_equal(reflect(M, 2), W)
    grid_equal(reflect(W, 2), M)
    grid_equal(reflect(M, 1), W)


def test_reflected_c_quarter_has_all_flips_negative():
    raw = C14.reflected(2)
    assert raw.n == 6 and all(f == -1 for f in raw.flips)
    # reversed image order: piece i lands where piece i did, mirrored
    assert [p.v_lo for p in raw.pieces] == [1 - p.v_hi for p in C14.pieces]
    grid_equal(raw, reflect(C14, 2))
    canon = as_shuffle(reflect(C14, 2))
    assert all(f == -1 for f in canon.flips)
    grid_equal(canon, reflect(C14, 2))


def test_reflect_rejects_bad_axis():
    with pytest.raises(ValidationError):
        reflect(M, 3)


@pytest.mark.parametrize(
    "expr, expected_n",
    [
        (ordinal([(0, 1, c_b(F(1, 8)))]), 6),
        (ordinal([(F(1, 4), F(3, 4), M)]), 1),
        (reflect(d_b(F(1, 4)), 2), 3),
        (ordinal([(0, F(1, 2), W), (F(1, 2), 1, W)]), 2),
    ],
)
def test_as_shuffle_examples(expr, expected_n):
    s = as_shuffle(expr)
    assert s.n == expected_n
    grid_equal(s, expr)


def test_as_shuffle_identity_ordinal_keeps_c_b():
    cb = c_b(F(1, 8))
    assert as_shuffle(ordinal([(0, 1, cb)])) == as_shuffle(cb)


def test_as_shuffle_rejects_pi_and_mixtures():
    with pytest.raises(NotAShuffle):
        as_shuffle(Pi)
    with pytest.raises(NotAShuffle):
        as_shuffle(convex([(F(1, 2), M), (F(1, 2), W)]))
    assert not is_shuffle(ordinal([(0, F(1, 2), Pi)]))


def test_ordinal_validation():
    with pytest.raises(ValidationError):
        ordinal([(0, F(1, 2), Pi), (F(1, 4), 1, Pi)])
    with pytest.raises(ValidationError):
        ordinal([(F(1, 2), F(1, 2), Pi)])
    with pytest.raises(ValidationError):
        convex([(F(1, 2), M), (F(1, 3), W)])
    with pytest.raises(ValidationError):
        convex([(F(3, 2), M), (F(-1, 2), W)])


# ---------------------------------------------------------------- sections


def test_diagonal_of_c_quarter():
    d = diagonal(C14)
    assert d(F(3, 5)) == F(1, 2)
    assert d(F(1, 8)) == 0
    assert d(F(3, 8)) == F(1, 4)
    assert d(F(7, 8)) == F(3, 4)
    # four branches: 0, 2u - 1/2, 1/2, 2u - 1
    assert len(d.simplified().breakpoints) == 5


def test_opposite_diagonal_of_d_b_is_tent():
    w = opposite_diagonal(d_b(F(1, 4))).simplified()
    assert list(w.breakpoints) == [0, F(1, 2), 1]
    assert list(w.values) == [0, F(1, 2), 0]


def test_diagonal_of_w():
    d = diagonal(W).simplified()
    assert list(d.breakpoints) == [0, F(1, 2), 1]
    assert list(d.values) == [0, 0, 1]


def test_line_integral_examples():
    assert line_integral(M, DIAGONAL) == F(1, 2)
    assert line_integral(C14, support_path(C14)) == F(3, 8)


def test_line_integral_anti_diagonal_against_refinement():
    exact = line_integral(C14, ANTI_DIAGONAL)
    # all kinks sit on multiples of 1/64, so the 65-point trapezoid is exact
    approx = trapezoid_along(C14, 0.0, 1.0, 1.0, 0.0, 65)
    assert abs(float(exact) - approx) <= 1e-12


@given(shuffles(max_pieces=5))
def test_line_integral_matches_dense_trapezoid(s):
    for path, ends in ((DIAGONAL, (0.0, 0.0, 1.0, 1.0)), (ANTI_DIAGONAL, (0.0, 1.0, 1.0, 0.0))):
        exact = float(line_integral(s, path))
        assert exact == pytest.approx(trapezoid_along(s, *ends, 2**16 + 1), abs=1e-9)


# ---------------------------------------------------------------- sampling


def test_sample_m_on_diagonal():
    xy = sample(M, 3, 1000)
    assert np.array_equal(xy[:, 0], xy[:, 1])


def test_sample_shuffle_on_graph():
    xy = sample(C14, 7, 2000)
    assert all(v == h_map(C14, u) for u, v in xy[:200])
    assert np.array_equal(C14.h_array(xy[:, 0]), xy[:, 1])


def test_sample_independence_quadrant():
    xy = sample(Pi, 7, 10**6)
    est = np.mean((xy[:, 0] <= 0.5) & (xy[:, 1] <= 0.5))
    assert abs(est - 0.25) <= 3 * np.sqrt(0.25 / 10**6)


def test_sample_is_deterministic():
    e = ordinal([(F(1, 4), F(3, 4), Pi)])
    assert np.array_equal(sample(e, 11, 500), sample(e, 11, 500))
    assert not np.array_equal(sample(e, 11, 500), sample(e, 12, 500))


@pytest.mark.parametrize("expr", [M, W, Pi, C14, ordinal([(F(1, 4), F(3, 4), Pi)]), reflect(C14, 1)])
def test_sample_has_uniform_margins(expr):
    xy = sample(expr, 5, 20000)
    for col in xy.T:
        hist, _ = np.histogram(col, bins=10, range=(0, 1))
        assert np.all(np.abs(hist / 20000 - 0.1) < 0.012)


# ---------------------------------------------------------------- properties

UV = st.tuples(st.floats(0, 1), st.floats(0, 1))


@given(expressions(), st.lists(UV, min_size=1, max_size=30))
def test_frechet_sandwich(expr, pts):
    u = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    c = expr.cdf_array(u, v)
    assert np.all(c >= np.maximum(u + v - 1, 0) - 1e-12)
    assert np.all(c <= np.minimum(u, v) + 1e-12)


@given(expressions(), st.integers(0, 2**32 - 1))
def test_two_increasing(expr, seed):
    rng = np.random.default_rng(seed)
    a = np.sort(rng.random((2, 200)), axis=0)
    b = np.sort(rng.random((2, 200)), axis=0)
    vol = (
        expr.cdf_array(a[1], b[1]) - expr.cdf_array(a[0], b[1]) - expr.cdf_array(a[1], b[0]) + expr.cdf_array(a[0], b[0])
    )
    assert vol.min() >= -1e-12


@given(expressions())
def test_uniform_marginals_exact(expr):
    for k in range(0, 101, 5):
        t = F(k, 100)
        assert evaluate(expr, t, 1) == t
        assert evaluate(expr, 1, t) == t


@given(expressions(), st.sampled_from((1, 2)))
def test_reflection_is_an_involution(expr, axis):
    twice = reflect(reflect(expr, axis), axis)
    assert_allclose(twice.cdf_array(UU, VV), expr.cdf_array(UU, VV), atol=1e-12)


@given(st.integers(0, 10**9))
def test_as_shuffle_soundness(seed):
    from helpers import random_graph_expr

    expr = random_graph_expr(random.Random(seed))
    grid_equal(as_shuffle(expr), expr)


@given(shuffles())
def test_shuffle_mass_on_segments(s):
    # total mass is carried by the pieces: rasterised masses have uniform margins
    mass = rasterize_shuffle(s, 16)
    assert_allclose(mass.sum(axis=0), 1 / 16, atol=1e-12)
    assert_allclose(mass.sum(axis=1), 1 / 16, atol=1e-12)
    assert sum(p.width for p in s.pieces) == 1


@given(shuffles())
def test_h_is_measure_preserving(s):
    u = (np.arange(4096) + 0.5) / 4096
    hist, _ = np.histogram(s.h_array(u), bins=8, range=(0, 1))
    assert np.all(np.abs(hist - 512) <= 2 * s.n + 2)


def test_random_shuffle_helper_valid():
    rng = random.Random(0)
    for _ in range(20):
        s = random_shuffle(rng)
        grid_equal(as_shuffle(s), s)
