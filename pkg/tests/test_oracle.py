import random
from fractions import Fraction as F

import numpy as np
import pytest
from numpy.testing import assert_allclose

from concordia.core import M, Pi, W, ordinal
from concordia.exceptions import ValidationError
from concordia.families import c_b, l_ab
from concordia.measures import FIELDS, all_measures
from concordia.oracle import Checkerboard, McEstimate, cb_cdf, cb_measures, checkerboard_of, mc_measures

from helpers import random_shuffle
from oracles import bilinear_cdf, quadrature_measures, rasterize_shuffle

C14 = c_b(F(1, 4))


def test_checkerboard_of_pi_and_m():
    assert_allclose(checkerboard_of(Pi, 4).mass, np.full((4, 4), 1 / 16), atol=1e-15)
    assert_allclose(checkerboard_of(M, 4).mass, np.eye(4) / 4, atol=1e-15)


def test_checkerboard_matches_segment_rasterisation():
    cb = checkerboard_of(C14, 8)
    assert_allclose(cb.mass.sum(axis=0), 1 / 8, atol=1e-12)
    assert_allclose(cb.mass.sum(axis=1), 1 / 8, atol=1e-12)
    assert_allclose(cb.mass, rasterize_shuffle(C14, 8), atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_checkerboard_matches_rasterisation_random(seed):
    s = random_shuffle(random.Random(seed))
    assert_allclose(checkerboard_of(s, 12).mass, rasterize_shuffle(s, 12), atol=1e-12)


def test_checkerboard_validation():
    with pytest.raises(ValidationError):
        Checkerboard(2, np.array([[0.5, 0.0], [0.0, 0.4]]))
    with pytest.raises(ValidationError):
        Checkerboard(2, np.array([[0.6, -0.1], [-0.1, 0.6]]))
    with pytest.raises(ValidationError):
        Checkerboard(3, np.eye(2) / 2)
    with pytest.raises(ValueError):
        checkerboard_of(M, 0)


def test_csv_round_trip():
    cb = checkerboard_of(C14, 8)
    text = cb.to_csv()
    assert text.startswith("n=8\n")
    assert np.array_equal(Checkerboard.from_csv(text).mass, cb.mass)
    with pytest.raises(ValidationError):
        Checkerboard.from_csv("1,2\n")


def test_n1_checkerboard_is_independence():
    mv = cb_measures(checkerboard_of(M, 1))
    assert_allclose(mv.as_tuple(), 0, atol=1e-15)


def test_cb_cdf_on_grid_nodes():
    cb = checkerboard_of(C14, 8)
    for u in (0, 0.125, 0.5, 1):
        for v in (0, 0.375, 1):
            assert cb_cdf(cb, u, v) == pytest.approx(float(C14.cdf(u, v)), abs=1e-14)


def test_grid_aligned_block_of_independence():
    # cells of the block carry Pi exactly, but the M parts on [0,1/4] and [3/4,1]
    # are smeared uniformly over their cells, so the result is a three-block
    # ordinal sum of Pi rather than the original copula
    mv = cb_measures(checkerboard_of(ordinal([(F(1, 4), F(3, 4), Pi)]), 4))
    assert mv.phi == pytest.approx(0.625, abs=1e-14)
    three_pi = ordinal([(0, F(1, 4), Pi), (F(1, 4), F(3, 4), Pi), (F(3, 4), 1, Pi)])
    exact = all_measures(three_pi)
    assert_allclose(mv.as_tuple(), [float(x) for x in exact.as_tuple()], atol=1e-14)


@pytest.mark.parametrize("n", [2, 4, 8])
def test_m_checkerboard_small_n(n):
    # the checkerboard of M is the ordinal sum of n independent blocks
    mv = cb_measures(checkerboard_of(M, n))
    ref = all_measures(ordinal([(F(k, n), F(k + 1, n), Pi) for k in range(n)]))
    assert_allclose(mv.as_tuple(), [float(x) for x in ref.as_tuple()], atol=1e-14)
    assert mv.rho == pytest.approx(1 - 1 / n**2) and mv.tau == pytest.approx(1 - 1 / n)


def test_m_checkerboard_monotone():
    prev = None
    for n in (2, 4, 8, 16):
        mv = cb_measures(checkerboard_of(M, n))
        vals = np.array([mv.tau, mv.rho, mv.phi, mv.gamma, mv.xi])
        assert np.all(vals < 1)
        if prev is not None:
            assert np.all(vals > prev)
        prev = vals
    assert_allclose(prev, 1, atol=0.2)


def test_xi_convergence_monotone_for_shuffle():
    vals = [cb_measures(checkerboard_of(c_b(F(1, 8)), n)).xi for n in (64, 128, 256)]
    assert_allclose(vals, [0.984375, 0.9921875, 0.99609375], atol=1e-12)
    assert vals[0] < vals[1] < vals[2] < 1


@pytest.mark.parametrize(
    "mass",
    [
        np.array([[0.5, 0.0], [0.0, 0.5]]),
        np.array([[0.0, 0.5], [0.5, 0.0]]),
        np.array([[0.3, 0.2], [0.2, 0.3]]),
        np.array([[0.1, 0.4], [0.4, 0.1]]),
    ],
)
def test_cell_formulas_against_quadrature(mass):
    mv = cb_measures(Checkerboard(2, mass))
    ref = quadrature_measures(mass, points=1000)
    for name in FIELDS:
        assert getattr(mv, name) == pytest.approx(ref[name], abs=2e-5), name


def test_bilinear_oracle_matches_cb_cdf():
    cb = checkerboard_of(l_ab(F(1, 16), F(1, 8)), 16)
    rng = np.random.default_rng(3)
    for u, v in rng.random((20, 2)):
        assert bilinear_cdf(cb.mass, u, v) == pytest.approx(cb_cdf(cb, u, v), abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_checkerboard_consistency_random_shuffles(seed):
    s = random_shuffle(random.Random(100 + seed))
    exact = all_measures(s)
    cb = cb_measures(checkerboard_of(s, 1024))
    for name in ("rho", "tau", "phi", "gamma", "beta", "xi"):
        assert abs(float(getattr(exact, name)) - getattr(cb, name)) <= 5e-3


# ---------------------------------------------------------------- Monte Carlo


def test_mc_independence_tau():
    est = mc_measures(Pi, 10**6, 42)["tau"]
    assert est.covers(0)


def test_mc_m_phi():
    est = mc_measures(M, 10**5, 1)["phi"]
    assert est.value == pytest.approx(1.0, abs=1e-12) or est.covers(1)


def test_mc_l_family_tau():
    est = mc_measures(l_ab(F(1, 8), F(1, 4)), 10**6, 7)["tau"]
    assert est.covers(F(-1, 4))


def test_mc_determinism():
    a = mc_measures(C14, 10**4, 9)
    b = mc_measures(C14, 10**4, 9)
    assert all(a[k] == b[k] for k in FIELDS)
    assert a["tau"].to_dict()["seed"] == 9


def test_mc_needs_samples():
    with pytest.raises(ValueError):
        mc_measures(M, 50, 0)
    small = mc_measures(Pi, 100, 0)["tau"]
    assert small.samples == 100 and small.stderr > 0


def test_mc_estimate_covers():
    e = McEstimate(0.5, 0.01, 1000, 1)
    assert e.covers(0.53) and not e.covers(0.55)


def test_mc_c_quarter_all_fields():
    est = mc_measures(C14, 10**6, 42)
    exact = all_measures(C14)
    for name in ("rho", "tau", "phi", "gamma", "beta"):
        assert est[name].covers(getattr(exact, name)), name
    # the adjacent-rank xi estimator is biased by O(pieces / batch size)
    assert abs(est["xi"].value - 1) <= 3 * 7 / 10**4
