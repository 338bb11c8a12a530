import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from concordia.core import M, W, Convex, as_shuffle, is_rational, reflect
from concordia.exceptions import OutOfFace, OutOfRegion
from concordia.families import f_ab, g_b, h_ab
from concordia.measures import all_measures
from concordia.oracle import cb_measures, checkerboard_of
from concordia.region import OMEGA, RegionPoint, contains, involution_A, sample_points
from concordia.synthesis import _mixing_weight, attain, attain_face

GRID = np.linspace(0, 1, 101)
UU, VV = np.meshgrid(GRID, GRID, indexing="ij")
V = {k: RegionPoint(*v) for k, v in OMEGA.vertices.items()}


def face_point(face, weights):
    """Convex combination of a face's vertices."""
    cycle = OMEGA.faces[face]
    w = [F(x) for x in weights[: len(cycle)]]
    total = sum(w)
    coords = [sum(wi * OMEGA.vertices[v][k] for wi, v in zip(w, cycle)) / total for k in range(3)]
    return RegionPoint(*coords)


def test_attain_face_examples():
    r = attain_face("F6", V["P3"])
    assert r.recipe == "F6:A(a=0,b=0)"
    assert r.achieved.point == (F(-1, 2), F(-1, 2), 0) and r.residual == 0

    r = attain_face("F4", V["P1"])
    assert r.expr == W and r.residual == 0

    r = attain_face("F7", (F(1, 4), F(1, 2), 0))
    assert r.recipe == "F7:H(a=0,b=0)"
    assert_allclose(r.expr.cdf_array(UU, VV), g_b(0).cdf_array(UU, VV), atol=1e-15)


def test_attain_face_rejects_off_face():
    with pytest.raises(OutOfFace):
        attain_face("F6", (0, 0, 0))
    with pytest.raises(OutOfFace):
        attain_face("F6", (1, 1, -1))


@pytest.mark.parametrize("face", [f"F{k}" for k in range(1, 8)])
@pytest.mark.parametrize("seed", range(6))
def test_attain_face_exact_on_random_face_points(face, seed):
    rng = random.Random(seed)
    weights = [rng.randint(1, 9) for _ in range(4)]
    p = face_point(face, weights)
    r = attain_face(face, p)
    if is_rational(r.expr):
        assert r.residual == 0
        assert r.achieved.point == tuple(p)
    else:
        # the face parameters involve square roots that are irrational here
        assert r.residual <= 1e-15


@pytest.mark.parametrize("face", ["F4", "F6", "F7"])
def test_attain_face_exact_at_perfect_squares(face):
    # centroids of these faces invert to rational parameters
    p = face_point(face, [1, 1, 1])
    r = attain_face(face, p)
    assert is_rational(r.expr) == (r.residual == 0)


@pytest.mark.parametrize("face, base", [("F2", "F6"), ("F3", "F4"), ("F1", "F7")])
def test_reflection_duality(face, base):
    p = face_point(face, [2, 3, 5])
    mirrored = attain_face(face, p).expr
    original = attain_face(base, involution_A(p)).expr
    assert_allclose(mirrored.cdf_array(UU, VV), reflect(original, 2).cdf_array(UU, VV), atol=1e-14)


def test_attain_examples():
    assert attain((1, 1, 1)).expr == M
    r = attain((F(1, 4), F(1, 2), 0))
    assert r.achieved.point == (F(1, 4), F(1, 2), 0) and r.residual == 0


def test_attain_origin_mixture():
    r = attain((0, 0, 0))
    assert isinstance(r.expr, Convex)
    assert r.residual <= 1e-9
    assert "⊕ t=" in r.recipe
    cb = cb_measures(checkerboard_of(r.expr, 1024))
    assert max(abs(cb.phi), abs(cb.gamma), abs(cb.tau)) <= 5e-3


def test_attain_rational_interior_point_exact_when_possible():
    r = attain((0, 0, F(1, 10)))
    assert float(r.residual) <= 1e-9


def test_attain_outside():
    with pytest.raises(OutOfRegion):
        attain((1, 1, -1))


def test_attain_float_targets():
    pts = sample_points(200, 11)
    worst = 0.0
    for p in pts:
        r = attain(tuple(float(x) for x in p))
        worst = max(worst, float(r.residual))
    assert worst <= 1e-9


@given(st.tuples(st.floats(-0.5, 1), st.floats(-1, 1), st.floats(-1, 1)))
def test_attain_round_trip_property(p):
    if contains(p).status == "outside":
        with pytest.raises(OutOfRegion):
            attain(p)
        return
    r = attain(p)
    check = all_measures(r.expr)
    assert max(abs(float(a) - b) for a, b in zip(check.point, p)) <= 1e-9


def test_result_json_shape():
    d = attain((0, 0, 0)).to_dict()
    assert set(d) == {"target", "achieved", "residual", "recipe", "expr"}
    assert d["expr"]["type"] == "convex"


@pytest.mark.parametrize(
    "t0, t1, q, target",
    [
        (F(-1, 3), F(1, 3), F(0), F(0)),
        (-0.3, 0.4, 0.05, 0.1),
        (0.1, 0.1 + 1e-14, 0.1, 0.1),
        (F(-1, 2), F(1, 2), F(1, 2), F(1, 4)),
    ],
)
def test_mixing_weight_solves_quadratic(t0, t1, q, target):
    t = _mixing_weight(t0, t1, q, target)
    assert 0 <= t <= 1
    got = t * t * t1 + (1 - t) ** 2 * t0 + 2 * t * (1 - t) * q
    assert float(got) == pytest.approx(float(target), abs=1e-12)


def test_mixing_weight_prefers_smaller_root():
    # q = -1: (2t - 1)^2 has the double root 1/2
    t = _mixing_weight(1.0, 1.0, -1.0, 0.0)
    assert t == pytest.approx(0.5)
    # q = 0: t^2 + (1 - t)^2 = 3/4 at t = (1 +- 1/sqrt2)/2
    t = _mixing_weight(1.0, 1.0, 0.0, 0.75)
    assert t == pytest.approx((1 - 2**-0.5) / 2)


def test_face_endpoints_collapse():
    assert as_shuffle(attain_face("F4", V["P1"]).expr) == as_shuffle(W)
    assert attain_face("F6", V["P4"]).expr == M
    assert as_shuffle(f_ab(F(1, 2), 0)) == as_shuffle(W)
    assert h_ab(F(1, 2), 0) is not None
