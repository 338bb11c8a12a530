"""Copulas attaining a prescribed ``(phi, gamma, tau)`` triple.

Every boundary face of the region is swept by one of the parametric families
in :mod:`concordia.families`.  The families nest a shuffle into the centred
block ``(a, 1 - a)``, so with ``s = (1 - 2a)**2`` and ``q = s b**2`` their
footrule, Gini's gamma and Kendall's tau are affine in ``(s, q)``:

=======  ========================  ===================  ======================
family   phi                       gamma                tau
=======  ========================  ===================  ======================
A        1 - 3/2 s + 12 q          1 - 3/2 s + 16 q     1 - s + 8 q
F        -1/2 + 3/2 s - 3 q        2 s - 2 q - 1        2 s - 4 q - 1
H        1 - 3/4 s                 1 - s/2              1 - s + 8 q
=======  ========================  ===================  ======================

Inverting is a linear solve followed by ``a = (1 - sqrt(s)) / 2`` and
``b = sqrt(q / s)``.  Faces F2, F3 and F1 are the images of F6, F4 and F7
under the involution of the region, which is realised on copulas by
reflecting in the second coordinate.  F5 uses the ten-piece shuffle L or its
reflection.

An interior target mixes a copula on the lower tau boundary with one on the
upper boundary.  Footrule and Gini's gamma are linear in the copula, so only
tau has to be matched, and tau of a two-part mixture is a quadratic in the
weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import families
from ._scalar import FLOAT_TOL, Scalar, is_exact, sqrt, to_json_value
from .core.expr import Base, CopulaExpr, M, Reflect, W, convex, reflect
from .core.serialize import to_dict as expr_to_dict
from .core.shuffle import as_shuffle, is_shuffle
from .exceptions import ConsistencyError, OutOfFace, OutOfRegion
from .measures import MeasureVector, all_measures, concordance_q, tau
from .region import RegionPoint, _point, classify, contains, involution_A, tau_bounds

F = Fraction
DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class SynthesisResult:
    expr: CopulaExpr
    achieved: MeasureVector
    target: RegionPoint
    residual: Scalar
    recipe: str

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "achieved": self.achieved.to_dict(),
            "residual": to_json_value(self.residual),
            "recipe": self.recipe,
            "expr": expr_to_dict(self.expr),
        }


def _fmt(x) -> str:
    return str(x) if is_exact(x) else f"{float(x):.12g}"


def _clamp(name, x, lo, hi):
    """Clamp solver output into ``[lo, hi]``, treating larger excursions as bugs."""
    slack = 0 if is_exact(x) else DOMAIN_SLACK * max(1.0, abs(float(hi)))
    if x < lo - slack or x > hi + slack:
        raise ConsistencyError(f"{name}={x} outside [{lo}, {hi}] after inversion")
    # float noise next to a bound snaps onto it
    if x <= lo + slack:
        return lo if is_exact(x) else float(lo)
    if x >= hi - slack:
        return hi if is_exact(x) else float(hi)
    return x


def _a_b(s, q, b_max):
    s = _clamp("s", s, 0, 1)
    if s == 0:
        return F(1, 2) if is_exact(s) else 0.5, 0 * s
    q = _clamp("q", q, 0, s * b_max * b_max)
    a = _clamp("a", (1 - sqrt(s)) / 2, 0, F(1, 2))
    b = _clamp("b", sqrt(q / s), 0, b_max)
    return a, b


def _simplify(expr: CopulaExpr) -> CopulaExpr:
    if isinstance(expr, Reflect) and expr.axis == 2 and isinstance(expr.of, Base):
        if expr.of.kind == "M":
            return W
        if expr.of.kind == "W":
            return M
    return expr


def _collapse(expr: CopulaExpr) -> CopulaExpr:
    """Replace constructions that reduce to a single diagonal by M or W."""
    if isinstance(expr, Base) or not is_shuffle(expr):
        return expr
    s = as_shuffle(expr)
    if s.n == 1:
        return M if s.flips[0] == 1 else W
    return expr


# inversions; each returns (expression, recipe body)


def _invert_A(p: RegionPoint):
    f, g, _ = p
    s = 2 * g - F(8, 3) * f + F(2, 3) if is_exact(f) and is_exact(g) else 2 * g - 8 / 3 * f + 2 / 3
    q = (g - f) / 4
    a, b = _a_b(s, q, F(1, 4))
    return families.a_ab(a, b), f"A(a={_fmt(a)},b={_fmt(b)})"


def _invert_F(p: RegionPoint):
    f, g, _ = p
    exact = is_exact(f) and is_exact(g)
    s = g + F(2, 3) - F(2, 3) * f if exact else g + 2 / 3 - 2 / 3 * f
    q = (2 * s - 1 - g) / 2
    a, b = _a_b(s, q, F(1, 2))
    return _simplify(families.f_ab(a, b)), f"F(a={_fmt(a)},b={_fmt(b)})"


def _invert_H(p: RegionPoint):
    f, _, t = p
    s = F(4, 3) * (1 - f) if is_exact(f) else 4 / 3 * (1 - f)
    q = (t - 1 + s) / 8
    a, b = _a_b(s, q, F(1, 4))
    return families.h_ab(a, b), f"H(a={_fmt(a)},b={_fmt(b)})"


def _invert_L(p: RegionPoint):
    f, g, t = p
    d = sqrt(_clamp("d^2", (f + F(1, 2)) / 12 if is_exact(f) else (f + 0.5) / 12, 0, F(1, 16)))
    b = sqrt(_clamp("b^2", (g + F(1, 2) - t) / 8 if is_exact(g) and is_exact(t) else (g + 0.5 - t) / 8, 0, F(1, 16)))
    b = _clamp("b", b, d, F(1, 4))
    a = _clamp("a", b - d, 0, b)
    return families.l_ab(a, b), f"L(a={_fmt(a)},b={_fmt(b)})"


def _mirrored(invert: Callable):
    def run(p: RegionPoint):
        inner, recipe = invert(involution_A(p))
        return _simplify(reflect(inner, 2)), f"reflect({recipe})"

    return run


def _invert_F5(p: RegionPoint):
    if p.tau >= p.gamma:
        return _invert_L(p)
    inner, recipe = _invert_L(involution_A(p))
    return reflect(inner, 2), f"M(reflect {recipe})"


_FACE_BUILDERS = {
    "F6": _invert_A,
    "F4": _invert_F,
    "F7": _invert_H,
    "F5": _invert_F5,
    "F2": _mirrored(_invert_A),
    "F3": _mirrored(_invert_F),
    "F1": _mirrored(_invert_H),
}


def _residual(achieved: MeasureVector, target: RegionPoint):
    diffs = [abs(achieved.phi - target.phi), abs(achieved.gamma - target.gamma), abs(achieved.tau - target.tau)]
    worst = max(diffs)
    return worst if all(is_exact(d) for d in diffs) else float(worst)


def _finish(expr: CopulaExpr, target: RegionPoint, recipe: str) -> SynthesisResult:
    expr = _collapse(expr)
    achieved = all_measures(expr)
    return SynthesisResult(expr, achieved, target, _residual(achieved, target), recipe)


def _construct_on_face(face: str, p: RegionPoint):
    if face not in _FACE_BUILDERS:
        raise ValueError(f"unknown face {face!r}")
    return _FACE_BUILDERS[face](p)


def attain_face(face: str, target, tol=None) -> SynthesisResult:
    """A family member on *face* whose ``(phi, gamma, tau)`` equals *target*."""
    p = _point(target)
    try:
        active = classify(p, tol).faces
    except OutOfRegion as err:
        raise OutOfFace(f"{tuple(p)} is not on {face}: {err}") from err
    if face not in active:
        raise OutOfFace(f"{tuple(p)} is not on {face} (active faces: {list(active) or 'none'})")
    expr, recipe = _construct_on_face(face, p)
    return _finish(expr, p, f"{face}:{recipe}")


# ---------------------------------------------------------------- interior points


def _lower_face(f, g) -> str:
    return "F4" if F(4, 3) * f - F(1, 3) >= -F(2, 3) * f + g - F(1, 3) else "F2"


def _upper_face(f, g) -> str:
    return "F6" if F(2, 3) * f + F(1, 3) <= -F(4, 3) * f + 2 * g + F(1, 3) else "F3"


def _mixing_weight(t0, t1, q, target) -> Scalar:
    """Smallest ``t`` in [0, 1] with ``t^2 t1 + (1-t)^2 t0 + 2t(1-t) q = target``."""
    A = t0 + t1 - 2 * q
    B = 2 * (q - t0)
    C = t0 - target
    exact = all(is_exact(x) for x in (A, B, C))
    roots = []
    if A == 0:
        if B != 0:
            roots.append(-C / B)
    else:
        disc = B * B - 4 * A * C
        if disc >= 0 or (not exact and disc > -1e-15):
            r = sqrt(disc if disc > 0 else 0 * disc)
            # cancellation-free pair; A can be tiny next to B
            h = -(B + r) / 2 if B >= 0 else -(B - r) / 2
            if h != 0:
                roots += [h / A, C / h]
            else:
                roots.append(0 * A)
    slack = 0 if exact and all(is_exact(r) for r in roots) else 1e-12
    ok = sorted(r for r in roots if -slack <= r <= 1 + slack)
    if ok:
        t = ok[0]
        return min(max(t, 0 * t), 0 * t + 1)
    return _bisect(lambda t: A * t * t + B * t + C, float(t0 - target), float(t1 - target))


def _bisect(fn, f_lo, f_hi) -> float:
    if f_lo * f_hi > 0:
        raise ConsistencyError("mixing polynomial has no sign change on [0, 1]")
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        fm = float(fn(mid))
        if fm == 0:
            return mid
        if (fm < 0) == (f_lo < 0):
            lo, f_lo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    return (lo + hi) / 2


def _close(a, b, tol) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(a - b) <= tol


def attain(target, tol=None) -> SynthesisResult:
    """A copula expression with the prescribed ``(phi, gamma, tau)``."""
    p = _point(target)
    m = contains(p, tol)
    if m.status == "outside":
        raise OutOfRegion(f"{tuple(p)} lies outside the region", [lab for lab, _ in m.violated])
    f, g, t = p
    t0, t1 = tau_bounds(f, g, tol)
    exact = p.exact
    close_tol = 0 if exact else FLOAT_TOL

    lower_face = _lower_face(f, g)
    upper_face = _upper_face(f, g)
    lower_pt = RegionPoint(f, g, t0)
    upper_pt = RegionPoint(f, g, t1)

    if _close(t0, t1, close_tol) or _close(t, t0, close_tol):
        expr, recipe = _construct_on_face(lower_face, lower_pt)
        return _finish(expr, p, f"{lower_face}:{recipe}")
    if _close(t, t1, close_tol):
        expr, recipe = _construct_on_face(upper_face, upper_pt)
        return _finish(expr, p, f"{upper_face}:{recipe}")

    c0, rec0 = _construct_on_face(lower_face, lower_pt)
    c1, rec1 = _construct_on_face(upper_face, upper_pt)
    q = concordance_q(c0, c1)
    tau0, tau1 = tau(c0), tau(c1)
    if not exact:
        tau0, tau1, q = float(tau0), float(tau1), float(q)
    w = _mixing_weight(tau0, tau1, q, t)
    expr = convex([(w, c1), (1 - w, c0)])
    recipe = f"{upper_face}:{rec1} ⊕ t={_fmt(w)} ⊗ {lower_face}:{rec0}"
    return _finish(expr, p, recipe)
