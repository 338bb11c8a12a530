"""Exact dependence coefficients over the copula expression algebra.

Each coefficient recurses structurally over the expression tree:

* base copulas have fixed values;
* shuffles of M are integrated exactly along piecewise-linear sections;
* ordinal sums propagate the summands' values through closed forms in the
  block widths ``w_k = b_k - a_k``;
* reflections flip signs (footrule picks up a Gini's gamma correction);
* mixtures combine affinely, except Kendall's tau which is quadratic.

The concordance function ``Q(C1, C2) = 4 * integral C2 dC1 - 1`` is exact for
every expression: graph-supported first arguments use line integrals along
their support, anything else goes through the support decomposition in
:mod:`concordia.core.support`.

Chatterjee's xi is extended beyond its usual scope: reflections keep it
unchanged and every shuffle of M has xi = 1 (the first partial derivative is
an indicator almost everywhere).  Mixtures are never claimed exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from ._scalar import Scalar, is_exact, to_json_value
from .core import support
from .core.expr import HALF, Base, Convex, CopulaExpr, M, Ordinal, Pi, Reflect, W, evaluate, is_rational
from .core.sections import PathPiece, diagonal, line_integral, opposite_diagonal, support_path
from .core.shuffle import ShuffleOfM, as_shuffle, is_shuffle
from .exceptions import NotAShuffle, NotComputableExactly, ValidationError

FIELDS = ("rho", "tau", "phi", "gamma", "beta", "xi")

_BASE_VALUES = {
    "M": {"rho": 1, "tau": 1, "phi": 1, "gamma": 1, "beta": 1, "xi": 1},
    "W": {"rho": -1, "tau": -1, "phi": Fraction(-1, 2), "gamma": -1, "beta": -1, "xi": 1},
    "Pi": {"rho": 0, "tau": 0, "phi": 0, "gamma": 0, "beta": 0, "xi": 0},
}


def _base(expr: Base, name: str) -> Fraction:
    return Fraction(_BASE_VALUES[expr.kind][name])


def _live(expr: Convex):
    return [(w, c) for w, c in expr.parts if w != 0]


def _shuffle_or_none(expr: CopulaExpr) -> Optional[ShuffleOfM]:
    if isinstance(expr, ShuffleOfM):
        return expr
    if isinstance(expr, Base) and expr.kind == "Pi":
        return None
    if not is_shuffle(expr):
        return None
    return as_shuffle(expr)


# ---------------------------------------------------------------- Q


def concordance_q(c1: CopulaExpr, c2: CopulaExpr) -> Scalar:
    """``Q(c1, c2) = 4 * integral c2 dc1 - 1``, exact for any pair of expressions."""
    s1 = _shuffle_or_none(c1)
    if s1 is None:
        s2 = _shuffle_or_none(c2)
        if s2 is None:
            return 4 * support.integral_against(c1, c2) - 1
        # Q is symmetric in its arguments
        return concordance_q(s2, c1)
    path = support_path(s1)
    return 4 * _integral_along(c2, path) - 1


def _integral_along(expr: CopulaExpr, path) -> Scalar:
    if isinstance(expr, Convex):
        return sum((w * _integral_along(c, path) for w, c in _live(expr)), Fraction(0))
    s = _shuffle_or_none(expr)
    if s is not None:
        return line_integral(s, path)
    return support.path_integral(expr, path)


# ---------------------------------------------------------------- tau


def tau(expr: CopulaExpr) -> Scalar:
    """Kendall's tau."""
    if isinstance(expr, Base):
        return _base(expr, "tau")
    if isinstance(expr, ShuffleOfM):
        return concordance_q(expr, expr)
    if isinstance(expr, Ordinal):
        return 1 - sum((blk.width ** 2 * (1 - tau(blk.summand)) for blk in expr.blocks), Fraction(0))
    if isinstance(expr, Reflect):
        return -tau(expr.of)
    if isinstance(expr, Convex):
        parts = _live(expr)
        total = Fraction(0)
        for i, (wi, ci) in enumerate(parts):
            total += wi * wi * tau(ci)
            for wj, cj in parts[i + 1 :]:
                total += 2 * wi * wj * concordance_q(ci, cj)
        return total
    raise NotComputableExactly(f"tau of {type(expr).__name__}")


# ---------------------------------------------------------------- rho


def _shuffle_rho(s: ShuffleOfM) -> Scalar:
    # rho = 12 E[U h(U)] - 3; u * h(u) is quadratic on each piece
    total = Fraction(0)
    for p in s.pieces:
        if p.width == 0:
            continue
        lo, hi = p.u_lo, p.u_hi
        mid = (lo + hi) / 2
        f = (lambda u, p=p: u * ((u - p.u_lo) + p.v_lo)) if p.flip == 1 else (
            lambda u, p=p: u * (p.v_hi - (u - p.u_lo))
        )
        total += (hi - lo) * (f(lo) + 4 * f(mid) + f(hi)) / 6
    return 12 * total - 3


def rho(expr: CopulaExpr) -> Scalar:
    """Spearman's rho."""
    if isinstance(expr, Base):
        return _base(expr, "rho")
    if isinstance(expr, ShuffleOfM):
        return _shuffle_rho(expr)
    if isinstance(expr, Ordinal):
        return 1 - sum((blk.width ** 3 * (1 - rho(blk.summand)) for blk in expr.blocks), Fraction(0))
    if isinstance(expr, Reflect):
        return -rho(expr.of)
    if isinstance(expr, Convex):
        return sum((w * rho(c) for w, c in _live(expr)), Fraction(0))
    raise NotComputableExactly(f"rho of {type(expr).__name__}")


# ---------------------------------------------------------------- phi / gamma


def phi(expr: CopulaExpr) -> Scalar:
    """Spearman's footrule ``6 * integral delta - 2``."""
    if isinstance(expr, Base):
        return _base(expr, "phi")
    if isinstance(expr, ShuffleOfM):
        return 6 * diagonal(expr).integral() - 2
    if isinstance(expr, Ordinal):
        return 1 - sum((blk.width ** 2 * (1 - phi(blk.summand)) for blk in expr.blocks), Fraction(0))
    if isinstance(expr, Reflect):
        # holds for both axes: the diagonal of either reflection is u - omega(u)
        return phi(expr.of) - Fraction(3, 2) * gamma(expr.of)
    if isinstance(expr, Convex):
        return sum((w * phi(c) for w, c in _live(expr)), Fraction(0))
    raise NotComputableExactly(f"phi of {type(expr).__name__}")


@dataclass(frozen=True)
class GammaMiddleCase:
    """The ordinal block ``j`` whose open interval contains 1/2."""

    j: int
    c: Scalar

    def __post_init__(self):
        if not -1 < self.c < 1:
            raise ValidationError(f"offset c={self.c} must lie in (-1, 1)")


def gamma_middle_case(expr: Ordinal) -> Optional[GammaMiddleCase]:
    for j, blk in enumerate(expr.blocks):
        if blk.a < HALF < blk.b:
            return GammaMiddleCase(j, (1 - blk.a - blk.b) / blk.width)
    return None


def _anti_section_integral(summand: CopulaExpr, c) -> Scalar:
    """``integral of B(t, 1 + c - t)`` over ``max(0, c) <= t <= 1 + min(0, c)``."""
    t0 = c if c > 0 else 0 * c
    t1 = 1 + (c if c < 0 else 0 * c)
    path = (PathPiece(t0, t1, t0, 1 + c - t0, t1, 1 + c - t1),)
    return _integral_along(summand, path)


def _gamma_ordinal(expr: Ordinal) -> Scalar:
    phi_part = Fraction(2, 3) * sum(
        (blk.width ** 2 * (1 - phi(blk.summand)) for blk in expr.blocks), Fraction(0)
    )
    case = gamma_middle_case(expr)
    if case is None:
        return 1 - phi_part
    blk = expr.blocks[case.j]
    w = blk.width
    if case.c == 0:
        others = Fraction(2, 3) * sum(
            (k.width ** 2 * (1 - phi(k.summand)) for i, k in enumerate(expr.blocks) if i != case.j),
            Fraction(0),
        )
        return 1 - w ** 2 * (1 - gamma(blk.summand)) - others
    c_pos = case.c if case.c > 0 else 0
    return (
        4 * w ** 2 * c_pos ** 2
        + 4 * blk.a
        - 4 * blk.a ** 2
        - phi_part
        + 4 * w ** 2 * _anti_section_integral(blk.summand, case.c)
    )


def gamma(expr: CopulaExpr) -> Scalar:
    """Gini's gamma ``4 * integral delta + 4 * integral omega - 2``."""
    if isinstance(expr, Base):
        return _base(expr, "gamma")
    if isinstance(expr, ShuffleOfM):
        return 4 * diagonal(expr).integral() + 4 * opposite_diagonal(expr).integral() - 2
    if isinstance(expr, Ordinal):
        return _gamma_ordinal(expr)
    if isinstance(expr, Reflect):
        return -gamma(expr.of)
    if isinstance(expr, Convex):
        return sum((w * gamma(c) for w, c in _live(expr)), Fraction(0))
    raise NotComputableExactly(f"gamma of {type(expr).__name__}")


# ---------------------------------------------------------------- beta / xi


def beta(expr: CopulaExpr) -> Scalar:
    """Blomqvist's beta ``4 C(1/2, 1/2) - 1`` by direct evaluation."""
    half = HALF if _all_exact(expr) else 0.5
    return 4 * evaluate(expr, half, half) - 1


def beta_ordinal_formula(expr: Ordinal) -> Scalar:
    """Blomqvist's beta of an ordinal sum from its straddling block (cross-check only)."""
    for blk in expr.blocks:
        if blk.a < HALF < blk.b:
            w = blk.width
            t = (HALF - blk.a) / w
            return 4 * blk.a + 4 * w * blk.summand.cdf(t, t) - 1
    return Fraction(1)


def xi(expr: CopulaExpr) -> Scalar:
    """Chatterjee's xi; mixtures raise :class:`NotComputableExactly`."""
    if isinstance(expr, Base):
        return _base(expr, "xi")
    if isinstance(expr, ShuffleOfM):
        return Fraction(1)
    if isinstance(expr, Ordinal):
        return 1 - sum((blk.width ** 2 * (1 - xi(blk.summand)) for blk in expr.blocks), Fraction(0))
    if isinstance(expr, Reflect):
        return xi(expr.of)
    if isinstance(expr, Convex):
        live = _live(expr)
        if len(live) == 1:
            return xi(live[0][1])
        raise NotComputableExactly("xi of a proper mixture has no closed form here")
    raise NotComputableExactly(f"xi of {type(expr).__name__}")


def _all_exact(expr: CopulaExpr) -> bool:
    return is_rational(expr)


# ---------------------------------------------------------------- aggregate


_EXACT_FUNCS = {"rho": rho, "tau": tau, "phi": phi, "gamma": gamma, "beta": beta, "xi": xi}


@dataclass(frozen=True)
class MeasureVector:
    """The six coefficients of one copula, with a per-field exactness flag."""

    rho: Scalar
    tau: Scalar
    phi: Scalar
    gamma: Scalar
    beta: Scalar
    xi: Scalar
    exact: Dict[str, bool] = field(default_factory=lambda: {f: True for f in FIELDS})

    def as_tuple(self):
        return tuple(getattr(self, f) for f in FIELDS)

    @property
    def point(self):
        """The ``(phi, gamma, tau)`` triple."""
        return (self.phi, self.gamma, self.tau)

    def to_dict(self) -> dict:
        out = {f: to_json_value(getattr(self, f)) for f in FIELDS}
        out["exact"] = {f: bool(self.exact.get(f, False)) for f in FIELDS}
        return out


def _normalise(x: Scalar, float_mode: bool) -> Scalar:
    if float_mode or not is_exact(x):
        return float(x)
    return Fraction(x)


def all_measures(expr: CopulaExpr, fallback_n: int = 256) -> MeasureVector:
    """All six coefficients; fields without a closed form come from the checkerboard oracle.

    Rational expressions give :class:`~fractions.Fraction` values, any float
    parameter switches every field to float.
    """
    float_mode = not _all_exact(expr)
    values, exact = {}, {}
    estimate = None
    for name in FIELDS:
        try:
            values[name] = _normalise(_EXACT_FUNCS[name](expr), float_mode)
            exact[name] = True
        except (NotComputableExactly, NotAShuffle):
            if estimate is None:
                from .oracle import cb_measures, checkerboard_of

                estimate = cb_measures(checkerboard_of(expr, fallback_n))
            values[name] = float(getattr(estimate, name))
            exact[name] = False
    return MeasureVector(exact=exact, **values)


def kernel_measures(expr: CopulaExpr) -> Dict[str, Scalar]:
    """Concordance coefficients through Q alone, bypassing the structural recursion.

    ``tau = Q(C, C)``, ``rho = 3 Q(C, Pi)``, ``phi = (3 Q(C, M) - 1) / 2`` and
    ``gamma = Q(C, M) + Q(C, W)``.  Used to cross-check :func:`all_measures`.
    """
    q_m = concordance_q(expr, M)
    return {
        "rho": 3 * concordance_q(expr, Pi),
        "tau": concordance_q(expr, expr),
        "phi": (3 * q_m - 1) / 2,
        "gamma": q_m + concordance_q(expr, W),
    }
