"""Exact sections and line integrals of shuffles.

Along a straight segment a shuffle of M is piecewise linear.  Its kinks sit
where the segment crosses a domain breakpoint ``u_i``, an image breakpoint
``v_j``, or the supporting line of one of the pieces (at most one such kink
inside any grid cell).  Evaluating at those parameters and applying the
trapezoid rule therefore integrates exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

from .._scalar import Scalar, as_scalar, is_exact
from ..exceptions import NotAShuffle, ValidationError
from .expr import Convex, CopulaExpr
from .shuffle import ShuffleOfM, as_shuffle


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous polyline on ``[0, 1]`` given by its breakpoints and values."""

    breakpoints: Tuple[Scalar, ...]
    values: Tuple[Scalar, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or len(self.breakpoints) < 2:
            raise ValidationError("need at least two breakpoints with matching values")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        if self.breakpoints[0] != 0 or self.breakpoints[-1] != 1:
            raise ValidationError("breakpoints must start at 0 and end at 1")

    def __call__(self, u):
        xs, ys = self.breakpoints, self.values
        if u <= xs[0]:
            return ys[0]
        for k in range(1, len(xs)):
            if u <= xs[k]:
                x0, x1 = xs[k - 1], xs[k]
                return ys[k - 1] + (ys[k] - ys[k - 1]) * (u - x0) / (x1 - x0)
        return ys[-1]

    def integral(self):
        xs, ys = self.breakpoints, self.values
        return sum(((xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]) / 2 for k in range(1, len(xs))), 0 * ys[0])

    def simplified(self) -> "PiecewiseLinear":
        """Drop interior breakpoints where the slope does not change."""
        xs, ys = list(self.breakpoints), list(self.values)
        keep_x, keep_y = [xs[0]], [ys[0]]
        for k in range(1, len(xs) - 1):
            left = (ys[k] - keep_y[-1]) * (xs[k + 1] - xs[k])
            right = (ys[k + 1] - ys[k]) * (xs[k] - keep_x[-1])
            if is_exact(left) and is_exact(right):
                straight = left == right
            else:
                straight = abs(left - right) <= 1e-15
            if not straight:
                keep_x.append(xs[k])
                keep_y.append(ys[k])
        keep_x.append(xs[-1])
        keep_y.append(ys[-1])
        return PiecewiseLinear(tuple(keep_x), tuple(keep_y))


@dataclass(frozen=True)
class PathPiece:
    """Straight path from ``(x0, y0)`` at time ``t0`` to ``(x1, y1)`` at ``t1``."""

    t0: Scalar
    t1: Scalar
    x0: Scalar
    y0: Scalar
    x1: Scalar
    y1: Scalar

    def __post_init__(self):
        for name in ("t0", "t1", "x0", "y0", "x1", "y1"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))
        if self.t1 < self.t0:
            raise ValueError("path pieces must run forward in time")
        for c in (self.x0, self.y0, self.x1, self.y1):
            if not 0 <= c <= 1:
                raise ValueError(f"path leaves the unit square at coordinate {c}")

    def at(self, sigma):
        return (
            self.t0 + sigma * (self.t1 - self.t0),
            self.x0 + sigma * (self.x1 - self.x0),
            self.y0 + sigma * (self.y1 - self.y0),
        )


Path = Tuple[PathPiece, ...]


def line_path(p0, p1, t0=0, t1=1) -> Path:
    return (PathPiece(t0, t1, p0[0], p0[1], p1[0], p1[1]),)


def polyline_path(points: Sequence[Tuple[Scalar, Scalar, Scalar]]) -> Path:
    """Continuous path through ``(t, x, y)`` knots."""
    return tuple(
        PathPiece(t0, t1, x0, y0, x1, y1) for (t0, x0, y0), (t1, x1, y1) in zip(points, points[1:])
    )


def support_path(s: ShuffleOfM) -> Path:
    """The graph ``u -> (u, h(u))`` of a shuffle, one piece per support segment."""
    out = []
    for p in s.pieces:
        if p.width == 0:
            continue
        x0, y0, x1, y1 = p.endpoints()
        out.append(PathPiece(p.u_lo, p.u_hi, x0, y0, x1, y1))
    return tuple(out)


DIAGONAL = line_path((0, 0), (1, 1))
ANTI_DIAGONAL = line_path((0, 1), (1, 0))


def _kink_params(s: ShuffleOfM, piece: PathPiece) -> List[Scalar]:
    dx = piece.x1 - piece.x0
    dy = piece.y1 - piece.y0
    params = {0 * dx, 0 * dx + 1}
    candidates = []
    if dx != 0:
        candidates += [(u - piece.x0) / dx for u in s.breakpoints]
    if dy != 0:
        candidates += [(v - piece.y0) / dy for v in s.images]
    for p in s.pieces:
        if p.width == 0:
            continue
        if p.flip == 1:
            slope, offset = dy - dx, (p.v_lo - p.u_lo) - (piece.y0 - piece.x0)
        else:
            slope, offset = dy + dx, (p.v_hi + p.u_lo) - (piece.y0 + piece.x0)
        if slope != 0:
            candidates.append(offset / slope)
    params.update(c for c in candidates if 0 < c < 1)
    return sorted(params)


def _section(s: ShuffleOfM, piece: PathPiece) -> List[Tuple[Scalar, Scalar]]:
    pts = []
    for sigma in _kink_params(s, piece):
        t, x, y = piece.at(sigma)
        x = min(max(x, 0 * x), 0 * x + 1)
        y = min(max(y, 0 * y), 0 * y + 1)
        pts.append((t, s.cdf(x, y)))
    return pts


def line_integral(s: CopulaExpr, path: Iterable[PathPiece]) -> Scalar:
    """Exact ``integral C(x(t), y(t)) dt`` of a shuffle along a polygonal path."""
    if not isinstance(s, ShuffleOfM):
        s = as_shuffle(s)
    total = Fraction(0)
    for piece in path:
        if piece.t1 == piece.t0:
            continue
        pts = _section(s, piece)
        for (ta, ca), (tb, cb) in zip(pts, pts[1:]):
            total += (tb - ta) * (ca + cb) / 2
    return total


def _shuffle_section(s: ShuffleOfM, path: Path) -> PiecewiseLinear:
    pts = _section(s, path[0])
    xs, ys = [], []
    for t, c in pts:
        if xs and t == xs[-1]:
            continue
        xs.append(t)
        ys.append(c)
    return PiecewiseLinear(tuple(xs), tuple(ys)).simplified()


def combine(parts: Sequence[Tuple[Scalar, PiecewiseLinear]]) -> PiecewiseLinear:
    """Weighted sum of polylines on the union of their breakpoints."""
    xs = sorted({x for _, pl in parts for x in pl.breakpoints})
    ys = tuple(sum((w * pl(x) for w, pl in parts), 0 * parts[0][0]) for x in xs)
    return PiecewiseLinear(tuple(xs), ys).simplified()


def _section_of(expr: CopulaExpr, path: Path) -> PiecewiseLinear:
    if isinstance(expr, Convex):
        live = [(w, c) for w, c in expr.parts if w != 0]
        return combine([(w, _section_of(c, path)) for w, c in live])
    return _shuffle_section(as_shuffle(expr), path)


def diagonal(expr: CopulaExpr) -> PiecewiseLinear:
    """Diagonal section ``u -> C(u, u)`` as an exact polyline."""
    return _section_of(expr, DIAGONAL)


def opposite_diagonal(expr: CopulaExpr) -> PiecewiseLinear:
    """Opposite-diagonal section ``u -> C(u, 1 - u)`` as an exact polyline."""
    return _section_of(expr, ANTI_DIAGONAL)


def has_sections(expr: CopulaExpr) -> bool:
    try:
        diagonal(expr)
    except NotAShuffle:
        return False
    return True
