"""Copula expression algebra, shuffle normal form and exact sections."""

from .expr import (
    HALF,
    Base,
    Convex,
    CopulaExpr,
    M,
    Ordinal,
    OrdinalBlock,
    Pi,
    Reflect,
    W,
    convex,
    evaluate,
    is_rational,
    nest_middle,
    ordinal,
    rect_volume,
    reflect,
    sample,
)
from .sections import (
    ANTI_DIAGONAL,
    DIAGONAL,
    PathPiece,
    PiecewiseLinear,
    diagonal,
    line_integral,
    line_path,
    opposite_diagonal,
    polyline_path,
    support_path,
)
from .serialize import SchemaError, dumps, from_dict, loads, to_dict
from .shuffle import Piece, ShuffleOfM, as_shuffle, h_map, is_shuffle

__all__ = [
    "ANTI_DIAGONAL", "Base", "Convex", "CopulaExpr", "DIAGONAL", "HALF", "M", "Ordinal",
    "OrdinalBlock", "PathPiece", "Pi", "Piece", "PiecewiseLinear", "Reflect", "SchemaError",
    "ShuffleOfM", "W", "as_shuffle", "convex", "diagonal", "dumps", "evaluate", "from_dict",
    "h_map", "is_rational", "is_shuffle", "line_integral", "line_path", "loads", "nest_middle",
    "opposite_diagonal", "ordinal", "polyline_path", "rect_volume", "reflect", "sample",
    "support_path", "to_dict",
]
