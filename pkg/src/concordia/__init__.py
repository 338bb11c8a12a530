"""Exact dependence coefficients of copulas, their attainable region and synthesis."""

from .core import (
    Convex,
    CopulaExpr,
    M,
    Ordinal,
    Pi,
    Reflect,
    ShuffleOfM,
    W,
    as_shuffle,
    convex,
    dumps,
    evaluate,
    loads,
    nest_middle,
    ordinal,
    reflect,
    sample,
)
from .exceptions import (
    ConcordiaError,
    ConsistencyError,
    NotAShuffle,
    NotComputableExactly,
    OutOfFace,
    OutOfRegion,
    ValidationError,
)
from .families import FamilyId, c_b, d_b, g_b, l_ab, make_family
from .measures import MeasureVector, all_measures, beta, concordance_q, gamma, phi, rho, tau, xi
from .oracle import Checkerboard, McEstimate, cb_measures, checkerboard_of, mc_measures
from .region import OMEGA, RegionPoint, classify, contains, involution_A, projection_area, tau_bounds, volume
from .synthesis import SynthesisResult, attain, attain_face

__version__ = "0.1.0"
