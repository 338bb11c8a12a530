"""The polyhedron of attainable ``(phi, gamma, tau)`` triples.

All geometry is rational.  Float queries are converted to exact rationals
(``Fraction(float)`` is lossless) and compared against the faces with an
explicit tolerance; exact queries are compared exactly unless a tolerance
is passed.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from ._scalar import Scalar, as_scalar, is_exact, to_json_value, to_rational
from .exceptions import ConsistencyError, OutOfRegion

F = Fraction
DEFAULT_TOL = 1e-9


def default_tol() -> float:
    """Tolerance for float queries; ``CONCORDIA_DEFAULT_TOL`` overrides 1e-9."""
    raw = os.environ.get("CONCORDIA_DEFAULT_TOL")
    return float(raw) if raw else DEFAULT_TOL


@dataclass(frozen=True)
class RegionPoint:
    phi: Scalar
    gamma: Scalar
    tau: Scalar

    def __post_init__(self):
        for name in ("phi", "gamma", "tau"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))

    @property
    def exact(self) -> bool:
        return all(is_exact(x) for x in self)

    def __iter__(self):
        return iter((self.phi, self.gamma, self.tau))

    def rational(self) -> Tuple[Fraction, Fraction, Fraction]:
        return tuple(to_rational(x) for x in self)

    def to_dict(self) -> dict:
        return {"phi": to_json_value(self.phi), "gamma": to_json_value(self.gamma), "tau": to_json_value(self.tau)}


@dataclass(frozen=True)
class Halfspace:
    """``coef . (phi, gamma, tau) <= rhs``."""

    label: str
    coef: Tuple[Fraction, Fraction, Fraction]
    rhs: Fraction = F(1)

    def lhs(self, p: Sequence) -> Fraction:
        return sum((c * x for c, x in zip(self.coef, p)), F(0))

    def describe(self) -> str:
        names = ("phi", "gamma", "tau")
        terms = []
        for c, n in zip(self.coef, names):
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            terms.append(f"{sign}{'' if mag == 1 else mag}{n}")
        text = "".join(terms).lstrip("+")
        return f"{text} <= {self.rhs}"


HALFSPACES: Tuple[Halfspace, ...] = (
    Halfspace("F1", (F(-2), F(0), F(0))),
    Halfspace("F2", (F(-2), F(3), F(-3))),
    Halfspace("F3", (F(4), F(-6), F(3))),
    Halfspace("F4", (F(4), F(0), F(-3))),
    Halfspace("F5", (F(-8), F(6), F(0))),
    Halfspace("F6", (F(-2), F(0), F(3))),
    Halfspace("F7", (F(-2), F(3), F(0))),
)

VERTICES: Dict[str, Tuple[Fraction, Fraction, Fraction]] = {
    "P1": (F(-1, 2), F(-1), F(-1)),
    "P2": (F(-1, 2), F(-1, 2), F(-1, 2)),
    "P3": (F(-1, 2), F(-1, 2), F(0)),
    "P4": (F(1), F(1), F(1)),
    "P5": (F(1, 4), F(1, 2), F(0)),
    "P6": (F(1, 4), F(1, 2), F(1, 2)),
}


class Polyhedron:
    """Half-spaces plus the vertex/edge/face lattice derived from them."""

    def __init__(self, halfspaces: Sequence[Halfspace], vertices: Dict[str, Tuple[Fraction, ...]]):
        self.halfspaces = tuple(halfspaces)
        self.by_label = {h.label: h for h in self.halfspaces}
        self.vertices = dict(vertices)
        for label, p in self.vertices.items():
            for h in self.halfspaces:
                if h.lhs(p) > h.rhs:
                    raise ConsistencyError(f"{label} violates {h.label}")
        self.incidence: Dict[str, FrozenSet[str]] = {
            label: frozenset(h.label for h in self.halfspaces if h.lhs(p) == h.rhs)
            for label, p in self.vertices.items()
        }
        self.edges: Dict[str, Tuple[FrozenSet[str], Tuple[str, str]]] = {}
        for a, b in itertools.combinations(sorted(self.vertices), 2):
            shared = self.incidence[a] & self.incidence[b]
            if len(shared) >= 2:
                self.edges[a + b] = (shared, (a, b))
        self.faces: Dict[str, Tuple[str, ...]] = {
            h.label: self._cycle(h.label) for h in self.halfspaces
        }

    def _cycle(self, face: str) -> Tuple[str, ...]:
        members = sorted(v for v, fs in self.incidence.items() if face in fs)
        adjacent = {v: [] for v in members}
        for shared, (a, b) in self.edges.values():
            if face in shared:
                adjacent[a].append(b)
                adjacent[b].append(a)
        cycle = [members[0]]
        while len(cycle) < len(members):
            nxt = [w for w in sorted(adjacent[cycle[-1]]) if w not in cycle]
            if not nxt:
                raise ConsistencyError(f"face {face} is not a simple cycle")
            cycle.append(nxt[0])
        if cycle[0] not in adjacent[cycle[-1]]:
            raise ConsistencyError(f"face {face} does not close")
        self._assert_planar(face, cycle)
        return tuple(cycle)

    def _assert_planar(self, face, cycle):
        h = self.by_label[face]
        for v in cycle:
            if h.lhs(self.vertices[v]) != h.rhs:
                raise ConsistencyError(f"{v} is not on the plane of {face}")

    def vertex_point(self, label: str) -> "RegionPoint":
        return RegionPoint(*self.vertices[label])


OMEGA = Polyhedron(HALFSPACES, VERTICES)


def _point(p) -> RegionPoint:
    return p if isinstance(p, RegionPoint) else RegionPoint(*p)


def _resolve_tol(p: RegionPoint, tol) -> Fraction:
    if tol is None:
        return F(0) if p.exact else to_rational(default_tol())
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return to_rational(tol)


@dataclass(frozen=True)
class Membership:
    status: str  # "inside" | "boundary" | "outside"
    active: Tuple[str, ...]
    violated: Tuple[Tuple[str, Scalar], ...]  # (face label, lhs value)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "active": list(self.active),
            "violated": [
                {"face": lab, "constraint": OMEGA.by_label[lab].describe(), "lhs": to_json_value(val)}
                for lab, val in self.violated
            ],
        }


def contains(p, tol=None) -> Membership:
    """Evaluate the seven face inequalities at *p*."""
    p = _point(p)
    t = _resolve_tol(p, tol)
    x = p.rational()
    active, violated = [], []
    for h in OMEGA.halfspaces:
        value = h.lhs(x)
        if value - h.rhs > t:
            violated.append((h.label, value if p.exact else float(value)))
        elif abs(value - h.rhs) <= t:
            active.append(h.label)
    if violated:
        status = "outside"
    elif active:
        status = "boundary"
    else:
        status = "inside"
    return Membership(status, tuple(active), tuple(violated))


# ---------------------------------------------------------------- projection / tau bounds

# (label, description, function of (phi, gamma) that must be <= 0)
PROJECTION_CONSTRAINTS = (
    ("phi>=-1/2", lambda f, g: -f - F(1, 2)),
    ("gamma<=4/3phi+1/6", lambda f, g: g - F(4, 3) * f - F(1, 6)),
    ("gamma<=2/3phi+1/3", lambda f, g: g - F(2, 3) * f - F(1, 3)),
    ("gamma>=4/3phi-1/3", lambda f, g: F(4, 3) * f - F(1, 3) - g),
)


def projection_violations(phi, gamma, tol=None) -> List[str]:
    probe = RegionPoint(phi, gamma, 0)
    t = _resolve_tol(probe, tol)
    f, g, _ = probe.rational()
    return [label for label, fn in PROJECTION_CONSTRAINTS if fn(f, g) > t]


def tau_bounds(phi, gamma, tol=None) -> Tuple[Scalar, Scalar]:
    """``[tau_min, tau_max]`` over the vertical chord of the region at ``(phi, gamma)``."""
    probe = RegionPoint(phi, gamma, 0)
    bad = projection_violations(phi, gamma, tol)
    if bad:
        raise OutOfRegion(f"({phi}, {gamma}) lies outside the projection: violates {', '.join(bad)}", bad)
    f, g, _ = probe.rational()
    lo = max(F(4, 3) * f - F(1, 3), -F(2, 3) * f + g - F(1, 3))
    hi = min(F(2, 3) * f + F(1, 3), -F(4, 3) * f + 2 * g + F(1, 3))
    if lo > hi:
        # only reachable within tolerance of the projection boundary
        lo = hi = (lo + hi) / 2
    if probe.exact:
        return lo, hi
    return float(lo), float(hi)


# ---------------------------------------------------------------- involution


def involution_A(p) -> RegionPoint:
    """``(phi, gamma, tau) -> (phi - 3/2 gamma, -gamma, -tau)``."""
    p = _point(p)
    half3 = F(3, 2) if is_exact(p.gamma) else 1.5
    return RegionPoint(p.phi - half3 * p.gamma, -p.gamma, -p.tau)


def _involution_exact(x):
    return (x[0] - F(3, 2) * x[1], -x[1], -x[2])


def involution_vertex_map() -> Dict[str, str]:
    lookup = {v: k for k, v in OMEGA.vertices.items()}
    return {k: lookup[_involution_exact(v)] for k, v in OMEGA.vertices.items()}


def involution_face_map() -> Dict[str, str]:
    vmap = involution_vertex_map()
    faces = {frozenset(c): k for k, c in OMEGA.faces.items()}
    return {k: faces[frozenset(vmap[v] for v in c)] for k, c in OMEGA.faces.items()}


# ---------------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    faces: Tuple[str, ...]
    edges: Tuple[str, ...]
    vertices: Tuple[str, ...]

    @property
    def interior(self) -> bool:
        return not self.faces

    @property
    def most_specific(self) -> str:
        if self.vertices:
            return f"vertex {self.vertices[0]}"
        if self.edges:
            return f"edge {self.edges[0]}"
        if self.faces:
            return f"face {self.faces[0]}"
        return "interior"

    def labels(self) -> FrozenSet[str]:
        if self.interior:
            return frozenset({"interior"})
        return frozenset(self.faces) | {f"edge {e}" for e in self.edges} | {f"vertex {v}" for v in self.vertices}

    def to_dict(self) -> dict:
        return {
            "faces": list(self.faces),
            "edges": list(self.edges),
            "vertices": list(self.vertices),
            "most_specific": self.most_specific,
        }


def classify(p, tol=None) -> Classification:
    """Full active set of *p* with the edges and vertices it implies."""
    m = contains(p, tol)
    if m.status == "outside":
        raise OutOfRegion(f"{tuple(_point(p))} lies outside the region", [lab for lab, _ in m.violated])
    active = frozenset(m.active)
    edges = tuple(k for k, (shared, _) in OMEGA.edges.items() if shared <= active)
    vertices = tuple(k for k, fs in OMEGA.incidence.items() if fs <= active)
    return Classification(tuple(sorted(active)), edges, vertices)


# ---------------------------------------------------------------- measures of the region


def _det3(a, b, c):
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def volume() -> Fraction:
    """Exact volume from tetrahedra joining an interior point to fanned faces."""
    pts = list(OMEGA.vertices.values())
    centre = tuple(sum(p[k] for p in pts) / len(pts) for k in range(3))
    total = F(0)
    for cycle in OMEGA.faces.values():
        corners = [OMEGA.vertices[v] for v in cycle]
        for b, c in zip(corners[1:], corners[2:]):
            rel = [tuple(x[k] - centre[k] for k in range(3)) for x in (corners[0], b, c)]
            total += abs(_det3(*rel)) / 6
    return total


_PLANES = {"phi_gamma": (0, 1), "phi_tau": (0, 2), "gamma_tau": (1, 2)}


def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def projection_area(plane: str) -> Fraction:
    """Exact area of the region's shadow on a coordinate plane."""
    if plane not in _PLANES:
        raise ValueError(f"plane must be one of {sorted(_PLANES)}")
    i, j = _PLANES[plane]
    hull = _hull([(p[i], p[j]) for p in OMEGA.vertices.values()])
    twice = sum(
        (a[0] * b[1] - b[0] * a[1] for a, b in zip(hull, hull[1:] + hull[:1])), F(0)
    )
    return abs(twice) / 2


# coordinate ranges of phi, gamma, tau
RANGES = ((F(-1, 2), F(1)), (F(-1), F(1)), (F(-1), F(1)))


def spread_constants() -> Dict[str, Fraction]:
    """Volume fraction of the coordinate box and average tau spreads.

    The average spread of tau given a coordinate (or pair) is the area (or
    volume) of the corresponding projection divided by the length (or area)
    of the conditioning range.
    """
    lengths = [hi - lo for lo, hi in RANGES]
    vol = volume()
    return {
        "volume": vol,
        "box_fraction": vol / (lengths[0] * lengths[1] * lengths[2]),
        "tau_spread_given_phi": projection_area("phi_tau") / lengths[0],
        "tau_spread_given_gamma": projection_area("gamma_tau") / lengths[1],
        "tau_spread_given_phi_gamma": vol / projection_area("phi_gamma"),
    }


# ---------------------------------------------------------------- export / sampling


def export_mesh() -> dict:
    return {
        "vertices": [
            {"label": k, "phi": str(v[0]), "gamma": str(v[1]), "tau": str(v[2])}
            for k, v in OMEGA.vertices.items()
        ],
        "faces": [{"label": k, "cycle": list(c)} for k, c in OMEGA.faces.items()],
    }


def to_obj() -> str:
    """Triangle mesh in Wavefront OBJ; faces fanned from their first vertex."""
    labels = list(OMEGA.vertices)
    index = {k: i + 1 for i, k in enumerate(labels)}
    lines = ["# phi gamma tau"]
    for k in labels:
        p = OMEGA.vertices[k]
        lines.append("v " + " ".join(repr(float(x)) for x in p))
    for face, cycle in OMEGA.faces.items():
        lines.append(f"g {face}")
        for b, c in zip(cycle[1:], cycle[2:]):
            lines.append(f"f {index[cycle[0]]} {index[b]} {index[c]}")
    return "\n".join(lines) + "\n"


def sample_points(count: int, seed: int) -> np.ndarray:
    """Uniform points of the region by rejection from the coordinate box; shape ``(count, 3)``."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    lo = np.array([float(a) for a, _ in RANGES])
    hi = np.array([float(b) for _, b in RANGES])
    coef = np.array([[float(c) for c in h.coef] for h in OMEGA.halfspaces])
    out = []
    have = 0
    while have < count:
        batch = lo + (hi - lo) * rng.random((max(64, 40 * (count - have)), 3))
        keep = batch[(batch @ coef.T <= 1.0).all(axis=1)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:count]


def inside_fraction_mc(count: int, seed: int) -> Tuple[float, float]:
    """Rejection estimate of the volume and its standard error."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    lo = np.array([float(a) for a, _ in RANGES])
    hi = np.array([float(b) for _, b in RANGES])
    coef = np.array([[float(c) for c in h.coef] for h in OMEGA.halfspaces])
    box = float(np.prod(hi - lo))
    hits = 0
    chunk = 1_000_000
    done = 0
    while done < count:
        k = min(chunk, count - done)
        pts = lo + (hi - lo) * rng.random((k, 3))
        hits += int((pts @ coef.T <= 1.0).all(axis=1).sum())
        done += k
    frac = hits / count
    return box * frac, box * np.sqrt(frac * (1 - frac) / count)
