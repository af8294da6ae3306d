"""Planar shape space: SE(2) action, canonical representatives, congruence,
reflections and edge-length feasibility.

Edge lengths are plain Euclidean lengths throughout this module; use
``to_half_squared`` / ``to_squared`` to move to the other conventions.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateAxis,
    GraphMismatch,
    NotTwoCycles,
    ZeroPerimeter,
)
from .graph_core import DirectedGraph, undirected_edges
from .rigidity import Framework, require_nondegenerate

ALIGN_TOL = 1e-9
CONGRUENCE_TOL = 1e-6
FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class SE2Element:
    """Rigid motion x -> R(theta) x + (a, b) with R(theta) = [[c, s], [-s, c]]."""

    theta: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, s], [-s, c]])

    def matrix(self) -> np.ndarray:
        M = np.eye(3)
        M[:2, :2] = self.rotation()
        M[:2, 2] = (self.a, self.b)
        return M

    def compose(self, other: SE2Element) -> SE2Element:
        """Matrix product self @ other (apply ``other`` first).

        The translation of ``other`` is rotated by ``self``; angles and
        translations do not simply add.
        """
        t = self.rotation() @ np.array([other.a, other.b]) + (self.a, self.b)
        return SE2Element(self.theta + other.theta, float(t[0]), float(t[1]))

    def inverse(self) -> SE2Element:
        t = -self.rotation().T @ np.array([self.a, self.b])
        return SE2Element(-self.theta, float(t[0]), float(t[1]))

    def apply_points(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.rotation().T + (self.a, self.b)

    def apply_vectors(self, vectors) -> np.ndarray:
        """Action on velocities: rotation only."""
        return np.asarray(vectors, dtype=float) @ self.rotation().T


def apply_se2(g: SE2Element, f: Framework) -> Framework:
    return f.with_positions(g.apply_points(f.positions))


def mirror(f: Framework) -> Framework:
    return f.with_positions(f.positions * (1.0, -1.0))


class CanonicalForm(NamedTuple):
    framework: Framework
    alignment_vertex: int | None  # None when every vertex sits on x_1
    scale: float
    scale_free: bool


def canonical_form(f: Framework, tol: float = ALIGN_TOL,
                   scale_free: bool = False) -> CanonicalForm:
    """Representative with x_1 at the origin and the first vertex distinct
    from x_1 on the positive x-axis.

    Fixing the positive half-axis leaves no rotation freedom, so no further
    tie-break is needed; in particular mirror images stay distinct. With
    ``scale_free`` the result is also normalized to unit perimeter and
    ``scale`` is the original perimeter.
    """
    require_nondegenerate(f)
    p = f.positions - f.positions[0]
    diam = f.diameter()
    dist = np.linalg.norm(p, axis=1)
    far = np.nonzero(dist > tol * diam)[0]
    k = int(far[0])
    c, s = p[k] / dist[k]
    rot = np.array([[c, s], [-s, c]])  # sends p[k] to (|p_k|, 0)
    q = p @ rot.T
    q[k, 1] = 0.0
    out = f.with_positions(q)
    scale = 1.0
    if scale_free:
        out, scale = normalize(out)
    return CanonicalForm(out, k, scale, scale_free)


def are_congruent(f1: Framework, f2: Framework, allow_reflection: bool = False,
                  tol: float | None = None) -> bool:
    """Label-respecting congruence modulo SE(2) (and reflection if allowed).

    ``tol`` defaults to ``CONGRUENCE_TOL * diameter(f1)`` and bounds the
    largest per-vertex distance between canonical forms.
    """
    if f1.graph != f2.graph:
        raise GraphMismatch("frameworks realize different graphs")
    c1 = canonical_form(f1).framework.positions
    c2 = canonical_form(f2).framework.positions
    if tol is None:
        tol = CONGRUENCE_TOL * f1.diameter()
    if np.max(np.linalg.norm(c1 - c2, axis=1)) <= tol:
        return True
    if allow_reflection:
        return bool(np.max(np.linalg.norm(c1 - c2 * (1.0, -1.0), axis=1)) <= tol)
    return False


def perimeter(f: Framework) -> float:
    return float(np.sum(f.edge_lengths()))


def normalize(f: Framework) -> tuple[Framework, float]:
    """Scale so the edge lengths sum to 1; returns the framework and the
    original sum."""
    scale = perimeter(f)
    if not scale > 0:
        raise ZeroPerimeter("no edge of positive length")
    return f.with_positions(f.positions / scale), scale


def reflect_vertices(f: Framework, axis_edge: int, vertices) -> Framework:
    """Reflect ``vertices`` across the line through the endpoints of edge ``axis_edge``."""
    i, j = f.graph.edges[axis_edge]
    p, q = f.positions[i], f.positions[j]
    d = q - p
    length = float(np.hypot(*d))
    if length <= ALIGN_TOL * max(1.0, f.diameter()):
        raise DegenerateAxis(f"axis edge {axis_edge} has coincident endpoints")
    normal = np.array([-d[1], d[0]]) / length
    pos = f.positions.copy()
    for v in vertices:
        pos[v] = pos[v] - 2.0 * np.dot(pos[v] - p, normal) * normal
    return f.with_positions(pos)


# 2-cycles reflections: vertex 2 (R1) or vertex 4 (R2) about the 1-3 edge

def require_two_cycles(g: DirectedGraph):
    from .fixtures import two_cycles

    if g.n != 4 or set(undirected_edges(g)[0]) != set(undirected_edges(two_cycles())[0]):
        raise NotTwoCycles("operation defined for the 2-cycles graph only")
    axis = {(0, 2), (2, 0)}
    for k, e in enumerate(g.edges):
        if e in axis:
            return k
    raise NotTwoCycles("no 1-3 edge")


def r1(f: Framework) -> Framework:
    return reflect_vertices(f, require_two_cycles(f.graph), [1])


def r2(f: Framework) -> Framework:
    return reflect_vertices(f, require_two_cycles(f.graph), [3])


def symmetry_orbit(f: Framework) -> list[Framework]:
    """[f, R1 f, R2 f, R1 R2 f] for a 2-cycles framework."""
    return [f, r1(f), r2(f), r1(r2(f))]


def ls_lower_bound(n: int) -> int:
    """Generic lower bound 2^ceil((n-1)/2) on the number of realizations."""
    if n < 3:
        raise ValueError("bound defined for n >= 3")
    return 2 ** math.ceil((n - 1) / 2)


def cat_cp(k: int) -> int:
    """Lusternik-Schnirelmann category of complex projective k-space."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return k + 1


# --- length conventions ---------------------------------------------------

def to_half_squared(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    return 0.5 * d * d


def to_squared(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    return d * d


def from_half_squared(h) -> np.ndarray:
    return np.sqrt(2.0 * np.asarray(h, dtype=float))


# --- feasibility ------------------------------------------------------------

class Feasibility(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    INFEASIBLE = "Infeasible"


class FeasibilityResult(NamedTuple):
    status: Feasibility
    approximate: bool
    method: str


def triangle_status(a: float, b: float, c: float,
                    tol: float = FEASIBILITY_TOL) -> Feasibility:
    """Triangle inequalities for side lengths a, b, c."""
    eps = tol * max(a + b + c, 1.0)
    slack = min(b + c - a, c + a - b, a + b - c)
    if slack < -eps or min(a, b, c) < -eps:
        return Feasibility.INFEASIBLE
    if slack <= eps or min(a, b, c) <= eps:
        return Feasibility.BOUNDARY
    return Feasibility.INTERIOR


def _triangles(g: DirectedGraph):
    """Triangles of the underlying graph as triples of edge indices."""
    index = {}
    for k, (s, t) in enumerate(g.edges):
        index.setdefault((min(s, t), max(s, t)), k)
    out = []
    for a in range(g.n):
        for b in range(a + 1, g.n):
            for c in range(b + 1, g.n):
                tri = [(a, b), (b, c), (a, c)]
                if all(e in index for e in tri):
                    out.append(tuple(index[e] for e in tri))
    return out


def _worst(statuses) -> Feasibility:
    if Feasibility.INFEASIBLE in statuses:
        return Feasibility.INFEASIBLE
    if Feasibility.BOUNDARY in statuses:
        return Feasibility.BOUNDARY
    return Feasibility.INTERIOR


def edge_length_feasible(g: DirectedGraph, d, seed: int = 0) -> FeasibilityResult:
    """Classify a length vector as interior, boundary or outside the feasible set.

    Triangle and 4-vertex Laman graphs are decided by their triangle
    inequalities; vertex-add-constructible graphs by exact circle
    intersection over every choice vector; anything else by a multistart
    least-squares realization (``approximate=True``).
    """
    from . import henneberg
    from .rigidity import laman_check

    d = np.asarray(d, dtype=float)
    if d.shape != (g.m,):
        raise GraphMismatch(f"{d.size} lengths for {g.m} edges")
    if np.any(d < 0):
        return FeasibilityResult(Feasibility.INFEASIBLE, False, "sign")
    edges, collapsed = undirected_edges(g)
    if collapsed == 0 and g.n in (3, 4) and g.m == 2 * g.n - 3 and laman_check(g):
        statuses = [triangle_status(*d[list(t)]) for t in _triangles(g)]
        return FeasibilityResult(_worst(statuses), False, "triangle_inequalities")
    if collapsed == 0 and g.n >= 2 and laman_check(g):
        seq = henneberg.find_vertex_add_order(g)
        if seq is not None:
            return FeasibilityResult(henneberg.choice_feasibility(g, d, seq), False,
                                     "circle_intersection")
    found = henneberg.numeric_realize(g, d, seed=seed)
    status = Feasibility.INTERIOR if found is not None else Feasibility.INFEASIBLE
    return FeasibilityResult(status, True, "multistart_least_squares")


def enumerate_frameworks(g: DirectedGraph, d, tol: float | None = None) -> list[Framework]:
    """Every non-congruent (SE(2) only) framework of ``g`` with edge lengths ``d``.

    ``g`` must be vertex-add constructible. Branches whose circles miss are
    skipped; representatives keep the order of their first choice vector.
    """
    from . import henneberg
    from .errors import CirclesDisjoint, CirclesTangent, InfeasibleLengths

    seq = henneberg.require_vertex_add_order(g)
    reps: list[Framework] = []
    nsteps = len(seq.steps)
    tangent = False
    for choices in henneberg.choice_vectors(nsteps):
        try:
            f = henneberg.realize_graph(g, d, choices, seq)
        except CirclesDisjoint:
            continue
        except CirclesTangent:
            tangent = True
            continue
        t = CONGRUENCE_TOL * f.diameter() if tol is None else tol
        if not any(are_congruent(f, r, tol=t) for r in reps):
            reps.append(f)
    if not reps:
        reason = "lengths on the boundary of the feasible set" if tangent else "no branch realizes"
        raise InfeasibleLengths(reason)
    return reps

