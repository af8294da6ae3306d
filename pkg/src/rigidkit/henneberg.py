"""Henneberg constructions and exact realization by circle intersection.

A sequence starts from the segment 0 -> 1 and adds one vertex per step. New
edges always point from the new vertex to the vertices it attaches to, so
every non-base agent follows exactly the agents it was built on.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    CirclesDisjoint,
    CirclesTangent,
    InvalidStep,
    NotLaman,
    NotVertexAddConstructible,
)
from .graph_core import DirectedGraph, neighbours, undirected_edges
from .rigidity import Framework, laman_check

TANGENCY_TOL = 1e-9


@dataclass(frozen=True)
class VertexAdd:
    anchor_i: int
    anchor_j: int

    def __post_init__(self):
        if self.anchor_i == self.anchor_j:
            raise InvalidStep(None, f"vertex-add anchors must differ, got {self.anchor_i} twice")


@dataclass(frozen=True)
class EdgeSplit:
    split_edge: tuple[int, int]
    third: int

    def __post_init__(self):
        if self.third in self.split_edge:
            raise InvalidStep(None, "edge-split third vertex lies on the split edge")


@dataclass(frozen=True)
class HennebergSequence:
    steps: tuple
    # labels[k] = vertex of some target graph created k-th; None means identity
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def n(self) -> int:
        return 2 + len(self.steps)

    @property
    def vertex_add_only(self) -> bool:
        return all(isinstance(s, VertexAdd) for s in self.steps)


def _graph_prefixes(seq: HennebergSequence):
    n = 2
    edges = [(0, 1)]
    yield DirectedGraph(n, tuple(edges))
    for idx, step in enumerate(seq.steps):
        if isinstance(step, VertexAdd):
            a, b = step.anchor_i, step.anchor_j
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidStep(idx, f"anchors ({a}, {b}) do not exist yet")
            edges += [(n, a), (n, b)]
        elif isinstance(step, EdgeSplit):
            i, j = step.split_edge
            k = step.third
            if not (0 <= k < n):
                raise InvalidStep(idx, f"third vertex {k} does not exist yet")
            if (i, j) in edges:
                edges.remove((i, j))
            elif (j, i) in edges:
                edges.remove((j, i))
            else:
                raise InvalidStep(idx, f"edge ({i}, {j}) not present")
            edges += [(n, i), (n, j), (n, k)]
        else:
            raise InvalidStep(idx, f"unknown step {step!r}")
        n += 1
        yield DirectedGraph(n, tuple(edges))


def apply_sequence(seq: HennebergSequence) -> DirectedGraph:
    *_, g = _graph_prefixes(seq)
    return g


def validate(seq: HennebergSequence) -> bool:
    """True iff every intermediate graph is minimally rigid."""
    try:
        return all(laman_check(g) for g in _graph_prefixes(seq))
    except InvalidStep:
        return False


def random_sequence(n: int, seed: int, vertex_add_only: bool = False) -> HennebergSequence:
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    steps = []
    edges = [(0, 1)]
    for size in range(2, n):
        if vertex_add_only or size < 3 or rng.random() < 0.5:
            a, b = (int(v) for v in rng.choice(size, 2, replace=False))
            steps.append(VertexAdd(a, b))
            edges += [(size, a), (size, b)]
        else:
            i, j = edges.pop(int(rng.integers(len(edges))))
            k = int(rng.choice([v for v in range(size) if v not in (i, j)]))
            steps.append(EdgeSplit((i, j), k))
            edges += [(size, i), (size, j), (size, k)]
    return HennebergSequence(tuple(steps))


def find_vertex_add_order(g: DirectedGraph) -> HennebergSequence | None:
    """Vertex-add-only sequence rebuilding the undirected structure of ``g``.

    Peels degree-2 vertices, preferring those of lowest degree in ``g`` and
    then the highest label. ``labels`` maps creation order back to vertices
    of ``g``; anchors are listed lower label first.
    Returns None when some intermediate graph has no degree-2 vertex.
    """
    if not laman_check(g):
        raise NotLaman("graph is not minimally rigid")
    nb = neighbours(g)
    alive = set(range(g.n))
    removed = []
    while len(alive) > 2:
        cands = [v for v in alive if len(nb[v] & alive) == 2]
        if not cands:
            return None
        v = max(cands, key=lambda c: (-len(nb[c]), c))
        alive.discard(v)
        removed.append((v, sorted(nb[v] & alive)))
    labels = sorted(alive)
    steps = []
    for v, (a, b) in reversed(removed):
        steps.append(VertexAdd(labels.index(a), labels.index(b)))
        labels.append(v)
    return HennebergSequence(tuple(steps), tuple(labels))


def require_vertex_add_order(g: DirectedGraph) -> HennebergSequence:
    edges, collapsed = undirected_edges(g)
    if collapsed or g.n < 2 or not laman_check(g):
        raise NotVertexAddConstructible("graph is not minimally rigid")
    seq = find_vertex_add_order(g)
    if seq is None:
        raise NotVertexAddConstructible("no vertex-add-only Henneberg order")
    return seq


def choice_vectors(k: int):
    return itertools.product((0, 1), repeat=k)


def circle_intersection(ca, ra, cb, rb, choice: int, step: int = 0) -> np.ndarray:
    """Point at distance ra from ca and rb from cb.

    ``choice`` 0 picks the point on the left of ca -> cb (positive signed
    area), 1 the point on the right.
    """
    delta = cb - ca
    dist = float(np.hypot(*delta))
    gap = min(abs(dist - (ra + rb)), abs(dist - abs(ra - rb)))
    if dist == 0.0:
        raise CirclesDisjoint(step, "anchors coincide")
    if gap < TANGENCY_TOL * (ra + rb):
        raise CirclesTangent(step, "circles are tangent (boundary of the feasible set)")
    if dist > ra + rb or dist < abs(ra - rb):
        raise CirclesDisjoint(step, "circles do not meet")
    u = delta / dist
    along = (dist * dist + ra * ra - rb * rb) / (2.0 * dist)
    h = np.sqrt(max(ra * ra - along * along, 0.0))
    left = np.array([-u[1], u[0]])
    sign = 1.0 if choice == 0 else -1.0
    return ca + along * u + sign * h * left


def realize(seq: HennebergSequence, d, choices) -> Framework:
    """Exact realization of ``apply_sequence(seq)`` with edge lengths ``d``.

    The base edge runs from the origin along the positive x-axis.
    """
    if not seq.vertex_add_only:
        raise NotVertexAddConstructible("realize handles vertex-add steps only")
    d = np.asarray(d, dtype=float)
    choices = list(choices)
    if len(choices) != len(seq.steps):
        raise ValueError(f"{len(choices)} choice bits for {len(seq.steps)} steps")
    if d.shape != (2 * seq.n - 3,):
        raise ValueError(f"expected {2 * seq.n - 3} lengths, got {d.size}")
    pos = np.zeros((seq.n, 2))
    pos[1] = (d[0], 0.0)
    for k, (step, bit) in enumerate(zip(seq.steps, choices)):
        a, b = step.anchor_i, step.anchor_j
        pos[k + 2] = circle_intersection(pos[a], d[1 + 2 * k], pos[b], d[2 + 2 * k], bit, k)
    return Framework(apply_sequence(HennebergSequence(seq.steps)), pos)


def realize_graph(g: DirectedGraph, d, choices, seq: HennebergSequence | None = None) -> Framework:
    """Realize ``g`` itself (its labels and edge order) through a vertex-add order."""
    if seq is None:
        seq = require_vertex_add_order(g)
    labels = seq.labels or tuple(range(g.n))
    d = np.asarray(d, dtype=float)
    length = {}
    for (s, t), dl in zip(g.edges, d):
        length[frozenset((s, t))] = dl
    h = apply_sequence(HennebergSequence(seq.steps))
    d_seq = [length[frozenset((labels[a], labels[b]))] for a, b in h.edges]
    f = realize(seq, d_seq, choices)
    pos = np.zeros((g.n, 2))
    for k, v in enumerate(labels):
        pos[v] = f.positions[k]
    return Framework(g, pos)


def choice_feasibility(g: DirectedGraph, d, seq: HennebergSequence):
    from .shape_space import Feasibility

    d = np.asarray(d, dtype=float)
    tangent = False
    for choices in choice_vectors(len(seq.steps)):
        try:
            realize_graph(g, d, choices, seq)
        except CirclesTangent:
            tangent = True
            continue
        except CirclesDisjoint:
            continue
        if np.min(d) <= TANGENCY_TOL * np.sum(d):
            return Feasibility.BOUNDARY
        return Feasibility.INTERIOR
    return Feasibility.BOUNDARY if tangent else Feasibility.INFEASIBLE


def numeric_realize(g: DirectedGraph, d, seed: int = 0, starts: int = 20,
                    tol: float = 1e-9) -> Framework | None:
    """Multistart least-squares search for positions with edge lengths ``d``."""
    d = np.asarray(d, dtype=float)
    s = np.array([e[0] for e in g.edges])
    t = np.array([e[1] for e in g.edges])
    scale = max(float(np.max(d)) if d.size else 1.0, 1e-12)

    def residual(x):
        p = x.reshape(-1, 2)
        return np.linalg.norm(p[t] - p[s], axis=1) - d

    rng = np.random.default_rng(seed)
    for _ in range(starts):
        x0 = rng.random(2 * g.n) * scale
        sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.max(np.abs(residual(sol.x))) < tol * scale:
            return Framework(g, sol.x.reshape(-1, 2))
    return None
