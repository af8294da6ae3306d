"""Directed graphs and the adjacency operators built on them.

Vertices are 0-based internally. Edge order is part of a graph's identity: it
fixes the row order of every edge-indexed matrix in the package.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGraph


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(s), int(t)) for s, t in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 1:
            raise InvalidGraph(f"vertex count must be positive, got {self.n}")
        seen = set()
        for k, (s, t) in enumerate(edges):
            if not (0 <= s < self.n and 0 <= t < self.n):
                raise InvalidGraph(f"edge {k} ({s}, {t}) out of range for n={self.n}")
            if s == t:
                raise InvalidGraph(f"edge {k} is a self-loop at vertex {s}")
            if (s, t) in seen:
                raise InvalidGraph(f"duplicate edge ({s}, {t})")
            seen.add((s, t))

    @property
    def m(self) -> int:
        return len(self.edges)

    def out_edges(self, v: int) -> list[int]:
        """Indices of edges leaving ``v``, in edge order."""
        return [k for k, (s, _) in enumerate(self.edges) if s == v]

    def in_edges(self, v: int) -> list[int]:
        return [k for k, (_, t) in enumerate(self.edges) if t == v]

    def without_edge(self, k: int) -> DirectedGraph:
        return DirectedGraph(self.n, self.edges[:k] + self.edges[k + 1:])

    @classmethod
    def from_one_based(cls, n, edges) -> DirectedGraph:
        return cls(n, tuple((s - 1, t - 1) for s, t in edges))


def outvalence(g: DirectedGraph, v: int) -> int:
    return sum(1 for s, _ in g.edges if s == v)


def invalence(g: DirectedGraph, v: int) -> int:
    return sum(1 for _, t in g.edges if t == v)


def adjacency_matrix(g: DirectedGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n), dtype=np.int64)
    for s, t in g.edges:
        A[s, t] = -1
    return A


def edge_adjacency_matrix(g: DirectedGraph) -> np.ndarray:
    """m x m matrix: -1 where edges share a source, +1 where edge i ends at
    the source of edge j. The diagonal is therefore -1."""
    m = g.m
    Ae = np.zeros((m, m), dtype=np.int64)
    for i, (si, ti) in enumerate(g.edges):
        for j, (sj, _) in enumerate(g.edges):
            if sj == si:
                Ae[i, j] = -1
            elif sj == ti:
                Ae[i, j] = 1
    return Ae


def mixed_adjacency_matrix(g: DirectedGraph) -> np.ndarray:
    """m x n incidence matrix, rows are edges: -1 at the source, +1 at the target."""
    Am = np.zeros((g.m, g.n), dtype=np.int64)
    for k, (s, t) in enumerate(g.edges):
        Am[k, s] = -1
        Am[k, t] = 1
    return Am


def source_matrix(g: DirectedGraph) -> np.ndarray:
    """n x m selector with a 1 at (source of edge k, k).

    Satisfies ``edge_adjacency_matrix(g) == mixed_adjacency_matrix(g) @ source_matrix(g)``
    for every graph.
    """
    S = np.zeros((g.n, g.m), dtype=np.int64)
    for k, (s, _) in enumerate(g.edges):
        S[s, k] = 1
    return S


def kron2(M) -> np.ndarray:
    """Replace each entry a of ``M`` by the 2x2 block a*I."""
    M = np.asarray(M)
    return np.kron(M, np.eye(2, dtype=M.dtype))


class AgentRole(enum.Enum):
    LEADER = "Leader"
    COLEADER = "Coleader"
    FOLLOWER = "Follower"


@dataclass(frozen=True)
class AgentClassification:
    roles: tuple[AgentRole, ...]
    is_leaderless: bool
    warnings: tuple[str, ...] = field(default=())


def classify_agents(g: DirectedGraph) -> AgentClassification:
    """Leader/coleader/follower roles plus heuristic feasibility warnings.

    An agent following more than two agents whose mutual constraints already
    form a minimally rigid subgraph is flagged: those agents settle without
    regard to it. This is a warning, not a decision.
    """
    from .rigidity import laman_check  # rigidity depends on this module

    roles = []
    warnings = []
    for v in range(g.n):
        out_v, in_v = outvalence(g, v), invalence(g, v)
        if out_v == 0:
            roles.append(AgentRole.LEADER)
        elif in_v == 0:
            roles.append(AgentRole.FOLLOWER)
        else:
            roles.append(AgentRole.COLEADER)
        if out_v > 2:
            followed = sorted({t for s, t in g.edges if s == v})
            sub = induced_subgraph(g, followed)
            if sub.n >= 2 and laman_check(sub):
                warnings.append(
                    f"agent {v + 1}: outvalence {out_v} > 2 onto minimally rigid subgraph "
                    f"{{{', '.join(str(u + 1) for u in followed)}}}"
                )
    leaderless = AgentRole.LEADER not in roles
    return AgentClassification(tuple(roles), leaderless, tuple(warnings))


def induced_subgraph(g: DirectedGraph, vertices) -> DirectedGraph:
    """Subgraph on ``vertices`` (relabelled 0..k-1 in the given order)."""
    index = {v: i for i, v in enumerate(vertices)}
    edges = tuple((index[s], index[t]) for s, t in g.edges if s in index and t in index)
    return DirectedGraph(len(index), edges)


def undirected_edges(g: DirectedGraph) -> tuple[list[tuple[int, int]], int]:
    """Underlying simple undirected edge list (sorted pairs, first-seen order)
    and the number of antiparallel pairs collapsed into one edge."""
    seen = {}
    collapsed = 0
    for s, t in g.edges:
        key = (min(s, t), max(s, t))
        if key in seen:
            collapsed += 1
        else:
            seen[key] = None
    return list(seen), collapsed


def neighbours(g: DirectedGraph) -> list[set[int]]:
    nb = [set() for _ in range(g.n)]
    for s, t in g.edges:
        nb[s].add(t)
        nb[t].add(s)
    return nb


def is_connected(g: DirectedGraph, removed=()) -> bool:
    """Undirected connectivity of ``g`` with the ``removed`` vertices deleted."""
    removed = set(removed)
    alive = [v for v in range(g.n) if v not in removed]
    if len(alive) <= 1:
        return True
    nb = neighbours(g)
    start = alive[0]
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in nb[v]:
            if w not in removed and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(alive)


def cycle_basis(g: DirectedGraph) -> np.ndarray:
    """Signed fundamental cycles of the underlying graph, one row per non-tree edge.

    Each row c satisfies ``c @ mixed_adjacency_matrix(g) == 0``, i.e. the edge
    vectors z = x_target - x_source sum to zero around it.
    """
    nb = [[] for _ in range(g.n)]
    for k, (s, t) in enumerate(g.edges):
        nb[s].append((t, k, 1))   # walking s -> t traverses edge k forwards
        nb[t].append((s, k, -1))
    parent = [None] * g.n  # (parent vertex, edge index, sign)
    depth = [-1] * g.n
    tree = set()
    for root in range(g.n):
        if depth[root] >= 0:
            continue
        depth[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w, k, sign in nb[v]:
                if depth[w] < 0:
                    depth[w] = depth[v] + 1
                    parent[w] = (v, k, sign)
                    tree.add(k)
                    queue.append(w)

    def path_to_root(v):
        # signed edge coefficients for walking root -> v
        coeffs = {}
        while parent[v] is not None:
            u, k, sign = parent[v]
            coeffs[k] = coeffs.get(k, 0) + sign
            v = u
        return coeffs

    rows = []
    for k, (s, t) in enumerate(g.edges):
        if k in tree:
            continue
        c = np.zeros(g.m, dtype=np.int64)
        # root -> s, then s -> t along edge k, then t -> root
        for e, val in path_to_root(s).items():
            c[e] += val
        c[k] += 1
        for e, val in path_to_root(t).items():
            c[e] -= val
        rows.append(c)
    if not rows:
        return np.zeros((0, g.m), dtype=np.int64)
    return np.array(rows)
