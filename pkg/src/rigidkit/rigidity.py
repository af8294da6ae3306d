"""Frameworks, the rigidity matrix and the rigidity test ladder.

Rank decisions use a relative singular-value threshold: a singular value
counts iff it exceeds ``tol * sigma_max``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from itertools import combinations

import numpy as np

from .errors import DegenerateFramework, GraphMismatch, LamanInconsistency, TooLarge
from .graph_core import (
    DirectedGraph,
    is_connected,
    kron2,
    mixed_adjacency_matrix,
    undirected_edges,
)

RANK_TOL = 1e-9
GENERIC_SAMPLES = 5
EXHAUSTIVE_LAMAN_MAX_N = 8
CONNECTIVITY_MAX_N = 12


@dataclass(frozen=True, eq=False)
class Framework:
    graph: DirectedGraph
    positions: np.ndarray  # (n, 2)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        if pos.shape[0] != self.graph.n:
            raise GraphMismatch(
                f"{pos.shape[0]} positions for a graph with {self.graph.n} vertices"
            )
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.graph.n

    def flat(self) -> np.ndarray:
        return self.positions.reshape(-1).copy()

    def with_positions(self, positions) -> Framework:
        return Framework(self.graph, positions)

    def edge_vectors(self) -> np.ndarray:
        """z_l = x_target - x_source, one row per edge."""
        s = [e[0] for e in self.graph.edges]
        t = [e[1] for e in self.graph.edges]
        return self.positions[t] - self.positions[s]

    def edge_lengths(self) -> np.ndarray:
        return np.linalg.norm(self.edge_vectors(), axis=1)

    def diameter(self) -> float:
        p = self.positions
        return float(np.max(np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)))

    def is_totally_coincidental(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.positions))))
        return bool(np.all(np.abs(self.positions - self.positions[0]) <= tol * scale))


def require_nondegenerate(f: Framework) -> None:
    if f.is_totally_coincidental():
        raise DegenerateFramework("all vertices coincide")


def distance_function(f: Framework) -> np.ndarray:
    """Half squared length of every edge, in edge order."""
    z = f.edge_vectors()
    return 0.5 * np.einsum("ij,ij->i", z, z)


def rigidity_matrix(f: Framework) -> np.ndarray:
    """Jacobian of ``distance_function`` w.r.t. the flattened positions (m x 2n).

    Row l for edge (i, j) holds x_i - x_j in vertex i's block and x_j - x_i in
    vertex j's block. Other sign/transpose conventions change no rank.
    """
    g = f.graph
    R = np.zeros((g.m, 2 * g.n))
    p = f.positions
    for l, (i, j) in enumerate(g.edges):
        R[l, 2 * i:2 * i + 2] = p[i] - p[j]
        R[l, 2 * j:2 * j + 2] = p[j] - p[i]
    return R


def edge_block_matrix(f: Framework) -> np.ndarray:
    """m x 2m block-diagonal matrix with z_l^T in row l."""
    z = f.edge_vectors()
    m = len(z)
    Z = np.zeros((m, 2 * m))
    for l in range(m):
        Z[l, 2 * l:2 * l + 2] = z[l]
    return Z


def factorized_rigidity_matrix(f: Framework) -> np.ndarray:
    """Z @ kron2(A_m), which reproduces ``rigidity_matrix(f)`` exactly."""
    return edge_block_matrix(f) @ kron2(mixed_adjacency_matrix(f.graph))


def singular_values(M: np.ndarray) -> np.ndarray:
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    sv = singular_values(M)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def is_infinitesimally_rigid(f: Framework, tol: float = RANK_TOL) -> bool:
    require_nondegenerate(f)
    if f.n < 2:
        return False
    return numerical_rank(rigidity_matrix(f), tol) == 2 * f.n - 3


def _draw_rng(seed: int, draw: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(draw)])


def random_framework(g: DirectedGraph, seed: int, draw: int = 0) -> Framework:
    """Uniform [0, 1) coordinates; stream derived from ``(seed, draw)``."""
    return Framework(g, _draw_rng(seed, draw).random((g.n, 2)))


def _generic_best(g: DirectedGraph, samples: int, seed: int, tol: float):
    best = None
    for k in range(samples):
        f = random_framework(g, seed, k)
        sv = singular_values(rigidity_matrix(f))
        r = int(np.sum(sv > tol * sv[0])) if sv.size and sv[0] > 0 else 0
        if best is None or r > best[0]:
            best = (r, f, sv)
    return best


def generic_rank(g: DirectedGraph, samples: int = GENERIC_SAMPLES, seed: int = 0,
                 tol: float = RANK_TOL) -> int:
    """Max rigidity-matrix rank over ``samples`` random placements."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if g.m == 0:
        return 0
    return _generic_best(g, samples, seed, tol)[0]


# --- Laman ---------------------------------------------------------------

def pebble_game(n: int, edges) -> tuple[bool, list[tuple[int, int]]]:
    """(2,3) pebble game on an undirected simple graph.

    Returns ``(all_independent, accepted_edges)``. An edge is accepted iff four
    pebbles can be gathered on its endpoints.
    """
    pebbles = [2] * n
    out = [set() for _ in range(n)]  # pebble-covered orientation u -> w
    accepted = []
    independent = True

    def find_pebble(root, fixed):
        # DFS along oriented edges for a free pebble, then reverse the path
        parent = {root: None, fixed: None}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in out[v]:
                if w in parent:
                    continue
                parent[w] = v
                if pebbles[w] > 0:
                    pebbles[w] -= 1
                    pebbles[root] += 1
                    while parent[w] is not None:
                        u = parent[w]
                        out[u].discard(w)
                        out[w].add(u)
                        w = u
                    return True
                stack.append(w)
        return False

    for u, v in edges:
        while pebbles[u] + pebbles[v] < 4:
            if not (find_pebble(u, v) or find_pebble(v, u)):
                break
        if pebbles[u] + pebbles[v] < 4:
            independent = False
            continue
        if pebbles[u] > 0:
            pebbles[u] -= 1
            out[u].add(v)
        else:
            pebbles[v] -= 1
            out[v].add(u)
        accepted.append((u, v))
    return independent, accepted


def laman_pebble(g: DirectedGraph) -> bool:
    edges, _ = undirected_edges(g)
    if len(edges) != 2 * g.n - 3:
        return False
    independent, _ = pebble_game(g.n, edges)
    return independent


def laman_exhaustive(g: DirectedGraph) -> bool:
    """Direct check of the edge count and every induced subgraph's count."""
    edges, _ = undirected_edges(g)
    if len(edges) != 2 * g.n - 3:
        return False
    for k in range(2, g.n):
        for subset in combinations(range(g.n), k):
            s = set(subset)
            m_sub = sum(1 for a, b in edges if a in s and b in s)
            if m_sub > 2 * k - 3:
                return False
    return True


def laman_check(g: DirectedGraph) -> bool:
    """Minimal generic rigidity, edge directions ignored.

    Graphs with at most eight vertices are also checked by exhaustive subgraph
    enumeration; a disagreement raises LamanInconsistency.
    """
    if g.n < 2:
        return False
    result = laman_pebble(g)
    if g.n <= EXHAUSTIVE_LAMAN_MAX_N and laman_exhaustive(g) != result:
        raise LamanInconsistency(f"pebble game says {result} for {g}")
    return result


def _undirected_graph(n, edges) -> DirectedGraph:
    return DirectedGraph(n, tuple(edges))


def is_redundantly_rigid(g: DirectedGraph, seed: int = 0,
                         samples: int = GENERIC_SAMPLES) -> bool:
    """Generically rigid after deleting any single (undirected) edge."""
    edges, _ = undirected_edges(g)
    target = 2 * g.n - 3
    if len(edges) <= target:
        return False
    for k in range(len(edges)):
        h = _undirected_graph(g.n, edges[:k] + edges[k + 1:])
        if generic_rank(h, samples, seed) != target:
            return False
    return True


def vertex_connectivity(g: DirectedGraph) -> int:
    """Largest k with n > k such that deleting any k-1 vertices leaves the
    underlying graph connected (so K_n gives n-1)."""
    if g.n > CONNECTIVITY_MAX_N:
        raise TooLarge(f"vertex connectivity limited to n <= {CONNECTIVITY_MAX_N}")
    k = 0
    while k + 1 < g.n and all(
        is_connected(g, cut) for cut in combinations(range(g.n), k)
    ):
        k += 1
    return k


def is_generically_globally_rigid(g: DirectedGraph, seed: int = 0) -> bool:
    edges, _ = undirected_edges(g)
    if g.n == 2:
        return len(edges) == 1
    if g.n == 3:
        return len(edges) == 3
    if g.n < 2:
        return False
    return vertex_connectivity(g) >= 3 and is_redundantly_rigid(g, seed)


@dataclass(frozen=True)
class RigidityReport:
    n: int
    m: int
    rank: int
    is_infinitesimally_rigid: bool
    is_laman: bool
    is_minimally_rigid: bool
    is_redundantly_rigid: bool
    vertex_connectivity: int
    is_generically_globally_rigid: bool
    collapsed_antiparallel: int
    singular_values: tuple[float, ...]

    def items(self):
        for fld in fields(self):
            yield fld.name, getattr(self, fld.name)


def rigidity_report(g: DirectedGraph, seed: int = 0,
                    samples: int = GENERIC_SAMPLES) -> RigidityReport:
    if g.m:
        rank, _, sv = _generic_best(g, samples, seed, RANK_TOL)
    else:
        rank, sv = 0, np.zeros(0)
    laman = laman_check(g) if g.n >= 2 else False
    redundant = is_redundantly_rigid(g, seed, samples) if g.n >= 3 else False
    kappa = vertex_connectivity(g)
    if g.n >= 4:
        global_rigid = redundant and kappa >= 3
    else:
        global_rigid = is_generically_globally_rigid(g, seed)
    _, collapsed = undirected_edges(g)
    return RigidityReport(
        n=g.n,
        m=g.m,
        rank=rank,
        is_infinitesimally_rigid=g.n >= 2 and rank == 2 * g.n - 3,
        is_laman=laman,
        is_minimally_rigid=laman and rank == 2 * g.n - 3,
        is_redundantly_rigid=redundant,
        vertex_connectivity=kappa,
        is_generically_globally_rigid=global_rigid,
        collapsed_antiparallel=collapsed,
        singular_values=tuple(float(s) for s in sv),
    )
