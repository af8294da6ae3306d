"""Named graphs used throughout the tests, the CLI and the docs."""
from .graph_core import DirectedGraph


def two_cycles() -> DirectedGraph:
    # edge order z1..z5: 1->2, 2->3, 3->1, 4->3, 1->4
    return DirectedGraph.from_one_based(4, [(1, 2), (2, 3), (3, 1), (4, 3), (1, 4)])


def triangle() -> DirectedGraph:
    """Directed 3-cycle 1->2->3->1."""
    return DirectedGraph.from_one_based(3, [(1, 2), (2, 3), (3, 1)])


def k4() -> DirectedGraph:
    return DirectedGraph.from_one_based(
        4, [(1, 2), (2, 3), (3, 1), (4, 3), (1, 4), (2, 4)]
    )


def figure_1a() -> DirectedGraph:
    """Five agents, six edges: x5 hangs off x4 and can swing freely."""
    return DirectedGraph.from_one_based(
        5, [(1, 4), (1, 2), (2, 3), (3, 1), (4, 3), (4, 5)]
    )


def figure_14b() -> DirectedGraph:
    """Agent 3 follows all three vertices of the rigid triangle 1-2-4."""
    return DirectedGraph.from_one_based(
        4, [(1, 2), (2, 4), (4, 1), (3, 1), (3, 2), (3, 4)]
    )


def single_edge() -> DirectedGraph:
    return DirectedGraph.from_one_based(2, [(1, 2)])


def path(n: int) -> DirectedGraph:
    return DirectedGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def triangle_strip(n: int) -> DirectedGraph:
    """Vertex-add chain: vertex k follows vertices k-1 and k-2 (0-based k >= 2)."""
    edges = [(0, 1)]
    for k in range(2, n):
        edges += [(k, k - 2), (k, k - 1)]
    return DirectedGraph(n, tuple(edges))


NAMED = {
    "two_cycles": two_cycles,
    "triangle": triangle,
    "k4": k4,
    "figure_1a": figure_1a,
    "figure_14b": figure_14b,
    "single_edge": single_edge,
}
