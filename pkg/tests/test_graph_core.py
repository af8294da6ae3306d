import numpy as np
import pytest
from hypothesis import given

from rigidkit import fixtures
from rigidkit.errors import InvalidGraph
from rigidkit.graph_core import (
    AgentRole,
    DirectedGraph,
    adjacency_matrix,
    classify_agents,
    cycle_basis,
    edge_adjacency_matrix,
    invalence,
    kron2,
    mixed_adjacency_matrix,
    outvalence,
    source_matrix,
)

from conftest import directed_graphs

# matrices printed for the 2-cycles formation
PRINTED_B = np.array([
    [-1, 1, 0, 0],
    [0, -1, 1, 0],
    [1, 0, -1, 0],
    [0, 0, 1, -1],
    [-1, 0, 0, 1],
])
PRINTED_AE = np.array([
    [-1, 1, 0, 0, -1],
    [0, -1, 1, 0, 0],
    [1, 0, -1, 0, 1],
    [0, 0, 1, -1, 0],
    [-1, 0, 0, 1, -1],
])


def test_mixed_adjacency_matches_printed_matrix():
    B = mixed_adjacency_matrix(fixtures.two_cycles())
    assert B.dtype.kind == "i"
    assert np.array_equal(B, PRINTED_B)


def test_edge_adjacency_matches_printed_matrix():
    A = edge_adjacency_matrix(fixtures.two_cycles())
    assert A.dtype.kind == "i"
    assert np.array_equal(A, PRINTED_AE)


def test_adjacency_two_cycles():
    A = adjacency_matrix(fixtures.two_cycles())
    expected = np.zeros((4, 4), dtype=int)
    for i, j in [(1, 2), (2, 3), (3, 1), (4, 3), (1, 4)]:
        expected[i - 1, j - 1] = -1
    assert np.array_equal(A, expected)


def test_small_cases():
    assert np.array_equal(adjacency_matrix(fixtures.single_edge()), [[0, -1], [0, 0]])
    assert np.array_equal(adjacency_matrix(DirectedGraph(3, ())), np.zeros((3, 3)))
    assert np.array_equal(edge_adjacency_matrix(fixtures.single_edge()), [[-1]])
    assert np.array_equal(edge_adjacency_matrix(fixtures.path(3)), [[-1, 1], [0, -1]])
    assert np.array_equal(mixed_adjacency_matrix(fixtures.single_edge()), [[-1, 1]])


def test_kron2_examples():
    assert np.array_equal(kron2([[1]]), np.eye(2))
    assert np.array_equal(kron2([[-1, 1]]), [[-1, 0, 1, 0], [0, -1, 0, 1]])


def test_kron2_mixed_product():
    rng = np.random.default_rng(4)
    A, B = rng.normal(size=(3, 4)), rng.normal(size=(4, 2))
    assert np.allclose(kron2(A) @ kron2(B), kron2(A @ B), atol=1e-14)


def test_valences():
    g = fixtures.two_cycles()
    assert (outvalence(g, 0), invalence(g, 0)) == (2, 1)
    h = DirectedGraph(3, ((0, 1),))
    assert (outvalence(h, 2), invalence(h, 2)) == (0, 0)
    assert (outvalence(h, 0), invalence(h, 0)) == (1, 0)


@pytest.mark.parametrize("edges", [((0, 0),), ((0, 1), (0, 1)), ((0, 3),)])
def test_invalid_graphs_rejected(edges):
    with pytest.raises(InvalidGraph):
        DirectedGraph(3, edges)


def test_antiparallel_edges_allowed():
    g = DirectedGraph(2, ((0, 1), (1, 0)))
    assert g.m == 2


def test_classification():
    roles = classify_agents(fixtures.two_cycles())
    assert roles.roles == (AgentRole.COLEADER,) * 4
    assert roles.is_leaderless

    single = classify_agents(fixtures.single_edge())
    assert single.roles == (AgentRole.FOLLOWER, AgentRole.LEADER)
    assert not single.is_leaderless


def test_outvalence_three_onto_rigid_triangle_warns():
    c = classify_agents(fixtures.figure_14b())
    assert c.roles[2] is AgentRole.FOLLOWER
    assert any("outvalence 3 > 2 onto minimally rigid subgraph" in w for w in c.warnings)


@given(directed_graphs())
def test_row_and_column_sums(g):
    A = adjacency_matrix(g)
    assert np.array_equal(A.sum(axis=1), [-outvalence(g, v) for v in range(g.n)])
    assert np.array_equal(A.sum(axis=0), [-invalence(g, v) for v in range(g.n)])


@given(directed_graphs())
def test_mixed_rows_have_one_minus_one_plus(g):
    B = mixed_adjacency_matrix(g)
    assert np.all((B == -1).sum(axis=1) == 1)
    assert np.all((B == 1).sum(axis=1) == 1)
    assert np.all(B.sum(axis=1) == 0)


@given(directed_graphs(min_n=2))
def test_edge_adjacency_diagonal_and_source_factorization(g):
    A = edge_adjacency_matrix(g)
    assert np.all(np.diag(A) == -1)
    # A_e = A_m S where S picks each edge's source vertex
    assert np.array_equal(A, mixed_adjacency_matrix(g) @ source_matrix(g))


@given(directed_graphs())
def test_operators_are_pure(g):
    h = DirectedGraph(g.n, tuple(g.edges))
    for op in (adjacency_matrix, edge_adjacency_matrix, mixed_adjacency_matrix):
        assert np.array_equal(op(g), op(h))


@given(directed_graphs(min_n=2))
def test_cycle_basis_annihilates_mixed_adjacency(g):
    C = cycle_basis(g)
    if C.size:
        assert np.array_equal(C @ mixed_adjacency_matrix(g), np.zeros((len(C), g.n)))


def test_cycle_basis_two_cycles():
    C = cycle_basis(fixtures.two_cycles())
    assert C.shape == (2, 5)
    assert np.linalg.matrix_rank(C) == 2
