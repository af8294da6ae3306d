import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidkit import fixtures
from rigidkit.errors import DegenerateFramework, LamanInconsistency, TooLarge
from rigidkit.graph_core import (
    DirectedGraph,
    edge_adjacency_matrix,
    kron2,
    mixed_adjacency_matrix,
    outvalence,
    source_matrix,
)
from rigidkit.henneberg import apply_sequence, random_sequence
from rigidkit.rigidity import (
    Framework,
    distance_function,
    edge_block_matrix,
    factorized_rigidity_matrix,
    generic_rank,
    is_generically_globally_rigid,
    is_infinitesimally_rigid,
    is_redundantly_rigid,
    laman_check,
    laman_exhaustive,
    laman_pebble,
    numerical_rank,
    random_framework,
    rigidity_matrix,
    rigidity_report,
    vertex_connectivity,
)

from conftest import random_graph

FIXTURES = ["two_cycles", "triangle", "k4", "figure_1a", "figure_14b", "single_edge"]


def test_distance_function_examples():
    seg = Framework(fixtures.single_edge(), [[0, 0], [1, 0]])
    assert distance_function(seg).tolist() == [0.5]
    s = np.sqrt(3.0)
    tri = Framework(fixtures.triangle(), [[0, 0], [2, 0], [1, s]])
    assert np.allclose(distance_function(tri), [2, 2, 2], atol=1e-14)
    dup = Framework(DirectedGraph(3, ((0, 1), (1, 2))), [[0, 0], [0, 0], [1, 1]])
    assert distance_function(dup)[0] == 0.0


def test_rigidity_matrix_single_edge():
    f = Framework(fixtures.single_edge(), [[0, 0], [1, 0]])
    assert np.array_equal(rigidity_matrix(f), [[-1, 0, 1, 0]])


def test_rigidity_matrix_is_jacobian_of_distance_function():
    f = random_framework(fixtures.k4(), seed=3)
    R = rigidity_matrix(f)
    h = 1e-6
    x = f.flat()
    fd = np.zeros_like(R)
    for k in range(x.size):
        hi, lo = x.copy(), x.copy()
        hi[k] += h
        lo[k] -= h
        fd[:, k] = (distance_function(f.with_positions(hi.reshape(-1, 2)))
                    - distance_function(f.with_positions(lo.reshape(-1, 2)))) / (2 * h)
    assert np.allclose(R, fd, atol=1e-8)


@pytest.mark.parametrize("name", FIXTURES)
def test_factorization_through_edge_blocks(name):
    g = fixtures.NAMED[name]()
    f = random_framework(g, seed=11)
    R = rigidity_matrix(f)
    ZA = edge_block_matrix(f) @ kron2(mixed_adjacency_matrix(g))
    assert np.allclose(R, ZA, atol=1e-14)
    assert np.allclose(factorized_rigidity_matrix(f), R, atol=1e-14)


@pytest.mark.parametrize("name", ["two_cycles", "triangle", "k4"])
def test_edge_adjacency_factor_through_mixed(name):
    """For leaderless graphs, K = source selector is rank n and A_e = A_m K exactly."""
    g = fixtures.NAMED[name]()
    assert all(outvalence(g, v) > 0 for v in range(g.n))
    K = np.zeros((g.n, g.m), dtype=np.int64)
    for j, (s, _) in enumerate(g.edges):
        K[s, j] = 1
    assert np.linalg.matrix_rank(K) == g.n
    assert np.array_equal(mixed_adjacency_matrix(g) @ K, edge_adjacency_matrix(g))
    assert np.array_equal(K, source_matrix(g))


def test_collinear_triangle_rank_drops():
    f = Framework(fixtures.triangle(), [[0, 0], [1, 0], [3, 0]])
    assert numerical_rank(rigidity_matrix(f)) <= 2
    assert not is_infinitesimally_rigid(f)


def test_infinitesimal_rigidity_examples():
    assert is_infinitesimally_rigid(random_framework(fixtures.triangle(), 0))
    assert is_infinitesimally_rigid(random_framework(fixtures.two_cycles(), 0))
    for seed in range(5):
        assert not is_infinitesimally_rigid(random_framework(fixtures.figure_1a(), seed))


def test_coincident_framework_rejected():
    with pytest.raises(DegenerateFramework):
        is_infinitesimally_rigid(Framework(fixtures.triangle(), np.ones((3, 2))))


def test_generic_rank_examples():
    assert generic_rank(fixtures.triangle()) == 3
    assert generic_rank(fixtures.two_cycles()) == 5
    assert generic_rank(DirectedGraph(3, ())) == 0


def test_laman_examples():
    assert laman_check(fixtures.triangle())
    assert laman_check(fixtures.two_cycles())
    assert not laman_check(fixtures.k4())


def test_redundant_rigidity_examples():
    assert is_redundantly_rigid(fixtures.k4())
    assert not is_redundantly_rigid(fixtures.two_cycles())
    assert not is_redundantly_rigid(fixtures.triangle())


def test_connectivity_examples():
    assert vertex_connectivity(fixtures.k4()) == 3
    assert vertex_connectivity(fixtures.two_cycles()) == 2
    assert vertex_connectivity(fixtures.path(5)) == 1


def test_connectivity_scope_limit():
    with pytest.raises(TooLarge):
        vertex_connectivity(fixtures.path(13))


def test_global_rigidity_examples():
    assert is_generically_globally_rigid(fixtures.k4())
    assert not is_generically_globally_rigid(fixtures.two_cycles())
    assert is_generically_globally_rigid(fixtures.triangle())


def test_rigidity_report_two_cycles():
    r = rigidity_report(fixtures.two_cycles())
    assert (r.rank, r.is_laman, r.is_minimally_rigid) == (5, True, True)
    assert not r.is_redundantly_rigid and not r.is_generically_globally_rigid
    assert r.vertex_connectivity == 2


def test_antiparallel_pair_collapses():
    g = DirectedGraph(3, ((0, 1), (1, 0), (1, 2), (2, 0)))
    r = rigidity_report(g)
    assert r.collapsed_antiparallel == 1
    assert r.is_laman


def test_laman_inconsistency_surfaces(monkeypatch):
    import rigidkit.rigidity as rig

    monkeypatch.setattr(rig, "laman_pebble", lambda g: not laman_exhaustive(g))
    with pytest.raises(LamanInconsistency):
        rig.laman_check(fixtures.triangle())


@pytest.mark.parametrize("name", FIXTURES)
def test_laman_implies_full_generic_rank(name):
    g = fixtures.NAMED[name]()
    if laman_check(g):
        assert generic_rank(g) == 2 * g.n - 3


@given(st.integers(0, 10_000), st.integers(2, 7))
def test_pebble_game_agrees_with_exhaustive(seed, n):
    g = random_graph(n, int(np.random.default_rng(seed).integers(0, 2 * n)), seed)
    assert laman_pebble(g) == laman_exhaustive(g)


@given(st.integers(0, 10_000), st.integers(3, 7))
def test_henneberg_graphs_are_laman(seed, n):
    g = apply_sequence(random_sequence(n, seed))
    assert laman_pebble(g) and laman_exhaustive(g)


@given(st.integers(0, 10_000))
def test_rank_bound(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    g = random_graph(n, int(rng.integers(1, n * (n - 1) // 2 + 1)), seed)
    f = random_framework(g, seed)
    assert numerical_rank(rigidity_matrix(f)) <= min(g.m, 2 * n - 3)


def test_exhaustive_oracle_small_cases():
    # every 3-edge graph on 3 vertices is the triangle; every 2-edge one is not rigid
    for edges in itertools.combinations([(0, 1), (1, 2), (0, 2)], 2):
        assert not laman_exhaustive(DirectedGraph(3, edges))
