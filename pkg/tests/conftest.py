import itertools

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from rigidkit.graph_core import DirectedGraph, undirected_edges

settings.register_profile(
    "rigidkit", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("rigidkit")


def undirected_isomorphic(g, h) -> bool:
    """Brute force over all vertex permutations; fine for n <= 7."""
    if g.n != h.n:
        return False
    eg = {frozenset(e) for e in undirected_edges(g)[0]}
    eh = {frozenset(e) for e in undirected_edges(h)[0]}
    if len(eg) != len(eh):
        return False
    for perm in itertools.permutations(range(g.n)):
        if {frozenset((perm[a], perm[b])) for a, b in eg} == eh:
            return True
    return False


@st.composite
def directed_graphs(draw, min_n=1, max_n=7):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return DirectedGraph(n, tuple(chosen))


def random_graph(n, m, seed):
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(n) if i < j]
    idx = rng.choice(len(pairs), size=min(m, len(pairs)), replace=False)
    edges = []
    for k in idx:
        i, j = pairs[k]
        edges.append((i, j) if rng.random() < 0.5 else (j, i))
    return DirectedGraph(n, tuple(edges))
