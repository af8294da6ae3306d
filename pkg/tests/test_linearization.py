import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidkit import fixtures
from rigidkit.dynamics import FormationProblem, LawFamily
from rigidkit.errors import NotAtEquilibrium, OracleMismatch
from rigidkit.graph_core import DirectedGraph
from rigidkit.henneberg import choice_vectors, realize_graph
from rigidkit.linearization import (
    analytic_jacobian_z,
    build_Z,
    build_Zprime,
    edge_gradients,
    fd_jacobian_z,
    jacobian_z,
    match_spectra,
    reduced_jacobian,
    relative_deviation,
    spectrum_report,
)
from rigidkit.rigidity import Framework, random_framework

PROP = LawFamily("proportional", {"kappa": 1.0})
ANGLE = LawFamily("angle_aware", {"kappa": 1.0, "beta": 0.5})


def equilibrium(name, seed, choices=None):
    g = fixtures.NAMED[name]()
    d = random_framework(g, seed).edge_lengths()
    nsteps = g.n - 2
    c = choices if choices is not None else tuple(np.random.default_rng(seed).integers(0, 2, nsteps))
    return g, d, realize_graph(g, d, c)


def test_Z_examples():
    f = Framework(fixtures.single_edge(), [[0, 0], [1, 0]])
    assert np.array_equal(build_Z(f), [[1, 0]])
    g = random_framework(fixtures.two_cycles(), 1)
    Z = build_Z(g)
    z = g.edge_vectors()
    assert np.allclose(Z @ z.reshape(-1), np.sum(z * z, axis=1))
    assert np.linalg.matrix_rank(Z) == 5
    h = Framework(fixtures.path(3), [[0, 0], [0, 0], [1, 0]])
    assert np.linalg.matrix_rank(build_Z(h)) == 1


def test_single_leader_gradient_is_two_kappa_z():
    kappa = 0.7
    p = FormationProblem.from_family(DirectedGraph(2, ((0, 1),)), (2.0,),
                                     LawFamily("proportional", {"kappa": kappa}))
    f = Framework(p.graph, [[0, 0], [2, 0]])
    assert np.allclose(edge_gradients(p, f), [[2 * kappa * 2, 0]])


def test_dual_distance_only_gradients():
    fam = LawFamily("proportional", {"kappa": 1.0, "kappa2": 3.0})
    g, d, f = equilibrium("two_cycles", 2, (0, 1))
    p = FormationProblem.from_family(g, d, fam)
    zp = edge_gradients(p, f)
    z = f.edge_vectors()
    # vertex 1 (index 0) follows along edges 0 (r) and 4 (s)
    assert np.allclose(zp[0], 2 * 1.0 * z[0])
    assert np.allclose(zp[4], 2 * 3.0 * z[4])


def test_not_at_equilibrium():
    g = fixtures.two_cycles()
    p = FormationProblem.from_family(g, np.ones(5), PROP)
    with pytest.raises(NotAtEquilibrium):
        build_Zprime(p, random_framework(g, 0))


@pytest.mark.parametrize("family", [PROP, ANGLE], ids=["proportional", "angle_aware"])
@given(seed=st.integers(0, 10_000))
def test_analytic_jacobian_matches_fd(family, seed):
    g, d, f = equilibrium("two_cycles", seed)
    p = FormationProblem.from_family(g, d, family)
    J = analytic_jacobian_z(p, f)
    fd = fd_jacobian_z(p, f.edge_vectors().reshape(-1))
    assert relative_deviation(J, fd) < 1e-6


def test_oracle_mismatch_is_fatal(monkeypatch):
    import rigidkit.linearization as lin

    g, d, f = equilibrium("triangle", 0)
    p = FormationProblem.from_family(g, d, PROP)
    monkeypatch.setattr(lin, "analytic_jacobian_z", lambda prob, fw: -analytic_jacobian_z(prob, fw))
    with pytest.raises(OracleMismatch):
        lin.jacobian_z(p, f)


def test_match_spectra():
    a = np.array([1 + 1j, 1 - 1j, -2])
    assert match_spectra(a, a[::-1]) == 0.0
    assert match_spectra(a, a[:2]) == float("inf")


@pytest.mark.parametrize("name", ["triangle", "two_cycles"])
@given(seed=st.integers(0, 10_000))
def test_report_consistency(name, seed):
    g, d, f = equilibrium(name, seed)
    p = FormationProblem.from_family(g, d, PROP)
    r = spectrum_report(p, f)
    assert r.spectra_agree
    assert r.zero_multiplicity_full >= g.m
    assert len(r.nonzero_full) + r.zero_multiplicity_full == 2 * g.m
    assert len(r.nonzero_reduced) + r.zero_multiplicity_reduced == g.m
    assert len(r.nonzero_full) == len(r.nonzero_reduced)
    assert r.zero_multiplicity_full == r.rank_bound_multiplicity
    assert r.formula_multiplicity == 2 * g.n + 3 - g.m


def test_two_cycles_zero_multiplicity_recorded():
    g, d, f = equilibrium("two_cycles", 0, (0, 1))
    r = spectrum_report(FormationProblem.from_family(g, d, PROP), f)
    # computed value and the closed form are both reported; agreement is a flag
    assert r.zero_multiplicity_full == 5
    assert r.formula_multiplicity == 6
    assert r.formula_agrees is False


def test_triangle_rank_bound():
    f = Framework(fixtures.triangle(), [[0, 0], [3, 0], [3, 4]])
    p = FormationProblem.from_family(f.graph, f.edge_lengths(), PROP)
    r = spectrum_report(p, f)
    assert r.zero_multiplicity_full == 3 == r.rank_bound_multiplicity
    assert r.left_half_plane


def test_negative_gain_flips_spectrum():
    g, d, f = equilibrium("two_cycles", 4, (0, 1))
    pos = spectrum_report(FormationProblem.from_family(g, d, PROP), f)
    neg = spectrum_report(FormationProblem.from_family(
        g, d, LawFamily("proportional", {"kappa": -1.0})), f)
    assert match_spectra(pos.nonzero_full, -neg.nonzero_full) < 1e-9
    assert pos.left_half_plane and not neg.left_half_plane


def test_reduced_jacobian_shape():
    g, d, f = equilibrium("two_cycles", 0, (0, 0))
    p = FormationProblem.from_family(g, d, ANGLE)
    assert reduced_jacobian(p, f).shape == (5, 5)
    J = jacobian_z(p, f)
    assert J.shape == (10, 10)


def test_all_choice_vectors_stable_for_proportional():
    g = fixtures.two_cycles()
    d = (1.0, 1.2, 1.5, 0.9, 1.1)
    p = FormationProblem.from_family(g, d, PROP)
    for c in choice_vectors(2):
        assert spectrum_report(p, realize_graph(g, d, c)).left_half_plane
