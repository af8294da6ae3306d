"""Linearization of the edge-vector dynamics at design equilibria.

At a design equilibrium every edge coefficient vanishes, so the Jacobian of
z' = kron2(A_e) kron2(D) z reduces to kron2(A_e) Z'^T Z, where Z stacks the
edge vectors block-diagonally and Z' stacks

    z'_r = 2 (du1/de_r z_r + du2/de_r z_s)      (dual agent, edge r)
    z'_s = 2 (du1/de_s z_r + du2/de_s z_s)      (dual agent, edge s)
    z'_l = 2 du/de z_l                          (single agent)

The factor 2 is de/dz = 2 z. Every analytic Jacobian is checked against
central finite differences of the vector field before it is used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dynamics import FormationProblem, SingleLaw, error_vector, vector_field_z
from .errors import NotAtEquilibrium, OracleMismatch
from .graph_core import kron2
from .rigidity import Framework, edge_block_matrix, numerical_rank

EQUILIBRIUM_TOL = 1e-9
ORACLE_TOL = 1e-6
ZERO_THRESHOLD = 1e-8
FD_REL_STEP = 1e-6


def build_Z(f: Framework) -> np.ndarray:
    """m x 2m block-diagonal matrix holding z_l^T in row l."""
    return edge_block_matrix(f)


def _require_equilibrium(problem: FormationProblem, f: Framework):
    e = error_vector(problem, f)
    scale = max(1.0, float(np.max(problem.squared_targets)) if problem.m else 1.0)
    if problem.m and np.max(np.abs(e)) > EQUILIBRIUM_TOL * scale:
        raise NotAtEquilibrium(f"max |e| = {np.max(np.abs(e)):.3e}")


def edge_gradients(problem: FormationProblem, f: Framework) -> np.ndarray:
    """The z'_l vectors, one row per edge."""
    _require_equilibrium(problem, f)
    z = f.edge_vectors()
    d2 = problem.squared_targets
    zp = np.zeros_like(z)
    for _, law, edges in problem.agents():
        if isinstance(law, SingleLaw):
            k = edges[0]
            zp[k] = 2.0 * law.partial_e(d2[k], 0.0) * z[k]
        else:
            r, s = edges
            P = law.partials(d2[r], d2[s], 0.0, 0.0, float(z[r] @ z[s]))
            zp[r] = 2.0 * (P[0, 0] * z[r] + P[1, 0] * z[s])
            zp[s] = 2.0 * (P[0, 1] * z[r] + P[1, 1] * z[s])
    return zp


def build_Zprime(problem: FormationProblem, f: Framework) -> np.ndarray:
    zp = edge_gradients(problem, f)
    m = len(zp)
    Zp = np.zeros((m, 2 * m))
    for l in range(m):
        Zp[l, 2 * l:2 * l + 2] = zp[l]
    return Zp


def fd_jacobian_z(problem: FormationProblem, z0, rel_step: float = FD_REL_STEP) -> np.ndarray:
    """Central-difference Jacobian of ``vector_field_z`` at ``z0``."""
    z0 = np.asarray(z0, dtype=float).reshape(-1)
    J = np.zeros((z0.size, z0.size))
    for k in range(z0.size):
        h = rel_step * max(1.0, abs(z0[k]))
        hi, lo = z0.copy(), z0.copy()
        hi[k] += h
        lo[k] -= h
        J[:, k] = (vector_field_z(problem, hi) - vector_field_z(problem, lo)) / (2 * h)
    return J


def relative_deviation(A: np.ndarray, B: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(B))), float(np.max(np.abs(A))), 1e-300)
    return float(np.max(np.abs(A - B))) / scale


def analytic_jacobian_z(problem: FormationProblem, f: Framework) -> np.ndarray:
    Ae2 = kron2(problem.edge_adjacency)
    return Ae2 @ build_Zprime(problem, f).T @ build_Z(f)


def jacobian_z(problem: FormationProblem, f: Framework, with_deviation: bool = False):
    """kron2(A_e) Z'^T Z, verified against finite differences.

    Raises OracleMismatch if the two disagree by more than 1e-6 relative to
    the largest entry.
    """
    J = analytic_jacobian_z(problem, f)
    fd = fd_jacobian_z(problem, f.edge_vectors().reshape(-1))
    dev = relative_deviation(J, fd)
    if not dev < ORACLE_TOL:
        raise OracleMismatch(f"analytic vs finite-difference Jacobian deviate by {dev:.3e}")
    return (J, dev) if with_deviation else J


def reduced_jacobian(problem: FormationProblem, f: Framework) -> np.ndarray:
    """m x m matrix Z kron2(A_e) Z'^T sharing the nonzero spectrum of ``jacobian_z``."""
    Ae2 = kron2(problem.edge_adjacency)
    return build_Z(f) @ Ae2 @ build_Zprime(problem, f).T


def match_spectra(a, b) -> float:
    """Largest distance between optimally paired eigenvalues (lengths must agree)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


@dataclass(frozen=True)
class SpectrumReport:
    n: int
    m: int
    full_eigenvalues: np.ndarray
    reduced_eigenvalues: np.ndarray
    zero_multiplicity_full: int
    zero_multiplicity_reduced: int
    threshold: float
    fd_max_deviation: float
    rank_full: int
    spectral_mismatch: float  # relative, after optimal matching of nonzero eigenvalues
    spectra_agree: bool
    formula_multiplicity: int  # printed closed form 2n + 3 - m
    formula_agrees: bool
    rank_bound_multiplicity: int  # 2m - rank of the full Jacobian
    max_nonzero_real_part: float

    @property
    def nonzero_full(self) -> np.ndarray:
        return _nonzero(self.full_eigenvalues, self.threshold)

    @property
    def nonzero_reduced(self) -> np.ndarray:
        return _nonzero(self.reduced_eigenvalues, self.threshold, self.full_eigenvalues)

    @property
    def left_half_plane(self) -> bool:
        return self.max_nonzero_real_part < 0

    def items(self):
        yield "n", self.n
        yield "m", self.m
        yield "zero_multiplicity_full", self.zero_multiplicity_full
        yield "zero_multiplicity_reduced", self.zero_multiplicity_reduced
        yield "nonzero_count_full", 2 * self.m - self.zero_multiplicity_full
        yield "nonzero_count_reduced", self.m - self.zero_multiplicity_reduced
        yield "rank_full", self.rank_full
        yield "rank_bound_multiplicity", self.rank_bound_multiplicity
        yield "formula_multiplicity", self.formula_multiplicity
        yield "formula_agrees", self.formula_agrees
        yield "threshold", self.threshold
        yield "fd_max_deviation", self.fd_max_deviation
        yield "spectral_mismatch", self.spectral_mismatch
        yield "spectra_agree", self.spectra_agree
        yield "max_nonzero_real_part", self.max_nonzero_real_part
        yield "left_half_plane", self.left_half_plane


def _scale(values) -> float:
    return float(np.max(np.abs(values))) if np.size(values) else 0.0


def _nonzero(values, threshold, reference=None):
    ref = values if reference is None else reference
    cut = threshold * _scale(ref)
    return np.asarray(values)[np.abs(values) >= cut]


SPECTRUM_MATCH_TOL = 1e-8


def spectrum_report(problem: FormationProblem, f: Framework,
                    threshold: float = ZERO_THRESHOLD) -> SpectrumReport:
    """Spectra of the full and reduced Jacobians with zero-eigenvalue accounting.

    An eigenvalue counts as zero when |lambda| < threshold * max|lambda| over
    the full spectrum. The printed closed-form multiplicity is compared, not
    enforced.
    """
    J, dev = jacobian_z(problem, f, with_deviation=True)
    Jr = reduced_jacobian(problem, f)
    full = np.linalg.eigvals(J)
    red = np.linalg.eigvals(Jr)
    order = lambda v: v[np.lexsort((v.imag, v.real, -np.abs(v)))]  # noqa: E731
    full, red = order(full), order(red)
    scale = _scale(full)
    cut = threshold * scale
    zero_full = int(np.sum(np.abs(full) < cut))
    zero_red = int(np.sum(np.abs(red) < cut))
    nz_full, nz_red = full[np.abs(full) >= cut], red[np.abs(red) >= cut]
    mismatch = match_spectra(nz_full, nz_red) / scale if scale else 0.0
    rank = numerical_rank(J)
    formula = 2 * problem.n + 3 - problem.m
    return SpectrumReport(
        n=problem.n,
        m=problem.m,
        full_eigenvalues=full,
        reduced_eigenvalues=red,
        zero_multiplicity_full=zero_full,
        zero_multiplicity_reduced=zero_red,
        threshold=threshold,
        fd_max_deviation=dev,
        rank_full=rank,
        spectral_mismatch=mismatch,
        spectra_agree=mismatch <= SPECTRUM_MATCH_TOL,
        formula_multiplicity=formula,
        formula_agrees=formula == zero_full,
        rank_bound_multiplicity=2 * problem.m - rank,
        max_nonzero_real_part=float(np.max(nz_full.real)) if nz_full.size else float("-inf"),
    )
