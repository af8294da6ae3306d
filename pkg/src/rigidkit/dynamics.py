"""Decentralized formation dynamics on directed graphs.

Each agent with one leader moves along its edge vector, each agent with two
leaders along a combination of both:

    single:  x_i' = u(d; e) z
    dual:    x_i' = u1(d_r, d_s; e_r, e_s, w) z_r + u2(d_r, d_s; e_r, e_s, w) z_s

with z = x_leader - x_i, e = |z|^2 - d and w = z_r . z_s. The ``d`` handed
to a law is the squared target length. For a dual agent, ``r`` is its first
outgoing edge in graph edge order and ``s`` its second.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IncompatibleLaw, NonFiniteState
from .graph_core import DirectedGraph, edge_adjacency_matrix, kron2, outvalence
from .rigidity import Framework

FD_REL_STEP = 1e-6
COMPAT_TOL = 1e-6
DEGENERATE_DIST = 1e-12


def _fd_step(x: float) -> float:
    return FD_REL_STEP * max(1.0, abs(x))


@dataclass(frozen=True)
class SingleLaw:
    """u(d; e) for an agent with one leader."""

    u: Callable[[float, float], float]
    u_e: Callable[[float, float], float] | None = None
    name: str = "single"

    def evaluate(self, d: float, e: float) -> float:
        return self.u(d, e)

    def partial_e(self, d: float, e: float) -> float:
        if self.u_e is not None:
            return self.u_e(d, e)
        return self.fd_partial_e(d, e)

    def fd_partial_e(self, d: float, e: float) -> float:
        h = _fd_step(e)
        return (self.u(d, e + h) - self.u(d, e - h)) / (2 * h)


class DualMode(enum.Enum):
    DISTANCE_ONLY = "DistanceOnly"
    DISTANCE_ANGLE = "DistanceAngle"
    SYMMETRIC = "Symmetric"


# signature of u1, u2 and of the symmetric u: (d_r, d_s, e_r, e_s, w) -> float
DualFn = Callable[[float, float, float, float, float], float]


@dataclass(frozen=True)
class DualLaw:
    """Pair (u1, u2) for an agent with two leaders.

    DistanceOnly laws are always evaluated with w = 0. In Symmetric mode only
    ``u1`` is given and u2(d_r, d_s, e_r, e_s, w) = u1(d_s, d_r, e_s, e_r, w).
    ``partials`` optionally returns the analytic 2x3 array of derivatives of
    (u1, u2) w.r.t. (e_r, e_s, w).
    """

    u1: DualFn
    u2: DualFn | None = None
    mode: DualMode = DualMode.DISTANCE_ONLY
    partials_fn: Callable[..., np.ndarray] | None = None
    name: str = "dual"

    def __post_init__(self):
        if self.mode is DualMode.SYMMETRIC:
            if self.u2 is not None:
                raise ValueError("symmetric laws take a single function")
        elif self.u2 is None:
            raise ValueError("non-symmetric dual laws need u1 and u2")

    def evaluate(self, d_r, d_s, e_r, e_s, w) -> tuple[float, float]:
        if self.mode is DualMode.DISTANCE_ONLY:
            w = 0.0
        if self.mode is DualMode.SYMMETRIC:
            return self.u1(d_r, d_s, e_r, e_s, w), self.u1(d_s, d_r, e_s, e_r, w)
        return self.u1(d_r, d_s, e_r, e_s, w), self.u2(d_r, d_s, e_r, e_s, w)

    def partials(self, d_r, d_s, e_r, e_s, w) -> np.ndarray:
        if self.partials_fn is not None:
            P = np.array(self.partials_fn(d_r, d_s, e_r, e_s, w), dtype=float)
            if self.mode is DualMode.DISTANCE_ONLY:
                P[:, 2] = 0.0
            return P
        return self.fd_partials(d_r, d_s, e_r, e_s, w)

    def fd_partials(self, d_r, d_s, e_r, e_s, w) -> np.ndarray:
        args = np.array([e_r, e_s, w], dtype=float)
        P = np.zeros((2, 3))
        for k in range(3):
            h = _fd_step(args[k])
            hi, lo = args.copy(), args.copy()
            hi[k] += h
            lo[k] -= h
            P[:, k] = (np.array(self.evaluate(d_r, d_s, *hi))
                       - np.array(self.evaluate(d_r, d_s, *lo))) / (2 * h)
        return P


ControlLaw = SingleLaw | DualLaw


# --- built-in families ---------------------------------------------------------

@dataclass(frozen=True)
class LawFamily:
    """Recipe producing the law of each agent from its outvalence."""

    name: str
    params: dict = field(default_factory=dict)

    def single(self) -> SingleLaw:
        kappa = float(self.params.get("kappa", 1.0))
        return SingleLaw(lambda d, e: kappa * e, lambda d, e: kappa, name=self.name)

    def dual(self) -> DualLaw:
        kappa = float(self.params.get("kappa", 1.0))
        kappa2 = float(self.params.get("kappa2", kappa))
        offset = float(self.params.get("w_offset", 0.0))
        if self.name == "proportional":
            return proportional_dual(kappa, kappa2, offset)
        if self.name == "angle_aware":
            return angle_aware_dual(kappa, float(self.params.get("beta", 1.0)), offset)
        raise ValueError(f"unknown law family {self.name!r}")


FAMILIES = ("proportional", "angle_aware")


def proportional_dual(kappa: float, kappa2: float | None = None,
                      w_offset: float = 0.0) -> DualLaw:
    """u1 = kappa e_r, u2 = kappa2 e_s. A nonzero ``w_offset`` adds
    w_offset * w to u1, which turns the law angle-dependent (and incompatible)."""
    k2 = kappa if kappa2 is None else kappa2

    def partials(d_r, d_s, e_r, e_s, w):
        return [[kappa, 0.0, w_offset], [0.0, k2, 0.0]]

    mode = DualMode.DISTANCE_ANGLE if w_offset else DualMode.DISTANCE_ONLY
    return DualLaw(
        lambda d_r, d_s, e_r, e_s, w: kappa * e_r + w_offset * w,
        lambda d_r, d_s, e_r, e_s, w: k2 * e_s,
        mode,
        partials,
        name="proportional",
    )


def _q(w):
    return w / (1.0 + w * w)


def _dq(w):
    return (1.0 - w * w) / (1.0 + w * w) ** 2


def angle_aware_dual(kappa: float, beta: float, w_offset: float = 0.0) -> DualLaw:
    """u1 = e_r (kappa + beta e_s q(w)), u2 = e_s (kappa + beta e_r q(w)),
    q(w) = w / (1 + w^2). Vanishes at zero error for every w, and so does
    its w-derivative."""

    def u1(d_r, d_s, e_r, e_s, w):
        return e_r * (kappa + beta * e_s * _q(w)) + w_offset * w

    def u2(d_r, d_s, e_r, e_s, w):
        return e_s * (kappa + beta * e_r * _q(w))

    def partials(d_r, d_s, e_r, e_s, w):
        q, dq = _q(w), _dq(w)
        return [
            [kappa + beta * e_s * q, beta * e_r * q, beta * e_r * e_s * dq + w_offset],
            [beta * e_s * q, kappa + beta * e_r * q, beta * e_r * e_s * dq],
        ]

    return DualLaw(u1, u2, DualMode.DISTANCE_ANGLE, partials, name="angle_aware")


# --- compatibility ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    clause: str  # "i", "ii" or "iii"
    point: tuple
    value: float

    def describe(self) -> str:
        names = {"i": "u(d; 0) != 0", "ii": "u_k(d_r, d_s; 0, 0, w) != 0",
                 "iii": "du/dw != 0 at zero error"}
        at = ", ".join(p if isinstance(p, str) else f"{p:.6g}" for p in self.point)
        return f"clause ({self.clause}) {names[self.clause]} at ({at}): {self.value:.3e}"


@dataclass(frozen=True)
class CompatibilityReport:
    violations: tuple[Violation, ...] = ()
    checked: int = 0

    @property
    def compatible(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.compatible:
            return f"compatible ({self.checked} sample points)"
        return "; ".join(v.describe() for v in self.violations[:3]) + (
            f" (+{len(self.violations) - 3} more)" if len(self.violations) > 3 else ""
        )

    def merged(self, other: CompatibilityReport) -> CompatibilityReport:
        return CompatibilityReport(self.violations + other.violations,
                                   self.checked + other.checked)


def check_compatibility(law: ControlLaw, d_samples, w_samples=(),
                        tol: float = COMPAT_TOL) -> CompatibilityReport:
    """Check that ``law`` vanishes at zero error whatever the inner product.

    ``d_samples`` holds scalars for single laws and (d_r, d_s) pairs for dual
    laws. Clause (iii) is a central-difference estimate of du/dw at e = 0.
    """
    violations = []
    checked = 0
    if isinstance(law, SingleLaw):
        for d in d_samples:
            checked += 1
            val = law.evaluate(float(d), 0.0)
            if not abs(val) <= tol:
                violations.append(Violation("i", (float(d),), float(val)))
        return CompatibilityReport(tuple(violations), checked)
    w_samples = list(w_samples) or [0.0]
    for d_r, d_s in d_samples:
        for w in w_samples:
            checked += 1
            vals = law.evaluate(d_r, d_s, 0.0, 0.0, w)
            for k, val in enumerate(vals, start=1):
                if not abs(val) <= tol:
                    violations.append(Violation("ii", (f"u{k}", float(d_r), float(d_s), float(w)), float(val)))
            h = _fd_step(w)
            hi = law.evaluate(d_r, d_s, 0.0, 0.0, w + h)
            lo = law.evaluate(d_r, d_s, 0.0, 0.0, w - h)
            for k in range(2):
                deriv = (hi[k] - lo[k]) / (2 * h)
                if not abs(deriv) <= tol:
                    violations.append(Violation("iii", (f"u{k + 1}", float(d_r), float(d_s), float(w)),
                                                float(deriv)))
    return CompatibilityReport(tuple(violations), checked)


# --- problems ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FormationProblem:
    graph: DirectedGraph
    targets: np.ndarray  # edge lengths
    laws: tuple  # per agent: None (leader), SingleLaw or DualLaw
    squared_targets: np.ndarray = field(init=False, repr=False)
    edge_adjacency: np.ndarray = field(init=False, repr=False)
    _agents: tuple = field(init=False, repr=False)
    _sources: np.ndarray = field(init=False, repr=False)
    _targets_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = np.array(self.targets, dtype=float)
        if t.shape != (self.graph.m,):
            raise ValueError(f"{t.size} targets for {self.graph.m} edges")
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)
        object.__setattr__(self, "laws", tuple(self.laws))
        if len(self.laws) != self.graph.n:
            raise ValueError("one law entry per agent required")
        for v, law in enumerate(self.laws):
            k = outvalence(self.graph, v)
            if k > 2:
                raise ValueError(f"agent {v + 1} has outvalence {k} > 2")
            expected = {0: type(None), 1: SingleLaw, 2: DualLaw}[k]
            if not isinstance(law, expected):
                raise ValueError(f"agent {v + 1}: outvalence {k} needs {expected.__name__}")
        sq = t * t
        sq.setflags(write=False)
        object.__setattr__(self, "squared_targets", sq)
        agents = tuple((v, self.laws[v], tuple(self.graph.out_edges(v)))
                       for v in range(self.graph.n) if outvalence(self.graph, v) > 0)
        object.__setattr__(self, "_agents", agents)
        object.__setattr__(self, "_sources", np.array([s for s, _ in self.graph.edges], dtype=int))
        object.__setattr__(self, "_targets_idx", np.array([t for _, t in self.graph.edges], dtype=int))
        object.__setattr__(self, "edge_adjacency", edge_adjacency_matrix(self.graph))

    @classmethod
    def from_family(cls, graph: DirectedGraph, targets, family: LawFamily) -> FormationProblem:
        laws = []
        for v in range(graph.n):
            k = outvalence(graph, v)
            laws.append(None if k == 0 else family.single() if k == 1 else family.dual())
        return cls(graph, targets, tuple(laws))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def agents(self):
        """(agent, law, out-edge indices) for every non-leader agent."""
        return self._agents

    def edge_vectors(self, x) -> np.ndarray:
        p = np.asarray(x, dtype=float).reshape(-1, 2)
        return p[self._targets_idx] - p[self._sources]


def problem_compatibility(problem: FormationProblem, n_w: int = 11,
                          tol: float = COMPAT_TOL) -> CompatibilityReport:
    """Run ``check_compatibility`` on every agent with its own squared targets
    and inner products spanning the geometrically possible range."""
    report = CompatibilityReport()
    d2 = problem.squared_targets
    for _, law, edges in problem.agents():
        if isinstance(law, SingleLaw):
            report = report.merged(check_compatibility(law, [d2[edges[0]]], tol=tol))
        else:
            r, s = edges
            span = math.sqrt(d2[r] * d2[s])
            ws = np.linspace(-span, span, n_w)
            report = report.merged(check_compatibility(law, [(d2[r], d2[s])], ws, tol))
    return report


def error_vector(problem: FormationProblem, f) -> np.ndarray:
    """Squared edge length minus squared target, per edge."""
    x = f.positions if isinstance(f, Framework) else f
    z = problem.edge_vectors(x)
    return np.einsum("ij,ij->i", z, z) - problem.squared_targets


def edge_coefficients(problem: FormationProblem, z: np.ndarray) -> np.ndarray:
    """The diagonal of D: the scalar multiplying each edge vector."""
    d2 = problem.squared_targets
    e = np.einsum("ij,ij->i", z, z) - d2
    D = np.zeros(problem.m)
    for _, law, edges in problem.agents():
        if isinstance(law, SingleLaw):
            k = edges[0]
            D[k] = law.evaluate(d2[k], e[k])
        else:
            r, s = edges
            w = float(z[r] @ z[s])
            D[r], D[s] = law.evaluate(d2[r], d2[s], e[r], e[s], w)
    return D


def _check_finite(v):
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise NonFiniteState("state contains non-finite values")
    return v


def vector_field_x(problem: FormationProblem, x) -> np.ndarray:
    """Agent velocities (flattened 2n-vector); leaders stay put."""
    x = _check_finite(x)
    z = problem.edge_vectors(x)
    D = edge_coefficients(problem, z)
    v = np.zeros((problem.n, 2))
    np.add.at(v, problem._sources, D[:, None] * z)
    return v.reshape(-1)


def vector_field_z(problem: FormationProblem, z) -> np.ndarray:
    """Edge-vector dynamics z' = kron2(A_e) kron2(D) z (flattened 2m-vector)."""
    z = _check_finite(z).reshape(-1, 2)
    D = edge_coefficients(problem, z)
    return kron2(problem.edge_adjacency) @ (D[:, None] * z).reshape(-1)


def edge_state(problem: FormationProblem, x) -> np.ndarray:
    """Flattened edge vectors z_l = x_target - x_source for a position vector."""
    return problem.edge_vectors(x).reshape(-1)


# --- simulation ------------------------------------------------------------------------

class Termination(enum.Enum):
    CONVERGED = "Converged"
    MAX_TIME = "MaxTime"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (samples, 2n)
    errors: np.ndarray  # (samples, m)
    reason: Termination
    step: float
    seed: int | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_error_norm(self) -> float:
        return float(np.max(np.abs(self.errors[-1]))) if self.errors.shape[1] else 0.0


def default_step(problem: FormationProblem) -> float:
    """1e-3 over the squared characteristic length (largest target)."""
    L = float(np.max(problem.targets)) if problem.m else 1.0
    return 1e-3 / max(L * L, 1e-12)


def rk4_step(fn, x, h):
    k1 = fn(x)
    k2 = fn(x + 0.5 * h * k1)
    k3 = fn(x + 0.5 * h * k2)
    k4 = fn(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate(problem: FormationProblem, x0, step: float | None = None,
             t_max: float = 1e3, converge_tol: float = 1e-8, seed: int | None = None,
             record_every: int = 1, check: bool = True) -> Trajectory:
    """Fixed-step RK4 integration of the position dynamics.

    Stops when the largest |e_l| drops below ``converge_tol``, when ``t_max``
    is reached, or when the endpoints of some edge come within 1e-12 of each
    other. The run is a pure function of its arguments; ``seed`` is only
    recorded.
    """
    if check:
        report = problem_compatibility(problem)
        if not report.compatible:
            raise IncompatibleLaw(report)
    if step is None:
        step = default_step(problem)
    if not step > 0:
        raise ValueError("step must be positive")
    x = _check_finite(np.array(x0, dtype=float).reshape(-1))
    fn = lambda y: vector_field_x(problem, y)  # noqa: E731

    times, states, errors = [], [], []

    def record(t, y, e):
        times.append(t)
        states.append(y.copy())
        errors.append(e)

    t = 0.0
    k = 0
    while True:
        e = error_vector(problem, x.reshape(-1, 2))
        z = problem.edge_vectors(x)
        if problem.m and np.min(np.linalg.norm(z, axis=1)) < DEGENERATE_DIST:
            reason = Termination.DEGENERATE
        elif not problem.m or np.max(np.abs(e)) < converge_tol:
            reason = Termination.CONVERGED
        elif t >= t_max:
            reason = Termination.MAX_TIME
        else:
            reason = None
        if reason is not None:
            record(t, x, e)
            break
        if k % record_every == 0:
            record(t, x, e)
        x = _check_finite(rk4_step(fn, x, step))
        k += 1
        t = k * step
    return Trajectory(np.array(times), np.array(states), np.array(errors), reason, step, seed)
