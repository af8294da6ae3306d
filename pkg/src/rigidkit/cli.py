"""Command-line front end. Every subcommand reads files, writes files, prints
``key value`` lines and maps library errors onto fixed exit codes."""
from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formats
from .dynamics import (
    FAMILIES,
    FormationProblem,
    LawFamily,
    problem_compatibility,
    simulate,
)
from .errors import (
    GraphParseError,
    IncompatibleLaw,
    InfeasibleLengths,
    NotLaman,
    NotTwoCycles,
    NotVertexAddConstructible,
    OracleMismatch,
    RigidkitError,
    TooLarge,
)
from .graph_core import DirectedGraph
from .henneberg import apply_sequence, random_sequence, realize_graph, require_vertex_add_order
from .linearization import spectrum_report
from .rigidity import rigidity_report
from .shape_space import enumerate_frameworks, ls_lower_bound, require_two_cycles, symmetry_orbit

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_SCOPE = 3
EXIT_NOT_CONSTRUCTIBLE = 4
EXIT_INFEASIBLE = 5
EXIT_INCOMPATIBLE = 6
EXIT_ORACLE = 7
EXIT_NOT_TWO_CYCLES = 8

# first match wins, so subclasses go before their bases
EXIT_CODES = (
    (GraphParseError, EXIT_PARSE),
    (TooLarge, EXIT_SCOPE),
    (NotVertexAddConstructible, EXIT_NOT_CONSTRUCTIBLE),
    (NotLaman, EXIT_NOT_CONSTRUCTIBLE),
    (InfeasibleLengths, EXIT_INFEASIBLE),
    (IncompatibleLaw, EXIT_INCOMPATIBLE),
    (OracleMismatch, EXIT_ORACLE),
    (NotTwoCycles, EXIT_NOT_TWO_CYCLES),
)

SEED_ENV = "RIGIDKIT_SEED"


class ConfigError(GraphParseError):
    pass


# --- configuration -------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    graph: DirectedGraph
    lengths: np.ndarray
    choices: tuple[int, ...] | None
    family: LawFamily
    step: float | None
    t_max: float
    converge_tol: float
    seed: int
    record_every: int
    initial_state: str | None
    output_dir: Path
    svg: bool


def _env_seed(default: int) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"expected integers, got {text!r}") from exc


def _graph_from_section(sec, base: Path) -> DirectedGraph:
    if "file" in sec:
        path = base / sec["file"]
        if not path.is_file():
            raise ConfigError(f"graph file {path} does not exist")
        return formats.parse_graph(formats.read_text(path))
    if "n" not in sec or "edges" not in sec:
        raise ConfigError("[graph] needs either 'file' or both 'n' and 'edges'")
    text = f"n {sec['n']}\n" + "".join(
        f"e {pair.strip()}\n" for pair in sec["edges"].split(",") if pair.strip()
    )
    return formats.parse_graph(text)


def load_config(path, output_dir=None, svg: bool = False) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        cp.read_string(formats.read_text(path), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    base = path.parent
    if "graph" not in cp:
        raise ConfigError("missing [graph] section")
    g = _graph_from_section(cp["graph"], base)

    lsec = cp["lengths"] if "lengths" in cp else {}
    if "d" not in lsec:
        raise ConfigError("missing [lengths] d")
    d = formats.parse_lengths(lsec["d"])
    if d.shape != (g.m,):
        raise ConfigError(f"{d.size} edge lengths for {g.m} edges")
    if np.any(d <= 0):
        raise ConfigError("edge lengths must be positive")
    choices = _ints(lsec["choices"]) if "choices" in lsec else None

    law = cp["law"] if "law" in cp else {}
    name = law.get("family", "proportional")
    if name not in FAMILIES:
        raise ConfigError(f"unknown law family {name!r}; expected one of {FAMILIES}")
    params = {}
    for key in ("kappa", "kappa2", "beta", "w_offset"):
        if key in law:
            try:
                params[key] = float(law[key])
            except ValueError as exc:
                raise ConfigError(f"[law] {key}: {exc}") from exc

    sim = cp["sim"] if "sim" in cp else {}
    try:
        step = float(sim["step"]) if "step" in sim else None
        t_max = float(sim.get("t_max", "1000"))
        tol = float(sim.get("converge_tol", "1e-8"))
        seed = int(sim.get("seed", "0"))
        record_every = int(sim.get("record_every", "1"))
    except ValueError as exc:
        raise ConfigError(f"[sim]: {exc}") from exc

    if output_dir is None:
        out = cp["output"].get("dir", ".") if "output" in cp else "."
        output_dir = base / out
        svg = svg or (cp["output"].getboolean("svg", False) if "output" in cp else False)
    return ExperimentConfig(
        graph=g,
        lengths=d,
        choices=choices,
        family=LawFamily(name, params),
        step=step,
        t_max=t_max,
        converge_tol=tol,
        seed=_env_seed(seed),
        record_every=max(record_every, 1),
        initial_state=sim.get("initial_state"),
        output_dir=Path(output_dir),
        svg=svg,
    )


def _problem(cfg: ExperimentConfig) -> FormationProblem:
    return FormationProblem.from_family(cfg.graph, cfg.lengths, cfg.family)


def _equilibrium(cfg: ExperimentConfig, choices=None):
    seq = require_vertex_add_order(cfg.graph)
    if choices is None:
        choices = cfg.choices if cfg.choices is not None else (0,) * len(seq.steps)
    if len(choices) != len(seq.steps):
        raise ConfigError(f"{len(choices)} choice bits for {len(seq.steps)} vertex-add steps")
    return realize_graph(cfg.graph, cfg.lengths, choices, seq)


def initial_state(cfg: ExperimentConfig) -> np.ndarray:
    """Start vector from ``explicit reals`` | ``perturb_equilibrium mag bits`` | ``random seed``."""
    spec = (cfg.initial_state or "").split()
    n = cfg.graph.n
    if not spec:
        raise ConfigError("[sim] initial_state is required")
    if spec[0] == "perturb_equilibrium":
        if len(spec) < 2:
            raise ConfigError("perturb_equilibrium needs a magnitude")
        mag = float(spec[1])
        f = _equilibrium(cfg, _ints(" ".join(spec[2:])) if len(spec) > 2 else None)
        rng = np.random.default_rng(cfg.seed)
        return f.flat() + mag * rng.standard_normal(2 * n)
    if spec[0] == "random":
        if len(spec) != 2:
            raise ConfigError("random needs exactly one seed")
        rng = np.random.default_rng(_env_seed(int(spec[1])))
        return rng.standard_normal(2 * n) * float(np.max(cfg.lengths))
    try:
        x0 = np.array([float(t) for t in spec])
    except ValueError as exc:
        raise ConfigError(f"bad initial_state {cfg.initial_state!r}") from exc
    if x0.size != 2 * n:
        raise ConfigError(f"explicit initial_state needs {2 * n} reals, got {x0.size}")
    return x0


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8")


def _emit(items, stream) -> None:
    stream.write(formats.dump_report(items))


def _write_frameworks(cfg, prefix, frameworks):
    for k, f in enumerate(frameworks, start=1):
        _write(cfg.output_dir, f"{prefix}_{k}.txt", formats.dump_framework(f))
        if cfg.svg:
            _write(cfg.output_dir, f"{prefix}_{k}.svg", formats.framework_svg(f))


# --- subcommands ----------------------------------------------------------------

def cmd_analyze(args, stream) -> int:
    g = formats.parse_graph(formats.read_text(args.graph))
    report = rigidity_report(g, seed=_env_seed(args.seed))
    _emit(report.items(), stream)
    return EXIT_OK


def cmd_enumerate(args, stream) -> int:
    cfg = load_config(args.config, args.out, args.svg)
    reps = enumerate_frameworks(cfg.graph, cfg.lengths)
    _write_frameworks(cfg, "framework", reps)
    bound = ls_lower_bound(cfg.graph.n) if cfg.graph.n >= 3 else 1
    _emit([("count", len(reps)), ("ls_lower_bound", bound),
           ("bound_satisfied", len(reps) >= bound)], stream)
    return EXIT_OK


def cmd_simulate(args, stream) -> int:
    cfg = load_config(args.config, args.out, args.svg)
    problem = _problem(cfg)
    report = problem_compatibility(problem)
    if not report.compatible:
        raise IncompatibleLaw(report)
    x0 = initial_state(cfg)
    traj = simulate(problem, x0, step=cfg.step, t_max=cfg.t_max,
                    converge_tol=cfg.converge_tol, seed=cfg.seed,
                    record_every=cfg.record_every, check=False)
    _write(cfg.output_dir, "trajectory.csv", formats.dump_trajectory_csv(traj, problem.m))
    items = [
        ("reason", traj.reason.value),
        ("final_error_norm", traj.final_error_norm),
        ("t_final", float(traj.times[-1])),
        ("step", traj.step),
        ("seed", cfg.seed),
        ("samples", len(traj.times)),
    ]
    _write(cfg.output_dir, "report.txt", formats.dump_report(items))
    _emit(items, stream)
    return EXIT_OK


def cmd_linearize(args, stream) -> int:
    cfg = load_config(args.config, args.out, args.svg)
    problem = _problem(cfg)
    f = _equilibrium(cfg)
    report = spectrum_report(problem, f)
    _write(cfg.output_dir, "spectrum.txt", formats.dump_report(report.items()))
    _write(cfg.output_dir, "eigenvalues.csv", formats.dump_eigenvalues_csv(report))
    _write(cfg.output_dir, "equilibrium.txt", formats.dump_framework(f))
    _emit(report.items(), stream)
    return EXIT_OK


def cmd_henneberg(args, stream) -> int:
    seq = random_sequence(args.n, _env_seed(args.seed), vertex_add_only=args.vertex_add_only)
    g = apply_sequence(seq)
    out = Path(args.out)
    _write(out, "sequence.txt", formats.dump_sequence(seq))
    _write(out, "graph.txt", formats.dump_graph(g))
    _emit([("n", g.n), ("m", g.m), ("steps", len(seq.steps)),
           ("vertex_add_only", seq.vertex_add_only)], stream)
    return EXIT_OK


def cmd_orbit(args, stream) -> int:
    cfg = load_config(args.config, args.out, args.svg)
    require_two_cycles(cfg.graph)
    f = _equilibrium(cfg)
    orbit = symmetry_orbit(f)
    _write_frameworks(cfg, "orbit", orbit)
    lengths = np.array([h.edge_lengths() for h in orbit])
    spread = float(np.max(np.abs(lengths - lengths[0])))
    _emit([("frameworks", len(orbit)), ("max_length_spread", spread)], stream)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rigidkit", description="Rigid formation analysis toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="rigidity report for a graph file")
    a.add_argument("graph")
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_analyze)

    for name, func, text in (
        ("enumerate", cmd_enumerate, "non-congruent frameworks for given edge lengths"),
        ("simulate", cmd_simulate, "integrate the formation dynamics"),
        ("linearize", cmd_linearize, "Jacobian spectra at a design equilibrium"),
        ("orbit", cmd_orbit, "reflection orbit of a 2-cycles framework"),
    ):
        s = sub.add_parser(name, help=text)
        s.add_argument("config")
        s.add_argument("--out", default=None, help="output directory (overrides the config)")
        s.add_argument("--svg", action="store_true", help="also write SVG drawings")
        s.set_defaults(func=func)

    h = sub.add_parser("henneberg", help="random Henneberg sequence and its graph")
    h.add_argument("n", type=int)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--vertex-add-only", action="store_true")
    h.add_argument("--out", default=".")
    h.set_defaults(func=cmd_henneberg)
    return p


def exit_code(exc: BaseException) -> int:
    for kind, code in EXIT_CODES:
        if isinstance(exc, kind):
            return code
    return EXIT_FAILURE


def main(argv=None, stream=None) -> int:
    stream = sys.stdout if stream is None else stream
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, stream)
    except (RigidkitError, ValueError, OSError) as exc:
        code = exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
