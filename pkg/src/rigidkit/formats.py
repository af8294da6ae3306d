"""Text file formats. Vertex indices are 1-based in every file.

graph      ``n <count>`` then ``e <src> <tgt>`` lines; ``#`` starts a comment
framework  the graph lines plus ``v <idx> <x> <y>`` per vertex
lengths    whitespace-separated reals in edge order
sequence   ``va <i> <j>`` / ``es <i> <j> <k>`` lines
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import GraphParseError, InvalidGraph
from .graph_core import DirectedGraph
from .henneberg import EdgeSplit, HennebergSequence, VertexAdd
from .rigidity import Framework


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering used by every numeric output."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (tuple, list, np.ndarray)):
        return " ".join(fmt(v) for v in x)
    return str(x)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _parse(text: str):
    n = None
    edges = []
    verts = {}
    for lineno, tok in _lines(text):
        try:
            if tok[0] == "n" and len(tok) == 2:
                n = int(tok[1])
            elif tok[0] == "e" and len(tok) == 3:
                edges.append((int(tok[1]), int(tok[2])))
            elif tok[0] == "v" and len(tok) == 4:
                verts[int(tok[1])] = (float(tok[2]), float(tok[3]))
            else:
                raise GraphParseError(f"line {lineno}: unrecognized {' '.join(tok)!r}")
        except ValueError as exc:
            if isinstance(exc, GraphParseError):
                raise
            raise GraphParseError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise GraphParseError("missing 'n <count>' line")
    try:
        g = DirectedGraph.from_one_based(n, edges)
    except InvalidGraph as exc:
        raise GraphParseError(str(exc)) from exc
    return g, verts


def parse_graph(text: str) -> DirectedGraph:
    return _parse(text)[0]


def parse_framework(text: str) -> Framework:
    g, verts = _parse(text)
    if sorted(verts) != list(range(1, g.n + 1)):
        raise GraphParseError(f"need one 'v' line per vertex 1..{g.n}")
    return Framework(g, [verts[i] for i in range(1, g.n + 1)])


def dump_graph(g: DirectedGraph) -> str:
    out = io.StringIO()
    out.write(f"n {g.n}\n")
    for s, t in g.edges:
        out.write(f"e {s + 1} {t + 1}\n")
    return out.getvalue()


def dump_framework(f: Framework) -> str:
    out = io.StringIO()
    out.write(dump_graph(f.graph))
    for i, (x, y) in enumerate(f.positions, start=1):
        out.write(f"v {i} {fmt(x)} {fmt(y)}\n")
    return out.getvalue()


def parse_lengths(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(",", " ").split()])
    except ValueError as exc:
        raise GraphParseError(f"bad edge length: {exc}") from exc


def dump_lengths(d) -> str:
    return fmt(np.asarray(d, dtype=float)) + "\n"


def parse_sequence(text: str) -> HennebergSequence:
    steps = []
    for lineno, tok in _lines(text):
        try:
            if tok[0] == "va" and len(tok) == 3:
                steps.append(VertexAdd(int(tok[1]) - 1, int(tok[2]) - 1))
            elif tok[0] == "es" and len(tok) == 4:
                steps.append(EdgeSplit((int(tok[1]) - 1, int(tok[2]) - 1), int(tok[3]) - 1))
            else:
                raise GraphParseError(f"line {lineno}: unrecognized {' '.join(tok)!r}")
        except ValueError as exc:
            if isinstance(exc, GraphParseError):
                raise
            raise GraphParseError(f"line {lineno}: {exc}") from exc
    return HennebergSequence(tuple(steps))


def dump_sequence(seq: HennebergSequence) -> str:
    out = io.StringIO()
    for step in seq.steps:
        if isinstance(step, VertexAdd):
            out.write(f"va {step.anchor_i + 1} {step.anchor_j + 1}\n")
        else:
            i, j = step.split_edge
            out.write(f"es {i + 1} {j + 1} {step.third + 1}\n")
    return out.getvalue()


def dump_report(items) -> str:
    """One ``key value`` line per field."""
    return "".join(f"{k} {fmt(v)}\n" for k, v in items)


def dump_trajectory_csv(traj, m: int) -> str:
    n = traj.states.shape[1] // 2
    header = ["t"] + [f"x{i}_{c}" for i in range(1, n + 1) for c in (1, 2)]
    header += [f"e_{l}" for l in range(1, m + 1)]
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for t, x, e in zip(traj.times, traj.states, traj.errors):
        out.write(",".join(fmt(float(v)) for v in (t, *x, *e)) + "\n")
    return out.getvalue()


def dump_eigenvalues_csv(report) -> str:
    out = io.StringIO()
    out.write("re,im,abs,which\n")
    for which, vals in (("full", report.full_eigenvalues), ("reduced", report.reduced_eigenvalues)):
        for lam in vals:
            out.write(f"{fmt(lam.real)},{fmt(lam.imag)},{fmt(abs(lam))},{which}\n")
    return out.getvalue()


def framework_svg(f: Framework, size: int = 400, margin: int = 30) -> str:
    """Static drawing: vertices, directed edges with arrowheads, 1-based labels."""
    p = f.positions
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    k = (size - 2 * margin) / span

    def xy(q):
        return margin + (q[0] - lo[0]) * k, size - margin - (q[1] - lo[1]) * k

    out = io.StringIO()
    out.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">\n')
    out.write('<defs><marker id="a" markerWidth="8" markerHeight="8" refX="8" refY="4" '
              'orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker></defs>\n')
    for s, t in f.graph.edges:
        (x1, y1), (x2, y2) = xy(p[s]), xy(p[t])
        out.write(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                  'stroke="black" marker-end="url(#a)"/>\n')
    for i, q in enumerate(p, start=1):
        x, y = xy(q)
        out.write(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="4"/>\n')
        out.write(f'<text x="{x + 6:.3f}" y="{y - 6:.3f}">{i}</text>\n')
    out.write("</svg>\n")
    return out.getvalue()


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")
