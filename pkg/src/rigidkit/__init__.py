"""Rigidity, shape space and formation control for directed planar frameworks."""
from .dynamics import FormationProblem, LawFamily, simulate
from .graph_core import DirectedGraph
from .henneberg import HennebergSequence, realize, realize_graph
from .linearization import spectrum_report
from .rigidity import Framework, rigidity_report
from .shape_space import are_congruent, enumerate_frameworks

__version__ = "0.1.0"

__all__ = [
    "DirectedGraph",
    "Framework",
    "FormationProblem",
    "HennebergSequence",
    "LawFamily",
    "are_congruent",
    "enumerate_frameworks",
    "realize",
    "realize_graph",
    "rigidity_report",
    "simulate",
    "spectrum_report",
]
