import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidkit import fixtures, formats
from rigidkit.errors import GraphParseError
from rigidkit.henneberg import random_sequence
from rigidkit.rigidity import random_framework

from conftest import directed_graphs


def test_graph_file_is_one_based_with_comments():
    text = "# header\nn 3\ne 1 2   # first\ne 2 3\n\ne 3 1\n"
    assert formats.parse_graph(text) == fixtures.triangle()


@given(directed_graphs())
def test_graph_round_trip(g):
    assert formats.parse_graph(formats.dump_graph(g)) == g


@given(st.integers(0, 10_000))
def test_framework_round_trip_is_exact(seed):
    f = random_framework(fixtures.two_cycles(), seed)
    back = formats.parse_framework(formats.dump_framework(f))
    assert back.graph == f.graph
    assert np.array_equal(back.positions, f.positions)


@given(st.integers(0, 10_000), st.integers(2, 7))
def test_sequence_round_trip(seed, n):
    seq = random_sequence(n, seed)
    assert formats.parse_sequence(formats.dump_sequence(seq)).steps == seq.steps


@pytest.mark.parametrize("text", [
    "e 1 2\n",                 # no vertex count
    "n 2\ne 1 1\n",            # self-loop
    "n 2\ne 1 3\n",            # out of range
    "n two\n",
    "n 2\nx 1 2\n",
])
def test_graph_parse_errors(text):
    with pytest.raises(GraphParseError):
        formats.parse_graph(text)


def test_framework_needs_every_vertex():
    with pytest.raises(GraphParseError):
        formats.parse_framework("n 2\ne 1 2\nv 1 0 0\n")


def test_fmt_uses_17_significant_digits():
    assert formats.fmt(0.1) == "0.10000000000000001"
    assert formats.fmt(True) == "true"
    assert formats.fmt(3) == "3"
    assert float(formats.fmt(np.pi)) == np.pi


def test_lengths_round_trip():
    d = np.array([1.0, 1.2, 1.5])
    assert np.array_equal(formats.parse_lengths(formats.dump_lengths(d)), d)
    with pytest.raises(GraphParseError):
        formats.parse_lengths("1 two")


def test_svg_has_every_vertex_and_edge():
    svg = formats.framework_svg(random_framework(fixtures.two_cycles(), 0))
    assert svg.count("<circle") == 4
    assert svg.count("<line") == 5
