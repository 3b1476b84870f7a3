import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from narrnet.graph import WeightedGraph  # noqa: E402


def make_graph(edges, nodes=()):
    """Graph from ``(a, b)`` or ``(a, b, w)`` tuples."""
    weights = {}
    for e in edges:
        a, b, w = (*e, 1) if len(e) == 2 else e
        weights[(a, b)] = w
    return WeightedGraph(nodes, weights)


@pytest.fixture
def triangle():
    return make_graph([("a", "b"), ("b", "c"), ("a", "c")])


@pytest.fixture
def path4():
    return make_graph([("a", "b"), ("b", "c"), ("c", "d")])


@pytest.fixture
def square_diag():
    return make_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])


@pytest.fixture
def star3():
    return make_graph([("x", "l1"), ("x", "l2"), ("x", "l3")])


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
