import sys

import numpy as np
import pytest

from chi8.geometry import from_edges, from_matrix


def complete(n):
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle(n):
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def edgeless(n):
    return from_edges(n, [])


def random_graph(n, density, rng):
    upper = np.triu(rng.random((n, n)) < density, 1)
    return from_matrix(upper | upper.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
