import numpy as np
import pytest

from isestimate.graph import Graph


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n, np.column_stack([iu[keep], ju[keep]]))


@pytest.fixture
def small_graph():
    return random_graph(12, 0.2, 7)


# One line per acceptance criterion, repeated in the terminal summary.
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
