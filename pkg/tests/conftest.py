import numpy as np
import pytest

from mixlab.generators import erdos_renyi, uniform_labelled_tree
from mixlab.graph import Graph, giant_component


def random_connected(n: int, p: float, rng) -> Graph:
    """Spanning tree plus G(n, p) extra edges: always connected."""
    t = uniform_labelled_tree(n, rng) if n >= 2 else Graph(1, [])
    extra = erdos_renyi(n, p, rng)
    edges = {tuple(e) for e in t.edge_list()} | {tuple(e) for e in extra.edge_list()}
    return Graph(n, sorted(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running statistical checks")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
