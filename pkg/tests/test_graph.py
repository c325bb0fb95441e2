import numpy as np
import pytest

from mixlab.errors import Disconnected, DuplicateEdge, EdgeListFormatError, EmptyGraph, OutOfRange, SelfLoop, Unreachable
from mixlab.generators import complete_graph, cycle_graph, erdos_renyi, hypercube, path_graph
from mixlab.graph import (
    UNREACHABLE,
    Graph,
    MultiGraph,
    bfs_distances,
    connected_components,
    connected_graphs,
    format_edge_list,
    from_edge_list,
    giant_component,
    radius_diameter,
    read_edge_list,
    shortest_path,
    stick_lengths,
    write_edge_list,
)

from conftest import random_connected


def test_from_edge_list_path():
    g = from_edge_list(3, [(0, 1), (1, 2)])
    assert g.m == 2
    assert g.degrees.tolist() == [1, 2, 1]


def test_single_edge():
    g = from_edge_list(2, [(1, 0)])
    assert g.edge_list() == [(0, 1)]
    assert g.is_connected()


@pytest.mark.parametrize(
    "n, edges, exc",
    [(3, [(0, 3)], OutOfRange), (3, [(1, 1)], SelfLoop), (3, [(0, 1), (1, 0)], DuplicateEdge)],
)
def test_construction_errors(n, edges, exc):
    with pytest.raises(exc):
        from_edge_list(n, edges)


def test_adjacency_consistent(rng):
    g = random_connected(30, 0.1, rng)
    seen = 0
    for v, nb in enumerate(g.adjacency):
        assert len(nb) == g.degree(v)
        for u in nb:
            assert v in g.adjacency[u]
        seen += len(nb)
    assert seen == 2 * g.m == g.degrees.sum()


def test_edges_read_only():
    g = path_graph(3)
    with pytest.raises(ValueError):
        g.edges[0, 0] = 2


def test_multigraph_degrees():
    h = MultiGraph(2, [(0, 0), (0, 1), (0, 1)])
    assert h.degrees.tolist() == [4, 2]
    assert h.loops() == 1
    assert not h.is_simple()


def test_bfs_examples():
    assert bfs_distances(path_graph(3), 0).dist.tolist() == [0, 1, 2]
    assert bfs_distances(complete_graph(4), 0).dist.tolist() == [0, 1, 1, 1]
    d = bfs_distances(Graph(3, [(0, 1)]), 0)
    assert d[2] == UNREACHABLE and not d.reachable(2)
    with pytest.raises(OutOfRange):
        bfs_distances(path_graph(3), 5)


def test_bfs_edge_lipschitz(rng):
    g = random_connected(40, 0.05, rng)
    d = bfs_distances(g, 7).dist
    assert d[7] == 0
    assert (np.abs(d[g.edges[:, 0]] - d[g.edges[:, 1]]) <= 1).all()


def test_radius_diameter_examples():
    assert radius_diameter(path_graph(5)) == (2, 4)
    assert radius_diameter(complete_graph(4)) == (1, 1)
    assert radius_diameter(hypercube(3)) == (3, 3)
    with pytest.raises(Disconnected):
        radius_diameter(Graph(3, [(0, 1)]))


def test_radius_diameter_catalog(rng):
    for _ in range(60):
        g = random_connected(int(rng.integers(2, 40)), float(rng.uniform(0, 0.2)), rng)
        r, d = radius_diameter(g)
        assert r <= d <= 2 * r


def test_components():
    assert [c.tolist() for c in connected_components(path_graph(3))] == [[0, 1, 2]]
    assert len(connected_components(Graph(4, [(0, 1), (2, 3)]))) == 2
    assert [c.tolist() for c in connected_components(Graph(3, []))] == [[0], [1], [2]]


def test_giant_component_examples():
    g = Graph(5, [(0, 1), (2, 3), (3, 4)])
    sub, labels = giant_component(g)
    assert sub.n == 3 and sub.m == 2
    assert labels.tolist() == [2, 3, 4]
    h = path_graph(4)
    sub, labels = giant_component(h)
    assert sub == h and labels.tolist() == [0, 1, 2, 3]
    with pytest.raises(EmptyGraph):
        giant_component(Graph(0, []))


def test_giant_tie_goes_to_smallest_label():
    sub, labels = giant_component(Graph(4, [(2, 3), (0, 1)]))
    assert labels.tolist() == [0, 1]


def test_giant_component_properties(rng):
    g = erdos_renyi(300, 1.2 / 300, rng)
    sub, labels = giant_component(g)
    assert sub.is_connected()
    assert max(len(c) for c in connected_components(g)) == sub.n


@pytest.mark.slow
def test_giant_fraction_supercritical():
    # survival probability s = 1 - exp(-1.5 s)
    s = 0.5
    for _ in range(200):
        s = 1 - np.exp(-1.5 * s)
    fr = [giant_component(erdos_renyi(1000, 1.5 / 1000, np.random.default_rng(i)))[0].n / 1000 for i in range(200)]
    assert abs(np.mean(fr) - s) <= 0.03
    assert abs(s - 0.5828) < 1e-3


def test_shortest_path_examples():
    assert shortest_path(path_graph(5), 0, 4) == [0, 1, 2, 3, 4]
    assert shortest_path(complete_graph(3), 0, 2) == [0, 2]
    assert shortest_path(cycle_graph(4), 0, 2) == [0, 1, 2]
    with pytest.raises(Unreachable):
        shortest_path(Graph(3, [(0, 1)]), 0, 2)


def test_shortest_path_lengths(rng):
    g = random_connected(30, 0.08, rng)
    for u in range(g.n):
        d = bfs_distances(g, u).dist
        for v in range(g.n):
            p = shortest_path(g, u, v)
            assert p[0] == u and p[-1] == v and len(p) - 1 == d[v]
            assert all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


def test_edge_list_roundtrip(tmp_path, rng):
    g = random_connected(12, 0.2, rng)
    f = tmp_path / "g.txt"
    write_edge_list(g, f)
    assert read_edge_list(f) == g
    assert f.read_text() == format_edge_list(g)


@pytest.mark.parametrize(
    "text, line",
    [("3 2\n0 1\n", 1), ("3 1\n0 x\n", 2), ("3 1\n1 0\n", 2), ("3 1\n0 5\n", 2), ("3 2\n0 1\n0 1\n", 3)],
)
def test_edge_list_errors(tmp_path, text, line):
    f = tmp_path / "bad.txt"
    f.write_text(text)
    with pytest.raises(EdgeListFormatError, match=f"line {line}"):
        read_edge_list(f)


def test_connected_graph_counts():
    assert [len(connected_graphs(n)) for n in (1, 2, 3, 4, 5)] == [1, 1, 2, 6, 21]
    assert len(connected_graphs(4, up_to_isomorphism=False)) == 38


def test_stick_lengths():
    assert sorted(stick_lengths(path_graph(4))) == [3, 3]
    # star with one long arm: leaf sticks of length 1, 1 and 3
    g = Graph(6, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5)])
    assert sorted(stick_lengths(g)) == [1, 1, 3]
    assert stick_lengths(cycle_graph(5)) == []
