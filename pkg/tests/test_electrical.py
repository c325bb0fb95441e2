import math

import numpy as np
import pytest

from mixlab.electrical import (
    BoundaryCondition,
    centered_test_vector,
    effective_resistance,
    gap_upper_bound,
    harmonic_potential,
    level_set,
    thirds_boundary,
    two_progeny_boundary,
)
from mixlab.errors import BadBoundary, Disconnected, NotCentered
from mixlab.generators import complete_graph, kesten_iic, path_graph, regular_tree
from mixlab.graph import Graph, bfs_distances
from mixlab.spectral import TestVector, fiedler, single_card_gap

from conftest import random_connected


def test_potential_p3():
    sol = harmonic_potential(path_graph(3), BoundaryCondition([0], [2]))
    assert np.allclose(sol.eta.values, [1, 0, -1])
    assert sol.current == pytest.approx(1.0)
    assert sol.resistance == pytest.approx(2.0)


def test_triangle_resistance():
    assert effective_resistance(complete_graph(3), [0], [1]) == pytest.approx(2 / 3)


@pytest.mark.parametrize("k", [1, 2, 5, 40])
def test_series_law(k):
    assert effective_resistance(path_graph(k + 1), [0], [k]) == pytest.approx(k, rel=1e-10)


def test_parallel_law():
    # A = 0, B = 1; one path 0-2-1 of length 2 and one 0-3-4-1 of length 3
    g = Graph(5, [(0, 2), (2, 1), (0, 3), (3, 4), (4, 1)])
    assert effective_resistance(g, [0], [1]) == pytest.approx(6 / 5, abs=1e-10)
    assert effective_resistance(Graph(2, [(0, 1)]), [0], [1]) == pytest.approx(1.0)


def test_boundary_validation():
    with pytest.raises(BadBoundary):
        BoundaryCondition([0], [0, 1])
    with pytest.raises(BadBoundary):
        BoundaryCondition([], [1])
    with pytest.raises(BadBoundary):
        harmonic_potential(path_graph(3), BoundaryCondition([0], [7]))
    with pytest.raises(Disconnected):
        harmonic_potential(Graph(3, [(0, 1)]), BoundaryCondition([0], [1]))


def test_solution_invariants(rng):
    for _ in range(30):
        g = random_connected(int(rng.integers(5, 60)), 0.1, rng)
        verts = rng.permutation(g.n)
        a, b = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        sol = harmonic_potential(g, BoundaryCondition(verts[:a], verts[a:a + b]))
        eta = sol.eta.values
        assert eta.max() == pytest.approx(1.0) and eta.min() == pytest.approx(-1.0)
        assert sol.harmonic_residual <= 1e-9
        assert abs(sol.current - sol.current_in) <= 1e-9


def test_rayleigh_monotonicity(rng):
    for _ in range(50):
        g = random_connected(15, 0.1, rng)
        r0 = effective_resistance(g, [0], [14])
        missing = [(u, v) for u in range(15) for v in range(u + 1, 15) if not g.has_edge(u, v)]
        e = missing[int(rng.integers(len(missing)))]
        r1 = effective_resistance(Graph(15, g.edge_list() + [e]), [0], [14])
        assert r1 <= r0 + 1e-12


def test_centered_vector_examples(rng):
    sol = harmonic_potential(path_graph(3), BoundaryCondition([0], [2]))
    assert np.allclose(centered_test_vector(sol).values, np.array([1, 0, -1]) / math.sqrt(2))
    assert np.allclose(TestVector.centered_unit([1, 1, 0]).values, np.array([1, 1, -2]) / math.sqrt(6))
    for _ in range(100):
        g = random_connected(12, 0.2, rng)
        sol = harmonic_potential(g, BoundaryCondition([0], [int(rng.integers(1, 12))], 2.0, -0.5))
        assert abs(centered_test_vector(sol).values.sum()) <= 1e-12


def test_gap_upper_bound_examples(rng):
    p3 = path_graph(3)
    assert gap_upper_bound(p3, TestVector(np.array([1, 0, -1]) / math.sqrt(2))) == pytest.approx(0.25)
    g = random_connected(30, 0.1, rng)
    res = fiedler(g)
    gamma = single_card_gap(g, res.eigenvalue)
    assert abs(gap_upper_bound(g, res.vector) - gamma) <= 1e-8
    for _ in range(20):
        v = TestVector.centered_unit(rng.standard_normal(g.n))
        assert gap_upper_bound(g, v) >= gamma - 1e-10
    with pytest.raises(NotCentered):
        gap_upper_bound(p3, TestVector(np.array([1.0, 0, 0])))


def test_commute_identity(rng):
    from mixlab.bounds import commute_time

    for _ in range(30):
        g = random_connected(int(rng.integers(3, 41)), 0.1, rng)
        u, v = rng.choice(g.n, 2, replace=False).tolist()
        c = commute_time(g, u, v, "srw")
        r = effective_resistance(g, [u], [v])
        assert abs(c / (2 * g.m * r) - 1) <= 1e-8


def test_thirds_boundary_regular_tree():
    g = regular_tree(3, 3)
    bc = thirds_boundary(g)
    dist = bfs_distances(g, 0).dist
    assert (dist[bc.plus] == 3).all() and (dist[bc.minus] == 3).all()
    assert len(bc.plus) == len(bc.minus) == 4


def test_regular_tree_band():
    vals = []
    for d in range(6, 11):
        g = regular_tree(3, d)
        sol = harmonic_potential(g, thirds_boundary(g))
        vals.append(gap_upper_bound(g, centered_test_vector(sol)) * g.n**2)
    assert max(vals) / min(vals) <= 4


def test_two_progeny_boundary_split():
    # root 0 with one child 1; 1 has children 2 and 3, each with two leaves
    g = Graph(8, [(0, 1), (1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)])
    bc = two_progeny_boundary(g, 0, level_set(g, 0, 3))
    assert bc.plus.tolist() == [4, 5] and bc.minus.tolist() == [6, 7]
    with pytest.raises(BadBoundary):
        two_progeny_boundary(path_graph(4), 0, [3])


def test_kesten_band():
    # per-seed values are heavy tailed; the band is on the geometric mean over 20 seeds, across depths
    means = []
    for d in (20, 40, 80, 160):
        vals = []
        for seed in range(20):
            g = kesten_iic(d, np.random.default_rng(seed))
            bc = two_progeny_boundary(g, 0, level_set(g, 0, d))
            sol = harmonic_potential(g, bc)
            vals.append(gap_upper_bound(g, centered_test_vector(sol)) * g.n**2.5)
        means.append(math.exp(np.mean(np.log(vals))))
    assert max(means) / min(means) <= 8
