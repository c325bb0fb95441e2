import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixlab.errors import Disconnected, DimensionMismatch, OutOfRange, TooLarge
from mixlab.generators import complete_graph, cycle_graph, hypercube, path_graph
from mixlab.graph import Graph, connected_graphs
from mixlab.interchange import (
    DeckState,
    ExactEvolver,
    PermDistribution,
    all_perms,
    card_positions,
    evolve_exact,
    exact_mixing_times,
    identity_deck,
    index_perm,
    perm_index,
    run_steps,
    simulate_decks,
    single_card_marginal_tv,
    single_card_matrix,
    step,
    tv_distance,
    l2_distance,
)

K2 = complete_graph(2)
P3 = path_graph(3)
P4 = path_graph(4)


def test_identity_deck():
    assert identity_deck(3).card_at.tolist() == [0, 1, 2]
    s = identity_deck(1)
    assert s.n == 1 and s.pos_of.tolist() == [0]
    with pytest.raises(OutOfRange):
        identity_deck(0)


def test_deck_rejects_non_inverse():
    with pytest.raises(ValueError):
        DeckState(np.array([0, 1, 2]), np.array([1, 0, 2]))


def test_forced_steps():
    s = step(K2, identity_deck(2), edge=0, swap=True)
    assert s.card_at.tolist() == [1, 0]
    assert step(K2, identity_deck(2), edge=0, swap=False).card_at.tolist() == [0, 1]
    s = step(P3, identity_deck(3), edge=1, swap=True)
    assert s.card_at.tolist() == [0, 2, 1] and s.pos_of.tolist() == [0, 2, 1]
    twice = step(K2, step(K2, identity_deck(2), edge=0, swap=True), edge=0, swap=True)
    assert twice.card_at.tolist() == [0, 1]


def test_run_steps_zero_and_dimension():
    s = identity_deck(4)
    assert run_steps(P4, s, 0, 1).card_at.tolist() == [0, 1, 2, 3]
    with pytest.raises(DimensionMismatch):
        run_steps(P4, identity_deck(3), 5, 1)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), t=st.integers(0, 60))
def test_run_steps_matches_iterated_step(seed, t):
    g = cycle_graph(6)
    a = run_steps(g, identity_deck(6), t, np.random.default_rng(seed))
    rng = np.random.default_rng(seed)
    b = identity_deck(6)
    for _ in range(t):
        b = step(g, b, rng)
    assert a.card_at.tolist() == b.card_at.tolist()
    assert np.array_equal(a.pos_of[a.card_at], np.arange(6))


def test_k2_swap_frequency(rng):
    batch = simulate_decks(K2, 1, 100_000, rng)
    assert abs(batch.card_at[:, 0].mean() - 0.5) <= 0.005


def test_simulate_batch_inverse_and_moved(rng):
    g = hypercube(3)
    b = simulate_decks(g, 40, 500, rng, track_moved=True)
    for ca, po in zip(b.card_at, b.pos_of):
        assert np.array_equal(po[ca], np.arange(8))
    # a card that never moved is still at its own vertex
    still = ~b.moved
    assert (b.pos_of[still] == np.nonzero(still)[1]).all()


def test_single_card_matrix_examples():
    assert single_card_matrix(P3)[1].tolist() == [0.25, 0.5, 0.25]
    assert single_card_matrix(K2).tolist() == [[0.5, 0.5], [0.5, 0.5]]
    A = single_card_matrix(hypercube(3))
    g = hypercube(3)
    assert np.allclose(A[g.edges[:, 0], g.edges[:, 1]], 1 / 24)
    assert np.allclose(A, A.T) and np.allclose(A.sum(axis=1), 1, atol=1e-12)
    with pytest.raises(Disconnected):
        single_card_matrix(Graph(3, [(0, 1)]))


def test_evolve_exact_examples():
    p = evolve_exact(P3, 0)
    assert p.probs[0] == 1 and p.probs.sum() == 1
    assert evolve_exact(K2, 1).probs.tolist() == [0.5, 0.5]
    p = evolve_exact(P3, 1)
    assert p[[0, 1, 2]] == 0.5
    assert p[[1, 0, 2]] == 0.25
    assert p[[0, 2, 1]] == 0.25
    assert np.count_nonzero(p.probs) == 3


def test_evolve_exact_too_large():
    with pytest.raises(TooLarge):
        evolve_exact(path_graph(9), 1)


def test_tv_examples():
    u = PermDistribution.uniform(2)
    assert tv_distance(u, u) == 0
    assert tv_distance(PermDistribution.point_mass(2, 0), PermDistribution.point_mass(2, 1)) == 1
    assert tv_distance(PermDistribution(np.array([0.75, 0.25]), 2), u) == pytest.approx(0.25)
    with pytest.raises(DimensionMismatch):
        tv_distance(u, PermDistribution.uniform(3))


def test_l2_examples(rng):
    assert l2_distance(PermDistribution.uniform(4)) == pytest.approx(0, abs=1e-12)
    assert l2_distance(PermDistribution.point_mass(2)) == pytest.approx(1.0)
    u = PermDistribution.uniform(4)
    for _ in range(100):
        p = PermDistribution(rng.dirichlet(np.full(24, 0.3)), 4)
        assert 2 * tv_distance(p, u) <= l2_distance(p) + 1e-12


def test_exact_mixing_examples():
    assert exact_mixing_times(K2).tau_mix == 1
    p3 = exact_mixing_times(P3)
    assert (p3.tau_mix, p3.tau_hat) == (4, 4)  # frozen from the 6-state evolution
    k3 = exact_mixing_times(complete_graph(3))
    assert (k3.tau_mix, k3.tau_hat) == (2, 2)  # L2 is exactly 1/2 at t = 2
    assert k3.tau_mix <= p3.tau_mix


def test_exact_mixing_p8_golden():
    mt = exact_mixing_times(path_graph(8))
    assert (mt.tau_mix, mt.tau_hat) == (135, 156)


def test_marginal_tv_examples():
    assert single_card_marginal_tv(P4, 2, 0) == pytest.approx(1 - 1 / 4)
    assert single_card_marginal_tv(K2, 0, 5) == pytest.approx(0, abs=1e-15)
    assert single_card_marginal_tv(P3, 0, 1) == pytest.approx(5 / 12)


def test_perm_codec():
    assert perm_index([0, 1, 2, 3]) == 0
    perms = all_perms(4)
    for i, p in enumerate(perms):
        assert perm_index(p) == i
        assert index_perm(i, 4) == p.tolist()
    assert index_perm(23, 4) == [3, 2, 1, 0]
    with pytest.raises(OutOfRange):
        index_perm(24, 4)
    with pytest.raises(OutOfRange):
        perm_index([0, 0, 1])


def _small_graphs(max_n):
    return [g for n in range(2, max_n + 1) for g in connected_graphs(n)]


@pytest.mark.parametrize("g", _small_graphs(5), ids=lambda g: f"n{g.n}m{g.m}")
def test_marginal_consistency(g):
    ev = ExactEvolver(g)
    pos = card_positions(ev.perms)
    A = single_card_matrix(g)
    At = np.eye(g.n)
    for t in range(12):
        for i in range(g.n):
            marg = np.bincount(pos[:, i], weights=ev.probs, minlength=g.n)
            assert np.abs(marg - At[i]).max() <= 1e-10
            assert single_card_marginal_tv(g, i, t) <= 0.5 * np.abs(ev.probs - 1 / len(ev.probs)).sum() + 1e-12
        ev.step()
        At = At @ A


@pytest.mark.parametrize("g", _small_graphs(6), ids=lambda g: f"n{g.n}m{g.m}")
def test_curves_non_increasing(g):
    ev = ExactEvolver(g)
    k = len(ev.probs)
    prev_tv, prev_l2 = 2.0, math.inf
    for _ in range(201):
        tv = 0.5 * np.abs(ev.probs - 1 / k).sum()
        l2 = math.sqrt(k * ((ev.probs - 1 / k) ** 2).sum())
        assert tv <= prev_tv + 1e-12 and l2 <= prev_l2 + 1e-12
        prev_tv, prev_l2 = tv, l2
        ev.step()


@pytest.mark.slow
@pytest.mark.parametrize("t", [5, 20])
def test_monte_carlo_matches_exact(t):
    reps = 1_000_000
    exact = evolve_exact(P4, t).probs
    batch = simulate_decks(P4, t, reps, np.random.default_rng(t))
    from mixlab import kernels

    idx = kernels.perm_ranks(batch.card_at)
    emp = np.bincount(idx, minlength=24) / reps
    se = np.sqrt(exact * (1 - exact) / reps)
    assert (np.abs(emp - exact) <= 4.5 * se + 1e-12).all()
    tv_exact = 0.5 * np.abs(exact - 1 / 24).sum()
    tv_emp = 0.5 * np.abs(emp - 1 / 24).sum()
    assert abs(tv_emp - tv_exact) <= 3 * 0.5 * math.sqrt((exact * (1 - exact)).sum() / reps)
