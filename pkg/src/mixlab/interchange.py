"""The interchange process: Monte Carlo decks, the single-card chain and exact
evolution of the law of the deck over S_n.

A deck is stored as two mutually inverse arrays, ``card_at`` (vertex -> card)
and ``pos_of`` (card -> vertex).  Distributions over S_n are indexed by the
Lehmer code of ``card_at``; index 0 is the identity deck.

One step of the chain picks an edge uniformly and swaps the two cards on it
with probability 1/2.  Both choices come from a single draw ``x`` uniform on
``[0, 2m)``: edge ``x // 2``, swap iff ``x`` is odd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DimensionMismatch, Disconnected, OutOfRange, TooLarge
from .graph import Graph
from .rng import as_rng

MAX_EXACT_N = 8
TV_THRESHOLD = 0.25
L2_THRESHOLD = 0.5
_TIE = 1e-12  # exact ties (e.g. L2 = 1/2 on K3 at t = 2) count as reached


# ---------------------------------------------------------------- decks

@dataclass(frozen=True)
class DeckState:
    card_at: np.ndarray
    pos_of: np.ndarray

    def __post_init__(self):
        if self.card_at.shape != self.pos_of.shape:
            raise DimensionMismatch("card_at and pos_of differ in length")
        if not np.array_equal(self.pos_of[self.card_at], np.arange(len(self.card_at))):
            raise ValueError("card_at and pos_of are not mutually inverse permutations")

    @property
    def n(self) -> int:
        return len(self.card_at)

    @classmethod
    def from_card_at(cls, card_at) -> "DeckState":
        card_at = np.asarray(card_at, dtype=np.int64)
        pos_of = np.empty_like(card_at)
        pos_of[card_at] = np.arange(len(card_at))
        return cls(card_at, pos_of)


def identity_deck(n: int) -> DeckState:
    if n < 1:
        raise OutOfRange("deck needs at least one card")
    return DeckState(np.arange(n, dtype=np.int64), np.arange(n, dtype=np.int64))


def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    return np.ascontiguousarray(g.edges[:, 0]), np.ascontiguousarray(g.edges[:, 1])


def step(g: Graph, s: DeckState, rng=None, *, edge: int | None = None, swap: bool | None = None) -> DeckState:
    """One step of the chain.  ``edge``/``swap`` force the move (for tests);
    otherwise a single draw on ``[0, 2m)`` is taken from ``rng``."""
    if s.n != g.n:
        raise DimensionMismatch("deck size differs from graph order")
    if edge is None or swap is None:
        x = int(as_rng(rng).integers(0, 2 * g.m))
        edge, swap = x >> 1, bool(x & 1)
    card_at, pos_of = s.card_at.copy(), s.pos_of.copy()
    if swap:
        a, b = g.edges[edge]
        ca, cb = card_at[a], card_at[b]
        card_at[a], card_at[b] = cb, ca
        pos_of[ca], pos_of[cb] = b, a
    return DeckState(card_at, pos_of)


_CHUNK_DRAWS = 1 << 22


def run_steps(g: Graph, s: DeckState, t: int, rng) -> DeckState:
    """``t`` steps from ``s``; consumes the same draws as ``t`` calls of :func:`step`."""
    if s.n != g.n:
        raise DimensionMismatch("deck size differs from graph order")
    rng = as_rng(rng)
    card_at, pos_of = s.card_at.copy()[None, :], s.pos_of.copy()[None, :]
    eu, ev = _edge_arrays(g)
    done = 0
    while done < t:
        k = min(_CHUNK_DRAWS, t - done)
        draws = rng.integers(0, 2 * g.m, size=(1, k))
        kernels.simulate_batch(card_at, pos_of, eu, ev, draws, np.zeros((0, 0), bool))
        done += k
    return DeckState(card_at[0], pos_of[0])


@dataclass
class DeckBatch:
    card_at: np.ndarray   # (reps, n)
    pos_of: np.ndarray    # (reps, n)
    moved: np.ndarray | None = None  # (reps, n) per card, if tracked


def simulate_decks(g: Graph, t: int, reps: int, rng, track_moved: bool = False) -> DeckBatch:
    """``reps`` independent decks run for ``t`` steps from the identity.

    Decks are processed in blocks; block ``i`` draws its ``(rows, t)`` move
    matrix after block ``i-1``, so results depend only on ``(t, reps, rng)``.
    """
    rng = as_rng(rng)
    n = g.n
    eu, ev = _edge_arrays(g)
    card_at = np.tile(np.arange(n, dtype=np.int64), (reps, 1))
    pos_of = card_at.copy()
    moved = np.zeros((reps, n), dtype=bool) if track_moved else np.zeros((0, 0), bool)
    if t > 0:
        rows = max(1, _CHUNK_DRAWS // t)
        for lo in range(0, reps, rows):
            hi = min(lo + rows, reps)
            for c0 in range(0, t, _CHUNK_DRAWS):
                k = min(_CHUNK_DRAWS, t - c0)
                draws = rng.integers(0, 2 * g.m, size=(hi - lo, k))
                sub_c, sub_p = card_at[lo:hi], pos_of[lo:hi]
                sub_m = moved[lo:hi] if track_moved else moved
                kernels.simulate_batch(sub_c, sub_p, eu, ev, draws, sub_m)
    return DeckBatch(card_at, pos_of, moved if track_moved else None)


def uniform_decks(n: int, reps: int, rng) -> DeckBatch:
    rng = as_rng(rng)
    card_at = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (reps, 1)), axis=1)
    pos_of = np.argsort(card_at, axis=1)
    return DeckBatch(card_at, pos_of)


# ---------------------------------------------------------------- single card

def single_card_matrix(g: Graph) -> np.ndarray:
    """Transition matrix of one card: stay w.p. 1 - d_u/(2m), move to each
    neighbour w.p. 1/(2m)."""
    if not g.is_connected():
        raise Disconnected("single-card chain needs a connected graph")
    A = g.csr.toarray() / (2 * g.m)
    A[np.diag_indices(g.n)] = 1 - g.degrees / (2 * g.m)
    return A


def single_card_marginal_tv(g: Graph, card: int, t: int) -> float:
    """TV distance of card ``card``'s position at time ``t`` from uniform on V.

    By data processing this lower-bounds the TV distance of the whole deck.
    """
    A = single_card_matrix(g)
    row = np.zeros(g.n)
    row[card] = 1.0
    row = row @ np.linalg.matrix_power(A, t) if t else row
    return 0.5 * float(np.abs(row - 1.0 / g.n).sum())


# ---------------------------------------------------------------- S_n bookkeeping

def perm_index(perm) -> int:
    perm = [int(x) for x in perm]
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise OutOfRange("not a permutation of 0..n-1")
    r = 0
    for i in range(n):
        r += sum(1 for j in range(i + 1, n) if perm[j] < perm[i]) * math.factorial(n - 1 - i)
    return r


def index_perm(i: int, n: int) -> list[int]:
    if not 0 <= i < math.factorial(n):
        raise OutOfRange(f"index {i} outside 0..{math.factorial(n) - 1}")
    pool = list(range(n))
    out = []
    for k in range(n - 1, -1, -1):
        d, i = divmod(i, math.factorial(k))
        out.append(pool.pop(d))
    return out


@lru_cache(maxsize=8)
def _perms(n: int) -> np.ndarray:
    p = kernels.all_permutations(n)
    p.setflags(write=False)
    return p


def all_perms(n: int) -> np.ndarray:
    """``(n!, n)`` array of ``card_at`` rows in index order."""
    if n > MAX_EXACT_N:
        raise TooLarge(f"n = {n} exceeds the exact limit {MAX_EXACT_N}")
    return _perms(n)


@dataclass(frozen=True)
class PermDistribution:
    probs: np.ndarray
    n: int

    def __post_init__(self):
        if len(self.probs) != math.factorial(self.n):
            raise DimensionMismatch("distribution length is not n!")
        if (self.probs < -1e-15).any() or abs(self.probs.sum() - 1) > 1e-12:
            raise ValueError("not a probability vector")

    @classmethod
    def point_mass(cls, n: int, index: int = 0) -> "PermDistribution":
        p = np.zeros(math.factorial(n))
        p[index] = 1.0
        return cls(p, n)

    @classmethod
    def uniform(cls, n: int) -> "PermDistribution":
        k = math.factorial(n)
        return cls(np.full(k, 1.0 / k), n)

    def __getitem__(self, perm) -> float:
        return float(self.probs[perm_index(perm)])

    def expect(self, values: np.ndarray) -> float:
        return float(self.probs @ values)


def tv_distance(p: PermDistribution, q: PermDistribution) -> float:
    if p.n != q.n:
        raise DimensionMismatch("distributions over different S_n")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def l2_distance(p: PermDistribution) -> float:
    """L2(pi) norm of p - pi for uniform pi: sqrt(n! * sum (p - 1/n!)^2)."""
    k = len(p.probs)
    return math.sqrt(k * float(((p.probs - 1.0 / k) ** 2).sum()))


def _tv_uniform(probs: np.ndarray) -> float:
    return 0.5 * float(np.abs(probs - 1.0 / len(probs)).sum())


def _l2_uniform(probs: np.ndarray) -> float:
    k = len(probs)
    return math.sqrt(k * float(((probs - 1.0 / k) ** 2).sum()))


class ExactEvolver:
    """Exact law of the deck started from the identity, advanced one step at a time."""

    def __init__(self, g: Graph):
        if g.n > MAX_EXACT_N:
            raise TooLarge(f"exact evolution is limited to n <= {MAX_EXACT_N}")
        if not g.is_connected():
            raise Disconnected("exact evolution needs a connected graph")
        self.g = g
        self.perms = all_perms(g.n)
        eu, ev = _edge_arrays(g)
        self.table = kernels.swap_table(self.perms, eu, ev)
        self.probs = np.zeros(len(self.perms))
        self.probs[0] = 1.0
        self.t = 0

    def step(self) -> np.ndarray:
        self.probs = kernels.evolve_step(self.probs, self.table)
        self.t += 1
        return self.probs

    def advance(self, t: int) -> np.ndarray:
        for _ in range(t):
            self.step()
        return self.probs

    def distribution(self) -> PermDistribution:
        return PermDistribution(self.probs.copy(), self.g.n)

    def transition_matrix(self) -> np.ndarray:
        """Dense n! x n! transition matrix (symmetric)."""
        k, m = self.table.shape
        P = np.zeros((k, k))
        P[np.arange(k), np.arange(k)] = 0.5
        rows = np.repeat(np.arange(k), m)
        np.add.at(P, (rows, self.table.ravel()), 0.5 / m)
        return P


def evolve_exact(g: Graph, t: int) -> PermDistribution:
    ev = ExactEvolver(g)
    ev.advance(t)
    return ev.distribution()


@dataclass
class MixingTimes:
    tau_mix: int
    tau_hat: int
    tv: np.ndarray = field(repr=False)
    l2: np.ndarray = field(repr=False)

    def rows(self):
        for t, (a, b) in enumerate(zip(self.tv, self.l2)):
            yield t, float(a), float(b)


def exact_mixing_times(g: Graph, max_t: int = 10**7) -> MixingTimes:
    """First times the TV distance drops to 1/4 and the L2 distance to 1/2.

    The curves (index = time) run until both thresholds are met.
    """
    ev = ExactEvolver(g)
    tv = [_tv_uniform(ev.probs)]
    l2 = [_l2_uniform(ev.probs)]
    tau_mix = 0 if tv[0] <= TV_THRESHOLD + _TIE else None
    tau_hat = 0 if l2[0] <= L2_THRESHOLD + _TIE else None
    while tau_mix is None or tau_hat is None:
        if ev.t >= max_t:
            raise RuntimeError(f"thresholds not reached within {max_t} steps")
        p = ev.step()
        tv.append(_tv_uniform(p))
        l2.append(_l2_uniform(p))
        assert tv[-1] <= tv[-2] + 1e-12 and l2[-1] <= l2[-2] + 1e-12, "distance increased"
        if tau_mix is None and tv[-1] <= TV_THRESHOLD + _TIE:
            tau_mix = ev.t
        if tau_hat is None and l2[-1] <= L2_THRESHOLD + _TIE:
            tau_hat = ev.t
    assert tau_mix <= tau_hat
    return MixingTimes(tau_mix, tau_hat, np.array(tv), np.array(l2))


def card_positions(perms: np.ndarray) -> np.ndarray:
    """``pos_of`` rows for every ``card_at`` row."""
    return np.argsort(perms, axis=1)
