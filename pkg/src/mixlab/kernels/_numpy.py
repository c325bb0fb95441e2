"""Pure-numpy reference kernels.

Same signatures and results as :mod:`mixlab.kernels._numba`; selected when
``MIXLAB_NO_NUMBA`` is set or numba is unavailable.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def all_permutations(n: int) -> np.ndarray:
    """All permutations of ``0..n-1`` as rows, in Lehmer (lexicographic) order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


def perm_ranks(perms: np.ndarray) -> np.ndarray:
    perms = np.asarray(perms)
    k, n = perms.shape
    ranks = np.zeros(k, dtype=np.int64)
    for i in range(n):
        smaller_after = (perms[:, i + 1:] < perms[:, i:i + 1]).sum(axis=1)
        ranks += smaller_after * math.factorial(n - 1 - i)
    return ranks


def swap_table(perms: np.ndarray, eu: np.ndarray, ev: np.ndarray) -> np.ndarray:
    """``table[s, e]`` = index of state ``s`` with the cards on edge ``e`` swapped."""
    table = np.empty((perms.shape[0], len(eu)), dtype=np.int32)
    for e, (a, b) in enumerate(zip(eu, ev)):
        q = perms.copy()
        q[:, [a, b]] = q[:, [b, a]]
        table[:, e] = perm_ranks(q)
    return table


def evolve_step(p: np.ndarray, table: np.ndarray) -> np.ndarray:
    m = table.shape[1]
    return 0.5 * p + p[table].sum(axis=1) * (0.5 / m)


def simulate_batch(card_at, pos_of, eu, ev, draws, moved) -> None:
    """Advance every deck in place.

    ``draws[r, s]`` in ``[0, 2m)`` encodes step ``s`` of deck ``r``: edge
    ``draws // 2``, swap iff ``draws % 2 == 1``.  ``moved`` (bool, same shape
    as ``pos_of``) is updated per card when it is non-empty.
    """
    reps, steps = draws.shape
    rows = np.arange(reps)
    track = moved.size > 0
    for s in range(steps):
        d = draws[:, s]
        swap = (d & 1).astype(bool)
        if not swap.any():
            continue
        r = rows[swap]
        e = d[swap] >> 1
        a, b = eu[e], ev[e]
        ca, cb = card_at[r, a], card_at[r, b]
        card_at[r, a] = cb
        card_at[r, b] = ca
        pos_of[r, ca] = b
        pos_of[r, cb] = a
        if track:
            moved[r, ca] = True
            moved[r, cb] = True


def path_system(indptr, indices, n):
    """All-sources BFS.  ``parent[u, w]`` is the smallest-labelled neighbour
    of ``w`` one step closer to ``u`` (-1 on the diagonal / unreachable)."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import shortest_path

    adj = csr_matrix((np.ones(len(indices)), indices, indptr), shape=(n, n))
    d = shortest_path(adj, method="D", unweighted=True, directed=False)
    dist = np.where(np.isinf(d), -1, d).astype(np.int32)
    parent = np.full((n, n), -1, dtype=np.int32)
    src = np.repeat(np.arange(n), np.diff(indptr))
    dst = np.asarray(indices)
    big = np.iinfo(np.int32).max
    for u in range(n):
        du = dist[u]
        ok = (du[src] >= 1) & (du[dst] == du[src] - 1)
        best = np.full(n, big, dtype=np.int64)
        np.minimum.at(best, src[ok], dst[ok])
        row = np.where(best == big, -1, best)
        parent[u] = row
    return dist, parent


def edge_loads(dist, parent, indptr, indices, slot_eid, m):
    """``loads[e]`` = sum over pairs u < v of |y| * N(e, y) for the
    representation (w0 w1)...(w_{r-1} w_r)...(w0 w1) of (u v) along the
    stored path; the edge at v is used once, the others twice."""
    n = dist.shape[0]
    loads = np.zeros(m)
    src = np.repeat(np.arange(n), np.diff(indptr))
    keys = src * n + np.asarray(indices)
    order_k = np.argsort(keys)
    keys_sorted = keys[order_k]
    eid_sorted = np.asarray(slot_eid)[order_k]
    idx = np.arange(n)
    for u in range(n):
        du = dist[u].astype(np.int64)
        own = np.where(idx > u, 2 * du - 1, 0).astype(np.float64)
        S = own.copy()
        pu = parent[u].astype(np.int64)
        for lev in range(int(du.max()), 0, -1):
            ws = np.flatnonzero(du == lev)
            ps = pu[ws]
            e = eid_sorted[np.searchsorted(keys_sorted, ws * n + ps)]
            np.add.at(loads, e, 2 * S[ws] - own[ws])
            np.add.at(S, ps, S[ws])
    return loads
