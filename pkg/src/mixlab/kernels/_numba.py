"""numba-compiled kernels; see :mod:`mixlab.kernels._numpy` for semantics."""

from __future__ import annotations

import numpy as np
from numba import njit

from ._numpy import all_permutations  # noqa: F401  (itertools is faster than a jitted generator)


@njit(cache=True)
def _rank(row, fact):
    n = row.shape[0]
    r = 0
    for i in range(n):
        c = 0
        for j in range(i + 1, n):
            if row[j] < row[i]:
                c += 1
        r += c * fact[n - 1 - i]
    return r


@njit(cache=True)
def _perm_ranks(perms, fact):
    k = perms.shape[0]
    out = np.empty(k, dtype=np.int64)
    for s in range(k):
        out[s] = _rank(perms[s], fact)
    return out


def _factorials(n):
    f = np.ones(max(n, 1), dtype=np.int64)
    for i in range(1, len(f)):
        f[i] = f[i - 1] * i
    return f


def perm_ranks(perms):
    perms = np.ascontiguousarray(perms)
    return _perm_ranks(perms, _factorials(perms.shape[1]))


@njit(cache=True)
def _swap_table(perms, eu, ev, fact):
    k, n = perms.shape
    m = eu.shape[0]
    table = np.empty((k, m), dtype=np.int32)
    row = np.empty(n, dtype=perms.dtype)
    for s in range(k):
        for i in range(n):
            row[i] = perms[s, i]
        for e in range(m):
            a, b = eu[e], ev[e]
            row[a], row[b] = row[b], row[a]
            table[s, e] = _rank(row, fact)
            row[a], row[b] = row[b], row[a]
    return table


def swap_table(perms, eu, ev):
    perms = np.ascontiguousarray(perms)
    return _swap_table(perms, np.asarray(eu, np.int64), np.asarray(ev, np.int64),
                       _factorials(perms.shape[1]))


@njit(cache=True)
def _evolve_step(p, table, out):
    k, m = table.shape
    w = 0.5 / m
    for s in range(k):
        acc = 0.0
        for e in range(m):
            acc += p[table[s, e]]
        out[s] = 0.5 * p[s] + w * acc
    return out


def evolve_step(p, table):
    return _evolve_step(p, table, np.empty_like(p))


@njit(cache=True)
def _simulate_batch(card_at, pos_of, eu, ev, draws, moved, track):
    reps, steps = draws.shape
    for r in range(reps):
        for s in range(steps):
            d = draws[r, s]
            if d & 1:
                e = d >> 1
                a, b = eu[e], ev[e]
                ca, cb = card_at[r, a], card_at[r, b]
                card_at[r, a] = cb
                card_at[r, b] = ca
                pos_of[r, ca] = b
                pos_of[r, cb] = a
                if track:
                    moved[r, ca] = True
                    moved[r, cb] = True


def simulate_batch(card_at, pos_of, eu, ev, draws, moved):
    track = moved.size > 0
    if not track:
        moved = np.zeros((1, 1), dtype=np.bool_)
    _simulate_batch(card_at, pos_of, eu, ev, draws, moved, track)


@njit(cache=True)
def _path_system(indptr, indices, n):
    dist = np.full((n, n), -1, dtype=np.int32)
    parent = np.full((n, n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for u in range(n):
        d = dist[u]
        d[u] = 0
        queue[0] = u
        head, tail = 0, 1
        while head < tail:
            x = queue[head]
            head += 1
            for k in range(indptr[x], indptr[x + 1]):
                y = indices[k]
                if d[y] < 0:
                    d[y] = d[x] + 1
                    queue[tail] = y
                    tail += 1
        for w in range(n):
            if d[w] <= 0:
                continue
            for k in range(indptr[w], indptr[w + 1]):
                y = indices[k]
                if d[y] == d[w] - 1:
                    parent[u, w] = y
                    break
    return dist, parent


def path_system(indptr, indices, n):
    return _path_system(np.asarray(indptr, np.int64), np.asarray(indices, np.int64), n)


@njit(cache=True)
def _edge_loads(dist, parent, indptr, indices, slot_eid, m):
    n = dist.shape[0]
    loads = np.zeros(m)
    S = np.empty(n)
    own = np.empty(n)
    order = np.empty(n, dtype=np.int64)
    for u in range(n):
        d = dist[u]
        maxd = 0
        for w in range(n):
            own[w] = 2.0 * d[w] - 1.0 if w > u else 0.0
            S[w] = own[w]
            if d[w] > maxd:
                maxd = d[w]
        # counting sort by decreasing distance
        cnt = np.zeros(maxd + 2, dtype=np.int64)
        for w in range(n):
            cnt[maxd - d[w] + 1] += 1
        for i in range(1, maxd + 2):
            cnt[i] += cnt[i - 1]
        for w in range(n):
            b = maxd - d[w]
            order[cnt[b]] = w
            cnt[b] += 1
        for i in range(n):
            w = order[i]
            if d[w] <= 0:
                continue
            p = parent[u, w]
            e = -1
            for k in range(indptr[w], indptr[w + 1]):
                if indices[k] == p:
                    e = slot_eid[k]
                    break
            loads[e] += 2.0 * S[w] - own[w]
            S[p] += S[w]
    return loads


def edge_loads(dist, parent, indptr, indices, slot_eid, m):
    return _edge_loads(dist, parent, np.asarray(indptr, np.int64), np.asarray(indices, np.int64),
                       np.asarray(slot_eid, np.int64), m)
