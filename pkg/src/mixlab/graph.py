"""Immutable simple graphs, multigraphs and elementary graph algorithms.

Vertices are dense integers ``0..n-1``.  Edges are stored as an ``(m, 2)``
integer array with ``u < v`` in every row, in insertion order, so that two
graphs built from the same edge sequence serialize identically.
"""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    Disconnected,
    DuplicateEdge,
    EdgeListFormatError,
    EmptyGraph,
    OutOfRange,
    SelfLoop,
    Unreachable,
)

UNREACHABLE = -1


class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    def __init__(self, n: int, edges, *, _checked: bool = False):
        n = int(n)
        if n < 0:
            raise OutOfRange(f"vertex count must be non-negative, got {n}")
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2) if len(edges) else np.zeros((0, 2), np.int64)
        if not _checked:
            if arr.size and (arr.min() < 0 or arr.max() >= n):
                bad = arr[(arr < 0).any(axis=1) | (arr >= n).any(axis=1)][0]
                raise OutOfRange(f"edge {tuple(bad)} has an endpoint outside 0..{n - 1}")
            if arr.size and (arr[:, 0] == arr[:, 1]).any():
                bad = arr[arr[:, 0] == arr[:, 1]][0]
                raise SelfLoop(f"self-loop at vertex {bad[0]}")
            arr = np.sort(arr, axis=1)
            keys = arr[:, 0] * n + arr[:, 1]
            if len(np.unique(keys)) != len(keys):
                _, first = np.unique(keys, return_index=True)
                dup = np.setdiff1d(np.arange(len(keys)), first)[0]
                raise DuplicateEdge(f"duplicate edge {tuple(arr[dup])}")
        arr.setflags(write=False)
        self._n = n
        self._edges = arr
        deg = np.bincount(arr.ravel(), minlength=n) if n else np.zeros(0, np.int64)
        assert deg.sum() == 2 * len(arr)
        deg.setflags(write=False)
        self._degrees = deg

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, ...]:
        """Sorted neighbour array per vertex."""
        csr = self.csr
        return tuple(csr.indices[csr.indptr[v]:csr.indptr[v + 1]].copy() for v in range(self._n))

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[v]

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """0/1 adjacency matrix in CSR form with sorted indices."""
        u, v = self._edges[:, 0], self._edges[:, 1]
        data = np.ones(2 * self.m, dtype=np.float64)
        a = sp.csr_matrix(
            (data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(self._n, self._n)
        )
        a.sort_indices()
        return a

    def laplacian(self, dense: bool = False):
        lap = sp.diags(self._degrees.astype(np.float64)) - self.csr
        return lap.toarray() if dense else lap.tocsr()

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self._edges)}

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edge_index

    def is_connected(self) -> bool:
        if self._n == 0:
            return False
        return csgraph.connected_components(self.csr, directed=False)[0] == 1

    def is_tree(self) -> bool:
        return self._n >= 1 and self.m == self._n - 1 and self.is_connected()

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in self._edges]

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self._n == other._n and np.array_equal(self._edges, other._edges)

    def __hash__(self):
        return hash((self._n, self._edges.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


class MultiGraph:
    """Undirected multigraph; self-loops and parallel edges allowed.

    A loop contributes 2 to the degree of its vertex.
    """

    def __init__(self, n: int, edges):
        self.n = int(n)
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2) if len(edges) else np.zeros((0, 2), np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.n):
            raise OutOfRange("multigraph edge endpoint out of range")
        self.edges = np.sort(arr, axis=1)
        self.edges.setflags(write=False)
        self.degrees = np.bincount(self.edges.ravel(), minlength=self.n)
        assert self.degrees.sum() == 2 * len(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def multiplicity(self) -> Counter:
        return Counter((int(a), int(b)) for a, b in self.edges)

    def loops(self) -> int:
        return int((self.edges[:, 0] == self.edges[:, 1]).sum())

    def is_simple(self) -> bool:
        if self.loops():
            return False
        keys = self.edges[:, 0] * self.n + self.edges[:, 1]
        return len(np.unique(keys)) == len(keys)

    def to_graph(self) -> Graph:
        return Graph(self.n, self.edges)

    def __repr__(self) -> str:
        return f"MultiGraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DistanceTable:
    source: int
    dist: np.ndarray  # UNREACHABLE (-1) marks vertices outside the source component

    def __getitem__(self, v: int) -> int:
        return int(self.dist[v])

    def reachable(self, v: int) -> bool:
        return self.dist[v] != UNREACHABLE


def from_edge_list(n: int, edges) -> Graph:
    return Graph(n, list(edges))


def _check_vertex(g: Graph, v: int) -> None:
    if not 0 <= v < g.n:
        raise OutOfRange(f"vertex {v} outside 0..{g.n - 1}")


def bfs_distances(g: Graph, source: int) -> DistanceTable:
    _check_vertex(g, source)
    dist = np.full(g.n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    adj = g.adjacency
    queue = deque([source])
    while queue:
        x = queue.popleft()
        dx = dist[x] + 1
        for y in adj[x]:
            if dist[y] == UNREACHABLE:
                dist[y] = dx
                queue.append(y)
    return DistanceTable(source, dist)


def distance_matrix(g: Graph, sources=None) -> np.ndarray:
    """Hop distances from ``sources`` (default: all vertices); -1 if unreachable."""
    d = csgraph.shortest_path(g.csr, method="D", directed=False, unweighted=True, indices=sources)
    out = np.where(np.isinf(d), UNREACHABLE, d).astype(np.int64)
    return out


def eccentricities(g: Graph, chunk: int = 512) -> np.ndarray:
    if not g.is_connected():
        raise Disconnected("eccentricity needs a connected graph")
    ecc = np.empty(g.n, dtype=np.int64)
    for start in range(0, g.n, chunk):
        idx = np.arange(start, min(start + chunk, g.n))
        ecc[idx] = distance_matrix(g, idx).max(axis=1)
    return ecc


def radius_diameter(g: Graph) -> tuple[int, int]:
    ecc = eccentricities(g)
    return int(ecc.min()), int(ecc.max())


def connected_components(g: Graph) -> list[np.ndarray]:
    """Components as sorted vertex arrays, ordered by smallest member."""
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.csr, directed=False)
    order = np.argsort(labels, kind="stable")
    splits = np.flatnonzero(np.diff(labels[order])) + 1
    comps = [np.sort(c) for c in np.split(order, splits)]
    comps.sort(key=lambda c: c[0])
    return comps


def induced_subgraph(g: Graph, vertices) -> tuple[Graph, np.ndarray]:
    """Subgraph induced on ``vertices``, relabelled in increasing label order.

    Returns the graph and the map new label -> original label.
    """
    verts = np.unique(np.asarray(vertices, dtype=np.int64))
    new_of = np.full(g.n, -1, dtype=np.int64)
    new_of[verts] = np.arange(len(verts))
    e = g.edges
    keep = (new_of[e[:, 0]] >= 0) & (new_of[e[:, 1]] >= 0)
    sub = new_of[e[keep]]
    return Graph(len(verts), sub, _checked=True), verts


def giant_component(g: Graph) -> tuple[Graph, np.ndarray]:
    if g.n == 0:
        raise EmptyGraph("graph has no vertices")
    comps = connected_components(g)
    # comps is ordered by smallest label, so max() keeps the first of equal sizes
    best = max(comps, key=len)
    return induced_subgraph(g, best)


def shortest_path(g: Graph, u: int, v: int) -> list[int]:
    """Shortest u-v path; each step back from v goes to the smallest-labelled
    neighbour one level closer to u."""
    _check_vertex(g, v)
    dt = bfs_distances(g, u)
    if not dt.reachable(v):
        raise Unreachable(f"{v} is not reachable from {u}")
    dist, adj = dt.dist, g.adjacency
    path = [v]
    x = v
    while x != u:
        x = int(next(y for y in adj[x] if dist[y] == dist[x] - 1))
        path.append(x)
    return path[::-1]


def read_edge_list(path) -> Graph:
    """Parse the ``n m`` header + ``u v`` lines format (0-indexed, u < v)."""
    lines = Path(path).read_text().splitlines()
    rows = [(i + 1, ln.split()) for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise EdgeListFormatError("line 1: missing 'n m' header")
    lineno, head = rows[0]
    try:
        n, m = (int(x) for x in head)
    except ValueError:
        raise EdgeListFormatError(f"line {lineno}: expected 'n m', got {' '.join(head)!r}") from None
    body = rows[1:]
    if len(body) != m:
        raise EdgeListFormatError(f"line 1: header declares {m} edges but file has {len(body)}")
    edges = []
    seen = set()
    for lineno, parts in body:
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected two vertex labels")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"line {lineno}: non-integer vertex label") from None
        if not (0 <= a < n and 0 <= b < n):
            raise EdgeListFormatError(f"line {lineno}: vertex out of range 0..{n - 1}")
        if a >= b:
            raise EdgeListFormatError(f"line {lineno}: expected u < v, got {a} {b}")
        if (a, b) in seen:
            raise EdgeListFormatError(f"line {lineno}: duplicate edge {a} {b}")
        seen.add((a, b))
        edges.append((a, b))
    return Graph(n, edges)


def format_edge_list(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{a} {b}" for a, b in g.edges)
    return "\n".join(out) + "\n"


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))


def _canonical_key(n: int, edges: list[tuple[int, int]], perms) -> tuple:
    best = None
    for p in perms:
        key = tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges))
        if best is None or key < best:
            best = key
    return best


def connected_graphs(n: int, up_to_isomorphism: bool = True) -> list[Graph]:
    """Every connected graph on ``n`` labelled vertices, optionally one per
    isomorphism class (brute force; intended for n <= 6)."""
    pairs = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen = set()
    out = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        if len(edges) < n - 1:
            continue
        g = Graph(n, edges, _checked=True) if edges else Graph(n, [])
        if not g.is_connected():
            continue
        if up_to_isomorphism:
            key = _canonical_key(n, edges, perms)
            if key in seen:
                continue
            seen.add(key)
        out.append(g)
    return out


def stick_lengths(g: Graph) -> list[int]:
    """Lengths (in edges) of sticks: induced paths that start at a degree-1
    vertex and run through degree-2 vertices until a vertex of other degree."""
    deg = g.degrees
    adj = g.adjacency
    out = []
    for leaf in np.flatnonzero(deg == 1):
        prev, cur, length = int(leaf), int(adj[leaf][0]), 1
        while deg[cur] == 2:
            a, b = adj[cur]
            prev, cur = cur, int(b if a == prev else a)
            length += 1
        out.append(length)
    return out
