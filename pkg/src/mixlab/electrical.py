"""Unit-resistor networks: harmonic potentials, effective resistance and the
centered test vectors used as upper bounds on the single-card gap."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .errors import BadBoundary, Disconnected, NotCentered
from .graph import Graph, bfs_distances
from .spectral import TestVector, laplacian_quadratic

DIRECT_LIMIT = 5000


@dataclass(frozen=True)
class BoundaryCondition:
    plus: np.ndarray
    minus: np.ndarray
    v_plus: float = 1.0
    v_minus: float = -1.0

    def __post_init__(self):
        plus = np.unique(np.asarray(self.plus, dtype=np.int64))
        minus = np.unique(np.asarray(self.minus, dtype=np.int64))
        if plus.size == 0 or minus.size == 0:
            raise BadBoundary("both boundary sets must be non-empty")
        if np.intersect1d(plus, minus).size:
            raise BadBoundary("boundary sets overlap")
        if self.v_plus <= self.v_minus:
            raise BadBoundary("v_plus must exceed v_minus")
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)


@dataclass(frozen=True)
class PotentialSolution:
    eta: TestVector
    current: float
    resistance: float
    harmonic_residual: float
    current_in: float  # net current into the minus set


def harmonic_potential(g: Graph, bc: BoundaryCondition) -> PotentialSolution:
    """Potential fixed on the boundary sets and harmonic everywhere else."""
    if not g.is_connected():
        raise Disconnected("potential needs a connected graph")
    if bc.plus.max() >= g.n or bc.minus.max() >= g.n or min(bc.plus.min(), bc.minus.min()) < 0:
        raise BadBoundary("boundary vertex out of range")
    L = g.laplacian().tocsr()
    eta = np.zeros(g.n)
    eta[bc.plus] = bc.v_plus
    eta[bc.minus] = bc.v_minus
    fixed = np.zeros(g.n, dtype=bool)
    fixed[bc.plus] = fixed[bc.minus] = True
    free = np.flatnonzero(~fixed)
    if free.size:
        L_ff = L[free][:, free].tocsc()
        rhs = -(L[free][:, np.flatnonzero(fixed)] @ eta[fixed])
        if g.n <= DIRECT_LIMIT:
            eta[free] = spla.spsolve(L_ff, rhs)
        else:
            x, info = spla.cg(L_ff, rhs, rtol=1e-13, atol=0.0, maxiter=100 * g.n)
            if info != 0 or np.linalg.norm(L_ff @ x - rhs) > 1e-10:
                x = spla.spsolve(L_ff, rhs)
            eta[free] = x
    flow = L @ eta
    residual = float(np.abs(flow[free]).max()) if free.size else 0.0
    current = float(flow[bc.plus].sum())
    current_in = float(-flow[bc.minus].sum())
    return PotentialSolution(
        TestVector(eta), current, (bc.v_plus - bc.v_minus) / current, residual, current_in
    )


def effective_resistance(g: Graph, A, B) -> float:
    return harmonic_potential(g, BoundaryCondition(A, B)).resistance


def centered_test_vector(sol: PotentialSolution) -> TestVector:
    """eta minus its mean, scaled to unit L2 norm."""
    return TestVector.centered_unit(sol.eta.values)


def gap_upper_bound(g: Graph, phi: TestVector) -> float:
    """Dirichlet form of a centered unit vector; an upper bound on gamma."""
    v = phi.values
    if abs(v.sum()) > 1e-10 or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise NotCentered("test vector must be zero-sum with unit norm")
    return laplacian_quadratic(g, phi)


# ---------------------------------------------------------------- boundary constructions on trees

def _rooted(tree: Graph, root: int):
    dist = bfs_distances(tree, root).dist
    adj = tree.adjacency
    parent = np.full(tree.n, -1, dtype=np.int64)
    for v in range(tree.n):
        if v != root:
            parent[v] = next(int(u) for u in adj[v] if dist[u] == dist[v] - 1)
    order = np.lexsort((np.arange(tree.n), dist))  # by depth, then label
    return dist, parent, order


def _progeny_counts(parent: np.ndarray, order: np.ndarray, marked: np.ndarray) -> np.ndarray:
    count = marked.astype(np.int64)
    for v in order[::-1]:
        if parent[v] >= 0:
            count[parent[v]] += count[v]
    return count


def _descendants(v: int, tree: Graph, parent: np.ndarray) -> np.ndarray:
    out, stack = [], [v]
    adj = tree.adjacency
    while stack:
        x = stack.pop()
        out.append(x)
        stack.extend(int(y) for y in adj[x] if parent[y] == x)
    return np.array(sorted(out), dtype=np.int64)


def thirds_boundary(tree: Graph, root: int = 0) -> BoundaryCondition:
    """+1 on the leaves under the first child of the root, -1 on the leaves
    under its last child."""
    _, parent, _ = _rooted(tree, root)
    kids = sorted(int(x) for x in tree.adjacency[root])
    if len(kids) < 2:
        raise BadBoundary("root needs at least two children")
    sides = []
    for c in (kids[0], kids[-1]):
        sub = _descendants(c, tree, parent)
        sides.append(sub[tree.degrees[sub] == 1])
    return BoundaryCondition(sides[0], sides[1])


def two_progeny_boundary(tree: Graph, root: int, target) -> BoundaryCondition:
    """Split ``target`` at the vertex nearest the root having two children
    whose progeny meets it.

    Vertices are scanned by (depth, label); the two children with the largest
    progeny intersection are used (ties to the smaller label).
    """
    dist, parent, order = _rooted(tree, root)
    marked = np.zeros(tree.n, dtype=bool)
    marked[np.asarray(target, dtype=np.int64)] = True
    count = _progeny_counts(parent, order, marked)
    adj = tree.adjacency
    for u in order:
        kids = [int(y) for y in adj[u] if parent[y] == u and count[y] > 0]
        if len(kids) >= 2:
            kids.sort(key=lambda y: (-count[y], y))
            sets = []
            for c in kids[:2]:
                sub = _descendants(c, tree, parent)
                sets.append(sub[marked[sub]])
            return BoundaryCondition(sets[0], sets[1])
    raise BadBoundary("no vertex splits the target set")


def level_set(tree: Graph, root: int, depth: int) -> np.ndarray:
    return np.flatnonzero(bfs_distances(tree, root).dist == depth)
