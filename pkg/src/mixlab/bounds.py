"""Quantitative mixing bounds for the interchange process.

* the radius upper bound ``8 m rho n ln n`` (leading order);
* the comparison constant A* of a shortest-path system against random
  transpositions, and the L2 time it certifies;
* Wilson-type lower bounds built from a Fiedler vector, with a Monte Carlo
  distinguisher;
* exact hitting and commute times, including the branch formula on trees.

Logarithms are natural throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .errors import BadParams, DimensionMismatch, Disconnected, NotATree
from .graph import Graph, bfs_distances, radius_diameter
from .interchange import DeckState, identity_deck, simulate_decks, uniform_decks
from .rng import as_rng
from .spectral import TestVector


def prop_a_bound(g: Graph) -> float:
    """Leading-order radius bound 8 m rho n ln n on the TV mixing time."""
    if not g.is_connected():
        raise Disconnected("bound needs a connected graph")
    rho, _ = radius_diameter(g)
    return 8.0 * g.m * rho * g.n * math.log(g.n)


# ---------------------------------------------------------------- comparison

def _slot_edge_ids(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """CSR arrays of the adjacency plus the edge id stored in each slot."""
    u, v = g.edges[:, 0], g.edges[:, 1]
    ids = np.arange(1, g.m + 1, dtype=np.float64)
    a = sp.csr_matrix(
        (np.concatenate([ids, ids]), (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(g.n, g.n)
    )
    a.sort_indices()
    return a.indptr.astype(np.int64), a.indices.astype(np.int64), a.data.astype(np.int64) - 1


@dataclass
class PathSystem:
    """One shortest path per vertex pair.

    ``parent[u, w]`` is the next vertex after ``w`` on the way to ``u``; the
    path for ``u < v`` runs ``u = w_0, ..., w_r = v``.
    """

    g: Graph
    dist: np.ndarray = field(repr=False)
    parent: np.ndarray = field(repr=False)

    def path(self, u: int, v: int) -> list[int]:
        out = [v]
        while out[-1] != u:
            out.append(int(self.parent[u, out[-1]]))
        return out[::-1]

    def representation(self, u: int, v: int) -> list[tuple[int, int]]:
        """Adjacent transpositions whose product is (u v), for u < v."""
        u, v = min(u, v), max(u, v)
        w = self.path(u, v)
        r = len(w) - 1
        steps = [(w[k], w[k + 1]) for k in range(r)]
        return steps + steps[:-1][::-1]

    def rep_length(self, u: int, v: int) -> int:
        return 2 * int(self.dist[u, v]) - 1

    def uses(self, u: int, v: int) -> dict[int, int]:
        """N(x, y) for y = (u v), keyed by edge id."""
        out: dict[int, int] = {}
        for a, b in self.representation(u, v):
            e = self.g.edge_index[(min(a, b), max(a, b))]
            out[e] = out.get(e, 0) + 1
        return out


def build_path_system(g: Graph) -> PathSystem:
    if not g.is_connected():
        raise Disconnected("path system needs a connected graph")
    indptr, indices, _ = _slot_edge_ids(g)
    dist, parent = kernels.path_system(indptr, indices, g.n)
    ps = PathSystem(g, dist, parent)
    # every parent step shortens the distance by one, so every stored path is
    # shortest; N(x, y) <= 2 and |y| = 2 d(u, v) - 1 <= 2 diam - 1 follow
    off = ~np.eye(g.n, dtype=bool)
    rows = np.broadcast_to(np.arange(g.n)[:, None], dist.shape)
    assert (dist[rows[off], parent[off]] == dist[off] - 1).all()
    return ps


@dataclass(frozen=True)
class ComparisonReport:
    a_star: float
    argmax_edge: tuple[int, int]
    profile: np.ndarray  # per-edge value of the maximised sum, edge order of g
    mu: str = "1/(2m) per edge"
    mu0: str = "1/n^2 per transposition"


def congestion_a_star(g: Graph, ps: PathSystem | None = None) -> ComparisonReport:
    """A* = max over edges x of (1/mu(x)) sum_y |y| N(x,y) mu0(y) with
    mu(x) = 1/(2m) and mu0((i j)) = 1/n^2."""
    ps = build_path_system(g) if ps is None else ps
    indptr, indices, slot_eid = _slot_edge_ids(g)
    loads = kernels.edge_loads(ps.dist, ps.parent, indptr, indices, slot_eid, g.m)
    profile = loads * (2.0 * g.m) / (g.n * g.n)
    e = int(np.argmax(profile))
    return ComparisonReport(float(profile[e]), tuple(int(x) for x in g.edges[e]), profile)


def l2_upper_time(a_star: float, n: int, C: float = 1.0) -> int:
    """Smallest t with n! e^-floor(t/A*) + C e^-2c <= 1/4 and
    floor(t/A*) >= n (ln n + c).

    The budget is split evenly: c solves C e^-2c = 1/8, then
    s = floor(t/A*) must reach both n (ln n + c) and ln n! + ln 8.
    """
    if not a_star > 0 or n < 2 or not C > 0:
        raise BadParams("need A* > 0, n >= 2 and C > 0")
    c = 0.5 * math.log(8 * C)
    s = math.ceil(max(n * (math.log(n) + c), math.lgamma(n + 1) + math.log(8)) - 1e-12)
    t = math.ceil(s * a_star - 1e-9)
    while math.floor(t / a_star) < s:
        t += 1
    return t


# ---------------------------------------------------------------- Wilson lower bound

@dataclass(frozen=True)
class WilsonPlan:
    xi: TestVector
    gamma: float
    b: float
    cards: np.ndarray  # S: cards whose starting vertex has xi > 0
    t: int
    phi0: float
    threshold: float   # 1/2 (1 - gamma)^t phi0

    def threshold_at(self, t: int) -> float:
        return 0.5 * (1 - self.gamma) ** t * self.phi0


def wilson_plan(g: Graph, xi: TestVector, gamma: float, b: float = 0.25,
                start: DeckState | None = None) -> WilsonPlan:
    v = xi.values
    if len(v) != g.n:
        raise DimensionMismatch("test vector length differs from graph order")
    if abs(v.sum()) > 1e-10 or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise BadParams("xi must be zero-sum with unit norm")
    if not 0 < gamma < 1 or not b > 0:
        raise BadParams("need 0 < gamma < 1 and b > 0")
    start = identity_deck(g.n) if start is None else start
    cards = np.flatnonzero(v[start.pos_of] > 0)
    t = max(1, math.floor(b / gamma * math.log(g.n)))
    phi0 = float(v[start.pos_of[cards]].sum())
    return WilsonPlan(xi, gamma, b, cards, t, phi0, 0.5 * (1 - gamma) ** t * phi0)


def wilson_statistic(xi: TestVector, cards, s: DeckState) -> float:
    """sum over cards i in S of xi(position of i)."""
    if len(xi) != s.n:
        raise DimensionMismatch("deck size differs from vector length")
    return float(xi.values[s.pos_of[np.asarray(cards, dtype=np.int64)]].sum())


def wilson_statistic_batch(xi: TestVector, cards, pos_of: np.ndarray) -> np.ndarray:
    return xi.values[pos_of[:, np.asarray(cards, dtype=np.int64)]].sum(axis=1)


def wilson_distinguisher_mc(g: Graph, plan: WilsonPlan, reps: int, rng, t: int | None = None):
    """Conservative Monte Carlo lower bound on the TV distance at time t.

    The event {phi > threshold} is estimated under the chain and under a
    uniform deck; the bound is the frequency gap minus two binomial standard
    errors, floored at 0.
    """
    if reps < 100:
        raise BadParams("need at least 100 replications")
    rng = as_rng(rng)
    t = plan.t if t is None else int(t)
    thr = plan.threshold_at(t)
    chain = simulate_decks(g, t, reps, rng)
    phi_t = wilson_statistic_batch(plan.xi, plan.cards, chain.pos_of)
    phi_u = wilson_statistic_batch(plan.xi, plan.cards, uniform_decks(g.n, reps, rng).pos_of)
    f1 = float((phi_t > thr).mean())
    f2 = float((phi_u > thr).mean())
    se = math.sqrt(f1 * (1 - f1) / reps + f2 * (1 - f2) / reps)
    lower = max(0.0, f1 - f2 - 2 * se)
    var_t = float(phi_t.var(ddof=1))
    diag = {
        "t": t,
        "threshold": thr,
        "freq_chain": f1,
        "freq_uniform": f2,
        "se": se,
        "raw_gap": f1 - f2,
        "mean_phi_t": float(phi_t.mean()),
        "var_phi_t": var_t,
        "var_phi_uniform": float(phi_u.var(ddof=1)),
        "var_bound_ok": var_t <= 1.0,
    }
    return lower, diag


# ---------------------------------------------------------------- hitting and commute times

WALKS = ("srw", "edge_walk", "card_walk")


def _walk_matrix(g: Graph, walk: str):
    A = g.csr
    deg = g.degrees.astype(np.float64)
    if walk == "srw":
        return sp.diags(1.0 / deg) @ A
    if walk == "edge_walk":
        return A / g.m + sp.diags(1.0 - deg / g.m)
    if walk == "card_walk":
        return A / (2 * g.m) + sp.diags(1.0 - deg / (2 * g.m))
    raise BadParams(f"unknown walk {walk!r}; expected one of {WALKS}")


def hitting_times(g: Graph, target: int, walk: str = "srw") -> np.ndarray:
    """Expected hitting time of ``target`` from every vertex."""
    if not g.is_connected():
        raise Disconnected("hitting times need a connected graph")
    P = _walk_matrix(g, walk).tocsr()
    others = np.flatnonzero(np.arange(g.n) != target)
    h = np.zeros(g.n)
    if others.size:
        M = (sp.identity(len(others)) - P[others][:, others]).tocsc()
        h[others] = spla.spsolve(M, np.ones(len(others))) if len(others) > 1 else 1.0 / M.toarray()[0, 0]
    return h


def commute_time(g: Graph, u: int, v: int, walk: str = "srw") -> float:
    return float(hitting_times(g, v, walk)[u] + hitting_times(g, u, walk)[v])


def tree_hitting_srw(tree: Graph, l: int, h: int) -> float:
    """E_l tau_h for simple random walk on a tree:
    d(l,h)^2 + 2 * sum over path vertices x of |E(G_x)| d(x,h),
    where G_x is the branch hanging at x once its path neighbours are cut."""
    if not tree.is_tree():
        raise NotATree("graph is not a tree")
    dist_h = bfs_distances(tree, h).dist
    path = [l]
    while path[-1] != h:
        x = path[-1]
        path.append(next(int(y) for y in tree.adjacency[x] if dist_h[y] == dist_h[x] - 1))
    on_path = np.zeros(tree.n, dtype=bool)
    on_path[path] = True
    total = 0.0
    adj = tree.adjacency
    for x in path:
        # size of the branch at x: vertices reachable from x avoiding the path
        count, stack, seen = 0, [x], {x}
        while stack:
            y = stack.pop()
            for z in adj[y]:
                z = int(z)
                if z not in seen and not on_path[z]:
                    seen.add(z)
                    stack.append(z)
                    count += 1
        total += 2.0 * count * dist_h[x]  # a tree branch with count+1 vertices has count edges
    r = len(path) - 1
    return r * r + total
