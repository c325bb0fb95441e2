"""Random and deterministic graph families.

Every sampler takes a ``numpy.random.Generator`` (or a seed) and returns a
:class:`~mixlab.graph.Graph` whose labels are dense.  Rooted trees have
their root at vertex 0.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadParams,
    DegenerateKernel,
    OddDegreeSum,
    OutOfRange,
    RejectionBudgetExceeded,
    SizeCapExceeded,
)
from .graph import Graph, MultiGraph, giant_component
from .rng import as_rng


# ---------------------------------------------------------------- offspring laws

@dataclass(frozen=True)
class OffspringDistribution:
    """Offspring law of a Galton-Watson process.

    ``geometric`` counts failures before the first success, so it is
    supported on ``{0, 1, ...}`` with mean ``(1 - p) / p``.
    """

    kind: str
    lam: float = 0.0
    p: float = 0.0
    k: int = 0
    probs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "poisson":
            if not self.lam > 0:
                raise BadParams("Poisson mean must be positive")
        elif self.kind == "geometric":
            if not 0 < self.p <= 1:
                raise BadParams("geometric success probability must lie in (0, 1]")
        elif self.kind == "binomial":
            if self.k < 0 or not 0 < self.p <= 1:
                raise BadParams("binomial needs k >= 0 and 0 < p <= 1")
        elif self.kind == "explicit":
            pr = np.asarray(self.probs, dtype=float)
            if pr.size == 0 or (pr < 0).any() or abs(pr.sum() - 1.0) > 1e-12:
                raise BadParams("explicit offspring probabilities must be non-negative and sum to 1")
        else:
            raise BadParams(f"unknown offspring kind {self.kind!r}")

    @classmethod
    def poisson(cls, lam: float) -> "OffspringDistribution":
        return cls("poisson", lam=float(lam))

    @classmethod
    def geometric(cls, p: float) -> "OffspringDistribution":
        return cls("geometric", p=float(p))

    @classmethod
    def binomial(cls, k: int, p: float) -> "OffspringDistribution":
        return cls("binomial", k=int(k), p=float(p))

    @classmethod
    def explicit(cls, probs) -> "OffspringDistribution":
        return cls("explicit", probs=tuple(float(x) for x in probs))

    @property
    def mean(self) -> float:
        if self.kind == "poisson":
            return self.lam
        if self.kind == "geometric":
            return (1 - self.p) / self.p
        if self.kind == "binomial":
            return self.k * self.p
        pr = np.asarray(self.probs)
        return float(np.arange(len(pr)) @ pr)

    @property
    def variance(self) -> float:
        if self.kind == "poisson":
            return self.lam
        if self.kind == "geometric":
            return (1 - self.p) / self.p**2
        if self.kind == "binomial":
            return self.k * self.p * (1 - self.p)
        pr = np.asarray(self.probs)
        ks = np.arange(len(pr))
        return float(ks**2 @ pr - (ks @ pr) ** 2)

    def pgf(self, s: float) -> float:
        if self.kind == "poisson":
            return math.exp(self.lam * (s - 1))
        if self.kind == "geometric":
            return self.p / (1 - (1 - self.p) * s)
        if self.kind == "binomial":
            return (1 - self.p + self.p * s) ** self.k
        return float(np.polyval(np.asarray(self.probs)[::-1], s))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "poisson":
            return rng.poisson(self.lam, size)
        if self.kind == "geometric":
            return rng.geometric(self.p, size) - 1
        if self.kind == "binomial":
            return rng.binomial(self.k, self.p, size)
        return rng.choice(len(self.probs), size=size, p=np.asarray(self.probs))


# ---------------------------------------------------------------- deterministic families

def path_graph(n: int) -> Graph:
    if n < 1:
        raise BadParams("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)], _checked=True)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise BadParams("cycle needs n >= 3")
    return Graph(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)], _checked=True)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise BadParams("complete graph needs n >= 1")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], _checked=True)


def hypercube(d: int) -> Graph:
    if d < 1:
        raise BadParams("hypercube needs d >= 1")
    n = 1 << d
    edges = [(v, v | 1 << i) for v in range(n) for i in range(d) if not v >> i & 1]
    return Graph(n, edges, _checked=True)


def lollipop(clique: int, handle: int) -> Graph:
    """Clique on ``0..clique-1`` with a path of ``handle`` extra vertices hung
    off vertex ``clique-1``."""
    if clique < 3 or handle < 1:
        raise BadParams("lollipop needs clique >= 3 and handle >= 1")
    edges = [(i, j) for i in range(clique) for j in range(i + 1, clique)]
    edges += [(v - 1, v) for v in range(clique, clique + handle)]
    return Graph(clique + handle, edges, _checked=True)


_CLASSIC = {
    "path": (path_graph, ("n",)),
    "cycle": (cycle_graph, ("n",)),
    "complete": (complete_graph, ("n",)),
    "hypercube": (hypercube, ("d",)),
    "lollipop": (lollipop, ("clique", "handle")),
}


def classic_graph(family: str, **params) -> Graph:
    try:
        fn, names = _CLASSIC[family]
    except KeyError:
        raise BadParams(f"unknown classic family {family!r}") from None
    missing = [k for k in names if k not in params]
    if missing:
        raise BadParams(f"{family} needs parameters {missing}")
    return fn(*(int(params[k]) for k in names))


def regular_tree(r: int, d: int) -> Graph:
    """Ball of radius ``d`` around a vertex of the infinite r-regular tree."""
    if r < 3 or d < 1:
        raise BadParams("regular tree needs r >= 3 and d >= 1")
    edges = []
    level = [0]
    nxt = 1
    for depth in range(d):
        kids = r if depth == 0 else r - 1
        new = []
        for v in level:
            for _ in range(kids):
                edges.append((v, nxt))
                new.append(nxt)
                nxt += 1
        level = new
    return Graph(nxt, edges, _checked=True)


# ---------------------------------------------------------------- Galton-Watson trees

def _grow_forest(roots_count: int, first_counts, off: OffspringDistribution, rng,
                 depth_cap: int | None, size_cap: int | None, truncate: bool):
    """Grow trees generation by generation from ``roots_count`` roots labelled
    ``0..roots_count-1``.  ``first_counts`` optionally fixes the offspring of
    the roots.  Returns (parent array for labels >= roots_count, depth array,
    hit_cap flag)."""
    parents = []
    depths = [np.zeros(roots_count, dtype=np.int64)]
    gen = np.arange(roots_count, dtype=np.int64)
    nxt = roots_count
    depth = 0
    hit_cap = False
    while gen.size and (depth_cap is None or depth < depth_cap):
        counts = first_counts if (depth == 0 and first_counts is not None) else off.sample(rng, gen.size)
        counts = np.asarray(counts, dtype=np.int64)
        total = int(counts.sum())
        if size_cap is not None and nxt + total > size_cap:
            if not truncate:
                raise SizeCapExceeded(f"tree exceeded size cap {size_cap}")
            hit_cap = True
            room = size_cap - nxt
            cum = np.cumsum(counts)
            counts = np.minimum(counts, np.maximum(room - (cum - counts), 0))
            total = int(counts.sum())
        par = np.repeat(gen, counts)
        parents.append(par)
        depth += 1
        depths.append(np.full(total, depth, dtype=np.int64))
        gen = np.arange(nxt, nxt + total, dtype=np.int64)
        nxt += total
        if hit_cap:
            break
    parent = np.concatenate(parents) if parents else np.zeros(0, np.int64)
    return parent, np.concatenate(depths), hit_cap


def _tree_from_parents(n: int, parent: np.ndarray, offset: int = 1) -> Graph:
    child = np.arange(offset, offset + len(parent), dtype=np.int64)
    return Graph(n, np.column_stack([parent, child]), _checked=True)


def gw_tree(off: OffspringDistribution, depth_cap: int | None, size_cap: int | None, rng,
            truncate: bool = False) -> Graph:
    """Galton-Watson tree grown breadth-first from root 0.

    Generations deeper than ``depth_cap`` are not grown.  If the tree would
    exceed ``size_cap`` vertices, raises :class:`SizeCapExceeded`, or with
    ``truncate=True`` stops growing and returns what fits.
    """
    if depth_cap is None and size_cap is None:
        raise BadParams("gw_tree needs a depth cap or a size cap")
    if (depth_cap is not None and depth_cap < 1) or (size_cap is not None and size_cap < 1):
        raise BadParams("caps must be positive")
    rng = as_rng(rng)
    parent, _, _ = _grow_forest(1, None, off, rng, depth_cap, size_cap, truncate)
    return _tree_from_parents(len(parent) + 1, parent)


def _survival_probability(off: OffspringDistribution, k: int) -> float:
    s = 0.0
    for _ in range(k):
        s = off.pgf(s)
    return 1.0 - s


def gw_conditioned_to_survive(off: OffspringDistribution, k: int, mode: str = "rejection", rng=None,
                              budget: int = 1_000_000, size_cap: int = 10**7,
                              return_attempts: bool = False):
    """First ``k`` generations of a GW tree conditioned on generation ``k``
    being non-empty.

    ``rejection`` resamples until survival and has the exact conditional law.
    ``spine`` plants a backbone ``v_0 .. v_k`` (vertices ``0..k``); each
    backbone vertex gets a uniform mark ``X`` and keeps each of its own
    offspring independently with probability ``1 - X`` (for Poisson(lam)
    offspring this is Poisson(lam (1 - X))); all other vertices reproduce
    from ``off``.  The spine law is an approximation.
    """
    if k < 1:
        raise BadParams("k must be >= 1")
    rng = as_rng(rng)
    if mode == "rejection":
        for attempt in range(1, budget + 1):
            parent, depths, _ = _grow_forest(1, None, off, rng, k, size_cap, False)
            if depths[-1] == k:
                g = _tree_from_parents(len(parent) + 1, parent)
                return (g, attempt) if return_attempts else g
        raise RejectionBudgetExceeded(f"no surviving tree in {budget} attempts")
    if mode != "spine":
        raise BadParams(f"unknown mode {mode!r}")
    marks = rng.uniform(size=k)
    side = np.array([rng.binomial(c, 1 - x) for c, x in zip(off.sample(rng, k), marks)], dtype=np.int64)
    edges = [(i, i + 1) for i in range(k)]
    nxt = k + 1
    for i in range(k):
        # side subtree of v_i: children at depth i+1, grown down to depth k
        if side[i] == 0 or i + 1 > k:
            continue
        parent, _, _ = _grow_forest(1, side[i:i + 1], off, rng, k - i, size_cap, False)
        labels = np.concatenate([[i], np.arange(nxt, nxt + len(parent))])
        edges.extend(zip(labels[parent].tolist(), labels[1:].tolist()))
        nxt += len(parent)
    g = Graph(nxt, edges, _checked=True)
    return (g, 1) if return_attempts else g


def kesten_iic(d: int, rng) -> Graph:
    """First ``d`` generations of Kesten's incipient infinite tree for
    Poisson(1) offspring: spine vertices get 1 + Poisson(1) children, one of
    them (uniform) continues the spine, the others root ordinary critical
    trees cut at depth ``d``."""
    if d < 1:
        raise BadParams("depth must be >= 1")
    rng = as_rng(rng)
    off = OffspringDistribution.poisson(1.0)
    edges: list[tuple[int, int]] = []
    spine = 0
    nxt = 1
    for depth in range(d):
        c = 1 + int(rng.poisson(1.0))
        kids = list(range(nxt, nxt + c))
        nxt += c
        edges.extend((spine, x) for x in kids)
        heir = kids[int(rng.integers(c))]
        others = [x for x in kids if x != heir]
        if others and depth + 1 < d:
            parent, _, _ = _grow_forest(len(others), None, off, rng, d - depth - 1, None, False)
            labels = np.concatenate([others, np.arange(nxt, nxt + len(parent))])
            edges.extend(zip(labels[parent].tolist(), labels[len(others):].tolist()))
            nxt += len(parent)
        spine = heir
    return Graph(nxt, edges, _checked=True)


# ---------------------------------------------------------------- uniform trees

def prufer_decode(code, n: int | None = None) -> Graph:
    code = [int(x) for x in code]
    n = len(code) + 2 if n is None else int(n)
    if len(code) != n - 2:
        raise BadParams("Prufer code must have length n - 2")
    if any(not 0 <= x < n for x in code):
        raise OutOfRange("Prufer code entry out of range")
    degree = [1] * n
    for x in code:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in code:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Graph(n, edges)


def uniform_labelled_tree(n: int, rng) -> Graph:
    if n < 2:
        raise BadParams("need n >= 2")
    rng = as_rng(rng)
    return prufer_decode(rng.integers(0, n, size=n - 2), n)


# ---------------------------------------------------------------- Erdos-Renyi

def _pair_from_index(idx: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of pairs u < v of ``0..n-1``."""
    idx = idx.astype(np.int64)
    b = 2 * n - 1
    u = np.floor((b - np.sqrt(np.maximum(b * b - 8.0 * idx, 0.0))) / 2).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    offset = lambda x: x * (2 * n - x - 1) // 2  # noqa: E731
    for _ in range(3):
        u = np.where(offset(u) > idx, u - 1, u)
        u = np.where(offset(u + 1) <= idx, u + 1, u)
    v = idx - offset(u) + u + 1
    return u, v


def erdos_renyi(N: int, p: float, rng) -> Graph:
    """G(N, p): a Binomial(C(N,2), p) edge count, then a uniform edge subset."""
    if not 0 <= p <= 1:
        raise BadParams("p must lie in [0, 1]")
    rng = as_rng(rng)
    pairs = N * (N - 1) // 2
    k = int(rng.binomial(pairs, p)) if pairs else 0
    if k == 0:
        return Graph(N, [])
    idx = np.sort(rng.choice(pairs, size=k, replace=False))
    u, v = _pair_from_index(idx, N)
    return Graph(N, np.column_stack([u, v]), _checked=True)


# ---------------------------------------------------------------- supercritical giant model

def conjugate_mu(eps: float, tol: float = 1e-12) -> float:
    """The root mu in (0, 1) of mu e^-mu = (1+eps) e^-(1+eps), by bisection."""
    if not eps > 0:
        raise BadParams("eps must be positive")
    target = (1 + eps) * math.exp(-(1 + eps))
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        f = mid * math.exp(-mid) - target
        if abs(f) <= tol or hi - lo <= 1e-17:
            break
        if f < 0:
            lo = mid
        else:
            hi = mid
    return mid


def configuration_multigraph(degrees, rng) -> MultiGraph:
    """Uniform perfect matching of half-edges; loops and multi-edges kept."""
    deg = np.asarray(degrees, dtype=np.int64)
    if (deg < 0).any():
        raise BadParams("degrees must be non-negative")
    if deg.sum() % 2:
        raise OddDegreeSum("degree sum is odd")
    rng = as_rng(rng)
    stubs = rng.permutation(np.repeat(np.arange(len(deg)), deg))
    return MultiGraph(len(deg), stubs.reshape(-1, 2))


GAMMA_VARIANCE_CHOICES = ("1/(eps*N)", "1/(eps*n)")


@dataclass(frozen=True)
class DlpParams:
    """Parameters of the kernel / subdivision / Poisson-tree giant model.

    ``gamma_variance`` selects the variance of the normal intensity:
    ``1/(eps*N)`` (default) or ``1/(eps*n)`` with ``n = eps*N``.
    """

    N: int
    eps: float
    gamma_variance: str = "1/(eps*N)"
    mu: float = field(default=float("nan"))

    def __post_init__(self):
        if self.N < 1 or not self.eps > 0:
            raise BadParams("need N >= 1 and eps > 0")
        if self.gamma_variance not in GAMMA_VARIANCE_CHOICES:
            raise BadParams(f"gamma_variance must be one of {GAMMA_VARIANCE_CHOICES}")
        if math.isnan(self.mu):
            object.__setattr__(self, "mu", conjugate_mu(self.eps))
        target = (1 + self.eps) * math.exp(-(1 + self.eps))
        if not (0 < self.mu < 1) or abs(self.mu * math.exp(-self.mu) - target) > 1e-12:
            raise BadParams("mu is not the conjugate of 1 + eps")

    @property
    def gamma_mean(self) -> float:
        return 1 + self.eps - self.mu

    @property
    def gamma_var(self) -> float:
        if self.gamma_variance == "1/(eps*N)":
            return 1.0 / (self.eps * self.N)
        return 1.0 / (self.eps * self.eps * self.N)


@dataclass
class DlpSample:
    graph: Graph
    kernel: MultiGraph
    gamma: float
    kernel_vertices: int   # M
    core_vertices: int     # |V(K)|
    total_vertices: int    # before any component extraction
    resamples: int


def _geometric_lengths(rng, q: float, size: int) -> np.ndarray:
    # support {1, 2, ...}: P(l) = (1 - mu) mu^(l-1) with q = 1 - mu
    return rng.geometric(q, size)


def dlp_sample(params: DlpParams, rng, largest_component: bool = True,
               max_parity_resamples: int = 10_000) -> DlpSample:
    rng = as_rng(rng)
    mu, N = params.mu, params.N
    sd = math.sqrt(params.gamma_var)
    tries = 0
    while True:
        tries += 1
        if tries > max_parity_resamples:
            raise RejectionBudgetExceeded("parity conditioning failed")
        gamma = rng.normal(params.gamma_mean, sd)
        while gamma <= 0:
            gamma = rng.normal(params.gamma_mean, sd)
        D = rng.poisson(gamma, N)
        big = D[D >= 3]
        if big.sum() % 2 == 0:
            break
    M = len(big)
    if M < 2:
        raise DegenerateKernel(f"kernel has {M} vertices; eps too small for N={N}")
    H = configuration_multigraph(big, rng)

    q = 1.0 - mu
    lengths = _geometric_lengths(rng, q, H.m)
    edges: list[tuple[int, int]] = []
    direct = set()
    nxt = M
    for (a, b), ell in zip(H.edges.tolist(), lengths.tolist()):
        if a == b:
            while ell < 3:
                ell = int(_geometric_lengths(rng, q, 1)[0])
        elif ell == 1 and (a, b) in direct:
            while ell < 2:
                ell = int(_geometric_lengths(rng, q, 1)[0])
        if ell == 1:
            direct.add((a, b))
            edges.append((a, b))
            continue
        chain = [a, *range(nxt, nxt + ell - 1), b]
        nxt += ell - 1
        edges.extend(zip(chain[:-1], chain[1:]))
    core = nxt

    parent, _, _ = _grow_forest(core, None, OffspringDistribution.poisson(mu), rng, None, None, False)
    edges.extend(zip(parent.tolist(), range(core, core + len(parent))))
    total = core + len(parent)
    g = Graph(total, edges)
    if largest_component:
        g, _ = giant_component(g)
    return DlpSample(g, H, float(gamma), M, core, total, tries - 1)


def dlp_giant(params: DlpParams, rng, largest_component: bool = True) -> Graph:
    return dlp_sample(params, rng, largest_component).graph


# ---------------------------------------------------------------- random regular graphs

def random_regular(n: int, r: int, rng, budget: int = 100_000) -> Graph:
    """Uniform simple connected r-regular graph via configuration rejection."""
    if (n * r) % 2:
        raise OddDegreeSum(f"n*r = {n * r} is odd")
    if r < 3 or r >= n:
        raise BadParams("need 3 <= r < n")
    rng = as_rng(rng)
    deg = np.full(n, r)
    for _ in range(budget):
        H = configuration_multigraph(deg, rng)
        if H.is_simple():
            g = H.to_graph()
            if g.is_connected():
                return g
    raise RejectionBudgetExceeded(f"no simple connected {r}-regular graph in {budget} tries")
