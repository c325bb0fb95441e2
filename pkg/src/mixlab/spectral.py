"""Laplacian spectra, Fiedler vectors and Dirichlet forms of the single-card chain."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, Disconnected, NoConvergence, TooLarge
from .graph import Graph
from .rng import as_rng

DENSE_LIMIT = 2000
RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class TestVector:
    """Real value per vertex.  ``zero_sum`` / ``normalized`` are promises that
    are checked on construction."""

    __test__ = False  # not a pytest class

    values: np.ndarray
    zero_sum: bool = False
    normalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if self.zero_sum and abs(v.sum()) > 1e-10:
            raise ValueError(f"vector is not zero-sum (sum = {v.sum():.3g})")
        if self.normalized and abs(np.linalg.norm(v) - 1) > 1e-10:
            raise ValueError("vector is not unit norm")

    @cached_property
    def l1(self) -> float:
        return float(np.abs(self.values).sum())

    @cached_property
    def l2(self) -> float:
        return float(np.linalg.norm(self.values))

    def __len__(self):
        return len(self.values)

    @classmethod
    def centered_unit(cls, values) -> "TestVector":
        v = np.asarray(values, dtype=np.float64)
        v = v - v.mean()
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("constant vector has no centered normalization")
        v = v / nrm
        v = v - v.mean()  # keep the sum at rounding level after scaling
        return cls(v / np.linalg.norm(v), zero_sum=True, normalized=True)


@dataclass(frozen=True)
class SpectralResult:
    eigenvalue: float
    vector: TestVector
    residual: float
    method: str


def _values(xi) -> np.ndarray:
    return xi.values if isinstance(xi, TestVector) else np.asarray(xi, dtype=np.float64)


def laplacian_quadratic(g: Graph, xi) -> float:
    """(1/2m) * sum over edges of (xi(u) - xi(v))^2, i.e. xi^T (I - A) xi."""
    v = _values(xi)
    if len(v) != g.n:
        raise DimensionMismatch(f"vector has length {len(v)}, graph has {g.n} vertices")
    diff = v[g.edges[:, 0]] - v[g.edges[:, 1]]
    return float(diff @ diff) / (2 * g.m)


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # max >= -min; on a tie the first entry of noticeable size is positive
    hi, lo = vec.max(), -vec.min()
    if hi < lo - 1e-12:
        return -vec
    if abs(hi - lo) <= 1e-12:
        big = np.flatnonzero(np.abs(vec) > 1e-9)
        if big.size and vec[big[0]] < 0:
            return -vec
    return vec


def fiedler(g: Graph, dense_limit: int = DENSE_LIMIT, maxiter: int = 10**6) -> SpectralResult:
    """Algebraic connectivity and a unit zero-sum eigenvector of the Laplacian."""
    if g.n < 2 or not g.is_connected():
        raise Disconnected("Fiedler vector needs a connected graph with n >= 2")
    if g.n <= dense_limit:
        L = g.laplacian(dense=True)
        vals, vecs = sla.eigh(L, subset_by_index=[0, 1])
        kappa, vec = float(vals[1]), vecs[:, 1]
        method = "dense"
    else:
        L = g.laplacian().astype(np.float64).tocsc()
        # shift-invert just below zero: the two eigenvalues nearest -sigma are 0 and kappa
        sigma = -1e-3 * min(1.0, 1.0 / g.n)
        try:
            # fixed start vector: ARPACK otherwise draws its own, breaking bitwise reruns
            v0 = np.cos(np.arange(g.n) + 0.5)
            vals, vecs = spla.eigsh(L, k=2, sigma=sigma, which="LM", tol=1e-12, maxiter=maxiter, v0=v0)
        except spla.ArpackNoConvergence as exc:
            raise NoConvergence(str(exc)) from None
        order = np.argsort(vals)
        kappa, vec = float(vals[order[1]]), vecs[:, order[1]]
        method = "shift-invert"
    vec = vec - vec.mean()
    vec = _fix_sign(vec / np.linalg.norm(vec))
    residual = float(np.linalg.norm(L @ vec - kappa * vec))
    if residual > RESIDUAL_TOL:
        # one Rayleigh-quotient refinement pass
        kappa = float(vec @ (L @ vec))
        residual = float(np.linalg.norm(L @ vec - kappa * vec))
        if residual > RESIDUAL_TOL:
            raise NoConvergence(f"Fiedler residual {residual:.3g} above {RESIDUAL_TOL}")
    return SpectralResult(kappa, TestVector(vec, zero_sum=True, normalized=True), residual, method)


def single_card_gap(g: Graph, kappa: float | None = None) -> float:
    """Spectral gap of the single-card chain, kappa / (2m)."""
    if kappa is None:
        kappa = fiedler(g).eigenvalue
    return kappa / (2 * g.m)


def relaxation_time(g: Graph) -> float:
    """gamma^-1 = 2m / kappa."""
    return 2 * g.m / fiedler(g).eigenvalue


def l1_report(xi: TestVector) -> tuple[float, float]:
    """L1 norm of a unit vector and the exponent a with ||xi||_1 = n^a."""
    n = len(xi)
    l1 = xi.l1
    return l1, (math.log(l1) / math.log(n) if n > 1 else float("nan"))


def random_zero_sum_unit(n: int, rng) -> np.ndarray:
    v = as_rng(rng).standard_normal(n)
    v -= v.mean()
    return v / np.linalg.norm(v)


def extremal_gap_check(g: Graph, trials: int = 100, rng=0, atol: float = 1e-8) -> bool:
    """Check gamma <= Dirichlet form for random admissible vectors, with
    equality at the Fiedler vector."""
    res = fiedler(g)
    gamma = single_card_gap(g, res.eigenvalue)
    if abs(laplacian_quadratic(g, res.vector) - gamma) > atol:
        return False
    rng = as_rng(rng)
    for _ in range(trials):
        if laplacian_quadratic(g, random_zero_sum_unit(g.n, rng)) < gamma - 1e-10:
            return False
    return True


EXACT_GAP_MAX_N = 6


def interchange_gap_exact(g: Graph) -> float:
    """1 - second largest eigenvalue of the full n! x n! interchange operator."""
    if g.n > EXACT_GAP_MAX_N:
        raise TooLarge(f"exact interchange spectrum limited to n <= {EXACT_GAP_MAX_N}")
    from .interchange import ExactEvolver

    P = ExactEvolver(g).transition_matrix()
    vals = np.linalg.eigvalsh(P)
    return float(1.0 - vals[-2])
