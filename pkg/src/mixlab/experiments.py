"""Scaling sweeps over graph families.

A sweep builds one graph per (size, seed), measures one quantity on it and
emits CSV rows with the fixed schema ``family,n,m,seed,quantity,value,error,
wall_ms``.  Each row draws from its own random stream derived from the master
seed and the (size index, seed index) pair, so output does not depend on the
number of worker processes.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import generators as gen
from .bounds import congestion_a_star, prop_a_bound, wilson_distinguisher_mc, wilson_plan
from .electrical import (
    BoundaryCondition,
    centered_test_vector,
    gap_upper_bound,
    harmonic_potential,
    level_set,
    thirds_boundary,
    two_progeny_boundary,
)
from .errors import BadParams, ConfigError, RejectionBudgetExceeded, TooFewPoints
from .graph import Graph, bfs_distances, giant_component, stick_lengths
from .interchange import MAX_EXACT_N, exact_mixing_times, simulate_decks
from .rng import make_rng
from .spectral import fiedler, single_card_gap

CSV_COLUMNS = ("family", "n", "m", "seed", "quantity", "value", "error", "wall_ms")

QUANTITIES = (
    "gamma_inverse",
    "gap_upper_bound",
    "a_star",
    "prop_a",
    "wilson_time",
    "mc_tv_curve",
    "exact_tau",
    "stick_count",
    "unmoved_fraction",
)


# ---------------------------------------------------------------- families

def _er_giant(size, p, rng):
    """Giant of G(N, c/N); with ``giant_min``/``giant_max`` the graph is
    redrawn until the giant order falls in the window."""
    c = float(p.get("c", 1.0))
    lo, hi = int(p.get("giant_min", 1)), int(p.get("giant_max", 10**12))
    for _ in range(int(p.get("budget", 200))):
        g, _ = giant_component(gen.erdos_renyi(int(size), c / size, rng))
        if lo <= g.n <= hi:
            return g
    raise RejectionBudgetExceeded(f"giant order never landed in [{lo}, {hi}]")


def _dlp(size, p, rng):
    # size is eps; N follows from the fixed budget eps*N
    eps = float(size)
    N = int(round(float(p.get("eps_n", 1000)) / eps))
    params = gen.DlpParams(N, eps, p.get("gamma_variance", "1/(eps*N)"))
    return gen.dlp_giant(params, rng)


FAMILIES = {
    "path": lambda s, p, rng: gen.path_graph(int(s)),
    "cycle": lambda s, p, rng: gen.cycle_graph(int(s)),
    "complete": lambda s, p, rng: gen.complete_graph(int(s)),
    "hypercube": lambda s, p, rng: gen.hypercube(int(s)),
    "lollipop": lambda s, p, rng: gen.lollipop(int(s), int(p.get("handle", s))),
    "regular_tree": lambda s, p, rng: gen.regular_tree(int(p.get("r", 3)), int(s)),
    "uniform_labelled_tree": lambda s, p, rng: gen.uniform_labelled_tree(int(s), rng),
    "kesten_iic": lambda s, p, rng: gen.kesten_iic(int(s), rng),
    "gw_survive": lambda s, p, rng: gen.gw_conditioned_to_survive(
        gen.OffspringDistribution.poisson(float(p.get("lam", 1.0))), int(s), p.get("mode", "rejection"), rng),
    "er_giant": _er_giant,
    "dlp_giant": _dlp,
    "random_regular": lambda s, p, rng: gen.random_regular(int(s), int(p.get("r", 3)), rng),
}


def kesten_depth_for(n: int) -> int:
    """Depth whose mean Kesten-tree order (about d^2/2 + 3d/2 + 1) is nearest n."""
    return max(1, round((math.sqrt(8 * n - 7) - 3) / 2))


# ---------------------------------------------------------------- quantities

def _diameter_ends(g: Graph) -> tuple[int, int]:
    d0 = bfs_distances(g, 0).dist
    a = int(np.argmax(d0))
    da = bfs_distances(g, a).dist
    return a, int(np.argmax(da))


def potential_boundary(g: Graph, family: str) -> BoundaryCondition:
    """Boundary used for the electrical gap bound of a family member."""
    if family == "regular_tree":
        return thirds_boundary(g, 0)
    if g.is_tree() and family in ("kesten_iic", "gw_survive"):
        depth = int(bfs_distances(g, 0).dist.max())
        return two_progeny_boundary(g, 0, level_set(g, 0, depth))
    a, b = _diameter_ends(g)
    return BoundaryCondition([a], [b])


def _measure(g: Graph, family: str, quantity: str, p: dict, rng) -> list[tuple[str, float]]:
    if quantity == "gamma_inverse":
        return [(quantity, 1.0 / single_card_gap(g))]
    if quantity == "gap_upper_bound":
        sol = harmonic_potential(g, potential_boundary(g, family))
        return [(quantity, gap_upper_bound(g, centered_test_vector(sol)))]
    if quantity == "a_star":
        return [(quantity, congestion_a_star(g).a_star)]
    if quantity == "prop_a":
        return [(quantity, prop_a_bound(g))]
    if quantity in ("wilson_time", "mc_tv_curve"):
        res = fiedler(g)
        plan = wilson_plan(g, res.vector, single_card_gap(g, res.eigenvalue), float(p.get("b", 0.25)))
        if quantity == "wilson_time":
            return [(quantity, float(plan.t))]
        reps = int(p.get("reps", 1000))
        out = []
        for f in _floats(p.get("t_factors", "0.25,0.5,1,2")):
            t = max(1, int(f * plan.t))
            lower, _ = wilson_distinguisher_mc(g, plan, reps, rng, t=t)
            out.append((f"mc_tv_curve@{t}", lower))
        return out
    if quantity == "exact_tau":
        if g.n > MAX_EXACT_N:
            raise BadParams(f"exact mixing time limited to n <= {MAX_EXACT_N}")
        return [(quantity, float(exact_mixing_times(g).tau_mix))]
    if quantity == "stick_count":
        alpha = float(p.get("alpha", 0.5))
        cut = alpha * math.log(g.n)
        return [(quantity, float(sum(1 for x in stick_lengths(g) if x >= cut)))]
    if quantity == "unmoved_fraction":
        t = int(float(p.get("t_factor", 0.3)) * g.n * math.log(g.n))
        batch = simulate_decks(g, t, 1, rng, track_moved=True)
        return [(quantity, float((~batch.moved[0]).mean()))]
    raise ConfigError(f"unknown quantity {quantity!r}")


def _floats(x) -> list[float]:
    if isinstance(x, str):
        return [float(v) for v in x.split(",") if v.strip()]
    if isinstance(x, (int, float)):
        return [float(x)]
    return [float(v) for v in x]


# ---------------------------------------------------------------- config and runner

@dataclass(frozen=True)
class SweepConfig:
    family: str
    sizes: tuple
    quantity: str
    seeds: int = 1
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {sorted(FAMILIES)}")
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"unknown quantity {self.quantity!r}; choose from {QUANTITIES}")
        if not self.sizes or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError("sizes must be non-empty and strictly increasing")
        if int(self.seeds) < 1:
            raise ConfigError("seeds must be >= 1")

    def tasks(self):
        for i, size in enumerate(self.sizes):
            for j in range(self.seeds):
                yield i, size, j


def _run_one(cfg: SweepConfig, i: int, size, j: int) -> list[dict]:
    rng = make_rng(cfg.seed, (i, j))
    t0 = time.perf_counter()
    base = {"family": cfg.family, "size": size, "n": "", "m": "", "seed": j}
    try:
        g = FAMILIES[cfg.family](size, cfg.params, rng)
        base.update(n=g.n, m=g.m)
        vals = _measure(g, cfg.family, cfg.quantity, cfg.params, rng)
        ms = (time.perf_counter() - t0) * 1e3
        return [dict(base, quantity=q, value=v, error="", wall_ms=ms) for q, v in vals]
    except Exception as exc:  # recorded per row; the sweep goes on
        ms = (time.perf_counter() - t0) * 1e3
        return [dict(base, quantity=cfg.quantity, value=float("nan"), error=type(exc).__name__, wall_ms=ms)]


def _run_task(args):
    return _run_one(*args)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> list[dict]:
    """Rows ordered by (size, seed) whatever the number of workers."""
    tasks = [(cfg, i, s, j) for i, s, j in cfg.tasks()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def format_rows(rows, with_wall: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        vals = [_fmt(r[c]) for c in CSV_COLUMNS]
        if with_wall:
            vals[-1] = f"{r['wall_ms']:.3f}"
        else:
            vals[-1] = ""
        w.writerow(vals)
    return buf.getvalue()


def write_csv(rows, path) -> None:
    Path(path).write_text(format_rows(rows))


def read_config(path) -> SweepConfig:
    """Flat ``key=value`` lines; ``#`` starts a comment.  Keys other than
    family, sizes, quantity, seeds, seed and out become family parameters."""
    kv = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        kv[k] = v
    missing = [k for k in ("family", "sizes", "quantity") if k not in kv]
    if missing:
        raise ConfigError(f"config misses {missing}")
    sizes = tuple(_number(s) for s in kv.pop("sizes").split(","))
    return SweepConfig(
        family=kv.pop("family"),
        sizes=sizes,
        quantity=kv.pop("quantity"),
        seeds=int(kv.pop("seeds", 1)),
        seed=int(kv.pop("seed", 0)),
        out=kv.pop("out", None),
        params={k: _number(v) for k, v in kv.items()},
    )


def _number(s: str):
    s = s.strip()
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    return s


# ---------------------------------------------------------------- exponent fits

@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    points: int


def fit_loglog(xs, ys) -> FitResult:
    x = np.log(np.asarray(xs, dtype=np.float64))
    y = np.log(np.asarray(ys, dtype=np.float64))
    if len(x) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(x)}")
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss if ss > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2, len(x))


def fit_exponent(rows, x: str = "n", y: str = "value", by: str | None = None) -> FitResult:
    """Least-squares slope of log y against log x.

    Rows with an error or a non-positive value are skipped.  Rows sharing the
    same ``by`` key (default: the x value) are merged by geometric means of
    x and y first.
    """
    by = x if by is None else by
    groups: dict = {}
    for r in rows:
        if r.get("error"):
            continue
        xv, yv = float(r[x]), float(r[y])
        if not (xv > 0 and yv > 0 and math.isfinite(xv) and math.isfinite(yv)):
            continue
        groups.setdefault(r[by], []).append((math.log(xv), math.log(yv)))
    keys = sorted(groups)
    if len(keys) < 3:
        raise TooFewPoints(f"need at least 3 sizes, got {len(keys)}")
    gx = [math.exp(np.mean([a for a, _ in groups[k]])) for k in keys]
    gy = [math.exp(np.mean([b for _, b in groups[k]])) for k in keys]
    return fit_loglog(gx, gy)


# ---------------------------------------------------------------- reproduction presets

def theorem_a_recipes() -> dict[str, list[SweepConfig]]:
    """Desk-scale sweeps for the seven graph classes, keyed ``a`` .. ``g``."""
    tree_n = (64, 128, 256, 512, 1024, 2048)
    return {
        "a": [SweepConfig("regular_tree", range(5, 10), "gamma_inverse", params={"r": 3})],
        "b": [
            SweepConfig("uniform_labelled_tree", tree_n, "gamma_inverse", seeds=20),
            SweepConfig("kesten_iic", tuple(kesten_depth_for(n) for n in tree_n), "gamma_inverse", seeds=20),
        ],
        "c": [SweepConfig("er_giant", (4000, 8000, 16000, 32000, 64000), "gamma_inverse", seeds=30,
                          params={"c": 1.0, "giant_min": 200, "giant_max": 2000})],
        "d": [SweepConfig("dlp_giant", (0.05, 0.07, 0.1, 0.15), "gamma_inverse", seeds=40,
                          params={"eps_n": 100_000})],
        "e": [
            SweepConfig("er_giant", (500, 1000, 2000, 4000), "stick_count", seeds=10,
                        params={"c": 2.0, "alpha": 0.5}),
            SweepConfig("er_giant", (500, 1000, 2000, 4000), "gamma_inverse", seeds=10, params={"c": 2.0}),
        ],
        "f": [
            SweepConfig("random_regular", (64, 128, 256, 512), "a_star", seeds=3, params={"r": 3}),
            SweepConfig("random_regular", (64, 128, 256, 512), "unmoved_fraction", seeds=50,
                        params={"r": 3, "t_factor": 0.3}),
        ],
        "g": [SweepConfig("hypercube", range(3, 9), "gamma_inverse")],
    }
