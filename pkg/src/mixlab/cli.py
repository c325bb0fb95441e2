"""Command line entry point: ``mixlab <command> ...``."""

from __future__ import annotations

import argparse
import sys

from . import experiments as ex
from . import generators as gen
from .bounds import congestion_a_star, l2_upper_time, prop_a_bound, wilson_distinguisher_mc, wilson_plan
from .electrical import BoundaryCondition, harmonic_potential
from .errors import BadParams, MixlabError
from .graph import format_edge_list, giant_component, read_edge_list
from .interchange import exact_mixing_times, simulate_decks
from .rng import make_rng
from .spectral import fiedler, interchange_gap_exact, l1_report, single_card_gap


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def build_graph(a):
    """Graph named by ``--family`` using the family's own flags."""
    f, rng = a.family, make_rng(a.seed)

    def need(*names):
        missing = [x for x in names if getattr(a, x) is None]
        if missing:
            raise BadParams(f"{f} needs --{' --'.join(missing)}")
        return [getattr(a, x) for x in names]

    if f in ("path", "cycle", "complete"):
        return gen.classic_graph(f, n=need("n")[0])
    if f == "hypercube":
        return gen.hypercube(*need("d"))
    if f == "lollipop":
        return gen.lollipop(*need("clique", "handle"))
    if f == "regular_tree":
        return gen.regular_tree(*need("r", "d"))
    if f == "uniform_labelled_tree":
        return gen.uniform_labelled_tree(need("n")[0], rng)
    if f == "kesten_iic":
        return gen.kesten_iic(need("d")[0], rng)
    if f == "gw_tree":
        return gen.gw_tree(gen.OffspringDistribution.poisson(need("lam")[0]), a.d, a.size_cap, rng,
                           truncate=True)
    if f == "gw_survive":
        lam, d = need("lam", "d")
        return gen.gw_conditioned_to_survive(gen.OffspringDistribution.poisson(lam), d, a.mode, rng)
    if f in ("erdos_renyi", "er_giant"):
        N = need("N")[0]
        if a.p is None and a.c is None:
            raise BadParams(f"{f} needs --p or --c")
        g = gen.erdos_renyi(N, a.p if a.p is not None else a.c / N, rng)
        return giant_component(g)[0] if f == "er_giant" else g
    if f == "dlp_giant":
        N, eps = need("N", "eps")
        return gen.dlp_giant(gen.DlpParams(N, eps, a.gamma_variance), rng)
    if f == "random_regular":
        return gen.random_regular(*need("n", "r"), rng)
    raise BadParams(f"unknown family {f!r}; choose from {GENERATE_FAMILIES}")


GENERATE_FAMILIES = ("path", "cycle", "complete", "hypercube", "lollipop", "regular_tree",
                     "uniform_labelled_tree", "kesten_iic", "gw_tree", "gw_survive", "erdos_renyi",
                     "er_giant", "dlp_giant", "random_regular")


def cmd_generate(a) -> str:
    return format_edge_list(build_graph(a))


def cmd_exact(a) -> str:
    mt = exact_mixing_times(read_edge_list(a.graph))
    lines = [f"# tau_mix={mt.tau_mix} tau_hat={mt.tau_hat}", "t,tv,l2"]
    lines += [f"{t},{tv!r},{l2!r}" for t, tv, l2 in mt.rows()]
    return "\n".join(lines) + "\n"


def cmd_simulate(a) -> str:
    g = read_edge_list(a.graph)
    batch = simulate_decks(g, a.t, a.reps, make_rng(a.seed))
    lines = ["rep,card_at"]
    lines += [f"{i},{' '.join(map(str, row))}" for i, row in enumerate(batch.card_at.tolist())]
    return "\n".join(lines) + "\n"


def cmd_spectral(a) -> str:
    g = read_edge_list(a.graph)
    res = fiedler(g)
    gamma = single_card_gap(g, res.eigenvalue)
    l1, expo = l1_report(res.vector)
    head = ["kappa", "gamma", "gamma_inverse", "l1", "l1_exponent", "residual"]
    vals = [res.eigenvalue, gamma, 1 / gamma, l1, expo, res.residual]
    if a.exact_interchange:
        head.append("interchange_gap")
        vals.append(interchange_gap_exact(g))
    lines = [",".join(head), ",".join(repr(float(v)) for v in vals), "vertex,fiedler"]
    lines += [f"{v},{x!r}" for v, x in enumerate(res.vector.values.tolist())]
    return "\n".join(lines) + "\n"


def cmd_potential(a) -> str:
    g = read_edge_list(a.graph)
    sol = harmonic_potential(g, BoundaryCondition(_int_list(a.plus), _int_list(a.minus)))
    lines = [f"# resistance={sol.resistance!r} current={sol.current!r}", "vertex,eta"]
    lines += [f"{v},{x!r}" for v, x in enumerate(sol.eta.values.tolist())]
    return "\n".join(lines) + "\n"


def cmd_bounds(a) -> str:
    g = read_edge_list(a.graph)
    rep = congestion_a_star(g)
    res = fiedler(g)
    gamma = single_card_gap(g, res.eigenvalue)
    plan = wilson_plan(g, res.vector, gamma, a.b)
    head = ["prop_a", "a_star", "l2_upper_time", "gamma", "wilson_t"]
    vals = [prop_a_bound(g), rep.a_star, l2_upper_time(rep.a_star, g.n, a.c_const), gamma, plan.t]
    if a.reps:
        lower, _ = wilson_distinguisher_mc(g, plan, a.reps, make_rng(a.seed))
        head.append("mc_tv_lower")
        vals.append(lower)
    return ",".join(head) + "\n" + ",".join(repr(v) for v in vals) + "\n"


def cmd_sweep(a) -> str:
    if a.preset:
        recipes = ex.theorem_a_recipes()
        if a.preset not in recipes:
            raise MixlabError(f"unknown preset {a.preset!r}; choose from {sorted(recipes)}")
        cfgs = recipes[a.preset]
    else:
        cfgs = [ex.read_config(a.config)]
    rows = []
    for cfg in cfgs:
        if a.seed is not None:
            cfg = ex.SweepConfig(cfg.family, cfg.sizes, cfg.quantity, cfg.seeds, cfg.params, a.seed, cfg.out)
        rows.extend(ex.run_sweep(cfg, jobs=a.jobs))
    text = ex.format_rows(rows)
    out = a.out or (cfgs[0].out if len(cfgs) == 1 else None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
        return ""
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mixlab", description="Interchange process toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", help="write a graph as an edge list")
    s.add_argument("--family", required=True, help=", ".join(GENERATE_FAMILIES))
    s.add_argument("--n", type=int, help="vertex count")
    s.add_argument("--N", type=int, help="ambient vertex count of random graph models")
    s.add_argument("--eps", type=float)
    s.add_argument("--r", type=int, help="degree or branching number")
    s.add_argument("--d", type=int, help="depth or dimension")
    s.add_argument("--p", type=float, help="edge probability")
    s.add_argument("--c", type=float, help="edge probability times N")
    s.add_argument("--clique", type=int)
    s.add_argument("--handle", type=int)
    s.add_argument("--lam", type=float, help="Poisson offspring mean")
    s.add_argument("--mode", choices=("rejection", "spine"), default="rejection")
    s.add_argument("--size-cap", type=int, default=10**7)
    s.add_argument("--gamma-variance", choices=gen.GAMMA_VARIANCE_CHOICES, default="1/(eps*N)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_generate)

    s = sub.add_parser("exact", help="exact mixing curves (n <= 8)")
    s.add_argument("--graph", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_exact)

    s = sub.add_parser("simulate", help="run independent decks from the identity")
    s.add_argument("--graph", required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("spectral", help="Fiedler value, gap and vector")
    s.add_argument("--graph", required=True)
    s.add_argument("--exact-interchange", action="store_true")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_spectral)

    s = sub.add_parser("potential", help="harmonic potential between two vertex sets")
    s.add_argument("--graph", required=True)
    s.add_argument("--plus", required=True, help="comma separated vertices at +1")
    s.add_argument("--minus", required=True, help="comma separated vertices at -1")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_potential)

    s = sub.add_parser("bounds", help="upper and lower mixing bounds")
    s.add_argument("--graph", required=True)
    s.add_argument("--c-const", type=float, default=1.0)
    s.add_argument("--b", type=float, default=0.25)
    s.add_argument("--reps", type=int, default=1000, help="Monte Carlo reps for the TV lower bound (0 skips)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_bounds)

    s = sub.add_parser("sweep", help="scaling sweep to CSV")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(ex.theorem_a_recipes()))
    src.add_argument("--config")
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        text = a.fn(a)
    except MixlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if a.command != "sweep" and getattr(a, "out", None):
        with open(a.out, "w") as fh:
            fh.write(text)
    elif text:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
