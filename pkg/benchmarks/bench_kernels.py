"""Time the numba and pure-numpy kernel backends on the package's hot paths.

Each backend runs in its own interpreter because the choice is made at import
time from ``MIXLAB_NO_NUMBA``. The numba timings exclude JIT compilation (one
warm-up call per workload).

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from mixlab import generators as gen, kernels
from mixlab.bounds import congestion_a_star
from mixlab.interchange import exact_mixing_times, simulate_decks

repeat = int(sys.argv[1])
rng = np.random.default_rng(0)
cases = {
    "exact_evolution P8 (40320 states)": lambda: exact_mixing_times(gen.path_graph(8)),
    "simulate 2000 decks, 3-regular n=256, t=20000":
        lambda g=gen.random_regular(256, 3, rng): simulate_decks(g, 20000, 2000, np.random.default_rng(1)),
    "congestion A*, uniform tree n=400":
        lambda g=gen.uniform_labelled_tree(400, rng): congestion_a_star(g),
}
out = {"backend": kernels.BACKEND}
for name, fn in cases.items():
    fn()
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); ts.append(time.perf_counter() - t0)
    out[name] = min(ts)
print(json.dumps(out))
"""


def run(no_numba: bool, repeat: int) -> dict:
    env = dict(os.environ, MIXLAB_NO_NUMBA="1" if no_numba else "0")
    res = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(res.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    fast, slow = run(False, a.repeat), run(True, a.repeat)
    print(f"{'workload':50s} {fast['backend']:>10s} {slow['backend']:>10s} {'speedup':>8s}")
    for name in fast:
        if name != "backend":
            print(f"{name:50s} {fast[name]:9.3f}s {slow[name]:9.3f}s {slow[name] / fast[name]:7.1f}x")


if __name__ == "__main__":
    main()
