"""Time the hot kernels under the numba and numpy backends.

Each backend runs in its own interpreter because the switch is read at
import time. Usage: python3 benchmarks/bench_kernels.py [--n 20000] [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from perclocal import _accel, kernels
from perclocal import generators as gen

n, repeat = int(sys.argv[1]), int(sys.argv[2])
g = gen.random_regular(n, 3, 0)
rng = np.random.default_rng(1)
order = rng.permutation(g.m)
mask = rng.random(g.m) < 0.5
x = rng.random(2 * g.m)
tail = np.empty(2 * g.m, dtype=np.int64); head = np.empty_like(tail)
tail[0::2], head[0::2], tail[1::2], head[1::2] = g.eu, g.ev, g.ev, g.eu

cases = {
    "sweep_trajectory": lambda: kernels.sweep_trajectory(g.n, g.eu, g.ev, order),
    "component_labels": lambda: kernels.component_labels(g.n, g.eu, g.ev, mask),
    "ball_sizes_R3": lambda: kernels.ball_sizes(g.indptr, g.nbr, g.n, 3),
    "reach_flags_R3": lambda: kernels.reach_flags(g.indptr, g.nbr, g.eid, g.n, g.eu, g.ev, mask, 3),
    "nb_apply": lambda: kernels.nb_apply(x, tail, head, g.n),
}
out = {"backend": _accel.backend(), "n": n, "seconds": {}}
for name, fn in cases.items():
    fn()  # compile / warm up
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter(); fn(); best = min(best, time.perf_counter() - t0)
    out["seconds"][name] = best
print(json.dumps(out))
"""


def run(flag: str, n: int, repeat: int) -> dict:
    env = {**os.environ, "PERCLOCAL_NUMBA": flag}
    proc = subprocess.run([sys.executable, "-c", WORKER, str(n), str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    t0 = time.perf_counter()
    jit, plain = run("1", args.n, args.repeat), run("0", args.n, args.repeat)
    print(f"random 3-regular graph, n={args.n}, best of {args.repeat}")
    print(f"{'kernel':<18} {'numba [s]':>11} {'numpy [s]':>11} {'speedup':>8}")
    for name, a in jit["seconds"].items():
        b = plain["seconds"][name]
        print(f"{name:<18} {a:>11.5f} {b:>11.5f} {b / a:>8.1f}")
    print(f"total wall time {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
