"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--d 18]

Each workload runs on identical inputs through both backends; outputs are
checked for equality before timings are reported.
"""
from __future__ import annotations

import argparse
import random
import sys
import timeit

import numpy as np

from graphflow import generators as gen
from graphflow.kernels import _pykernels as py

try:
    from graphflow.kernels import _ckernels as cy
except ImportError:
    sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")


def _graph_rows(d: int, seed: int) -> list[int]:
    return list(gen.random_l_graph(random.Random(seed), d, density=2.5 / d).succ)


def workloads(d: int):
    rows = _graph_rows(d, 0)
    masks = [random.Random(1).getrandbits(d) | 1 for _ in range(200)]

    def omega_batch(k):
        r = k.prepare(rows)
        return [k.omega(r, m) for m in masks]

    def attractor_scan(k):
        om = k.omega_singletons(k.prepare(rows))
        return list(k.attractor_scan(list(om), d))

    def phi_batch(k):
        r = k.prepare(rows)
        return [k.phi_n(r, 64, m) for m in masks]

    def matmul_chain(k):
        a = k.prepare(rows)
        out = a
        for _ in range(200):
            out = k.prepare(k.bool_matmul(out, a))
        return [int(x) for x in out]

    rng = np.random.default_rng(2)
    p = rng.random((6, 6))
    p /= p.sum(axis=1, keepdims=True)
    cum = np.cumsum(p, axis=1)
    cum[:, -1] = np.inf
    cum = np.ascontiguousarray(cum)
    p0 = np.ascontiguousarray(np.r_[1.0, np.full(5, np.inf)])
    u_long = np.ascontiguousarray(rng.random((1, 200_001)))
    u_wide = np.ascontiguousarray(rng.random((2048, 201)))

    def simulate_long(k):
        counts, first, _ = k.simulate(cum, p0, u_long, 0b100000)
        return counts.tolist(), first.tolist()

    def simulate_wide(k):
        counts, first, _ = k.simulate(cum, p0, u_wide, 0b100000)
        return counts.tolist(), first.tolist()

    return {
        f"omega x200 (d={d})": omega_batch,
        f"attractor scan (d={d})": attractor_scan,
        f"phi_n(64) x200 (d={d})": phi_batch,
        f"bool matmul x200 (d={d})": matmul_chain,
        "simulate 1 x 2e5 steps": simulate_long,
        "simulate 2048 x 200 steps": simulate_wide,
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--d", type=int, default=18, help="vertex count for the graph workloads")
    args = ap.parse_args(argv)
    if not 1 <= args.d <= 24:
        ap.error("--d must lie in 1..24 (the attractor scan visits 2^d subsets)")
    print(f"{'workload':<28} {'python (s)':>11} {'cython (s)':>11} {'speedup':>8}")
    for name, fn in workloads(args.d).items():
        if fn(py) != fn(cy):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:<28} {t_py:>11.4f} {t_cy:>11.4f} {t_py / t_cy:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
