#!/usr/bin/env python3
"""Throughput of the interpreted and numba kernels on the same shocks.

Run ``python3 benchmarks/bench_kernels.py --n 200000``.  The jit timings
exclude the first (compiling) call.  Outputs of both flavours are checked
for bit equality before timing.
"""

import argparse
import time

import numpy as np

from tarch import kernels
from tarch._accel import HAVE_NUMBA


def best_of(func, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=200_000, help="steps per call")
    parser.add_argument("--alpha", type=float, default=1.5)
    parser.add_argument("--k", type=float, default=1.0)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    eta = np.random.default_rng(args.seed).standard_normal(args.n)
    cap = 1e300
    flavours = {"python": (kernels.path_py, kernels.moment_py)}
    if HAVE_NUMBA:
        flavours["numba"] = (kernels.path_jit, kernels.moment_jit)
    else:
        print("numba not installed, timing the interpreted kernels only")

    outputs = {}
    rows = []
    for name, (path_fn, moment_fn) in flavours.items():
        bufs = kernels.alloc_path(args.n)
        path_fn(eta, args.alpha, args.k, 0.0, 0.0, cap, *bufs)  # warm-up / compile
        moment_fn(eta, args.alpha, args.k, 0.0, 0.0, cap, 0, 2)
        outputs[name] = (bufs[1].copy(), moment_fn(eta, args.alpha, args.k, 0.0, 0.0, cap, 0, 2))
        t_path = best_of(lambda: path_fn(eta, args.alpha, args.k, 0.0, 0.0, cap, *bufs), args.repeats)
        t_mom = best_of(
            lambda: moment_fn(eta, args.alpha, args.k, 0.0, 0.0, cap, 0, 2), args.repeats
        )
        rows.append((name, t_path, t_mom))

    if len(outputs) == 2:
        (u_py, m_py), (u_jit, m_jit) = outputs["python"], outputs["numba"]
        assert np.array_equal(u_py, u_jit) and m_py == m_jit, "kernels disagree"
        print("outputs bit-identical: yes")

    print(f"{'kernel':<8} {'path (s)':>10} {'Msteps/s':>10} {'moment (s)':>11} {'Msteps/s':>10}")
    for name, t_path, t_mom in rows:
        print(
            f"{name:<8} {t_path:10.4f} {args.n / t_path / 1e6:10.2f} "
            f"{t_mom:11.4f} {args.n / t_mom / 1e6:10.2f}"
        )
    if len(rows) == 2:
        print(f"speed-up: path x{rows[0][1] / rows[1][1]:.0f}, moment x{rows[0][2] / rows[1][2]:.0f}")


if __name__ == "__main__":
    main()
