"""Throughput comparison of the two kernel lanes.

Runs the three integrators on representative workloads through the jitted
lane and the pure-numpy fallback and prints a table with the speedups.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

import p2pkinetics as pk
from p2pkinetics._backend import NUMBA_AVAILABLE
from p2pkinetics._kernels import get_kernels
from p2pkinetics.scheme import scheme_arrays


def time_call(fn, repeat):
    fn()  # warmup (and jit compilation on the numba lane)
    best = np.inf
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    focus = pk.fasttrack(pk.FastTrackParams(1.0, 0.1, 0.5))
    scaled = pk.fasttrack(pk.FastTrackParams(100.0, 0.001, 0.5))
    chunks = pk.build_builtin("bittorrent-chunks", {"m": "6"})
    a_focus = scheme_arrays(focus)
    a_scaled = scheme_arrays(scaled)
    a_chunks = scheme_arrays(chunks)
    x2 = np.array([10.0, 1.0])
    x2i = np.array([1000, 100], dtype=np.int64)
    xc = np.full(7, 2.0)
    grid = np.linspace(0.0, 50.0, 21)

    def make(kern):
        return {
            "rk4 fasttrack 1e5 steps": lambda: kern.rk4(a_focus, x2, 0.001, 100_000, 100),
            "rk4 chunks m=6 1e4 steps": lambda: kern.rk4(a_chunks, xc, 0.01, 10_000, 10),
            "euler-maruyama 1e5 steps": lambda: kern.em(a_focus, x2, 0.001, 100_000, 100, 1.0, 42),
            "ssa scaled ~1.6e4 events": lambda: kern.ssa_events(a_scaled, x2i, 50.0, 100, 7, 10**8),
            "ssa grid ~1.6e4 events": lambda: kern.ssa_grid(a_scaled, x2i, grid, 7, 10**8),
        }

    return make


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    make = workloads()
    numpy_lane = make(get_kernels("numpy"))
    numba_lane = make(get_kernels("numba")) if NUMBA_AVAILABLE else None

    width = max(len(name) for name in numpy_lane)
    header = f"{'workload':{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, fn_np in numpy_lane.items():
        t_np = time_call(fn_np, args.repeat)
        if numba_lane is None:
            print(f"{name:{width}}  {t_np * 1e3:9.2f}ms  {'n/a':>10}  {'n/a':>8}")
            continue
        t_nb = time_call(numba_lane[name], args.repeat)
        print(
            f"{name:{width}}  {t_np * 1e3:9.2f}ms  {t_nb * 1e3:9.2f}ms  "
            f"{t_np / t_nb:7.1f}x"
        )


if __name__ == "__main__":
    main()
