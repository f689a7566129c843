#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs both implementations in-process on representative workload sizes
(the sweep harness computes distances from 1000-point query sets to a
2000-point training set thousands of times) and prints a timing table.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from datacopy import _kernels


def timeit(fn, *args, repeats: int) -> float:
    fn(*args)  # warm-up / JIT compile
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    impls = [("numpy", _kernels._min_sq_dists_numpy, _kernels._sq_dists_numpy)]
    if _kernels.BACKEND == "numba":
        impls.append(("numba", _kernels._min_impl, _kernels._sq_impl))
    else:
        print("numba backend unavailable (DATACOPY_NUMBA disabled or numba missing); "
              "timing numpy only")

    rng = np.random.default_rng(0)
    cases = [
        ("min_sq_dists 1000x2000 d=2", 0, rng.normal(size=(1000, 2)), rng.normal(size=(2000, 2))),
        ("min_sq_dists 1000x2000 d=64", 0,
         rng.normal(size=(1000, 64)), rng.normal(size=(2000, 64))),
        ("sq_dists 2000x2000 d=2", 1, rng.normal(size=(2000, 2)), rng.normal(size=(2000, 2))),
        ("sq_dists 1000x1000 d=64", 1, rng.normal(size=(1000, 64)), rng.normal(size=(1000, 64))),
    ]

    header = f"{'case':34s}" + "".join(f"{name:>12s}" for name, *_ in impls)
    if len(impls) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, which, a, b in cases:
        times = [timeit(impl[1 + which], a, b, repeats=args.repeats) for impl in impls]
        row = f"{label:34s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
