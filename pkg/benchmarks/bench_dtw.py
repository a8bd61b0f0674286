"""Compare the compiled and numpy DTW backends on pairwise distance matrices.

    python3 benchmarks/bench_dtw.py [--n 40] [--length 128] [--window 0.1] [--repeat 3]

Prints per-backend wall time and checks that the matrices agree bit for bit.
"""
import argparse
import time

import numpy as np

from fdbench.dtw import available_backends, dtw_pairwise


def time_backend(A, window, backend, repeat):
    best, D = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        D = dtw_pairwise(A, window=window, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, D


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=40)
    ap.add_argument("--length", type=int, default=128)
    ap.add_argument("--window", type=float, default=0.1)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    A = np.cumsum(np.random.default_rng(args.seed).normal(size=(args.n, args.length)), axis=1)
    pairs = args.n * (args.n - 1) // 2
    print(f"{pairs} pairs, length {args.length}, window {args.window}")
    results = {}
    for backend in available_backends():
        secs, D = time_backend(A, args.window, backend, args.repeat)
        results[backend] = (secs, D)
        print(f"{backend:>8}: {secs:8.4f} s  ({1e6 * secs / pairs:8.2f} us/pair)")
    if len(results) == 2:
        (t_py, D_py), (t_c, D_c) = results["python"], results["cython"]
        print(f"speedup: {t_py / t_c:.1f}x, identical: {np.array_equal(D_py, D_c)}")
    else:
        print("compiled backend not built; only the fallback was timed")


if __name__ == "__main__":
    main()
