"""Compare the numba kernels with their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each row reports the best-of-``repeat`` wall time for both back ends and
checks that they return identical arrays.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from cardcomp import kernels
from cardcomp.rankguess import random_instance


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(quick: bool):
    rng = np.random.default_rng(0)
    sizes = (5, 7) if quick else (5, 7, 9)
    for n in sizes:
        vals, N = random_instance(n, rng)
        v = np.array(vals, dtype=np.int64)
        yield f"mono n={n}", lambda u, v=v, N=N: kernels.mono_gaps_worst_units(v, N, use_numba=u)
        yield f"exp:2 n={n}", lambda u, v=v, N=N: kernels.exp_gaps_worst_sizes(v, N, 4, use_numba=u)
    trials = 10**5 if quick else 10**6
    r = np.column_stack([rng.integers(1, 40**i, size=trials, endpoint=True) for i in range(1, 5)])
    yield f"fail-mask {trials}x4", lambda u, r=r: kernels.appc_fail_mask(r, use_numba=u)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    print(f"{'kernel':<22}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}  same")
    for name, fn in cases(args.quick):
        same = np.array_equal(fn(True), fn(False))  # also warms up the jit
        t_nb = best_time(lambda: fn(True), args.repeat)
        t_np = best_time(lambda: fn(False), args.repeat)
        print(f"{name:<22}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>10.1f}  {same}")


if __name__ == "__main__":
    main()
