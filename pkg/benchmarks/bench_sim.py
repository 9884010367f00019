"""Time the numba and numpy trial kernels on identical pre-drawn blocks.

    python benchmarks/bench_sim.py [--n 8192] [--s 9] [--trials 200000] [--repeat 5]

Both backends consume the same arrays, so the script also checks that their
decisions and query counts agree exactly before reporting timings.
"""
import argparse
import json
import time
from fractions import Fraction

import numpy as np

from approxdeg.sim.kernels import run_block
from approxdeg.sim.sweep import NO, block_rng, draw_block


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=8192)
    ap.add_argument("--s", type=int, default=40)
    ap.add_argument("--searches", type=int, default=4)
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    alpha = Fraction(1, 2)
    m = args.n // 2
    arrays = draw_block(block_rng(0, NO, args.n, args.s, args.searches, 0),
                        args.n, m, args.s, args.searches, alpha, args.trials)

    # compile outside the timed region
    run_block(*[a[:10] for a in arrays], args.s, m, backend="numba")

    ref = run_block(*arrays, args.s, m, backend="numpy")
    out = run_block(*arrays, args.s, m, backend="numba")
    assert np.array_equal(ref[0], out[0]) and np.array_equal(ref[1], out[1])

    results = {}
    for backend in ("numpy", "numba"):
        results[backend] = best_of(lambda: run_block(*arrays, args.s, m, backend=backend), args.repeat)
    print(json.dumps({
        "n": args.n, "s": args.s, "trials": args.trials,
        "seconds": {k: round(v, 5) for k, v in results.items()},
        "speedup_numba_over_numpy": round(results["numpy"] / results["numba"], 2),
    }, indent=2))


if __name__ == "__main__":
    main()
