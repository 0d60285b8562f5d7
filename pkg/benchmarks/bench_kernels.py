"""Benchmark the compiled edge kernel against the pure-numpy fallback.

Both backends walk the same row-major pair order and consume the identical
counter-based uniform stream, so outputs are bitwise equal; the benchmark
reports wall time and the speedup for a few problem sizes.

Run:  python3 benchmarks/bench_kernels.py [--sizes 500,1000,2000,4000]
"""

import argparse
import time

import numpy as np

from graphex import kernels


def bench_one(n: int, repeats: int = 3) -> dict:
    rng = np.random.default_rng(12345 + n)
    a = rng.uniform(0.05, 0.95, size=n)

    def run(fn):
        best = float("inf")
        out = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = fn(777, a, kernels.FORM_SEPARABLE, 0.0)
            best = min(best, time.perf_counter() - t0)
        return out, best

    (ci, cj), t_any = run(kernels.find_edges)
    (pi, pj), t_py = run(kernels.python_find_edges)
    if not (np.array_equal(ci, pi) and np.array_equal(cj, pj)):
        raise AssertionError(f"backend outputs differ at n={n}")
    return {"n": n, "pairs": n * (n + 1) // 2, "edges": ci.shape[0],
            "active_backend": kernels.BACKEND,
            "t_active": t_any, "t_python": t_py,
            "speedup": t_py / t_any if t_any > 0 else float("nan")}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="500,1000,2000,4000",
                    help="comma-separated latent point counts")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {kernels.BACKEND}")
    print(f"{'n':>6} {'pairs':>12} {'edges':>8} "
          f"{'active (s)':>11} {'python (s)':>11} {'speedup':>8}")
    for n in sizes:
        r = bench_one(n)
        print(f"{r['n']:>6} {r['pairs']:>12} {r['edges']:>8} "
              f"{r['t_active']:>11.4f} {r['t_python']:>11.4f} "
              f"{r['speedup']:>8.2f}")


if __name__ == "__main__":
    main()
