"""Compare the numba and numpy implementations of the hot kernel.

Run from the repository root:

    python benchmarks/bench_backends.py [--sizes 100,1000,10000,100000] \
        [--degree 3] [--repeats 200]

The kernel is weighted_prod_sum(V, w) = sum_i w_i prod_j V[j, i], the
single inner loop behind every tensor evaluation.  Timings include a
warm-up call so numba's compilation cost is not billed to the loop.
"""

import argparse
import time

import numpy as np

from congruent_tensors.backend import _build_numba_kernel, _numpy_weighted_prod_sum


def time_kernel(fn, vectors, weights, repeats):
    fn(vectors, weights)  # warm up (compilation, caches)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(vectors, weights)
    return (time.perf_counter() - start) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,1000,10000,100000")
    parser.add_argument("--degree", type=int, default=3)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    try:
        numba_fn = _build_numba_kernel()
    except ImportError:
        numba_fn = None
        print("numba not importable; benchmarking numpy only")

    header = f"{'size':>10} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for m in sizes:
        vectors = rng.standard_normal((args.degree, m))
        weights = rng.standard_normal(m)
        t_np = time_kernel(_numpy_weighted_prod_sum, vectors, weights, args.repeats)
        if numba_fn is None:
            print(f"{m:>10} {t_np * 1e6:>10.2f}us {'-':>12} {'-':>9}")
            continue
        t_nb = time_kernel(numba_fn, vectors, weights, args.repeats)
        a = _numpy_weighted_prod_sum(vectors, weights)
        b = numba_fn(vectors, weights)
        assert abs(a - b) <= 1e-9 * max(1.0, abs(a)), "backends disagree"
        print(
            f"{m:>10} {t_np * 1e6:>10.2f}us {t_nb * 1e6:>10.2f}us "
            f"{t_np / t_nb:>8.2f}x"
        )


if __name__ == "__main__":
    main()
