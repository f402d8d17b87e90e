"""Timing comparison of the compiled and pure-Python pair kernels.

Run from the repository root:

    python3 benchmarks/bench_kernels.py --sizes 100,200,400 --repeats 5

Both backends receive the same packed arrays and must return
bit-identical floats; the table reports median wall times and the
speedup of the compiled extension over the fallback.
"""

import argparse
import random
import statistics
import time

import numpy as np

from galres._kernels import get_backend, pack
from galres.ntcore import factorize


def sample_set(seed: int, size: int, upper: int = 50000):
    rng = random.Random(seed)
    values = sorted(rng.sample(range(1, upper + 1), size))
    return pack([factorize(v) for v in values])


def median_time(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,200,400",
                        help="comma-separated set sizes")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=20260816)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    py = get_backend("python")
    try:
        cy = get_backend("compiled")
    except ImportError:
        raise SystemExit("the compiled backend is not built; run "
                         "`pip install --no-build-isolation -e .` first")

    def run_matrix(impl, ps):
        out = np.empty((ps.n, ps.n))
        impl.gal_matrix_fill(ps.indptr, ps.codes, ps.exps, ps.logp, 0.5, out)
        return out

    ops = {
        "pair_gal_sum": lambda impl, ps: impl.pair_gal_sum(
            ps.indptr, ps.codes, ps.exps, ps.logp, 0.5),
        "pair_gal_subsum": lambda impl, ps: impl.pair_gal_subsum(
            ps.indptr, ps.codes, ps.exps, ps.logp, ps.logm, 0.5),
        "pair_gal_weighted": lambda impl, ps: impl.pair_gal_weighted(
            ps.indptr, ps.codes, ps.exps, ps.logp, 1, 4.0, 0.0),
        "gal_matrix_fill": run_matrix,
    }

    header = f"{'operation':<20} {'n':>5} {'python':>10} {'compiled':>10} " \
             f"{'speedup':>8}  identical"
    print(header)
    print("-" * len(header))
    for size in sizes:
        ps = sample_set(args.seed, size)
        for name, op in ops.items():
            a = op(py, ps)
            b = op(cy, ps)
            same = (np.array_equal(a, b) if isinstance(a, np.ndarray)
                    else a == b)
            t_py = median_time(lambda: op(py, ps), args.repeats)
            t_cy = median_time(lambda: op(cy, ps), args.repeats)
            print(f"{name:<20} {size:>5} {t_py:>9.4f}s {t_cy:>9.4f}s "
                  f"{t_py / t_cy:>7.1f}x  {same}")


if __name__ == "__main__":
    main()
