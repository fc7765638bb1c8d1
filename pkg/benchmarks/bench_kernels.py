"""Benchmark the permutation pair-table kernels: numba vs numpy fallback.

The pair-table builder (all n^2 products inv(s_i) s_j with their lengths
and cycle-type keys) is the only hot loop in the package that is not a
BLAS call.  This script times both implementations on the same inputs and
checks they agree.  Run with GAPCERT_NO_NUMBA=1 to see which path the
package itself would select.

Usage: python benchmarks/bench_kernels.py [--t-max 7] [--repeats 3]
"""

import argparse
import itertools
import time

import numpy as np

from gapcert import _accel


def words_for(t: int) -> tuple[np.ndarray, np.ndarray]:
    words = np.array(list(itertools.permutations(range(t))), dtype=np.int64)
    inv = np.empty_like(words)
    rows = np.arange(words.shape[0])[:, None]
    inv[rows, words] = np.arange(t)[None, :]
    return words, inv


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t-max", type=int, default=7)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    print(f"numba available: {_accel._HAVE_NUMBA}, package dispatch uses "
          f"{'numba' if _accel.USE_NUMBA else 'numpy fallback'}")
    header = f"{'t':>3} {'n=t!':>6} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for t in range(4, args.t_max + 1):
        words, inv = words_for(t)
        ref = _accel._pair_tables_py(words, inv)
        t_py = best_time(lambda: _accel._pair_tables_py(words, inv), args.repeats)
        if _accel._HAVE_NUMBA:
            fast = _accel._pair_tables_numba(words, inv)  # first call compiles
            assert np.array_equal(ref[0], fast[0]) and np.array_equal(ref[1], fast[1])
            t_nb = best_time(
                lambda: _accel._pair_tables_numba(words, inv), args.repeats
            )
            print(f"{t:>3} {words.shape[0]:>6} {t_py:>12.4f} {t_nb:>12.4f} "
                  f"{t_py / t_nb:>8.1f}")
        else:
            print(f"{t:>3} {words.shape[0]:>6} {t_py:>12.4f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
