"""Compare the numba and pure-numpy kernels on representative workloads.

Run with ``python benchmarks/bench_kernels.py``.  Both paths are called
directly, so the DISTLAB_DISABLE_NUMBA flag does not matter here; results are
checked for equality before timings are printed.
"""

import argparse
import time

import numpy as np

from distlab import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_statistic(rows, k, n_centers, repeat):
    rng = np.random.default_rng(0)
    z = rng.random((rows, k))
    centers = rng.random((n_centers, k))
    t_np, a = best_of(lambda: _kernels.inf_max_statistic_numpy(z, centers), repeat)
    _kernels.inf_max_statistic_numba(z, centers)  # compile outside the timing
    t_nb, b = best_of(lambda: _kernels.inf_max_statistic_numba(z, centers), repeat)
    assert np.array_equal(a, b)
    return t_np, t_nb


def bench_stopping(rows, n_max, k, repeat):
    rng = np.random.default_rng(1)
    labels = rng.integers(-1, k, size=(rows, n_max))
    centers = np.full((1, k), 1.0 / (k + 1))
    thresholds = 2 * 0.2 * np.arange(1, n_max + 1) ** -0.25
    args = (labels, centers, thresholds, False)
    t_np, a = best_of(lambda: _kernels.last_wrong_index_numpy(*args), repeat)
    _kernels.last_wrong_index_numba(*args)
    t_nb, b = best_of(lambda: _kernels.last_wrong_index_numba(*args), repeat)
    assert np.array_equal(a, b)
    return t_np, t_nb


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")

    print(f"{'kernel':<34}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    cases = [
        ("inf_max_statistic 1e6 x 4, l=3", lambda: bench_statistic(1_000_000, 4, 3, args.repeat)),
        ("inf_max_statistic 1e5 x 8, l=64", lambda: bench_statistic(100_000, 8, 64, args.repeat)),
        ("last_wrong_index 512 x 2000, k=3", lambda: bench_stopping(512, 2000, 3, args.repeat)),
    ]
    for name, case in cases:
        t_np, t_nb = case()
        print(f"{name:<34}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
