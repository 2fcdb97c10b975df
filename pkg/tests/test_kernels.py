import os
import subprocess
import sys

import numpy as np
import pytest

from distlab import _kernels, _mc

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba unavailable or disabled")


def _stat_inputs(seed, rows=2000, k=4, n_centers=5):
    rng = np.random.default_rng(seed)
    return rng.random((rows, k)), rng.random((n_centers, k))


def test_statistic_numpy_against_brute_force():
    z, c = _stat_inputs(0, rows=50)
    brute = np.array([min(np.abs(row - ci).max() for ci in c) for row in z])
    np.testing.assert_array_equal(_kernels.inf_max_statistic_numpy(z, c), brute)


@needs_numba
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_statistic_backends_identical(seed):
    z, c = _stat_inputs(seed)
    np.testing.assert_array_equal(_kernels.inf_max_statistic_numpy(z, c),
                                  _kernels.inf_max_statistic_numba(z, c))


@needs_numba
@pytest.mark.parametrize("truth_rejects", [False, True])
def test_stopping_backends_identical(truth_rejects):
    rng = np.random.default_rng(4)
    labels = rng.integers(-1, 3, size=(200, 300))
    centers = np.array([[0.3, 0.2, 0.25], [0.1, 0.4, 0.3]])
    thresholds = 0.4 * np.arange(1, 301) ** -0.25
    args = (labels, centers, thresholds, truth_rejects)
    np.testing.assert_array_equal(_kernels.last_wrong_index_numpy(*args),
                                  _kernels.last_wrong_index_numba(*args))


def test_disable_flag_selects_numpy_backend():
    env = dict(os.environ, DISTLAB_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from distlab import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_block_seeding_independent_of_threads():
    fn = lambda rng, size: rng.standard_normal(size)
    a = _mc.map_blocks(fn, 10_000, seed=5, key=(1,), threads=1, block_size=1000)
    b = _mc.map_blocks(fn, 10_000, seed=5, key=(1,), threads=4, block_size=1000)
    np.testing.assert_array_equal(a, b)
    c = _mc.map_blocks(fn, 10_000, seed=5, key=(2,), threads=1, block_size=1000)
    assert not np.array_equal(a, c)


def test_block_sizes():
    assert _mc.block_sizes(10, 4) == [4, 4, 2]
    assert _mc.block_sizes(8, 4) == [4, 4]
