"""Hot inner loops, compiled with numba when available.

Every kernel has a pure-numpy twin with identical results.  The numpy path is
used when numba cannot be imported or when ``DISTLAB_DISABLE_NUMBA`` is set to
a non-empty value other than ``0`` before import.
"""

import os

import numpy as np

_disabled = os.environ.get("DISTLAB_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _disabled:
        raise ImportError("numba disabled by DISTLAB_DISABLE_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


# -- inf over centers of sup-norm distance ---------------------------------

def inf_max_statistic_numpy(z, centers):
    """min_i max_j |z[r, j] - centers[i, j]| for every row r of ``z``."""
    z = np.asarray(z, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    out = np.full(z.shape[0], np.inf)
    # loop over centers keeps memory at O(R*k)
    for c in centers:
        np.minimum(out, np.abs(z - c).max(axis=1), out=out)
    return out


def _inf_max_statistic_loop(z, centers):
    n_rows, k = z.shape
    out = np.empty(n_rows)
    for r in range(n_rows):
        best = np.inf
        for i in range(centers.shape[0]):
            worst = 0.0
            for j in range(k):
                d = abs(z[r, j] - centers[i, j])
                if d > worst:
                    worst = d
                    if worst >= best:
                        break
            if worst < best:
                best = worst
        out[r] = best
    return out


# -- first-wrong-decision scan for nested sample paths ------------------------

def last_wrong_index_numpy(labels, centers, thresholds, truth_rejects):
    """Index of the last wrong decision along each nested sample path.

    Parameters
    ----------
    labels : (R, n_max) int array
        Set label of each successive draw, ``-1`` when the draw falls in no set.
    centers : (l, k) array
        Hypothesis centers.
    thresholds : (n_max,) array
        Rejection threshold used after ``n`` draws (index ``n - 1``).
    truth_rejects : bool
        True when the data come from the alternative (correct decision = reject).

    Returns
    -------
    (R,) int64 array, 0 when every decision was correct.
    """
    labels = np.asarray(labels)
    n_rows, n_max = labels.shape
    k = centers.shape[1]
    counts = np.zeros((n_rows, k))
    last = np.zeros(n_rows, dtype=np.int64)
    for n in range(1, n_max + 1):
        lab = labels[:, n - 1]
        hit = lab >= 0
        counts[np.nonzero(hit)[0], lab[hit]] += 1.0
        stat = inf_max_statistic_numpy(counts / n, centers)
        reject = stat > thresholds[n - 1]
        wrong = reject != truth_rejects
        last[wrong] = n
    return last


def _last_wrong_index_loop(labels, centers, thresholds, truth_rejects):
    n_rows, n_max = labels.shape
    n_centers, k = centers.shape
    last = np.zeros(n_rows, dtype=np.int64)
    counts = np.zeros(k)
    for r in range(n_rows):
        counts[:] = 0.0
        for n in range(1, n_max + 1):
            lab = labels[r, n - 1]
            if lab >= 0:
                counts[lab] += 1.0
            best = np.inf
            for i in range(n_centers):
                worst = 0.0
                for j in range(k):
                    d = abs(counts[j] / n - centers[i, j])
                    if d > worst:
                        worst = d
                if worst < best:
                    best = worst
            reject = best > thresholds[n - 1]
            if reject != truth_rejects:
                last[r] = n
    return last


if HAS_NUMBA:
    inf_max_statistic_numba = njit(cache=True)(_inf_max_statistic_loop)
    last_wrong_index_numba = njit(cache=True)(_last_wrong_index_loop)
else:
    inf_max_statistic_numba = None
    last_wrong_index_numba = None


def inf_max_statistic(z, centers):
    z = np.ascontiguousarray(z, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    if z.ndim != 2 or centers.ndim != 2 or z.shape[1] != centers.shape[1]:
        raise ValueError("z must be (R, k) and centers (l, k)")
    if HAS_NUMBA:
        return inf_max_statistic_numba(z, centers)
    return inf_max_statistic_numpy(z, centers)


def last_wrong_index(labels, centers, thresholds, truth_rejects):
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    thresholds = np.ascontiguousarray(thresholds, dtype=np.float64)
    if HAS_NUMBA:
        return last_wrong_index_numba(labels, centers, thresholds, bool(truth_rejects))
    return last_wrong_index_numpy(labels, centers, thresholds, bool(truth_rejects))
