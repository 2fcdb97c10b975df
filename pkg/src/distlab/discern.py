"""Stopping times of test sequences that eventually decide correctly.

A trajectory feeds one growing i.i.d. sample to the partition test with a
shrinking threshold schedule and records ``N``, the last sample size at which
the decision was wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels, _mc
from .errors import DimensionError
from .measures import DensityFamily, GridMeasure, sample_with
from .partition import PartitionTestSpec, find_separating_sets, set_images


def delta_schedule(n, c0: float, exponent: float):
    """delta_n = c0 * n**(-exponent) with 0 < exponent < 1/2, so n * delta_n**2 -> inf."""
    if not c0 > 0:
        raise ValueError("c0 must be positive")
    if not 0 < exponent < 0.5:
        raise ValueError("exponent must lie in (0, 1/2); larger values break uniform consistency")
    n_arr = np.asarray(n, dtype=np.float64)
    if np.any(n_arr < 1):
        raise ValueError("n must be >= 1")
    out = c0 * n_arr ** (-exponent)
    return float(out) if out.ndim == 0 else out


@dataclass
class DiscernTrajectory:
    decisions: np.ndarray
    N: int
    truth_side: int
    censored: bool

    @property
    def n_max(self) -> int:
        return self.decisions.size


@dataclass
class SequencePlan:
    """Sets, centers and threshold schedule shared by every trajectory."""

    sets: list
    centers: np.ndarray
    thresholds: np.ndarray
    label_of_cell: np.ndarray

    @property
    def n_max(self) -> int:
        return self.thresholds.size


def truth_side(truth: GridMeasure, f0: DensityFamily, f1: DensityFamily, tol: float = 1e-12) -> int:
    in0 = bool((np.abs(f0.matrix - truth.weights).sum(axis=1) <= tol).any())
    in1 = bool((np.abs(f1.matrix - truth.weights).sum(axis=1) <= tol).any())
    if in0 and in1:
        raise ValueError("truth belongs to both families; the problem is ill-posed")
    if not (in0 or in1):
        raise ValueError("truth belongs to neither family")
    return 0 if in0 else 1


def build_plan(f0: DensityFamily, f1: DensityFamily, n_max: int, c0: float, exponent: float,
               sets=None, max_k: int = 4, max_resolution: int | None = None) -> SequencePlan:
    if f0.n_cells != f1.n_cells:
        raise DimensionError("families live on different grids")
    if sets is None:
        sets = find_separating_sets(f0, f1, max_k, max_resolution).sets
    PartitionTestSpec(tuple(sets), set_images(f0, sets), 1.0)  # validates disjointness
    deltas = delta_schedule(np.arange(1, n_max + 1), c0, exponent)
    # L_n = max_{i<=n} K_{n, delta_i}: rejects iff the statistic beats the smallest 2*delta_i
    thresholds = 2.0 * np.minimum.accumulate(deltas)
    label = np.full(f0.n_cells, -1, dtype=np.int64)
    for j, s in enumerate(sets):
        label[s.cells] = j
    return SequencePlan(list(sets), set_images(f0, sets), thresholds, label)


def _decisions(labels_row: np.ndarray, plan: SequencePlan) -> np.ndarray:
    k = len(plan.sets)
    onehot = np.zeros((labels_row.size, k))
    hit = labels_row >= 0
    onehot[np.nonzero(hit)[0], labels_row[hit]] = 1.0
    z = np.cumsum(onehot, axis=0) / np.arange(1, labels_row.size + 1)[:, None]
    stat = _kernels.inf_max_statistic(z, plan.centers)
    return (stat > plan.thresholds).astype(np.int8)


def run_sequence(truth: GridMeasure, f0: DensityFamily, f1: DensityFamily, n_max: int, seed: int,
                 c0: float = 0.2, exponent: float = 0.25, plan: SequencePlan | None = None) -> DiscernTrajectory:
    """One nested-sample trajectory of decisions L_1..L_{n_max}."""
    side = truth_side(truth, f0, f1)
    plan = plan or build_plan(f0, f1, n_max, c0, exponent)
    rng = np.random.default_rng(seed)
    labels = plan.label_of_cell[sample_with(truth, n_max, rng)]
    dec = _decisions(labels, plan)
    wrong = np.nonzero(dec != side)[0]
    n_last = int(wrong[-1] + 1) if wrong.size else 0
    return DiscernTrajectory(dec, n_last, side, n_last == n_max)


def stopping_times(truth: GridMeasure, f0: DensityFamily, f1: DensityFamily, n_max: int,
                   replicas: int, seed: int, c0: float = 0.2, exponent: float = 0.25,
                   plan: SequencePlan | None = None):
    """Stopping times ``N`` of many independent trajectories and their censoring flags."""
    side = truth_side(truth, f0, f1)
    plan = plan or build_plan(f0, f1, n_max, c0, exponent)

    def block(rng, size):
        labels = plan.label_of_cell[sample_with(truth, (size, n_max), rng)]
        return _kernels.last_wrong_index(labels, plan.centers, plan.thresholds, side == 1)

    n_stop = _mc.map_blocks(block, replicas, seed, (21,), block_size=512)
    return n_stop.astype(np.int64), n_stop == n_max


@dataclass
class StoppingStats:
    c_grid: np.ndarray
    tail: np.ndarray
    t_grid: np.ndarray
    moment: np.ndarray
    moment_stderr: np.ndarray
    heavy_tail: np.ndarray
    tail_rate: float
    tail_r2: float
    censored: int
    replicas: int
    notes: list = field(default_factory=list)


def stopping_time_stats(n_stop, t_grid: Sequence[float], c_grid: Sequence[float] | None = None,
                        censored=None, min_replicas: int = 1000) -> StoppingStats:
    """Tail probabilities P(N > C), exponential moments E[exp(tN)] and a fitted tail rate.

    Censored trajectories enter at their cap ``n_max``; they are counted and
    reported, never dropped.
    """
    n_stop = np.asarray(n_stop, dtype=np.int64)
    if n_stop.size < min_replicas:
        raise ValueError(f"need at least {min_replicas} trajectories, got {n_stop.size}")
    if c_grid is None:
        top = max(int(n_stop.max()), 1)
        c_grid = np.unique(np.linspace(0, top, 41).astype(np.int64))
    c_grid = np.asarray(c_grid, dtype=np.float64)
    tail = (n_stop[None, :] > c_grid[:, None]).mean(axis=1)

    t_grid = np.asarray(t_grid, dtype=np.float64)
    moment, se, heavy = [], [], []
    for t in t_grid:
        terms = np.exp(t * n_stop.astype(np.float64))
        moment.append(float(terms.mean()))
        se.append(float(terms.std(ddof=1) / math.sqrt(terms.size)))
        # one draw carrying most of the sum means the estimate is unreliable
        heavy.append(bool(terms.max() > 0.5 * terms.sum()))

    pos = tail > 0
    notes = []
    rate, r2 = 0.0, float("nan")
    if pos.sum() >= 3:
        x, y = c_grid[pos], -np.log(tail[pos])
        slope, icpt = np.polyfit(x, y, 1)
        resid = y - (slope * x + icpt)
        ss_tot = float(((y - y.mean()) ** 2).sum())
        r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
        rate = max(float(slope), 0.0)
    else:
        notes.append("fewer than three positive tail estimates; tail rate not fitted")
    n_cens = int(np.sum(censored)) if censored is not None else 0
    if n_cens:
        notes.append(f"{n_cens} trajectories right-censored at n_max")
    return StoppingStats(c_grid, tail, t_grid, np.array(moment), np.array(se), np.array(heavy),
                         rate, r2, n_cens, int(n_stop.size), notes)
