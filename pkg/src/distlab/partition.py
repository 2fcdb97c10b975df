"""Uniformly consistent partition tests built from set frequencies.

The test looks at empirical frequencies ``z_j`` of a sample in fixed disjoint
sets ``B_1..B_k`` and rejects the hypothesis when the sup-norm distance from
``z`` to every hypothesis center exceeds ``2 * delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import _kernels, _mc
from .errors import DimensionError, NoSeparation
from .measures import DensityFamily, DyadicSet, GridMeasure

POSITIVE_GAP = 1e-12


@dataclass(frozen=True)
class PartitionTestSpec:
    sets: tuple
    centers: np.ndarray
    delta: float
    probability: bool = True

    def __post_init__(self):
        sets = tuple(self.sets)
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        if not sets:
            raise ValueError("at least one set is required")
        if centers.shape[1] != len(sets):
            raise DimensionError(f"centers have {centers.shape[1]} coordinates for {len(sets)} sets")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        seen = np.concatenate([s.cells for s in sets])
        if np.unique(seen).size != seen.size:
            raise ValueError("sets must be pairwise disjoint")
        if np.any(centers < 0) or (self.probability and np.any(centers > 1)):
            raise ValueError("center coordinates out of range")
        centers = centers.copy()
        centers.flags.writeable = False
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def l(self) -> int:
        return self.centers.shape[0]

    def to_json(self) -> dict:
        return {
            "sets": [s.to_json() for s in self.sets],
            "centers": self.centers.tolist(),
            "delta": self.delta,
        }


@dataclass
class TestReport:
    n_values: list
    alpha_hat: np.ndarray
    beta_hat: np.ndarray
    stderr_alpha: np.ndarray
    stderr_beta: np.ndarray
    replicas: int
    seed: int
    fitted_rate: float = float("nan")
    r2: float = float("nan")
    rate_censored: bool = False
    degenerate: bool = False
    alpha_upper: np.ndarray = field(default=None)
    beta_upper: np.ndarray = field(default=None)

    # pytest would otherwise try to collect this class
    __test__ = False

    def __post_init__(self):
        for name in ("alpha_hat", "beta_hat", "stderr_alpha", "stderr_beta"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        # zero counts get the rule-of-three upper bound
        rule3 = 3.0 / self.replicas
        if self.alpha_upper is None:
            self.alpha_upper = np.where(self.alpha_hat == 0, rule3, self.alpha_hat)
        if self.beta_upper is None:
            self.beta_upper = np.where(self.beta_hat == 0, rule3, self.beta_hat)

    def rows(self):
        for i, n in enumerate(self.n_values):
            yield (int(n), float(self.alpha_hat[i]), float(self.beta_hat[i]),
                   float(self.stderr_alpha[i]), float(self.stderr_beta[i]))

    def summary(self) -> dict:
        return {
            "n_values": [int(n) for n in self.n_values],
            "replicas": self.replicas,
            "seed": self.seed,
            "fitted_rate": self.fitted_rate,
            "r2": self.r2,
            "rate_censored": self.rate_censored,
            "degenerate": self.degenerate,
            "alpha_upper": self.alpha_upper.tolist(),
            "beta_upper": self.beta_upper.tolist(),
        }


class SeparationResult(NamedTuple):
    sets: list
    gap: float


@dataclass(frozen=True)
class RateFit:
    """Fitted decay rate; unpacks as ``(rate, r2)``."""

    rate: float
    r2: float
    censored: bool = False
    dropped: int = 0

    def __iter__(self):
        return iter((self.rate, self.r2))


# -- statistic and decision ---------------------------------------------------------

def set_images(family: DensityFamily, sets: Sequence[DyadicSet]) -> np.ndarray:
    """(members, k) matrix of set masses."""
    cols = []
    for s in sets:
        if s.cells.size and s.cells[-1] >= family.n_cells:
            raise IndexError("set exceeds the family grid")
        cols.append(family.matrix[:, s.cells].sum(axis=1))
    return np.column_stack(cols)


def empirical_frequencies(sample, sets: Sequence[DyadicSet]) -> np.ndarray:
    x = np.asarray(sample, dtype=np.int64).ravel()
    if x.size == 0:
        raise ValueError("empirical frequencies need a nonempty sample")
    return np.array([np.isin(x, s.cells).sum() / x.size for s in sets])


def knd_statistic(z, spec: PartitionTestSpec) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[1] != spec.k:
        raise DimensionError(f"frequency vector has {z.shape[1]} entries, test uses {spec.k} sets")
    return _kernels.inf_max_statistic(z, spec.centers)


def knd_decide(z, spec: PartitionTestSpec) -> int:
    """1 (reject) iff every center is more than 2*delta away in sup-norm; ties accept."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1:
        raise DimensionError("knd_decide takes one frequency vector")
    return int(knd_statistic(z[None, :], spec)[0] > 2.0 * spec.delta)


# -- construction -------------------------------------------------------------------

def _cross_gap(img0: np.ndarray, img1: np.ndarray) -> np.ndarray:
    """Sup-norm distance between every cross pair, shape (|F0|, |F1|)."""
    return np.abs(img0[:, None, :] - img1[None, :, :]).max(axis=2)


def build_test_from_families(f0: DensityFamily, f1: DensityFamily,
                             sets: Sequence[DyadicSet]) -> PartitionTestSpec:
    """Centers at the F0 images, delta at a quarter of the smallest cross gap."""
    if f0.n_cells != f1.n_cells:
        raise DimensionError("families live on different grids")
    img0, img1 = set_images(f0, sets), set_images(f1, sets)
    gap = float(_cross_gap(img0, img1).min())
    if gap <= POSITIVE_GAP:
        raise NoSeparation(f"sets do not separate the families (gap {gap:.3g})")
    return PartitionTestSpec(tuple(sets), img0, gap / 4.0,
                             probability=f0.probability and f1.probability)


def _candidates(n_cells: int, max_resolution: int, levels=None):
    top = int(round(math.log2(n_cells)))
    if not 0 <= max_resolution <= top:
        raise ValueError(f"resolution must be in [0, {top}]")
    levels = range(max_resolution + 1) if levels is None else levels
    out = []
    for r in levels:
        for j in range(1 << r):
            out.append((r, j, DyadicSet.dyadic(r, j, n_cells)))
    return out


def _better(a, b, tol=POSITIVE_GAP) -> bool:
    """Lexicographic comparison that treats float roundoff as a tie (earlier candidate wins)."""
    for x, y in zip(a, b):
        if x > y + tol:
            return True
        if x < y - tol:
            return False
    return False


def _greedy(f0, f1, candidates, max_k, gap_target):
    masks0 = np.column_stack([f0.matrix[:, c.cells].sum(axis=1) for _, _, c in candidates])
    masks1 = np.column_stack([f1.matrix[:, c.cells].sum(axis=1) for _, _, c in candidates])
    # per candidate distance for every cross pair, shape (cand, |F0|, |F1|)
    dist = np.abs(masks0.T[:, :, None] - masks1.T[:, None, :])
    n_cells = f0.n_cells
    used = np.zeros(n_cells, dtype=bool)
    current = np.zeros(dist.shape[1:])
    chosen = []
    gap = 0.0
    while len(chosen) < max_k:
        best, best_score = None, None
        for idx, (_, _, c) in enumerate(candidates):
            if used[c.cells].any():
                continue
            cand = np.maximum(current, dist[idx])
            score = (float(cand.min()), int((cand > POSITIVE_GAP).sum()), float(cand.sum()))
            if best_score is None or _better(score, best_score):
                best, best_score = idx, score
        if best is None:
            break
        cand = np.maximum(current, dist[best])
        improves = (cand.min() > current.min() + POSITIVE_GAP
                    or (cand > POSITIVE_GAP).sum() > (current > POSITIVE_GAP).sum())
        if chosen and not improves:
            break
        chosen.append(candidates[best][2])
        used[candidates[best][2].cells] = True
        current = cand
        gap = float(current.min())
        if gap_target is not None and gap >= gap_target:
            break
    return chosen, gap


def find_separating_sets(f0: DensityFamily, f1: DensityFamily, max_k: int = 4,
                         max_resolution: int | None = None,
                         gap_target: float | None = None) -> SeparationResult:
    """Greedy search over disjoint dyadic intervals up to ``max_resolution``.

    Each step adds the interval that most increases the smallest cross-pair
    image distance (ties broken by the number of separated pairs, then by the
    total distance).  When overlap constraints stall the search, it restarts on
    the finest level alone, where any pair that differs at that resolution is
    guaranteed to be split.
    """
    if f0.n_cells != f1.n_cells:
        raise DimensionError("families live on different grids")
    if max_k < 1:
        raise ValueError("max_k must be >= 1")
    top = int(round(math.log2(f0.n_cells)))
    r = min(top, 6) if max_resolution is None else max_resolution
    sets, gap = _greedy(f0, f1, _candidates(f0.n_cells, r), max_k, gap_target)
    if gap <= POSITIVE_GAP:
        sets, gap = _greedy(f0, f1, _candidates(f0.n_cells, r, levels=[r]), max_k, gap_target)
    if gap <= POSITIVE_GAP:
        raise NoSeparation(f"no separating dyadic sets up to resolution {r} with k <= {max_k}")
    return SeparationResult(sets, gap)


# -- Monte Carlo ----------------------------------------------------------------------

def multinomial_set_counts(probs: np.ndarray, n: int, rng, size: int) -> np.ndarray:
    """Counts in each set for ``size`` i.i.d. samples of size ``n``."""
    rest = max(0.0, 1.0 - math.fsum(probs))
    pv = np.append(np.clip(probs, 0.0, 1.0), rest)
    pv = pv / pv.sum()
    return rng.multinomial(n, pv, size=size)[:, :-1]


def rejection_rates(spec: PartitionTestSpec, images: np.ndarray, n: int, replicas: int,
                    seed: int, key: tuple,
                    counts_fn: Callable = multinomial_set_counts) -> np.ndarray:
    """Monte Carlo rejection frequency for each member image at sample size ``n``."""
    rates = np.empty(images.shape[0])
    threshold = 2.0 * spec.delta
    for m, probs in enumerate(images):
        def block(rng, size, probs=probs):
            z = counts_fn(probs, n, rng, size) / n
            return _kernels.inf_max_statistic(z, spec.centers) > threshold
        rejects = _mc.map_blocks(block, replicas, seed, key + (m,))
        rates[m] = rejects.mean()
    return rates


def _estimate(spec, f0, f1, n_values, replicas, seed, counts_fn):
    if replicas < 100:
        raise ValueError("replicas must be >= 100")
    if f0.n_cells != f1.n_cells:
        raise DimensionError("families live on different grids")
    for s in spec.sets:
        if s.cells.size and s.cells[-1] >= f0.n_cells:
            raise DimensionError("test sets exceed the family grid")
    img0, img1 = set_images(f0, spec.sets), set_images(f1, spec.sets)
    a_hat, b_hat, se_a, se_b = [], [], [], []
    for t, n in enumerate(n_values):
        if n < 1:
            raise ValueError("sample sizes must be >= 1")
        rej0 = rejection_rates(spec, img0, int(n), replicas, seed, (0, t), counts_fn)
        acc1 = 1.0 - rejection_rates(spec, img1, int(n), replicas, seed, (1, t), counts_fn)
        a, b = float(rej0.max()), float(acc1.max())
        a_hat.append(a)
        b_hat.append(b)
        se_a.append(_mc.proportion_stderr(a, replicas))
        se_b.append(_mc.proportion_stderr(b, replicas))
    diff = np.abs(f0.matrix[:, None, :] - f1.matrix[None, :, :]).sum(axis=2)
    report = TestReport(list(n_values), a_hat, b_hat, se_a, se_b, replicas, seed,
                        degenerate=bool((diff < 1e-12).any()))
    fit = fit_exponential_rate(report) if len(n_values) >= 3 else None
    if fit is not None:
        report.fitted_rate, report.r2 = fit
        report.rate_censored = fit.censored
    return report


def estimate_errors(spec: PartitionTestSpec, f0: DensityFamily, f1: DensityFamily,
                    n_values: Sequence[int], replicas: int, seed: int) -> TestReport:
    """Worst-case Monte Carlo type I / type II errors of the test for i.i.d. samples.

    Each replica draws the joint counts in ``B_1..B_k`` from the multinomial law
    of an i.i.d. sample of size ``n``, which is exactly the law of the binned
    sample.
    """
    return _estimate(spec, f0, f1, n_values, replicas, seed, multinomial_set_counts)


def fit_exponential_rate(report: TestReport) -> RateFit:
    """Least-squares slope of -log(max(alpha, beta)) against n.

    Zero estimates are censored observations.  With at least three nonzero
    points the fit uses those points only.  Otherwise zeros are imputed as
    ``0.5 / replicas`` and the result is flagged as censored (the true rate is
    then at least the reported one).
    """
    n = np.asarray(report.n_values, dtype=np.float64)
    err = np.maximum(report.alpha_hat, report.beta_hat)
    if n.size < 3:
        raise ValueError("need at least three sample sizes to fit a rate")
    observed = err > 0
    censored = False
    if observed.sum() >= 3:
        x, y = n[observed], -np.log(err[observed])
    else:
        x = n
        y = -np.log(np.where(observed, err, 0.5 / report.replicas))
        censored = True
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float((resid ** 2).sum())
    if ss_tot <= 1e-300:
        r2 = 1.0 if ss_res <= 1e-20 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    rate = max(float(slope), 0.0)
    if abs(rate) < 1e-12:
        rate = 0.0
    return RateFit(rate, float(r2), censored, int((~observed).sum()) if not censored else 0)


def hoeffding_envelope(n: int, delta: float, k: int) -> float:
    """2k exp(-2 n delta^2): bound on P(max_j |z_j - P(B_j)| > delta)."""
    return 2.0 * k * math.exp(-2.0 * n * delta * delta)
