"""Poisson point processes on the cell grid.

Intensities are cell-constant densities with respect to the uniform reference
measure of total mass one, so every integral against the reference or against
a binned point pattern is a finite sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _mc
from .errors import DimensionError
from .measures import DensityFamily, GridMeasure, uniform
from .partition import PartitionTestSpec, TestReport, _estimate


@dataclass(frozen=True, eq=False)
class PoissonModel:
    intensity: GridMeasure

    @property
    def reference(self) -> GridMeasure:
        return uniform(self.intensity.n_cells)

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.intensity.weights > 0))


@dataclass(frozen=True, eq=False)
class PointPattern:
    counts: np.ndarray
    n: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        if self.n < 1:
            raise ValueError("a pattern pools at least one realization")
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def sine_intensity(j: int, n_cells: int) -> GridMeasure:
    """Intensity 1 + sin(2 pi j x) evaluated at cell midpoints.

    Midpoint values make the discrete inner products exact: distinct
    frequencies below n_cells/2 are orthogonal and each has squared norm 1/2.
    """
    if not 1 <= j < n_cells // 2:
        raise ValueError(f"frequency {j} not resolvable on {n_cells} cells")
    mid = (np.arange(n_cells) + 0.5) / n_cells
    lam = 1.0 + np.sin(2.0 * np.pi * j * mid)
    return GridMeasure(np.maximum(lam, 0.0) / n_cells)


def constant_intensity(level: float, n_cells: int) -> GridMeasure:
    return uniform(n_cells, mass=level)


def sample_process(model: PoissonModel, n: int, seed: int) -> PointPattern:
    """Pooled counts of ``n`` independent realizations, binned to cells."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return PointPattern(rng.poisson(n * model.intensity.weights), n)


def sample_counts_many(intensity: GridMeasure, n: int, replicas: int, seed: int,
                       key: tuple = ()) -> np.ndarray:
    """(replicas, n_cells) pooled count matrices."""
    lam = n * intensity.weights

    def block(rng, size):
        return rng.poisson(lam, size=(size, lam.size))

    return _mc.map_blocks(block, replicas, seed, key)


def _log_density(lam: GridMeasure) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(lam.density)


def log_likelihood_ratio(pattern, lam: GridMeasure, n: int | None = None):
    """log dP_lambda / dP_reference for pooled counts.

    ``pattern`` is a :class:`PointPattern` or a (replicas, n_cells) count
    matrix (then ``n`` is required).  Zero intensity at an occupied cell gives
    ``-inf``.
    """
    if isinstance(pattern, PointPattern):
        counts, n = pattern.counts, pattern.n
    else:
        counts = np.asarray(pattern)
        if n is None:
            raise ValueError("n is required for raw count arrays")
    if counts.shape[-1] != lam.n_cells:
        raise DimensionError("pattern and intensity live on different grids")
    dens = lam.density
    compensator = -n * math.fsum((dens - 1.0) / lam.n_cells)
    log_l = _log_density(lam)
    zero = ~np.isfinite(log_l)
    safe = np.where(zero, 0.0, log_l)
    val = compensator + counts @ safe
    if zero.any():
        hit = (counts[..., zero] > 0).any(axis=-1)
        val = np.where(hit, -np.inf, val)
    return float(val) if np.ndim(val) == 0 else val


def moment_identity_rhs(l1: GridMeasure, l2: GridMeasure, n: int = 1) -> float:
    """exp{n * integral (lambda1 - 1)(lambda2 - 1) d(reference)}."""
    if l1.n_cells != l2.n_cells:
        raise DimensionError("intensities live on different grids")
    inner = math.fsum((l1.density - 1.0) * (l2.density - 1.0)) / l1.n_cells
    return math.exp(n * inner)


def mc_moment_identity(l1: GridMeasure, l2: GridMeasure, n: int, replicas: int, seed: int):
    """Monte Carlo E_ref[L1 * L2]: (estimate, stderr)."""
    if replicas < 1000:
        raise ValueError("replicas must be >= 1000")
    ref = uniform(l1.n_cells)
    counts = sample_counts_many(ref, n, replicas, seed, (11,))
    vals = np.exp(log_likelihood_ratio(counts, l1, n) + log_likelihood_ratio(counts, l2, n))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicas))


def mc_lr_normalization(lam: GridMeasure, n: int, replicas: int, seed: int):
    """Monte Carlo E_ref[exp(LLR)]: (estimate, stderr); should be one."""
    ref = uniform(lam.n_cells)
    counts = sample_counts_many(ref, n, replicas, seed, (12,))
    vals = np.exp(log_likelihood_ratio(counts, lam, n))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicas))


def _xlogx_ratio(a: float, mu: float) -> float:
    return 0.0 if a <= 0 else a * math.log(a / mu)


def poisson_tail_bound(mu_b: float, delta: float, n: int) -> float:
    """Two-sided Chernoff bound on P(|N/n - mu_b| > delta) for N ~ Poisson(n mu_b).

    Upper tail: exp{-n[(mu+delta) log((mu+delta)/mu) - delta]}.
    Lower tail: exp{-n[(mu-delta) log((mu-delta)/mu) + delta]}, with
    0 log 0 = 0 so that it equals exp(-n mu) once delta >= mu.
    """
    if not mu_b > 0 or not delta > 0:
        raise ValueError("mu_b and delta must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    upper = math.exp(-n * (_xlogx_ratio(mu_b + delta, mu_b) - delta))
    if delta >= mu_b:
        lower = math.exp(-n * mu_b)
    else:
        lower = math.exp(-n * (_xlogx_ratio(mu_b - delta, mu_b) + delta))
    return upper + lower


def mc_tail_frequency(mu_b: float, delta: float, n: int, replicas: int, seed: int):
    """Monte Carlo P(|N/n - mu_b| > delta): (estimate, stderr)."""
    def block(rng, size):
        z = rng.poisson(n * mu_b, size=size) / n
        return np.abs(z - mu_b) > delta

    hits = _mc.map_blocks(block, replicas, seed, (13, int(n)))
    p = float(hits.mean())
    return p, _mc.proportion_stderr(p, replicas)


def poisson_set_counts(mu: np.ndarray, n: int, rng, size: int) -> np.ndarray:
    """Counts in disjoint sets: independent Poisson(n * mu(B_j))."""
    return rng.poisson(n * np.asarray(mu), size=(size, len(mu)))


def poisson_partition_errors(spec: PartitionTestSpec, f0: DensityFamily, f1: DensityFamily,
                             n_values: Sequence[int], replicas: int, seed: int) -> TestReport:
    """Monte Carlo errors of the partition test on pooled Poisson counts (z_j = N(B_j)/n)."""
    return _estimate(spec, f0, f1, n_values, replicas, seed, poisson_set_counts)


# -- Bayes mixture over an orthogonal sine design ------------------------------------

def _check_design(m: int, n_cells: int):
    if m < 1:
        raise ValueError("m must be >= 1")
    if m >= n_cells // 2:
        raise ValueError(f"m = {m} exceeds the frequencies resolvable on {n_cells} cells")


def bayes_collapse_curve(n: int, m_values: Sequence[int], v: float = 0.5) -> list:
    """Closed form E[(I_m - 1)^2] = (exp(n v) - 1) / m for an orthogonal design."""
    return [math.expm1(n * v) / m for m in m_values]


def bayes_collapse_double_sum(n: int, m: int, n_cells: int) -> float:
    """Explicit double sum from the grid inner products of the sine design."""
    _check_design(m, n_cells)
    centered = np.vstack([sine_intensity(j, n_cells).density - 1.0 for j in range(1, m + 1)])
    gram = centered @ centered.T / n_cells
    cross = np.exp(n * gram).sum() / m ** 2
    # reference point lambda_0 = 1 makes the middle term 2/m * m * exp(0)
    return float(cross - 2.0 + 1.0)


def mc_bayes_collapse(n: int, m: int, replicas: int, seed: int, n_cells: int = 256):
    """Monte Carlo E[(I_m - 1)^2] under the reference process: (estimate, stderr)."""
    _check_design(m, n_cells)
    dens = np.vstack([sine_intensity(j, n_cells).density for j in range(1, m + 1)])
    log_dens = np.log(dens)
    comp = -n * ((dens - 1.0).sum(axis=1) / n_cells)
    lam = np.full(n_cells, float(n) / n_cells)

    def block(rng, size):
        counts = rng.poisson(lam, size=(size, n_cells))
        log_l = comp + counts @ log_dens.T
        i_m = np.exp(log_l).mean(axis=1)
        return (i_m - 1.0) ** 2

    vals = _mc.map_blocks(block, replicas, seed, (14, m))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicas))
