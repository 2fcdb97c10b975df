"""Signal detection in Gaussian sequence models.

Observations are coordinates ``Y_j = scale_j * S_j + eps * xi_j`` of a white
noise model in a fixed orthonormal basis.  Heteroscedastic noise and diagonal
ill-posed models ``Y = A x + eps * R^{1/2} xi`` reduce to this form after
whitening, with the reduction folded into ``scale_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special, stats

from . import _mc
from .errors import DimensionError, NoSeparation, SingularOperatorError

D_MAX = 64


@dataclass(frozen=True, eq=False)
class SignalVector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("signal coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @classmethod
    def basis(cls, j: int, dim: int, amplitude: float = 1.0) -> "SignalVector":
        c = np.zeros(dim)
        c[j] = amplitude
        return cls(c)


@dataclass(frozen=True, eq=False)
class SequenceModel:
    """Noise level and per-coordinate signal multipliers (unit noise after whitening)."""

    epsilon: float
    scales: np.ndarray
    kind: str = "white"

    def __post_init__(self):
        s = np.array(self.scales, dtype=np.float64).ravel()
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if np.any(~np.isfinite(s)) or np.any(s <= 0):
            raise ValueError("scales must be positive and finite")
        s.flags.writeable = False
        object.__setattr__(self, "scales", s)

    @property
    def dim(self) -> int:
        return self.scales.size

    @classmethod
    def white(cls, epsilon: float, dim: int = D_MAX) -> "SequenceModel":
        return cls(epsilon, np.ones(dim), "white")

    @classmethod
    def heteroscedastic(cls, epsilon: float, noise_levels, lower: float, upper: float) -> "SequenceModel":
        """Noise ``eps * h_j``; whitening turns it into signal multipliers ``1 / h_j``."""
        h = np.asarray(noise_levels, dtype=np.float64)
        if not 0 < lower <= upper < np.inf:
            raise ValueError("need 0 < lower <= upper < inf")
        if np.any(h < lower) or np.any(h > upper):
            raise ValueError(f"noise levels must lie in [{lower}, {upper}]")
        return cls(epsilon, 1.0 / h, "hetero")

    @classmethod
    def ill_posed(cls, epsilon: float, a_diag, r_diag) -> "SequenceModel":
        return cls(epsilon, whiten(a_diag, r_diag), "illposed")

    def with_epsilon(self, epsilon: float) -> "SequenceModel":
        return SequenceModel(epsilon, self.scales, self.kind)


@dataclass(frozen=True)
class ProjectionTestSpec:
    gamma_dims: tuple
    centers: np.ndarray
    rho: float

    def __post_init__(self):
        dims = tuple(int(d) for d in self.gamma_dims)
        if len(set(dims)) != len(dims) or not dims:
            raise ValueError("gamma_dims must be nonempty and duplicate-free")
        centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        if centers.shape[1] != len(dims):
            raise DimensionError("centers must live in the projected space")
        object.__setattr__(self, "gamma_dims", dims)
        object.__setattr__(self, "centers", centers)


def _stack(signals: Sequence[SignalVector]) -> np.ndarray:
    if len(signals) == 0:
        raise ValueError("empty signal family")
    dims = {s.dim for s in signals}
    if len(dims) != 1:
        raise DimensionError("signals must share one dimension")
    return np.vstack([s.coeffs for s in signals])


def whiten(a_diag, r_diag) -> np.ndarray:
    """Signal multipliers ``A_j / sqrt(R_j)`` of the whitened model."""
    a = np.asarray(a_diag, dtype=np.float64)
    r = np.asarray(r_diag, dtype=np.float64)
    if a.shape != r.shape:
        raise DimensionError("A and R diagonals must have the same length")
    if np.any(a <= 0) or np.any(r <= 0):
        raise SingularOperatorError("operators must have trivial kernels (all diagonal entries > 0)")
    return a / np.sqrt(r)


def simulate_observation(signal: SignalVector, model: SequenceModel, seed: int) -> np.ndarray:
    if signal.dim != model.dim:
        raise DimensionError(f"signal has {signal.dim} coordinates, model {model.dim}")
    rng = np.random.default_rng(seed)
    return model.scales * signal.coeffs + model.epsilon * rng.standard_normal(model.dim)


def simulate_many(signal: SignalVector, model: SequenceModel, replicas: int, seed: int,
                  key: tuple = ()) -> np.ndarray:
    """(replicas, dim) observations, block-seeded."""
    if signal.dim != model.dim:
        raise DimensionError(f"signal has {signal.dim} coordinates, model {model.dim}")
    mean = model.scales * signal.coeffs

    def block(rng, size):
        return mean + model.epsilon * rng.standard_normal((size, model.dim))

    return _mc.map_blocks(block, replicas, seed, key)


def simulate_ill_posed_raw(x: SignalVector, a_diag, r_diag, epsilon: float, replicas: int,
                           seed: int, key: tuple = ()) -> np.ndarray:
    """Raw observations ``Y = A x + eps R^{1/2} xi`` (before whitening)."""
    a = np.asarray(a_diag, dtype=np.float64)
    sr = np.sqrt(np.asarray(r_diag, dtype=np.float64))

    def block(rng, size):
        return a * x.coeffs + epsilon * sr * rng.standard_normal((size, x.dim))

    return _mc.map_blocks(block, replicas, seed, key)


def projection_gap(f0: Sequence[SignalVector], f1: Sequence[SignalVector], gamma_dims,
                   scales=None) -> float:
    """Smallest Euclidean distance between projected cross pairs."""
    m0, m1 = _stack(f0), _stack(f1)
    if m0.shape[1] != m1.shape[1]:
        raise DimensionError("families have different dimensions")
    dims = list(gamma_dims)
    if scales is not None:
        s = np.asarray(scales, dtype=np.float64)
        m0, m1 = m0 * s, m1 * s
    d = m0[:, None, dims] - m1[None, :, dims]
    return float(np.sqrt((d ** 2).sum(axis=2)).min())


def build_projection_test(f0, f1, gamma_dims, scales=None) -> ProjectionTestSpec:
    """Centers at the projected F0 means; acceptance radius half the cross gap."""
    gap = projection_gap(f0, f1, gamma_dims, scales)
    if gap <= 1e-12:
        raise NoSeparation("projected families intersect")
    m0 = _stack(f0)
    if scales is not None:
        m0 = m0 * np.asarray(scales, dtype=np.float64)
    return ProjectionTestSpec(tuple(gamma_dims), m0[:, list(gamma_dims)], gap / 2.0)


def projection_statistic(y, spec: ProjectionTestSpec) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    proj = y[:, list(spec.gamma_dims)]
    d2 = ((proj[:, None, :] - spec.centers[None, :, :]) ** 2).sum(axis=2)
    return np.sqrt(d2.min(axis=1))


def projection_test(y, spec: ProjectionTestSpec):
    """Reject (1) when the projection is farther than ``rho`` from every center."""
    stat = projection_statistic(y, spec)
    out = (stat > spec.rho).astype(np.int64)
    return int(out[0]) if np.ndim(y) == 1 else out


def one_sided_test(y, center: float, coordinate: int, epsilon: float, alpha: float):
    """Level-alpha test of ``mean = center`` against larger means on one coordinate."""
    y = np.asarray(y, dtype=np.float64)
    crit = stats.norm.ppf(1.0 - alpha)
    return ((y[..., coordinate] - center) / epsilon > crit).astype(np.int64)


def one_sided_power_beta(a: float, epsilon: float, alpha: float) -> float:
    """Type II error Phi(z_{1-alpha} - a/eps) of the one-sided test."""
    return float(stats.norm.cdf(stats.norm.ppf(1.0 - alpha) - a / epsilon))


def projection_errors(spec: ProjectionTestSpec, f0, f1, model: SequenceModel,
                      replicas: int, seed: int, key: tuple = ()):
    """Worst-case Monte Carlo errors and their standard errors: (alpha, beta, se_a, se_b)."""
    alphas = []
    for i, s in enumerate(f0):
        y = simulate_many(s, model, replicas, seed, key + (0, i))
        alphas.append(float(projection_test(y, spec).mean()))
    betas = []
    for i, s in enumerate(f1):
        y = simulate_many(s, model, replicas, seed, key + (1, i))
        betas.append(float(1.0 - projection_test(y, spec).mean()))
    a, b = max(alphas), max(betas)
    return a, b, _mc.proportion_stderr(a, replicas), _mc.proportion_stderr(b, replicas)


def gaussian_mixture_second_moment(s0: SignalVector, family: Sequence[SignalVector],
                                   epsilon: float, n_effective: float = 1.0) -> float:
    """E[(I_m - 1)^2] for the uniform mixture likelihood ratio against ``s0``.

    Uses E[L_j L_k] = exp(n <S_j - S0, S_k - S0> / eps^2), summed in log space.
    """
    m = _stack(family)
    if m.shape[1] != s0.dim:
        raise DimensionError("family and reference signal differ in dimension")
    d = m - s0.coeffs
    gram = (d @ d.T) * (n_effective / epsilon ** 2)
    size = gram.shape[0]
    log_mean = special.logsumexp(gram) - 2.0 * math.log(size)
    # m^-2 sum exp(G) - 2 + 1
    return float(math.expm1(log_mean)) if log_mean < 700 else math.inf


def mc_mixture_second_moment(s0: SignalVector, family: Sequence[SignalVector], epsilon: float,
                             replicas: int, seed: int, n_effective: float = 1.0):
    """Monte Carlo estimate of E[(I_m - 1)^2] under ``s0``: (estimate, stderr)."""
    m = _stack(family)
    d = m - s0.coeffs
    eps2 = epsilon ** 2 / n_effective
    half_norms = 0.5 * (d ** 2).sum(axis=1) / eps2
    sd = math.sqrt(eps2)

    def block(rng, size):
        noise = sd * rng.standard_normal((size, s0.dim))
        log_l = noise @ d.T / eps2 - half_norms
        i_m = np.exp(special.logsumexp(log_l, axis=1) - math.log(d.shape[0]))
        return (i_m - 1.0) ** 2

    vals = _mc.map_blocks(block, replicas, seed, (7,))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(replicas))


def separation_decision(f0, f1, gamma_dims, scales=None) -> bool:
    """True when the projected (and optionally rescaled) families are disjoint."""
    return projection_gap(f0, f1, gamma_dims, scales) > 1e-12


def _projected_distances(f0, f1, dims, scales=None) -> np.ndarray:
    m0, m1 = _stack(f0), _stack(f1)
    if scales is not None:
        s = np.asarray(scales, dtype=np.float64)
        m0, m1 = m0 * s, m1 * s
    d = m0[:, None, dims] - m1[None, :, dims]
    return np.sqrt((d ** 2).sum(axis=2))


def greedy_gamma(f0, f1, max_dims: int, scales=None):
    """Coordinates added one at a time to maximize the projected cross gap.

    Ties (common while some pair still projects to one point) are broken by
    the number of separated pairs, then by the total projected distance.
    """
    dim = _stack(f0).shape[1]
    chosen = []
    best = (0.0, 0, 0.0)
    for _ in range(min(max_dims, dim)):
        trial = []
        for j in range(dim):
            if j in chosen:
                continue
            d = _projected_distances(f0, f1, chosen + [j], scales)
            trial.append(((float(d.min()), int((d > 1e-12).sum()), float(d.sum())), j))
        score, j = max(trial)
        if chosen and score[0] <= best[0] + 1e-15 and score[1] <= best[1]:
            break
        chosen.append(j)
        best = score
    return chosen, best[0]
