import math

import numpy as np
import pytest
from scipy import stats

from distlab import measures as M
from distlab import partition as P
from distlab import poisson as PP
from distlab.errors import NoSeparation

N = 256


# -- oracles ------------------------------------------------------------------------

def test_tail_bound_formula():
    upper = math.exp(-10 * (2 * math.log(2) - 1))
    lower = math.exp(-10)
    assert math.isclose(PP.poisson_tail_bound(1.0, 1.0, 10), upper + lower, rel_tol=1e-12)
    assert abs(upper - 0.0210) <= 1e-4 and abs(lower - 4.54e-5) <= 1e-7
    assert abs(PP.poisson_tail_bound(1.0, 1e-9, 10) - 2.0) <= 1e-12


def test_tail_bound_exceeds_exact_poisson_tail():
    for mu, d, n in [(0.5, 0.25, 8), (1.0, 0.5, 20), (2.0, 3.0, 3)]:
        lam = n * mu
        exact = stats.poisson.sf(math.floor(n * (mu + d)), lam) + stats.poisson.cdf(math.ceil(n * (mu - d)) - 1, lam)
        assert exact <= PP.poisson_tail_bound(mu, d, n)


def test_moment_identity_closed_forms():
    s1, s2 = PP.sine_intensity(1, N), PP.sine_intensity(2, N)
    one = PP.constant_intensity(1.0, N)
    assert math.isclose(PP.moment_identity_rhs(s1, s1), math.exp(0.5), rel_tol=1e-12)
    assert math.isclose(PP.moment_identity_rhs(s1, s2), 1.0, rel_tol=1e-12)
    assert PP.moment_identity_rhs(one, s1) == 1.0


def test_moment_identity_monte_carlo():
    s1, s2 = PP.sine_intensity(1, N), PP.sine_intensity(2, N)
    est, se = PP.mc_moment_identity(s1, s1, 1, 100_000, seed=0)
    assert abs(est - math.exp(0.5)) <= 4 * se
    est, se = PP.mc_moment_identity(s1, s2, 1, 100_000, seed=1)
    assert abs(est - 1.0) <= 4 * se
    one = PP.constant_intensity(1.0, N)
    est, se = PP.mc_moment_identity(one, one, 1, 1000, seed=2)
    assert est == 1.0 and se == 0.0


def test_likelihood_ratio_normalization():
    est, se = PP.mc_lr_normalization(PP.sine_intensity(1, N), 1, 100_000, seed=4)
    assert abs(est - 1.0) <= 4 * se


def test_bayes_collapse_oracles():
    closed = PP.bayes_collapse_curve(2, [10, 20, 100])
    assert math.isclose(closed[2], (math.e - 1) / 100, rel_tol=1e-12)
    assert math.isclose(closed[0], 2 * closed[1], rel_tol=1e-12)
    for m, cf in zip([10, 100], [closed[0], closed[2]]):
        assert abs(PP.bayes_collapse_double_sum(2, m, N) - cf) <= 1e-12
    est, se = PP.mc_bayes_collapse(2, 10, 100_000, seed=5, n_cells=N)
    assert abs(est - closed[0]) <= 4 * se


def test_partition_errors_within_tail_bound():
    f0 = M.DensityFamily([PP.constant_intensity(1.0, 16)], probability=False)
    f1 = M.DensityFamily([PP.constant_intensity(2.0, 16)], probability=False)
    whole = M.DyadicSet(np.arange(16))
    spec = P.PartitionTestSpec([whole], [[1.0]], 0.25, probability=False)
    rep = PP.poisson_partition_errors(spec, f0, f1, [100], 20_000, seed=0)
    env = PP.poisson_tail_bound(1.0, 0.25, 100)
    assert rep.alpha_hat[0] <= env and rep.beta_hat[0] <= env


def test_partition_errors_decay_for_sine_intensities():
    n_cells = 64
    f0 = M.DensityFamily([PP.constant_intensity(1.0, n_cells)], probability=False)
    f1 = M.DensityFamily([PP.sine_intensity(1, n_cells)], probability=False)
    sep = P.find_separating_sets(f0, f1, max_k=2)
    spec = P.build_test_from_families(f0, f1, sep.sets)
    rep = PP.poisson_partition_errors(spec, f0, f1, [25, 50, 100, 200], 100_000, seed=1)
    assert rep.fitted_rate > 0


# -- behaviour -------------------------------------------------------------------------

def test_sample_process_moments():
    model = PP.PoissonModel(PP.constant_intensity(1.0, 1))
    totals = PP.sample_counts_many(model.intensity, 10, 100_000, seed=3)[:, 0]
    assert abs(totals.mean() - 10) <= 4 * math.sqrt(10 / 100_000)
    # the sample variance of 1e5 Poisson(10) draws has sd about sqrt((10 + 2*100)/1e5)
    assert abs(totals.var(ddof=1) - 10) <= 4 * math.sqrt(210 / 100_000)
    w = np.ones(8) / 8
    w[3] = 0
    pat = PP.sample_process(PP.PoissonModel(M.GridMeasure(w)), 50, seed=1)
    assert pat.counts[3] == 0


def test_expected_total_scales_with_mass():
    lam = PP.constant_intensity(2.0, 8)
    totals = PP.sample_counts_many(lam, 5, 50_000, seed=7).sum(axis=1)
    assert abs(totals.mean() - 10) <= 4 * math.sqrt(10 / 50_000)


def test_log_likelihood_ratio_values():
    pat = PP.PointPattern(np.array([0, 2, 1, 0]), 1)
    assert PP.log_likelihood_ratio(pat, PP.constant_intensity(1.0, 4)) == 0.0
    empty = PP.PointPattern(np.zeros(4, dtype=int), 1)
    assert math.isclose(PP.log_likelihood_ratio(empty, PP.constant_intensity(2.0, 4)), -1.0)
    w = np.array([0.0, 0.5, 0.25, 0.25])
    assert PP.log_likelihood_ratio(PP.PointPattern(np.array([1, 0, 0, 0]), 1), M.GridMeasure(w)) == -math.inf


def test_sine_intensity_orthogonality():
    c = np.vstack([PP.sine_intensity(j, 64).density - 1 for j in (1, 2, 5)])
    np.testing.assert_allclose(c @ c.T / 64, 0.5 * np.eye(3), atol=1e-12)


def test_validation():
    with pytest.raises(ValueError):
        PP.sine_intensity(32, 64)
    with pytest.raises(ValueError):
        PP.poisson_tail_bound(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        PP.mc_moment_identity(PP.sine_intensity(1, 8), PP.sine_intensity(1, 8), 1, 10, 0)
    with pytest.raises(ValueError):
        PP.bayes_collapse_double_sum(2, 200, 256)
    f = M.DensityFamily([PP.constant_intensity(1.0, 8)], probability=False)
    with pytest.raises(NoSeparation):
        P.build_test_from_families(f, f, [M.DyadicSet([0])])
