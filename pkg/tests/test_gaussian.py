import math

import numpy as np
import pytest
from scipy import stats

from distlab import gaussian as G
from distlab.errors import DimensionError, NoSeparation, SingularOperatorError


def e(j, d, amp=1.0):
    return G.SignalVector.basis(j, d, amp)


# -- oracles ------------------------------------------------------------------------

def test_one_sided_beta_formula():
    beta = G.one_sided_power_beta(1.0, 0.5, 0.05)
    assert math.isclose(beta, stats.norm.cdf(stats.norm.ppf(0.95) - 2.0), rel_tol=1e-12)
    assert abs(beta - 0.3612) <= 2e-4


def test_one_sided_beta_monte_carlo():
    model = G.SequenceModel.white(0.5, 1)
    y = G.simulate_many(G.SignalVector([1.0]), model, 40_000, seed=3)
    beta_hat = 1 - G.one_sided_test(y, 0.0, 0, 0.5, 0.05).mean()
    beta = G.one_sided_power_beta(1.0, 0.5, 0.05)
    assert abs(beta_hat - beta) <= 4 * math.sqrt(beta * (1 - beta) / 40_000)


def test_orthogonal_mixture_second_moment():
    m, eps = 100, 0.7
    s0 = G.SignalVector(np.zeros(m))
    fam = [e(j, m, eps) for j in range(m)]  # |S_j - S0|^2 = eps^2
    val = G.gaussian_mixture_second_moment(s0, fam, eps)
    assert math.isclose(val, (math.e - 1) / 100, rel_tol=1e-12)
    # explicit double sum of exp(<S_j, S_k> / eps^2)
    gram = np.eye(m)
    direct = np.exp(gram).sum() / m ** 2 - 1
    assert math.isclose(val, direct, rel_tol=1e-12)


def test_mixture_second_moment_monte_carlo():
    m, eps = 10, 1.0
    s0 = G.SignalVector(np.zeros(m))
    fam = [e(j, m, 0.8) for j in range(m)]
    exact = G.gaussian_mixture_second_moment(s0, fam, eps)
    est, se = G.mc_mixture_second_moment(s0, fam, eps, 100_000, seed=1)
    assert math.isclose(exact, math.expm1(0.64) / m, rel_tol=1e-12)
    assert abs(est - exact) <= 4 * se


def test_observation_moments():
    y = G.simulate_many(G.SignalVector(np.zeros(3)), G.SequenceModel.white(1.0, 3), 100_000, seed=0)
    assert np.all(np.abs(y.mean(axis=0)) <= 4 / math.sqrt(100_000))
    model = G.SequenceModel(1e-9, [2.0, 1.0])
    y = G.simulate_observation(G.SignalVector([1.0, 0.5]), model, seed=2)
    np.testing.assert_allclose(y, [2.0, 0.5], atol=1e-6)


# -- behaviour -------------------------------------------------------------------------

def test_whiten():
    np.testing.assert_array_equal(G.whiten(np.ones(3), np.ones(3)), np.ones(3))
    np.testing.assert_allclose(G.whiten(1 / np.arange(1, 5), np.ones(4)), [1, 1 / 2, 1 / 3, 1 / 4])
    np.testing.assert_allclose(G.whiten(np.ones(2), np.full(2, 4.0)), [0.5, 0.5])
    with pytest.raises(SingularOperatorError):
        G.whiten([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(DimensionError):
        G.whiten([1.0], [1.0, 1.0])


def test_projection_gap():
    d = 4
    z = [G.SignalVector(np.zeros(d))]
    assert G.projection_gap(z, [e(0, d)], [0]) == 1
    assert G.projection_gap(z, [e(1, d)], [0]) == 0
    assert math.isclose(G.projection_gap(z, [e(j, d, 0.3) for j in range(d)], range(d)), 0.3)


def test_projection_test_decisions():
    d = 3
    f0, f1 = [G.SignalVector(np.zeros(d))], [e(0, d, 2.0)]
    spec = G.build_projection_test(f0, f1, [0])
    assert spec.rho == 1.0
    assert G.projection_test(np.zeros(d), spec) == 0
    model = G.SequenceModel.white(1e-6, d)
    a, b, _, _ = G.projection_errors(spec, f0, f1, model, 10_000, seed=0)
    assert a == 0 and b == 0


def test_projection_requires_separation():
    d = 2
    with pytest.raises(NoSeparation):
        G.build_projection_test([G.SignalVector(np.zeros(d))], [e(1, d)], [0])


def test_heteroscedastic_bounds():
    model = G.SequenceModel.heteroscedastic(0.1, [0.5, 2.0], 0.5, 2.0)
    np.testing.assert_allclose(model.scales, [2.0, 0.5])
    with pytest.raises(ValueError):
        G.SequenceModel.heteroscedastic(0.1, [0.5, 3.0], 0.5, 2.0)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        G.simulate_observation(G.SignalVector([1.0]), G.SequenceModel.white(1.0, 2), 0)


def test_greedy_gamma_needs_two_coordinates():
    d = 4
    f0, f1 = [G.SignalVector(np.zeros(d))], [e(0, d), e(1, d)]
    gamma, gap = G.greedy_gamma(f0, f1, d)
    assert sorted(gamma) == [0, 1] and gap == 1.0


def test_errors_within_chi_envelope_and_vanish():
    # both errors need eps * |xi_Gamma| > rho, a chi tail with |Gamma| degrees of freedom
    d = 2
    f0, f1 = [G.SignalVector(np.zeros(d))], [e(0, d), e(1, d)]
    spec = G.build_projection_test(f0, f1, [0, 1])
    for eps in (1.0, 0.5, 0.2, 0.1):
        a, b, sa, sb = G.projection_errors(spec, f0, f1, G.SequenceModel.white(eps, d), 20_000, seed=4)
        env = stats.chi2.sf((spec.rho / eps) ** 2, 2)
        assert a <= env + 4 * sa and b <= env + 4 * sb
    assert a < 1e-3 and b < 1e-2
