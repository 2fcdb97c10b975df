import math

import numpy as np
import pytest

from distlab import deconvolve as D
from distlab import kraft as K
from distlab import measures as M
from distlab.acceptance import null_space_fixture
from distlab.errors import DimensionError

N = 256


def gauss_mag(sigma, j):
    return math.exp(-0.5 * sigma ** 2 * (2 * math.pi * j) ** 2)


# -- oracles ------------------------------------------------------------------------

def test_gaussian_kernel_transform():
    k = D.gaussian_kernel(0.1, N)
    assert abs(k.fourier_mags[1] - gauss_mag(0.1, 1)) <= 1e-9
    assert abs(k.fourier_mags[1] - 0.8208) <= 1e-4
    assert abs(D.check_kernel_invertibility(k, 4) - gauss_mag(0.1, 4)) <= 1e-9


def test_convolution_is_fourier_multiplier():
    k = D.gaussian_kernel(0.1, N)
    out = D.convolve(k, M.sine_density(1, N))
    np.testing.assert_allclose(out.weights, D.convolve_direct(k, M.sine_density(1, N)), atol=1e-15)
    # the sine component is scaled by |g_hat(1)|; the kernel is symmetric so no phase shift
    expected = 1 / N + k.fourier_mags[1] * (M.sine_density(1, N).weights - 1 / N)
    np.testing.assert_allclose(out.weights, expected, atol=1e-15)


def test_lifted_tv():
    k = D.gaussian_kernel(0.1, 4096)
    f0 = M.DensityFamily([M.uniform(4096)])
    f1 = M.DensityFamily([M.sine_density(1, 4096)])
    l0, l1 = D.lift_families(f0, f1, k)
    tv = M.total_variation(l0[0], l1[0])
    assert abs(tv - k.fourier_mags[1] / math.pi) <= 1e-3
    assert abs(tv - 0.2613) <= 1e-3


def test_fft_matches_direct_sum_random():
    rng = np.random.default_rng(0)
    g = M.GridMeasure(rng.dirichlet(np.ones(64)))
    f = M.GridMeasure(rng.dirichlet(np.ones(64)))
    np.testing.assert_allclose(D.convolve(D.Kernel(g), f).weights, D.convolve_direct(D.Kernel(g), f), atol=1e-15)


# -- behaviour -------------------------------------------------------------------------

def test_trivial_kernels():
    f = M.sine_density(3, N)
    np.testing.assert_allclose(D.convolve(D.point_kernel(N), f).weights, f.weights, atol=1e-15)
    np.testing.assert_allclose(D.convolve(D.uniform_kernel(N), f).weights, 1 / N, atol=1e-15)
    assert D.check_kernel_invertibility(D.point_kernel(N), 10) == pytest.approx(1.0)
    assert D.check_kernel_invertibility(D.uniform_kernel(N), 1) <= 1e-15


def test_identity_kernel_leaves_families():
    f0, f1 = M.sine_family([1], N), M.sine_family([2, 3], N)
    l0, l1 = D.lift_families(f0, f1, D.point_kernel(N))
    np.testing.assert_allclose(l0.matrix, f0.matrix, atol=1e-15)
    np.testing.assert_allclose(l1.matrix, f1.matrix, atol=1e-15)


def test_killed_frequency_makes_lifted_families_identical():
    f0, f1, kernel = null_space_fixture(N)
    lifted = D.lift_families(f0, f1, kernel)
    np.testing.assert_allclose(lifted.f0.matrix, lifted.f1.matrix, atol=1e-15)
    assert lifted.warning is not None


def test_decisions():
    k = D.gaussian_kernel(0.1, 64)
    f0 = M.DensityFamily([M.uniform(64)])
    f1 = M.sine_family([1, 2], 64)
    v_theta, v_lambda, agree = D.deconv_decision(f0, f1, k)
    assert agree and v_theta.kind is v_lambda.kind is K.VerdictKind.SEPARATION
    v_theta, v_lambda, agree = D.deconv_decision(f1, f1, k)
    assert agree and v_theta.kind is K.VerdictKind.INDISTINGUISHABLE


def test_null_space_disagreement():
    f0, f1, kernel = null_space_fixture(64)
    dec = D.deconv_decision(f0, f1, kernel)
    assert not dec.agree and not dec.invertible and dec.warnings
    assert dec.verdict_theta.kind is K.VerdictKind.SEPARATION
    assert dec.verdict_lambda.kind is K.VerdictKind.INDISTINGUISHABLE


def test_working_band_and_parse():
    f0, f1 = M.sine_family([1], 64), M.sine_family([3], 64)
    assert D.working_band(f0, f1) == 3
    assert D.parse_kernel("gauss:0.2", 64).name == "gauss:0.2"
    with pytest.raises(ValueError):
        D.parse_kernel("box", 64)
    with pytest.raises(DimensionError):
        D.convolve(D.point_kernel(8), M.uniform(16))
