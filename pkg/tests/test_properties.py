import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from distlab import kraft as K
from distlab import measures as M

N_CELLS = 16

weights = arrays(np.float64, N_CELLS, elements=st.floats(0.0, 1.0)).filter(lambda w: w.sum() > 1e-3)


def prob(w):
    return M.GridMeasure(w / w.sum())


@settings(max_examples=50, deadline=None)
@given(weights, weights, weights)
def test_tv_is_a_metric(a, b, c):
    p, q, r = prob(a), prob(b), prob(c)
    assert 0 <= M.total_variation(p, q) <= 1 + 1e-12
    assert abs(M.total_variation(p, q) - M.total_variation(q, p)) <= 1e-15
    assert M.total_variation(p, r) <= M.total_variation(p, q) + M.total_variation(q, r) + 1e-12


@settings(max_examples=50, deadline=None)
@given(weights, weights, st.integers(0, 4))
def test_tau_below_twice_tv(a, b, r):
    p, q = prob(a), prob(b)
    assert M.tau_discrepancy(p, q, r) <= 2 * M.total_variation(p, q) + 1e-12


@settings(max_examples=50, deadline=None)
@given(weights, weights, st.floats(0, 1))
def test_mixture_linearity(a, b, t):
    p, q = prob(a), prob(b)
    mix = M.mixture(M.DensityFamily([p, q]), [t, 1 - t])
    np.testing.assert_allclose(mix.weights, t * p.weights + (1 - t) * q.weights, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(weights, min_size=1, max_size=3), st.lists(weights, min_size=1, max_size=3), weights)
def test_hull_symmetric_and_monotone(w0, w1, extra):
    f0 = M.DensityFamily([prob(w) for w in w0])
    f1 = M.DensityFamily([prob(w) for w in w1])
    v = K.hull_min_tv(f0, f1).value
    assert abs(v - K.hull_min_tv(f1, f0).value) <= 1e-8
    # enlarging a family can only shrink the hull distance
    bigger = M.DensityFamily([prob(w) for w in w0] + [prob(extra)])
    assert K.hull_min_tv(bigger, f1).value <= v + 1e-8
    # and it never exceeds the best pairwise distance
    assert v <= min(M.total_variation(p, q) for p in f0 for q in f1) + 1e-9


@settings(max_examples=30, deadline=None)
@given(weights, weights)
def test_discrepancies_sandwich_wasserstein(a, b):
    # on [0, 1): W1 <= TV (diameter one), and each dyadic discrepancy is at most TV
    p, q = prob(a), prob(b)
    tv = M.total_variation(p, q)
    assert M.wasserstein1(p, q) <= tv + 1e-12
    assert M.tau_discrepancy(p, q, 4) <= 2 * tv + 1e-12
