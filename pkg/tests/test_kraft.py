import math

import numpy as np
import pytest

from distlab import kraft as K
from distlab import measures as M
from distlab.acceptance import brute_force_hull
from distlab.errors import DimensionError, SolverNotConverged


def _singleton(p):
    return M.DensityFamily([p])


# -- oracles ------------------------------------------------------------------------

def test_uniform_vs_two_sines_matches_line_search():
    f0 = _singleton(M.uniform(256))
    f1 = M.sine_family([1, 2], 256)
    u, s1, s2 = f0.matrix[0], f1.matrix[0], f1.matrix[1]
    grid = np.linspace(0, 1, 100_001)
    brute = min(0.5 * np.abs(u - (a * s1 + (1 - a) * s2)).sum() for a in grid)
    coarse = min(0.5 * np.abs(u - (a * s1 + (1 - a) * s2)).sum() for a in np.linspace(0, 1, 101))
    res = K.hull_min_tv(f0, f1)
    assert abs(res.value - brute) <= 1e-6
    # the optimum (q ~ 0.5555) falls between points of the 0.01 grid
    assert res.value <= coarse + 1e-12 and coarse - res.value <= 1e-4


def test_sine_family_l2_bound_gives_kraft_bound():
    m = 1024
    f0 = _singleton(M.uniform(4096))
    f1 = M.sine_family(range(1, m + 1), 4096)
    assert K.kraft_lower_bound(f0, f1) >= 1 - (2 * m) ** -0.5


def test_certify_separated_pair_uses_half_interval():
    f0, f1 = _singleton(M.uniform(256)), _singleton(M.sine_density(1, 256))
    v = K.certify(f0, f1, K.CertifyConfig(max_k=1, max_resolution=1))
    assert v.kind is K.VerdictKind.SEPARATION
    assert abs(v.hull.value - 1 / math.pi) <= 1e-3
    assert abs(v.separation.gap - 1 / math.pi) <= 1e-3
    assert v.test.sets[0] == M.DyadicSet.dyadic(1, 0, 256)


@pytest.mark.slow
def test_certify_large_sine_family_indistinguishable():
    m = 4096
    f0 = _singleton(M.uniform(4 * m))
    f1 = M.sine_family(range(1, m + 1), 4 * m)
    v = K.certify(f0, f1, K.CertifyConfig(indist_threshold=0.02))
    assert v.kind is K.VerdictKind.INDISTINGUISHABLE
    assert v.hull.value <= (2 * m) ** -0.5


def test_matches_brute_force_on_random_families():
    rng = np.random.default_rng(3)
    for a, b in [(2, 2), (1, 3), (3, 2)]:
        f0 = M.DensityFamily(rng.dirichlet(np.ones(16), size=a))
        f1 = M.DensityFamily(rng.dirichlet(np.ones(16), size=b))
        assert abs(K.hull_min_tv(f0, f1).value - brute_force_hull(f0, f1)) <= 1e-4


# -- behaviour -------------------------------------------------------------------------

def test_trivial_cases():
    u = _singleton(M.uniform(8))
    assert K.hull_min_tv(u, u).value <= 1e-12
    a, b = _singleton(M.point_mass(0, 8)), _singleton(M.point_mass(1, 8))
    assert abs(K.hull_min_tv(a, b).value - 1) <= 1e-12
    assert abs(K.kraft_lower_bound(u, u) - 1) <= 1e-12
    assert K.kraft_lower_bound(a, b) <= 1e-12
    assert K.certify(u, u).kind is K.VerdictKind.INDISTINGUISHABLE


def test_first_order_agrees_with_lp():
    f0 = _singleton(M.uniform(256))
    f1 = M.sine_family([1, 2], 256)
    lp = K.hull_min_tv(f0, f1, method="lp")
    fo = K.hull_min_tv(f0, f1, method="first-order", max_iter=20_000)
    assert abs(lp.value - fo.value) <= 1e-8
    assert fo.gap_bound <= 1e-9


def test_first_order_reports_non_convergence():
    f0 = _singleton(M.uniform(256))
    f1 = M.sine_family([1, 2], 256)
    with pytest.raises(SolverNotConverged) as info:
        K.hull_min_tv(f0, f1, method="first-order", max_iter=5)
    exc = info.value
    # the reported weights are feasible and their value is an upper bound
    assert exc.value >= K.hull_min_tv(f0, f1).value - 1e-12
    assert math.isclose(exc.weights1.sum(), 1.0)


def test_dual_certificate_brackets_value():
    rng = np.random.default_rng(0)
    f0 = M.DensityFamily(rng.dirichlet(np.ones(32), size=3))
    f1 = M.DensityFamily(rng.dirichlet(np.ones(32), size=2))
    res = K.hull_min_tv(f0, f1)
    y = rng.uniform(-0.5, 0.5, 32)
    assert K.dual_lower_bound(f0.matrix.T, f1.matrix.T, y) <= res.value + 1e-12
    assert res.gap_bound <= 1e-9


def test_weights_reproduce_value():
    rng = np.random.default_rng(1)
    f0 = M.DensityFamily(rng.dirichlet(np.ones(16), size=3))
    f1 = M.DensityFamily(rng.dirichlet(np.ones(16), size=3))
    res = K.hull_min_tv(f0, f1)
    tv = M.total_variation(M.mixture(f0, res.weights0), M.mixture(f1, res.weights1))
    assert abs(tv - res.value) <= 1e-9


def test_grid_mismatch():
    with pytest.raises(DimensionError):
        K.hull_min_tv(_singleton(M.uniform(8)), _singleton(M.uniform(16)))


def test_unknown_verdict_when_sets_too_coarse():
    # the difference lives below the allowed resolution
    p = np.full(16, 1 / 16)
    q = p.copy()
    q[0] += 0.05
    q[1] -= 0.05
    v = K.certify(_singleton(M.GridMeasure(p)), _singleton(M.GridMeasure(q)),
                  K.CertifyConfig(indist_threshold=0.01, max_resolution=2))
    assert v.kind is K.VerdictKind.UNKNOWN


def test_verdict_json():
    f0, f1 = _singleton(M.uniform(64)), _singleton(M.sine_density(1, 64))
    out = K.certify(f0, f1).to_json()
    assert out["kind"] == "SeparationCertificate"
    assert {"value", "weights0", "weights1", "gap_bound", "test"} <= set(out)
