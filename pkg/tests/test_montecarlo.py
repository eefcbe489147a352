import math

import numpy as np
import pytest

from riscover.channel import ChannelParams, link_budget
from riscover.coverage import CoverageQuery, DofVariant, coverage_pair, mean_from_budget, variance_from_budget
from riscover.geometry import ScenarioConfig, nearest_slot
from riscover.montecarlo import CHUNK, empirical_channel_moments, empirical_coverage
from riscover.optimizer import local_search_budget

CFG = ScenarioConfig(num_elements=4)
SLOT = nearest_slot(CFG)
PARAMS = ChannelParams()
LOS = ChannelParams(kappa_direct=math.inf, kappa_bs_ris=math.inf, kappa_ris_mr=math.inf)
THETA = np.zeros(4)
NOISE = 7.96e-13
# power at which the mean channel alone just meets a 60 dB threshold
P_EDGE = 1e6 * NOISE / abs(mean_from_budget(link_budget(CFG, PARAMS, SLOT), THETA)) ** 2


def test_zero_threshold_always_covered():
    est = empirical_coverage(CFG, PARAMS, SLOT, THETA, CoverageQuery(1e-3, 1e-12, 0.0), 2000, 1)
    assert est.value == 1.0 and est.stderr == 0.0


def test_deterministic_channel_is_zero_or_one():
    for th in (1e2, 1e12):
        est = empirical_coverage(CFG, LOS, SLOT, THETA, CoverageQuery(1e-3, 7.96e-13, th), 2000, 4)
        assert est.value in (0.0, 1.0)


def test_stderr_formula():
    q = CoverageQuery(P_EDGE, NOISE, 1e6)
    est = empirical_coverage(CFG, PARAMS, SLOT, THETA, q, 5000, 2)
    assert 0 < est.value < 1
    assert est.stderr == pytest.approx(math.sqrt(est.value * (1 - est.value) / 5000))
    assert (est.trials, est.seed) == (5000, 2)


def test_reproducible_across_workers_and_chunking():
    q = CoverageQuery(P_EDGE, NOISE, 1e6)
    n = 3 * CHUNK + 123
    a = empirical_coverage(CFG, PARAMS, SLOT, THETA, q, n, 9, workers=1)
    b = empirical_coverage(CFG, PARAMS, SLOT, THETA, q, n, 9, workers=4)
    assert a == b
    m1 = empirical_channel_moments(CFG, PARAMS, SLOT, THETA, 20_000, 9, workers=1)
    m2 = empirical_channel_moments(CFG, PARAMS, SLOT, THETA, 20_000, 9, workers=3)
    assert m1 == m2


def test_different_seeds_differ():
    q = CoverageQuery(P_EDGE, NOISE, 1e6)
    a = empirical_coverage(CFG, PARAMS, SLOT, THETA, q, 20_000, 1)
    b = empirical_coverage(CFG, PARAMS, SLOT, THETA, q, 20_000, 2)
    assert a.value != b.value


def test_trial_minimums():
    q = CoverageQuery(1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        empirical_coverage(CFG, PARAMS, SLOT, THETA, q, 999, 1)
    with pytest.raises(ValueError):
        empirical_channel_moments(CFG, PARAMS, SLOT, THETA, 9_999, 1)


def test_los_limit_moments_exact():
    m = empirical_channel_moments(CFG, LOS, SLOT, THETA, 10_000, 3)
    assert m.variance == 0.0
    assert m.mean == mean_from_budget(link_budget(CFG, LOS, SLOT), THETA)


def test_centered_gaussian_mean():
    cfg = CFG.with_(num_elements=0)
    p = ChannelParams(kappa_direct=0.0)
    m = empirical_channel_moments(cfg, p, SLOT, [], 100_000, 5)
    assert abs(m.mean) <= 4 * m.mean_stderr


def test_reference_moments_exact_variance():
    cfg = ScenarioConfig(num_elements=16)
    bud = link_budget(cfg, PARAMS, SLOT)
    theta = local_search_budget(bud, 3)
    m = empirical_channel_moments(cfg, PARAMS, SLOT, theta, 100_000, 11)
    assert abs(m.mean - mean_from_budget(bud, theta.values)) <= 4 * m.mean_stderr
    assert abs(m.variance - variance_from_budget(bud, "exact")) <= 4 * m.variance_stderr


def test_noncentrality_from_moments():
    cfg = ScenarioConfig(num_elements=16)
    bud = link_budget(cfg, PARAMS, SLOT)
    theta = local_search_budget(bud, 3)
    m = empirical_channel_moments(cfg, PARAMS, SLOT, theta, 100_000, 12)
    zeta = abs(mean_from_budget(bud, theta.values)) ** 2 / variance_from_budget(bud, "exact")
    assert abs(m.mean) ** 2 / m.variance == pytest.approx(zeta, rel=0.02)


def test_complex_variant_tracks_oracle_small_scale():
    # a plain Rician direct link: no products of Gaussians, so nu=2 is exact
    cfg = CFG.with_(num_elements=0)
    bud = link_budget(cfg, PARAMS, SLOT)
    mu2 = abs(bud.direct_los) ** 2
    var = variance_from_budget(bud)
    for dbm in (-40.0, -38.5, -37.0):
        q = CoverageQuery(10 ** (dbm / 10 - 3), 7.96e-13, 1e6)
        est = empirical_coverage(cfg, PARAMS, SLOT, [], q, 200_000, 21)
        nu2 = coverage_pair(mu2, var, q, DofVariant.COMPLEX_NU2)[0]
        assert abs(nu2 - est.value) <= 3 * max(est.stderr, 1 / 200_000)


def test_stderr_bound_at_million():
    # worst case p = 1/2
    assert math.sqrt(0.25 / 1e6) <= 5e-4
