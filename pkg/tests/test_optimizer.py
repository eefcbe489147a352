import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from riscover.channel import ChannelParams, link_budget
from riscover.coverage import CoverageQuery, mean_from_budget
from riscover.geometry import ScenarioConfig, nearest_slot
from riscover.optimizer import (MAX_EXHAUSTIVE, PhaseVector, alignment_from_budget,
                                continuous_alignment, coverage_objective, exhaustive_search,
                                exhaustive_search_budget, initial_phases, local_search,
                                local_search_budget, objective_value, phase_grid, quantize,
                                quantize_phase, random_phases)

PARAMS = ChannelParams()


def instance(seed: int, n: int):
    gen = np.random.default_rng(seed)
    cfg = ScenarioConfig(num_elements=n, num_slots=1,
                         bs_ris_horizontal_m=float(gen.uniform(-300, 300)),
                         mr_initial_along_track_m=float(gen.uniform(-300, 300)))
    return link_budget(cfg, PARAMS, 0)


def brute_force(budget, b):
    # independent reimplementation: plain loops over every grid vector
    grid = [2 * math.pi * k / 2 ** b for k in range(2 ** b)]
    best, arg = -1.0, None
    for combo in itertools.product(range(2 ** b), repeat=budget.num_elements):
        mu = budget.direct_los
        for n, k in enumerate(combo):
            mu += budget.ris_mr_los[n] * budget.bs_ris_los[n] * complex(math.cos(grid[k]),
                                                                        math.sin(grid[k]))
        if abs(mu) ** 2 > best:
            best, arg = abs(mu) ** 2, combo
    return best, arg


def test_phase_grid_examples():
    np.testing.assert_allclose(phase_grid(1), [0, math.pi])
    np.testing.assert_allclose(phase_grid(2), [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    g3 = phase_grid(3)
    assert len(g3) == 8 and np.allclose(np.diff(g3), math.pi / 4)
    for b in (0, 17, 2.5):
        with pytest.raises(ValueError):
            phase_grid(b)


@given(st.integers(1, 16))
def test_phase_vector_invariants(b):
    v = PhaseVector(np.zeros(3, dtype=int), b)
    assert v.levels == 2 ** b and abs(v.step * v.levels - 2 * math.pi) <= 1e-12


def test_phase_vector_rejects_off_grid():
    with pytest.raises(ValueError):
        PhaseVector(np.array([0, 2]), 1)
    with pytest.raises(ValueError):
        PhaseVector.from_values([0.1], 2)
    assert PhaseVector.from_values([0.0, math.pi], 1) == PhaseVector(np.array([0, 1]), 1)


def test_quantize_examples():
    assert quantize_phase(math.pi / 3, 1) == 0.0
    assert quantize_phase(math.pi / 2, 1) == 0.0
    assert quantize_phase(3 * math.pi / 2, 1) == 0.0  # tie between pi and 2*pi == 0
    assert quantize_phase(-0.1, 2) == 0.0
    assert quantize_phase(2.0, 1) == math.pi


@given(st.floats(-50, 50), st.integers(1, 16))
def test_quantize_error_bound(theta, b):
    q = quantize_phase(theta, b)
    err = abs((theta - q + math.pi) % (2 * math.pi) - math.pi)
    assert err <= math.pi / 2 ** b + 1e-9


def test_alignment_is_coherent():
    cfg = ScenarioConfig()
    slot = nearest_slot(cfg)
    b = link_budget(cfg, PARAMS, slot)
    theta = continuous_alignment(cfg, PARAMS, slot)
    mu = mean_from_budget(b, theta)
    assert abs(mu) == pytest.approx(abs(b.direct_los) + np.abs(b.cascaded_los).sum(), rel=1e-12)
    for n in (0, 7, 15):
        for delta in (1e-3, -0.5, 2.0):
            t = theta.copy()
            t[n] += delta
            assert abs(mean_from_budget(b, t)) < abs(mu)


def test_alignment_trivial_phases():
    b = instance(0, 1)
    b0 = b.__class__(abs(b.direct_los), b.direct_nlos, np.abs(b.bs_ris_los), b.bs_ris_nlos,
                     np.abs(b.ris_mr_los), b.ris_mr_nlos, 0.0, np.zeros(1), np.zeros(1))
    assert alignment_from_budget(b0)[0] == 0.0


@pytest.mark.parametrize("b", [1, 2, 3, 4])
def test_single_element_local_equals_exhaustive(b):
    for seed in range(10):
        bud = instance(seed, 1)
        assert local_search_budget(bud, b) == exhaustive_search_budget(bud, b)


def test_two_elements_one_bit_across_100_instances():
    for seed in range(100):
        bud = instance(seed, 2)
        ls = objective_value(bud, local_search_budget(bud, 1))
        best, _ = brute_force(bud, 1)
        assert ls == pytest.approx(best, rel=1e-12)


def test_exhaustive_matches_brute_force():
    for seed in range(20):
        bud = instance(1000 + seed, 3)
        best, arg = brute_force(bud, 2)
        ex = exhaustive_search_budget(bud, 2)
        assert objective_value(bud, ex) == pytest.approx(best, rel=1e-12)
        assert tuple(ex.indices) == arg


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 12), st.integers(1, 4),
       st.sampled_from(["alignment", "zeros", "random"]))
def test_search_never_worse_than_start(seed, n, b, init):
    bud = instance(seed, n)
    start = initial_phases(bud, b, init, seed)
    out = local_search_budget(bud, b, start)
    assert objective_value(bud, out) >= objective_value(bud, start)
    conv = local_search_budget(bud, b, start, converge=True)
    assert objective_value(bud, conv) >= objective_value(bud, out) * (1 - 1e-12)


def test_exhaustive_dominates_local():
    for seed in range(30):
        bud = instance(seed, 4)
        assert objective_value(bud, exhaustive_search_budget(bud, 2)) >= \
            objective_value(bud, local_search_budget(bud, 2)) * (1 - 1e-12)


def test_exhaustive_guard():
    bud = instance(0, 11)
    with pytest.raises(OverflowError):
        exhaustive_search_budget(bud, 2)  # 4^11 > 2^20
    assert 4 ** 10 == MAX_EXHAUSTIVE


def test_exhaustive_lexicographic_ties():
    cfg = ScenarioConfig(num_elements=2)
    p = ChannelParams(kappa_direct=0.0, kappa_bs_ris=0.0, kappa_ris_mr=0.0)
    # every vector scores zero: the smallest list wins
    assert exhaustive_search(cfg, p, 0, 2).indices.tolist() == [0, 0]


def test_off_grid_initial_rejected():
    bud = instance(0, 2)
    with pytest.raises(ValueError):
        local_search_budget(bud, 2, [0.3, 0.0])
    with pytest.raises(ValueError):
        local_search_budget(bud, 2, PhaseVector(np.array([0, 1]), 3))


def test_random_phases_reproducible_and_on_grid():
    a, b = random_phases(3, 16, seed=5), random_phases(3, 16, seed=5)
    assert a == b and a != random_phases(3, 16, seed=6)
    one = random_phases(1, 1, seed=0)
    assert one.values[0] in (0.0, math.pi)


def test_random_phases_uniform():
    draws = random_phases(3, 100_000, seed=11).indices
    counts = np.bincount(draws, minlength=8)
    assert stats.chisquare(counts).pvalue > 1e-3


def test_coverage_objective_same_argmax():
    cfg = ScenarioConfig(num_elements=3)
    slot = nearest_slot(cfg)
    bud = link_budget(cfg, PARAMS, slot)
    q = CoverageQuery(10 ** -1.6, 7.96e-13, 1e6)
    obj = coverage_objective(bud, q)
    a = exhaustive_search_budget(bud, 2)
    c = exhaustive_search_budget(bud, 2, obj)
    assert objective_value(bud, c, obj) == pytest.approx(objective_value(bud, a, obj), abs=1e-12)
    assert objective_value(bud, local_search_budget(bud, 2, objective=obj), obj) <= 1.0


def test_random_order_and_wrappers():
    cfg = ScenarioConfig(num_elements=5)
    out = local_search(cfg, PARAMS, 10, 2, order="random", seed=3, converge=True)
    assert len(out) == 5
    with pytest.raises(ValueError):
        local_search(cfg, PARAMS, 10, 2, order="sideways")


def test_bits_gap_shrinks():
    cfg = ScenarioConfig()
    slot = nearest_slot(cfg)
    bud = link_budget(cfg, PARAMS, slot)
    cont = objective_value(bud, alignment_from_budget(bud))
    vals = {b: objective_value(bud, local_search_budget(bud, b)) for b in (1, 3, 5, 8)}
    assert vals[3] - vals[1] > vals[5] - vals[3] >= 0
    assert vals[8] == pytest.approx(cont, rel=1e-3)
    quant = quantize(alignment_from_budget(bud), 3)
    assert vals[3] >= objective_value(bud, quant)
