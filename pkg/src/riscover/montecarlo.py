"""Plain Monte Carlo estimates of coverage and equivalent-channel moments.

Trials are split into fixed blocks of ``CHUNK`` draws. Each block regenerates
its own counter-based streams, so a block's values depend only on
(seed, slot, link, trial). Blocks may run on any number of threads. Results
are combined in block order: integer counts for coverage, an ordered
concatenation for moments. Estimates are therefore bitwise reproducible.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, LinkBudget, effective_channel, link_budget, sample_links, snr
from .coverage import CoverageQuery
from .geometry import ScenarioConfig
from .optimizer import PhaseVector

CHUNK = 1 << 14
MIN_COVERAGE_TRIALS = 1_000
MIN_MOMENT_TRIALS = 10_000


@dataclass(frozen=True)
class EmpiricalEstimate:
    value: float
    stderr: float
    trials: int
    seed: int


@dataclass(frozen=True)
class ChannelMoments:
    mean: complex
    mean_stderr: float
    variance: float
    variance_stderr: float
    trials: int
    seed: int


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [(s, min(CHUNK, trials - s)) for s in range(0, trials, CHUNK)]


def _run(fn, blocks, workers: int):
    if workers <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def _phases(theta) -> np.ndarray:
    return theta.values if isinstance(theta, PhaseVector) else np.asarray(theta, dtype=float)


def channel_draws(budget: LinkBudget, theta, seed: int, slot: int, start: int, count: int) -> np.ndarray:
    """Equivalent-channel samples for trials ``start .. start+count-1``."""
    return effective_channel(sample_links(budget, seed, slot, start, count), _phases(theta))


def empirical_coverage(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta,
                       q: CoverageQuery, trials: int, seed: int,
                       workers: int = 1) -> EmpiricalEstimate:
    """Fraction of trials with ``P |h|^2 / sigma^2 >= gamma_th``."""
    if trials < MIN_COVERAGE_TRIALS:
        raise ValueError(f"need at least {MIN_COVERAGE_TRIALS} trials, got {trials}")
    budget = link_budget(cfg, params, slot)
    theta = _phases(theta)

    def count(block):
        h = channel_draws(budget, theta, seed, slot, *block)
        return int(np.count_nonzero(snr(h, q.power_w, q.noise_w) >= q.snr_threshold))

    hits = sum(_run(count, _blocks(trials), workers))
    p = hits / trials
    return EmpiricalEstimate(p, math.sqrt(p * (1.0 - p) / trials), trials, seed)


def empirical_channel_moments(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta,
                              trials: int, seed: int, workers: int = 1) -> ChannelMoments:
    """Sample mean and total complex variance ``E|h - mean|^2`` (n-1 denominator)."""
    if trials < MIN_MOMENT_TRIALS:
        raise ValueError(f"need at least {MIN_MOMENT_TRIALS} trials, got {trials}")
    budget = link_budget(cfg, params, slot)
    theta = _phases(theta)
    h = np.concatenate(_run(lambda blk: channel_draws(budget, theta, seed, slot, *blk),
                            _blocks(trials), workers))
    if np.all(h == h[0]):
        return ChannelMoments(complex(h[0]), 0.0, 0.0, 0.0, trials, seed)
    mean = complex(h.mean())
    dev2 = np.abs(h - mean) ** 2
    var = float(dev2.sum() / (trials - 1))
    fourth = float(np.mean(dev2 ** 2))
    var_se = math.sqrt(max(fourth - var * var, 0.0) / trials)
    return ChannelMoments(mean, math.sqrt(var / trials), var, var_se, trials, seed)
