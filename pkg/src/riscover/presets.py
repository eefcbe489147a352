"""Preset sweeps for the standard experiment families (power, bits, threshold,
distance) plus an element-count sweep.

Reference curves of this kind carry no recoverable absolute values: path-loss
exponents and track offsets are unpublished. Each preset therefore places
its axis around the *LoS breakpoint* of the curves it compares, i.e. the
transmit power at which the mean-channel SNR equals the threshold,
``P* = gamma_th * sigma^2 / |mu_h|^2``. Channels here have an effective
K-factor above 20 dB, so coverage switches from 0 to 1 within about 1 dB of
P*. A fixed absolute axis would show little more than two flat lines.
"""

from __future__ import annotations

import math
from dataclasses import replace

from .channel import ChannelParams, dbm_to_watts, link_budget, linear_to_db
from .config import ExperimentConfig
from .experiments import SweepSpec
from .geometry import ScenarioConfig, nearest_slot
from .optimizer import initial_phases, local_search_budget, objective_value

PRESETS = ("power", "bits", "threshold", "distance", "elements")


def breakpoint_dbm(cfg: ScenarioConfig, params: ChannelParams, threshold: float,
                   noise_w: float, bits: int = 3) -> float:
    """Power (dBm) at which the local-search mean channel just meets the threshold."""
    budget = link_budget(cfg, params, nearest_slot(cfg))
    phases = local_search_budget(budget, bits, initial_phases(budget, bits))
    gain = objective_value(budget, phases)
    return linear_to_db(threshold * noise_w / gain) + 30.0


def preset(name: str, ec: ExperimentConfig | None = None, oracle_trials: int | None = None,
           seed: int | None = None) -> SweepSpec:
    """Sweep spec for one preset, derived from the scenario in ``ec``."""
    ec = ec or ExperimentConfig()
    cfg, params, q = ec.scenario, ec.channel, ec.query
    b = ec.optimizer.bits
    trials = ec.oracle_trials if oracle_trials is None else oracle_trials
    common = dict(oracle_trials=trials, seed=ec.seed if seed is None else seed)

    def bp(n=cfg.num_elements, bits=b):
        return breakpoint_dbm(cfg.with_(num_elements=n), params, q.snr_threshold, q.noise_w, bits)

    if name == "power":
        # just inside both transitions, so each curve is strictly inside (0, 1) at one end
        lo, hi = bp() - 0.5, bp(0) + 1.5
        step = (hi - lo) / 24
        return SweepSpec.from_config(ec, kind="power", start=lo, stop=hi + 1e-9 * step, step=step,
                                     schemes=("ris_local_search", "no_ris"), **common)
    if name == "bits":
        power = 0.5 * (bp(bits=1) + bp(bits=5))
        return SweepSpec.from_config(ec, kind="bits", start=1, stop=5, step=1,
                                     query=_with_power(q, power),
                                     schemes=("ris_local_search", "no_ris"), **common)
    if name == "threshold":
        mid = linear_to_db(q.snr_threshold)
        lo, hi = mid - 12.0, mid + 12.0
        return SweepSpec.from_config(ec, kind="threshold", start=lo, stop=hi, step=1.0,
                                     schemes=("ris_local_search", "no_ris"), **common)
    if name == "distance":
        power = bp(0)
        return SweepSpec.from_config(ec, kind="bs_ris_distance", start=-600, stop=600, step=50,
                                     query=_with_power(q, power),
                                     schemes=("ris_local_search", "no_ris"), **common)
    if name == "elements":
        power = bp(16)
        return SweepSpec.from_config(ec, kind="elements", start=0, stop=64, step=4,
                                     query=_with_power(q, power),
                                     schemes=("ris_local_search",), **common)
    raise ValueError(f"unknown preset {name!r} (choose from {list(PRESETS)})")


def _with_power(q, dbm: float):
    return replace(q, power_w=dbm_to_watts(dbm))


def breakpoint_summary(ec: ExperimentConfig | None = None) -> dict[str, float]:
    ec = ec or ExperimentConfig()
    q = ec.query
    out = {}
    for n in (0, 4, 16, 64):
        out[f"N={n}"] = breakpoint_dbm(ec.scenario.with_(num_elements=n), ec.channel,
                                       q.snr_threshold, q.noise_w, ec.optimizer.bits)
    return {k: round(v, 3) for k, v in out.items() if math.isfinite(v)}
