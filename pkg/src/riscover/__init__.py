"""Coverage probability of RIS-assisted high-speed-train downlinks.

Closed-form coverage under Rician fading, discrete RIS phase search and a
counter-based Monte Carlo oracle that checks both.
"""

from .channel import (ChannelParams, LinkBudget, LinkRealization, db_to_linear, dbm_to_watts,
                      effective_channel, link_budget, linear_to_db, los_component, los_phase,
                      mixing, sample_link_realization, sample_links, snr, thermal_noise_watts)
from .config import ConfigError, ExperimentConfig, parse_config, validate_config
from .coverage import (CoverageQuery, DegenerateChannelError, DegenerateChannelWarning,
                       DofVariant, EquivalentChannelStats, channel_stats, coverage_pair,
                       coverage_probability, equivalent_mean, equivalent_variance,
                       noncentrality, outage_probability)
from .experiments import SweepRecord, SweepSpec, emit_csv, read_csv, run_sweep
from .geometry import (LinkDistances, Point3, ScenarioConfig, euclidean_distance, link_distances,
                       mr_position, nearest_slot, ris_element_positions)
from .montecarlo import EmpiricalEstimate, empirical_channel_moments, empirical_coverage
from .optimizer import (PhaseVector, continuous_alignment, exhaustive_search, local_search,
                        phase_grid, quantize, quantize_phase, random_phases)
from .special import gaussian_tail, marcum_q, noncentral_chi2_cdf, noncentral_chi2_sf

__version__ = "0.1.0"

__all__ = [
    "ChannelParams", "ConfigError", "CoverageQuery", "DegenerateChannelError",
    "DegenerateChannelWarning", "DofVariant", "EmpiricalEstimate", "EquivalentChannelStats",
    "ExperimentConfig", "LinkBudget", "LinkDistances", "LinkRealization", "PhaseVector",
    "Point3", "ScenarioConfig", "SweepRecord", "SweepSpec", "channel_stats",
    "continuous_alignment", "coverage_pair", "coverage_probability", "db_to_linear",
    "dbm_to_watts", "effective_channel", "emit_csv", "empirical_channel_moments",
    "empirical_coverage", "equivalent_mean", "equivalent_variance", "euclidean_distance",
    "exhaustive_search", "gaussian_tail", "link_budget", "link_distances", "linear_to_db",
    "local_search", "los_component", "los_phase", "marcum_q", "mixing", "mr_position",
    "nearest_slot", "noncentral_chi2_cdf", "noncentral_chi2_sf", "noncentrality",
    "outage_probability", "parse_config", "phase_grid", "quantize", "quantize_phase",
    "random_phases", "read_csv", "ris_element_positions", "run_sweep",
    "sample_link_realization", "sample_links", "snr", "thermal_noise_watts",
    "validate_config",
]
