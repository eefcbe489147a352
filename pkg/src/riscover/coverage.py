"""Closed-form moments of the equivalent channel and the coverage probability.

The equivalent channel h = h_d + sum_n h_r^n e^{j theta_n} g_n is modelled as
CN(mu_h, sigma_h^2). Coverage is P(P |h|^2 / sigma^2 >= gamma_th), which is a
Marcum-Q tail in the non-centrality zeta = |mu_h|^2 / sigma_h^2 and the
normalized threshold gamma_0 = gamma_th / (mean_snr * sigma_h^2).

Two readings of that tail are offered:

``paper_nu1``
    Q_{1/2}(sqrt(zeta), sqrt(gamma_0)): a one-degree-of-freedom chi-square.
``complex_nu2``
    Q_1(sqrt(2 zeta), sqrt(2 gamma_0)): the exact tail of |CN(mu, s^2)|^2,
    whose real and imaginary parts each carry variance s^2 / 2.

Two variance models are offered as well. ``"cascaded"`` keeps only the
NLoS x NLoS part of every cascaded term. ``"exact"`` is the full second
moment of h_r^n g_n, which adds the LoS x NLoS cross products.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import ChannelParams, LinkBudget, link_budget
from .geometry import ScenarioConfig
from .special import marcum_pair

VARIANCE_MODELS = ("cascaded", "exact")


class DofVariant(str, Enum):
    PAPER_NU1 = "paper_nu1"
    COMPLEX_NU2 = "complex_nu2"


class DegenerateChannelError(ArithmeticError):
    """The equivalent channel has zero variance; its SNR is deterministic."""


class DegenerateChannelWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class CoverageQuery:
    power_w: float
    noise_w: float
    snr_threshold: float
    dof_variant: DofVariant = DofVariant.COMPLEX_NU2

    def __post_init__(self):
        object.__setattr__(self, "dof_variant", DofVariant(self.dof_variant))
        if not (self.power_w > 0 and self.noise_w > 0):
            raise ValueError("power_w and noise_w must be positive")
        if not self.snr_threshold >= 0:
            raise ValueError(f"snr_threshold must be >= 0, got {self.snr_threshold!r}")

    @property
    def mean_snr(self) -> float:
        return self.power_w / self.noise_w


@dataclass(frozen=True)
class EquivalentChannelStats:
    mean: complex
    variance: float
    noncentrality: float

    @property
    def mean_power(self) -> float:
        return abs(self.mean) ** 2


def mean_from_budget(budget: LinkBudget, theta) -> complex:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (budget.num_elements,):
        raise ValueError(f"expected {budget.num_elements} phases, got shape {theta.shape}")
    return complex(budget.direct_los + np.sum(budget.cascaded_los * np.exp(1j * theta)))


def variance_from_budget(budget: LinkBudget, model: str = "cascaded") -> float:
    if model not in VARIANCE_MODELS:
        raise ValueError(f"variance model must be one of {VARIANCE_MODELS}, got {model!r}")
    nlos_g = budget.bs_ris_nlos ** 2
    nlos_r = budget.ris_mr_nlos ** 2
    if model == "cascaded":
        cascade = nlos_r * nlos_g
    else:
        los_g = np.abs(budget.bs_ris_los) ** 2
        los_r = np.abs(budget.ris_mr_los) ** 2
        cascade = los_r * nlos_g + nlos_r * los_g + nlos_r * nlos_g
    return float(budget.direct_nlos ** 2 + math.fsum(cascade))


def equivalent_mean(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta) -> complex:
    return mean_from_budget(link_budget(cfg, params, slot), theta)


def equivalent_variance(cfg: ScenarioConfig, params: ChannelParams, slot: int,
                        model: str = "cascaded") -> float:
    return variance_from_budget(link_budget(cfg, params, slot), model)


def noncentrality(mean: complex, variance: float) -> float:
    if variance <= 0:
        raise DegenerateChannelError("zero variance: non-centrality undefined")
    return abs(mean) ** 2 / variance


def channel_stats(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta,
                  variance_model: str = "cascaded") -> EquivalentChannelStats:
    budget = link_budget(cfg, params, slot)
    mu = mean_from_budget(budget, theta)
    var = variance_from_budget(budget, variance_model)
    zeta = noncentrality(mu, var) if var > 0 else math.inf
    return EquivalentChannelStats(mu, var, zeta)


def coverage_pair(mean_power: float, variance: float, q: CoverageQuery,
                  dof: DofVariant | str | None = None) -> tuple[float, float]:
    """``(P_cov, P_out)`` from |mu_h|^2 and sigma_h^2.

    With zero variance the SNR is deterministic and the result is a step;
    a :class:`DegenerateChannelWarning` is emitted.
    """
    dof = DofVariant(dof or q.dof_variant)
    if q.snr_threshold == 0:
        return 1.0, 0.0
    if variance <= 0:
        warnings.warn("deterministic channel: coverage is a step function",
                      DegenerateChannelWarning, stacklevel=3)
        covered = q.mean_snr * mean_power >= q.snr_threshold
        return (1.0, 0.0) if covered else (0.0, 1.0)
    zeta = mean_power / variance
    gamma0 = q.snr_threshold / (q.mean_snr * variance)
    if dof is DofVariant.PAPER_NU1:
        return marcum_pair(0.5, math.sqrt(zeta), math.sqrt(gamma0))
    return marcum_pair(1.0, math.sqrt(2.0 * zeta), math.sqrt(2.0 * gamma0))


def coverage_probability(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta,
                         q: CoverageQuery, variance_model: str = "cascaded") -> float:
    budget = link_budget(cfg, params, slot)
    mu = mean_from_budget(budget, theta)
    var = variance_from_budget(budget, variance_model)
    return coverage_pair(abs(mu) ** 2, var, q)[0]


def outage_probability(cfg: ScenarioConfig, params: ChannelParams, slot: int, theta,
                       q: CoverageQuery, variance_model: str = "cascaded") -> float:
    return 1.0 - coverage_probability(cfg, params, slot, theta, q, variance_model)
