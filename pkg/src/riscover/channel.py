"""Rician link models and the composed BS -> MR equivalent channel.

Each link is ``rho * LoS + varrho * sqrt(d**-eps_nlos) * w`` with
``LoS = sqrt(d**-eps) * exp(-1j * theta)``, ``theta = 2*pi*d/lambda mod 2*pi``
and ``w ~ CN(0, 1)``. NLoS distances equal the LoS distances; only the
exponents differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .geometry import ScenarioConfig, link_distances

TWO_PI = 2 * math.pi


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def thermal_noise_watts(bandwidth_hz: float, noise_figure_db: float = 10.0,
                        psd_dbm_hz: float = -174.0) -> float:
    """Noise power ``psd + 10 log10(B) + NF`` in watts."""
    return dbm_to_watts(psd_dbm_hz + 10.0 * math.log10(bandwidth_hz) + noise_figure_db)


@dataclass(frozen=True)
class ChannelParams:
    """Per-link Rician K-factors (linear), path-loss exponents, wavelength.

    ``math.inf`` is a legal K-factor and means a deterministic LoS link.
    """

    kappa_direct: float = 10.0
    kappa_bs_ris: float = 10.0
    kappa_ris_mr: float = 10.0
    eps_direct: float = 2.0
    eps_bs_ris: float = 2.0
    eps_ris_mr: float = 2.0
    eps_direct_nlos: float = 2.8
    eps_bs_ris_nlos: float = 2.8
    eps_ris_mr_nlos: float = 2.8
    wavelength_m: float = 299_792_458.0 / 2.35e9

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        for name in ("kappa_direct", "kappa_bs_ris", "kappa_ris_mr"):
            k = getattr(self, name)
            if math.isnan(k) or k < 0:
                out.append(f"{name}: must be >= 0, got {k!r}")
        for name in ("eps_direct", "eps_bs_ris", "eps_ris_mr", "eps_direct_nlos",
                     "eps_bs_ris_nlos", "eps_ris_mr_nlos"):
            e = getattr(self, name)
            if not (math.isfinite(e) and e >= 0):
                out.append(f"{name}: must be finite and >= 0, got {e!r}")
        if not (math.isfinite(self.wavelength_m) and self.wavelength_m > 0):
            out.append(f"wavelength_m: must be > 0, got {self.wavelength_m!r}")
        return out

    @classmethod
    def for_scenario(cls, cfg: ScenarioConfig, **kwargs) -> "ChannelParams":
        return cls(wavelength_m=cfg.wavelength_m, **kwargs)


@dataclass(frozen=True)
class MixingCoefficients:
    rho: float
    varrho: float


def mixing(kappa: float) -> MixingCoefficients:
    """LoS / NLoS amplitude weights ``sqrt(k/(k+1))`` and ``sqrt(1/(k+1))``."""
    if math.isnan(kappa) or kappa < 0:
        raise ValueError(f"K-factor must be >= 0, got {kappa!r}")
    if math.isinf(kappa):
        return MixingCoefficients(1.0, 0.0)
    return MixingCoefficients(math.sqrt(kappa / (kappa + 1.0)), math.sqrt(1.0 / (kappa + 1.0)))


def los_phase(distance_m, wavelength_m: float):
    """Carrier phase ``2*pi*d/lambda`` reduced to [0, 2*pi)."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0) or wavelength_m <= 0:
        raise ValueError("distance and wavelength must be positive")
    # reduce in cycles first: keeps the fractional part exact to one ulp of d/lambda
    cycles = np.mod(d / wavelength_m, 1.0)
    phase = TWO_PI * cycles
    phase = np.where(phase >= TWO_PI, 0.0, phase)
    return float(phase) if phase.ndim == 0 else phase


def los_component(distance_m: float, exponent: float, phase: float) -> complex:
    if distance_m <= 0:
        raise ValueError(f"distance must be positive, got {distance_m!r}")
    return distance_m ** (-exponent / 2) * complex(math.cos(phase), -math.sin(phase))


@dataclass(frozen=True)
class LinkBudget:
    """Deterministic per-slot link quantities shared by the analysis and the sampler.

    ``*_los`` are the complex LoS gains already weighted by ``rho``; ``*_nlos``
    are the NLoS amplitude scales ``varrho * sqrt(d**-eps')``.
    """

    direct_los: complex
    direct_nlos: float
    bs_ris_los: np.ndarray = field(repr=False)
    bs_ris_nlos: np.ndarray = field(repr=False)
    ris_mr_los: np.ndarray = field(repr=False)
    ris_mr_nlos: np.ndarray = field(repr=False)
    theta_direct: float = 0.0
    theta_bs_ris: np.ndarray = field(default=None, repr=False)
    theta_ris_mr: np.ndarray = field(default=None, repr=False)

    @property
    def num_elements(self) -> int:
        return len(self.bs_ris_los)

    @property
    def cascaded_los(self) -> np.ndarray:
        """Mean of ``h_r^n * g_n`` per element, before the RIS phase."""
        return self.ris_mr_los * self.bs_ris_los


def link_budget(cfg: ScenarioConfig, params: ChannelParams, slot: int) -> LinkBudget:
    dist = link_distances(cfg, slot)
    lam = params.wavelength_m
    md, mg, mr = (mixing(params.kappa_direct), mixing(params.kappa_bs_ris),
                  mixing(params.kappa_ris_mr))
    th_d = los_phase(dist.d_direct_m, lam)
    th_g = np.atleast_1d(los_phase(dist.d_bs_ris_m, lam))
    th_r = np.atleast_1d(los_phase(dist.d_ris_mr_m, lam))
    d_g, d_r = dist.d_bs_ris_m, dist.d_ris_mr_m
    return LinkBudget(
        direct_los=md.rho * los_component(dist.d_direct_m, params.eps_direct, th_d),
        direct_nlos=md.varrho * dist.d_direct_m ** (-params.eps_direct_nlos / 2),
        bs_ris_los=mg.rho * d_g ** (-params.eps_bs_ris / 2) * np.exp(-1j * th_g),
        bs_ris_nlos=mg.varrho * d_g ** (-params.eps_bs_ris_nlos / 2),
        ris_mr_los=mr.rho * d_r ** (-params.eps_ris_mr / 2) * np.exp(-1j * th_r),
        ris_mr_nlos=mr.varrho * d_r ** (-params.eps_ris_mr_nlos / 2),
        theta_direct=th_d,
        theta_bs_ris=th_g,
        theta_ris_mr=th_r,
    )


@dataclass(frozen=True)
class LinkRealization:
    """One draw of every link. Arrays carry a leading trial axis when batched."""

    direct: complex | np.ndarray
    bs_ris: np.ndarray
    ris_mr: np.ndarray

    def __post_init__(self):
        if np.shape(self.bs_ris) != np.shape(self.ris_mr):
            raise ValueError("bs_ris and ris_mr must have equal shapes")


def sample_links(budget: LinkBudget, seed: int, slot: int, start: int, count: int) -> LinkRealization:
    """Realizations for trials ``start .. start+count-1`` (batched arrays)."""
    direct = budget.direct_los + budget.direct_nlos * rng.complex_normals(
        seed, slot, rng.DIRECT_LINK, start, count)
    n = budget.num_elements
    g = np.empty((count, n), dtype=complex)
    r = np.empty((count, n), dtype=complex)
    for i in range(n):
        g[:, i] = budget.bs_ris_los[i] + budget.bs_ris_nlos[i] * rng.complex_normals(
            seed, slot, rng.bs_ris_link(i), start, count)
        r[:, i] = budget.ris_mr_los[i] + budget.ris_mr_nlos[i] * rng.complex_normals(
            seed, slot, rng.ris_mr_link(i), start, count)
    return LinkRealization(direct, g, r)


def sample_link_realization(cfg: ScenarioConfig, params: ChannelParams, slot: int,
                            seed: int, trial: int = 0) -> LinkRealization:
    """A single realization, identical to row ``trial`` of any batched draw."""
    batch = sample_links(link_budget(cfg, params, slot), seed, slot, trial, 1)
    return LinkRealization(complex(batch.direct[0]), batch.bs_ris[0], batch.ris_mr[0])


def effective_channel(r: LinkRealization, theta) -> complex | np.ndarray:
    """``h = direct + sum_n ris_mr[n] * exp(1j*theta[n]) * bs_ris[n]``."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != np.shape(r.bs_ris)[-1:]:
        raise ValueError(f"phase vector of length {theta.shape} does not match "
                         f"{np.shape(r.bs_ris)[-1]} elements")
    cascade = (r.ris_mr * r.bs_ris) @ np.exp(1j * theta)
    h = r.direct + cascade
    return complex(h) if np.ndim(h) == 0 else h


def snr(h, power_w: float, noise_w: float):
    if power_w <= 0 or noise_w <= 0:
        raise ValueError("power and noise must be positive")
    return power_w * np.abs(h) ** 2 / noise_w
