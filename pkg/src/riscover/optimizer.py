"""Discrete RIS phase selection.

Every method here maximizes an objective of the equivalent-channel mean
mu_h. The default objective is |mu_h|^2. The variance sigma_h^2 does not
depend on the phases, and the Marcum tail increases with its first argument.
So maximizing |mu_h|^2 also maximizes the coverage probability, and
:func:`coverage_objective` gives the same argmax more slowly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .channel import ChannelParams, LinkBudget, link_budget
from .coverage import CoverageQuery, coverage_pair, variance_from_budget
from .geometry import ScenarioConfig

TWO_PI = 2 * math.pi
MAX_EXHAUSTIVE = 2 ** 20
_RANDOM_PHASE_TAG = 0x5EED

Objective = Callable[[np.ndarray], np.ndarray]


def _check_bits(b: int) -> None:
    if int(b) != b or not 1 <= b <= 16:
        raise ValueError(f"quantization bits must be an integer in [1, 16], got {b!r}")


def phase_grid(b: int) -> np.ndarray:
    """The ``M = 2**b`` phases ``0, 2*pi/M, ..., 2*pi*(M-1)/M``."""
    _check_bits(b)
    m = 2 ** int(b)
    return np.arange(m) * (TWO_PI / m)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Per-element phases restricted to the ``b``-bit grid.

    Stored as grid indices. ``values`` are the radians.
    """

    indices: np.ndarray
    bits: int

    def __post_init__(self):
        _check_bits(self.bits)
        idx = np.asarray(self.indices)
        if idx.ndim != 1:
            raise ValueError("phase indices must be one-dimensional")
        if idx.size and (not np.issubdtype(idx.dtype, np.integer)
                         or idx.min() < 0 or idx.max() >= self.levels):
            raise ValueError(f"phase indices must lie in [0, {self.levels})")
        object.__setattr__(self, "indices", idx.astype(np.int64))

    @classmethod
    def from_values(cls, values, bits: int, atol: float = 1e-9) -> "PhaseVector":
        """Wrap radians that already sit on the grid; anything else is an error."""
        _check_bits(bits)
        step = TWO_PI / 2 ** bits
        k = np.asarray(values, dtype=float) / step
        idx = np.rint(k)
        if np.any(np.abs(k - idx) > atol) or np.any(idx < 0) or np.any(idx >= 2 ** bits):
            raise ValueError(f"phases are not on the {bits}-bit grid")
        return cls(idx.astype(np.int64), bits)

    @property
    def levels(self) -> int:
        return 2 ** self.bits

    @property
    def step(self) -> float:
        return TWO_PI / self.levels

    @property
    def values(self) -> np.ndarray:
        return self.indices * self.step

    def __len__(self) -> int:
        return len(self.indices)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PhaseVector) and self.bits == other.bits
                and np.array_equal(self.indices, other.indices))


def _quantize_index(theta: float, b: int) -> int:
    m = 2 ** b
    k = (theta % TWO_PI) / (TWO_PI / m)
    lo = math.floor(k)
    frac = k - lo
    lo %= m
    hi = (lo + 1) % m
    if frac < 0.5:
        return lo
    if frac > 0.5:
        return hi
    return min(lo, hi)


def quantize_phase(theta: float, b: int) -> float:
    """Nearest grid phase of ``theta mod 2*pi``; exact ties go to the smaller value."""
    _check_bits(b)
    return _quantize_index(float(theta), b) * (TWO_PI / 2 ** b)


def quantize(theta, b: int) -> PhaseVector:
    _check_bits(b)
    return PhaseVector(np.array([_quantize_index(float(t), b) for t in np.ravel(theta)],
                                dtype=np.int64), b)


def alignment_from_budget(budget: LinkBudget) -> np.ndarray:
    return np.mod(budget.theta_ris_mr + budget.theta_bs_ris - budget.theta_direct, TWO_PI)


def continuous_alignment(cfg: ScenarioConfig, params: ChannelParams, slot: int) -> np.ndarray:
    """Unquantized phases that co-phase every cascaded term with the direct LoS term."""
    return alignment_from_budget(link_budget(cfg, params, slot))


def mean_power_objective(mu: np.ndarray) -> np.ndarray:
    return np.abs(mu) ** 2


def coverage_objective(budget: LinkBudget, q: CoverageQuery,
                       variance_model: str = "cascaded") -> Objective:
    var = variance_from_budget(budget, variance_model)

    def objective(mu):
        mu = np.atleast_1d(mu)
        return np.array([coverage_pair(abs(m) ** 2, var, q)[0] for m in mu])

    return objective


def objective_value(budget: LinkBudget, theta, objective: Objective | None = None) -> float:
    """Objective at the given phases (radians or a PhaseVector)."""
    objective = objective or mean_power_objective
    if isinstance(theta, PhaseVector):
        theta = theta.values
    theta = np.asarray(theta, dtype=float)
    mu = budget.direct_los + np.sum(budget.cascaded_los * np.exp(1j * theta))
    return float(np.atleast_1d(objective(np.atleast_1d(mu)))[0])


def initial_phases(budget: LinkBudget, b: int, init: str = "alignment", seed: int = 0) -> PhaseVector:
    """Starting point for local search: ``alignment``, ``zeros`` or ``random``."""
    if init == "alignment":
        return quantize(alignment_from_budget(budget), b)
    if init == "zeros":
        return PhaseVector(np.zeros(budget.num_elements, dtype=np.int64), b)
    if init == "random":
        return random_phases(b, budget.num_elements, seed)
    raise ValueError(f"unknown initialization {init!r}")


def local_search_budget(budget: LinkBudget, b: int, initial: PhaseVector | None = None,
                        objective: Objective | None = None, converge: bool = False,
                        order: str = "ascending", seed: int = 0,
                        max_passes: int = 1000) -> PhaseVector:
    objective = objective or mean_power_objective
    if initial is None:
        initial = initial_phases(budget, b)
    if not isinstance(initial, PhaseVector):
        initial = PhaseVector.from_values(initial, b)
    if initial.bits != b:
        raise ValueError(f"initial vector uses {initial.bits} bits, search uses {b}")
    n = budget.num_elements
    if len(initial) != n:
        raise ValueError(f"initial vector has {len(initial)} phases for {n} elements")

    rot = np.exp(1j * phase_grid(b))
    a = budget.cascaded_los
    idx = initial.indices.copy()
    if order == "ascending":
        sequence = np.arange(n)
    elif order == "random":
        sequence = rng.generator(seed, _RANDOM_PHASE_TAG + 1).permutation(n)
    else:
        raise ValueError(f"unknown coordinate order {order!r}")

    for _ in range(max_passes if converge else 1):
        changed = False
        mu = budget.direct_los + np.sum(a * rot[idx])
        for i in sequence:
            candidates = (mu - a[i] * rot[idx[i]]) + a[i] * rot
            scores = objective(candidates)
            best = int(np.argmax(scores))
            # keep the incumbent on ties so a pass never lowers the objective
            if scores[best] > scores[idx[i]]:
                idx[i] = best
                changed = True
            mu = candidates[idx[i]]
        if not changed:
            break
    return PhaseVector(idx, b)


def local_search(cfg: ScenarioConfig, params: ChannelParams, slot: int, b: int,
                 initial: PhaseVector | None = None, objective: Objective | None = None,
                 **kwargs) -> PhaseVector:
    """Coordinate-wise discrete search, a single ascending pass by default.

    Each element in turn is set to the grid phase that maximizes ``objective``
    with all other phases held fixed. ``converge=True`` repeats passes until
    no coordinate changes. ``order="random"`` shuffles the coordinate order
    with ``seed``.
    """
    return local_search_budget(link_budget(cfg, params, slot), b, initial, objective, **kwargs)


def exhaustive_search_budget(budget: LinkBudget, b: int,
                             objective: Objective | None = None,
                             chunk: int = 1 << 16) -> PhaseVector:
    objective = objective or mean_power_objective
    _check_bits(b)
    m, n = 2 ** b, budget.num_elements
    if m ** n > MAX_EXHAUSTIVE:
        raise OverflowError(f"exhaustive search over {m}^{n} points exceeds {MAX_EXHAUSTIVE}")
    if n == 0:
        return PhaseVector(np.zeros(0, dtype=np.int64), b)
    rot = np.exp(1j * phase_grid(b))
    a = budget.cascaded_los
    total = m ** n
    best_score, best_flat = -np.inf, 0
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        # C-order unravel: element 0 is the most significant digit -> lexicographic
        digits = np.stack(np.unravel_index(flat, (m,) * n), axis=1)
        mu = budget.direct_los + (rot[digits] * a).sum(axis=1)
        scores = objective(mu)
        k = int(np.argmax(scores))
        if scores[k] > best_score:
            best_score, best_flat = scores[k], int(flat[k])
    best = np.array(np.unravel_index(best_flat, (m,) * n), dtype=np.int64).reshape(n)
    return PhaseVector(best, b)


def exhaustive_search(cfg: ScenarioConfig, params: ChannelParams, slot: int, b: int,
                      objective: Objective | None = None) -> PhaseVector:
    """Global maximizer over all ``M**N`` grid vectors (at most 2**20 of them).

    Ties resolve to the lexicographically smallest phase list.
    """
    return exhaustive_search_budget(link_budget(cfg, params, slot), b, objective)


def random_phases(b: int, n: int, seed: int) -> PhaseVector:
    _check_bits(b)
    draws = rng.generator(seed, _RANDOM_PHASE_TAG).integers(0, 2 ** b, size=n)
    return PhaseVector(draws.astype(np.int64), b)
