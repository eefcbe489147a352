"""Parameter sweeps: optimizer, closed forms and Monte Carlo at every grid point."""

from __future__ import annotations

import csv
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import ChannelParams, db_to_linear, dbm_to_watts, link_budget
from .config import SCHEMES, ExperimentConfig, validate_sweep_axis
from .coverage import (CoverageQuery, DegenerateChannelWarning, DofVariant, coverage_pair,
                       mean_from_budget, variance_from_budget)
from .geometry import ScenarioConfig, nearest_slot
from .montecarlo import empirical_coverage
from .optimizer import (MAX_EXHAUSTIVE, PhaseVector, coverage_objective, exhaustive_search_budget,
                        initial_phases, local_search_budget, random_phases)

CSV_COLUMNS = ("param", "scheme", "pcov_nu1", "pcov_nu2", "pcov_mc", "mc_stderr",
               "objective", "wall_ms")


class SweepValidationError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid sweep:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class SweepSpec:
    """One experiment family.

    Axis units: dBm for ``power``, dB for ``threshold``, metres for
    ``bs_ris_distance``, counts for ``elements`` and ``bits``.
    """

    kind: str
    start: float
    stop: float
    step: float
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    query: CoverageQuery | None = None
    schemes: tuple[str, ...] = ("ris_local_search", "no_ris")
    oracle_trials: int = 0
    seed: int = 1
    bits: int = 3
    slot: int | None = None
    dof: str = "both"
    variance_model: str = "cascaded"
    init: str = "alignment"
    converge: bool = False
    order: str = "ascending"
    objective: str = "mean_power"

    @classmethod
    def from_config(cls, ec: ExperimentConfig, **overrides) -> "SweepSpec":
        sw = ec.sweep
        base = dict(kind=sw.kind, start=sw.start, stop=sw.stop, step=sw.step,
                    scenario=ec.scenario, channel=ec.channel, query=ec.query,
                    schemes=sw.schemes, oracle_trials=ec.oracle_trials, seed=ec.seed,
                    bits=ec.optimizer.bits, slot=ec.slot, variance_model=ec.variance_model,
                    init=ec.optimizer.init, converge=ec.optimizer.converge,
                    order=ec.optimizer.order, objective=ec.optimizer.objective)
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def grid(self) -> np.ndarray:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(n)

    def validate(self) -> None:
        errs = [f"sweep.{e}" for e in validate_sweep_axis(self.kind, self.start, self.stop,
                                                           self.step, self.schemes)]
        if self.kind not in ("power", "threshold", "bs_ris_distance", "elements", "bits"):
            errs.append(f"sweep.kind: unknown sweep kind {self.kind!r}")
        if self.dof not in ("nu1", "nu2", "both"):
            errs.append(f"dof: must be nu1, nu2 or both, got {self.dof!r}")
        if self.oracle_trials and self.oracle_trials < 1000:
            errs.append("oracle.trials: must be 0 (disabled) or >= 1000")
        if not 1 <= self.bits <= 16:
            errs.append(f"optimizer.bits: must be in [1, 16], got {self.bits}")
        if self.query is None:
            errs.append("coverage: a coverage query is required")
        if not errs and "ris_exhaustive" in self.schemes:
            for value in self.grid():
                cfg, _, b = self.point(value)
                if (2 ** b) ** cfg.num_elements > MAX_EXHAUSTIVE:
                    errs.append(f"sweep.schemes: ris_exhaustive infeasible at {self.kind}={value:g} "
                                f"({2 ** b}^{cfg.num_elements} > {MAX_EXHAUSTIVE})")
                    break
        if errs:
            raise SweepValidationError(errs)

    def point(self, value: float) -> tuple[ScenarioConfig, CoverageQuery, int]:
        """Scenario, query and bit depth at one grid value."""
        cfg, q, b = self.scenario, self.query, self.bits
        if self.kind == "power":
            q = replace(q, power_w=dbm_to_watts(value))
        elif self.kind == "threshold":
            q = replace(q, snr_threshold=db_to_linear(value))
        elif self.kind == "bs_ris_distance":
            cfg = cfg.with_(bs_ris_horizontal_m=float(value))
        elif self.kind == "elements":
            cfg = cfg.with_(num_elements=int(round(value)))
        elif self.kind == "bits":
            b = int(round(value))
        return cfg, q, b


@dataclass
class SweepRecord:
    param: float
    scheme: str
    pcov_nu1: float | None
    pcov_nu2: float | None
    pcov_mc: float | None
    mc_stderr: float | None
    objective: float
    wall_ms: float
    degenerate: bool = False
    phases: PhaseVector | None = field(default=None, repr=False)

    def has_nan(self) -> bool:
        values = (self.pcov_nu1, self.pcov_nu2, self.pcov_mc, self.objective)
        return any(v is not None and math.isnan(v) for v in values)


def _phases_for(spec: SweepSpec, scheme: str, budget, q: CoverageQuery, b: int) -> PhaseVector:
    objective = None
    if spec.objective == "coverage":
        objective = coverage_objective(budget, q, spec.variance_model)
    if scheme == "no_ris":
        return PhaseVector(np.zeros(0, dtype=np.int64), b)
    if scheme == "ris_local_search":
        init = initial_phases(budget, b, spec.init, spec.seed)
        return local_search_budget(budget, b, init, objective, converge=spec.converge,
                                   order=spec.order, seed=spec.seed)
    if scheme == "ris_exhaustive":
        return exhaustive_search_budget(budget, b, objective)
    if scheme == "random_phase":
        return random_phases(b, budget.num_elements, spec.seed)
    raise ValueError(f"unknown scheme {scheme!r}")


def evaluate_point(spec: SweepSpec, value: float) -> list[SweepRecord]:
    cfg, q, b = spec.point(value)
    records = []
    for scheme in spec.schemes:
        t0 = time.perf_counter()
        scfg = cfg.with_(num_elements=0) if scheme == "no_ris" else cfg
        slot = spec.slot if spec.slot is not None else nearest_slot(scfg)
        budget = link_budget(scfg, spec.channel, slot)
        phases = _phases_for(spec, scheme, budget, q, b)
        mu = mean_from_budget(budget, phases.values)
        var = variance_from_budget(budget, spec.variance_model)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateChannelWarning)
            nu1 = coverage_pair(abs(mu) ** 2, var, q, DofVariant.PAPER_NU1)[0] \
                if spec.dof in ("nu1", "both") else None
            nu2 = coverage_pair(abs(mu) ** 2, var, q, DofVariant.COMPLEX_NU2)[0] \
                if spec.dof in ("nu2", "both") else None
        mc = se = None
        if spec.oracle_trials:
            est = empirical_coverage(scfg, spec.channel, slot, phases, q,
                                     spec.oracle_trials, spec.seed)
            mc, se = est.value, est.stderr
        wall = (time.perf_counter() - t0) * 1e3
        records.append(SweepRecord(float(value), scheme, nu1, nu2, mc, se, abs(mu) ** 2,
                                   wall, degenerate=bool(caught), phases=phases))
    return records


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRecord]:
    """One record per grid point per scheme, in grid order then scheme order."""
    spec.validate()
    grid = spec.grid()
    if workers <= 1:
        chunks = [evaluate_point(spec, v) for v in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda v: evaluate_point(spec, v), grid))
    return [r for chunk in chunks for r in chunk]


def _fmt(value) -> str:
    if value is None:
        return ""
    # repr is the shortest string that round-trips the double exactly
    return repr(float(value))


def emit_csv(records, path, timing: bool = False) -> Path:
    """Write the sweep table. ``wall_ms`` stays empty unless ``timing`` is set,
    so identical runs produce identical bytes."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for r in records:
                writer.writerow([_fmt(r.param), r.scheme, _fmt(r.pcov_nu1), _fmt(r.pcov_nu2),
                                 _fmt(r.pcov_mc), _fmt(r.mc_stderr), _fmt(r.objective),
                                 _fmt(r.wall_ms) if timing else ""])
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc
    return path


def read_csv(path) -> list[SweepRecord]:
    def num(s):
        return float(s) if s != "" else None

    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [SweepRecord(float(row["param"]), row["scheme"], num(row["pcov_nu1"]),
                            num(row["pcov_nu2"]), num(row["pcov_mc"]), num(row["mc_stderr"]),
                            float(row["objective"]), num(row["wall_ms"]))
                for row in reader]


def curve(records, scheme: str, column: str = "pcov_nu2") -> tuple[np.ndarray, np.ndarray]:
    """``(param, value)`` arrays for one scheme, in record order."""
    rows = [r for r in records if r.scheme == scheme]
    return (np.array([r.param for r in rows]),
            np.array([getattr(r, column) for r in rows], dtype=float))


__all__ = ["CSV_COLUMNS", "SCHEMES", "SweepRecord", "SweepSpec", "SweepValidationError",
           "curve", "emit_csv", "evaluate_point", "read_csv", "run_sweep"]
