"""YAML experiment configuration with unit-aware parsing and aggregated errors.

Schema (every key optional; omitted keys take the defaults shown)::

    scenario:
      speed: 360 km/h            # "<x> km/h" or "<x> m/s"; the unit is required
      slot_duration_s: 0.001
      num_slots: 1000
      bs_height_m: 10
      ris_height_m: 2
      mr_height_m: 2.5
      bs_track_offset_m: 50
      ris_track_offset_m: 5
      bs_ris_horizontal_m: 0     # signed, RIS minus BS along the track
      mr_initial_along_track_m: -50
      num_elements: 16
      element_spacing_m: null    # null -> half a wavelength
      carrier_hz: 2.35e9
      bandwidth_hz: 20e6
    channel:
      kappa_direct: 10 dB        # bare numbers are dB; "<x> linear" or "inf" also accepted
      kappa_bs_ris: 10 dB
      kappa_ris_mr: 10 dB
      eps_direct: 2.0            # LoS path-loss exponents
      eps_bs_ris: 2.0
      eps_ris_mr: 2.0
      eps_direct_nlos: 2.8       # NLoS path-loss exponents
      eps_bs_ris_nlos: 2.8
      eps_ris_mr_nlos: 2.8
    coverage:
      power_dbm: 0               # or power_w
      snr_threshold_db: 60       # or snr_threshold (linear)
      noise_psd_dbm_hz: -174     # noise = psd + 10 log10(B) + noise_figure_db
      noise_figure_db: 10
      noise_w: null              # explicit override of the formula
      dof: complex_nu2           # paper_nu1 | complex_nu2
    optimizer:
      bits: 3
      init: alignment            # alignment | zeros | random
      converge: false            # repeat passes until stable
      order: ascending           # ascending | random
      objective: mean_power      # mean_power | coverage
    oracle:
      trials: 100000
      seed: 1
    analysis:
      slot: null                 # null -> slot nearest the BS foot
      variance_model: cascaded   # cascaded | exact
    sweep:                       # only needed by `riscover sweep`
      kind: power                # power | threshold | bs_ris_distance | elements | bits
      from: -10
      to: 30
      step: 2
      schemes: [ris_local_search, no_ris]
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .channel import ChannelParams, db_to_linear, dbm_to_watts, thermal_noise_watts
from .coverage import VARIANCE_MODELS, CoverageQuery, DofVariant
from .geometry import ScenarioConfig

SWEEP_KINDS = ("power", "threshold", "bs_ris_distance", "elements", "bits")
SCHEMES = ("ris_local_search", "ris_exhaustive", "no_ris", "random_phase")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class OptimizerOptions:
    bits: int = 3
    init: str = "alignment"
    converge: bool = False
    order: str = "ascending"
    objective: str = "mean_power"


@dataclass(frozen=True)
class SweepOptions:
    kind: str = "power"
    start: float = -10.0
    stop: float = 30.0
    step: float = 2.0
    schemes: tuple[str, ...] = ("ris_local_search", "no_ris")


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    query: CoverageQuery = field(default_factory=lambda: default_query(ScenarioConfig()))
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    oracle_trials: int = 100_000
    seed: int = 1
    slot: int | None = None
    variance_model: str = "cascaded"
    sweep: SweepOptions = field(default_factory=SweepOptions)


def default_query(cfg: ScenarioConfig) -> CoverageQuery:
    return CoverageQuery(dbm_to_watts(0.0), thermal_noise_watts(cfg.bandwidth_hz),
                         db_to_linear(60.0))


_NUM = r"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)"
_SPEED = re.compile(rf"^\s*{_NUM}\s*(km/h|kmh|m/s)\s*$", re.IGNORECASE)
_KAPPA = re.compile(rf"^\s*{_NUM}\s*(db|linear|lin)?\s*$", re.IGNORECASE)


class _Reader:
    """Pulls typed values out of one mapping while recording errors by key path."""

    def __init__(self, data, path: str, errors: list[str]):
        self.path = path
        self.errors = errors
        if data is None:
            data = {}
        if not isinstance(data, dict):
            errors.append(f"{path}: expected a mapping, got {type(data).__name__}")
            data = {}
        self.data = dict(data)
        self.used: set[str] = set()

    def key(self, name: str) -> str:
        return f"{self.path}.{name}" if self.path else name

    def has(self, name: str) -> bool:
        return name in self.data and self.data[name] is not None

    def raw(self, name: str, default=None):
        self.used.add(name)
        value = self.data.get(name)
        return default if value is None else value

    def number(self, name: str, default, integer: bool = False):
        value = self.raw(name, default)
        if value is None:
            return None
        try:
            if isinstance(value, bool):
                raise TypeError
            num = float(value)
        except (TypeError, ValueError):
            self.errors.append(f"{self.key(name)}: expected a number, got {value!r}")
            return default
        if integer:
            if not math.isfinite(num) or num != int(num):
                self.errors.append(f"{self.key(name)}: expected an integer, got {value!r}")
                return default
            return int(num)
        return num

    def choice(self, name: str, default: str, options) -> str:
        value = str(self.raw(name, default))
        if value not in options:
            self.errors.append(f"{self.key(name)}: must be one of {list(options)}, got {value!r}")
            return default
        return value

    def flag(self, name: str, default: bool) -> bool:
        value = self.raw(name, default)
        if not isinstance(value, bool):
            self.errors.append(f"{self.key(name)}: expected true/false, got {value!r}")
            return default
        return value

    def finish(self) -> None:
        for extra in sorted(set(self.data) - self.used):
            self.errors.append(f"{self.key(extra)}: unknown key")


def parse_speed(value) -> float:
    """``"360 km/h"`` or ``"100 m/s"`` -> metres per second."""
    m = _SPEED.match(str(value))
    if not m:
        raise ValueError(f"speed needs an explicit unit (km/h or m/s), got {value!r}")
    x = float(m.group(1))
    return x / 3.6 if m.group(2).lower() in ("km/h", "kmh") else x


def parse_kappa(value) -> float:
    """Rician K-factor to linear. Bare numbers and ``"<x> dB"`` are dB."""
    if isinstance(value, bool):
        raise ValueError(f"invalid K-factor {value!r}")
    m = _KAPPA.match(str(value))
    if not m:
        raise ValueError(f"invalid K-factor {value!r}")
    x = float(m.group(1))
    unit = (m.group(2) or "db").lower()
    if unit in ("linear", "lin"):
        if x < 0:
            raise ValueError(f"linear K-factor must be >= 0, got {value!r}")
        return x
    return math.inf if x == math.inf else db_to_linear(x)


_SCENARIO_KEYS = ("slot_duration_s", "bs_height_m", "ris_height_m", "mr_height_m",
                  "bs_track_offset_m", "ris_track_offset_m", "bs_ris_horizontal_m",
                  "mr_initial_along_track_m", "carrier_hz", "bandwidth_hz")
_EXPONENT_KEYS = ("eps_direct", "eps_bs_ris", "eps_ris_mr", "eps_direct_nlos",
                  "eps_bs_ris_nlos", "eps_ris_mr_nlos")
_KAPPA_KEYS = ("kappa_direct", "kappa_bs_ris", "kappa_ris_mr")


def _scenario(r: _Reader) -> ScenarioConfig | None:
    defaults = ScenarioConfig()
    kwargs = {k: r.number(k, getattr(defaults, k)) for k in _SCENARIO_KEYS}
    kwargs["num_slots"] = r.number("num_slots", defaults.num_slots, integer=True)
    kwargs["num_elements"] = r.number("num_elements", defaults.num_elements, integer=True)
    kwargs["element_spacing_m"] = r.number("element_spacing_m", None)
    speed = r.raw("speed", "360 km/h")
    try:
        kwargs["speed_mps"] = parse_speed(speed)
    except ValueError as exc:
        r.errors.append(f"{r.key('speed')}: {exc}")
        kwargs["speed_mps"] = defaults.speed_mps
    r.finish()
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as exc:
        for p in str(exc).split("; "):
            name, _, msg = p.partition(": ")
            key = "speed" if name == "speed_mps" else name
            r.errors.append(f"{r.key(key)}: {msg}")
        return None


def _channel(r: _Reader, cfg: ScenarioConfig | None) -> ChannelParams | None:
    defaults = ChannelParams()
    kwargs = {k: r.number(k, getattr(defaults, k)) for k in _EXPONENT_KEYS}
    ok = True
    for k in _KAPPA_KEYS:
        try:
            kwargs[k] = parse_kappa(r.raw(k, "10 dB"))
        except ValueError as exc:
            r.errors.append(f"{r.key(k)}: {exc}")
            ok = False
    r.finish()
    if not ok or cfg is None:
        return None
    try:
        return ChannelParams(wavelength_m=cfg.wavelength_m, **kwargs)
    except ValueError as exc:
        for p in str(exc).split("; "):
            r.errors.append(f"{r.path}.{p}")
        return None


def _query(r: _Reader, cfg: ScenarioConfig | None) -> CoverageQuery | None:
    errors_before = len(r.errors)
    if r.has("power_dbm") and r.has("power_w"):
        r.errors.append(f"{r.key('power_w')}: give power_dbm or power_w, not both")
    if r.has("power_w"):
        power = r.number("power_w", 1e-3)
    else:
        power = dbm_to_watts(r.number("power_dbm", 0.0))
    if r.has("snr_threshold") and r.has("snr_threshold_db"):
        r.errors.append(f"{r.key('snr_threshold')}: give snr_threshold or snr_threshold_db, not both")
    if r.has("snr_threshold"):
        threshold = r.number("snr_threshold", 1e6)
    else:
        threshold = db_to_linear(r.number("snr_threshold_db", 60.0))
    psd = r.number("noise_psd_dbm_hz", -174.0)
    nf = r.number("noise_figure_db", 10.0)
    noise = r.number("noise_w", None)
    dof = r.choice("dof", DofVariant.COMPLEX_NU2.value, [d.value for d in DofVariant])
    r.finish()
    if not power > 0:
        r.errors.append(f"{r.key('power_w')}: must be > 0")
    if not threshold >= 0:
        r.errors.append(f"{r.key('snr_threshold')}: must be >= 0")
    if noise is not None and not noise > 0:
        r.errors.append(f"{r.key('noise_w')}: must be > 0")
    if len(r.errors) > errors_before or cfg is None:
        return None
    if noise is None:
        noise = thermal_noise_watts(cfg.bandwidth_hz, nf, psd)
    return CoverageQuery(power, noise, threshold, dof)


def _optimizer(r: _Reader) -> OptimizerOptions:
    d = OptimizerOptions()
    bits = r.number("bits", d.bits, integer=True)
    if bits is not None and not 1 <= bits <= 16:
        r.errors.append(f"{r.key('bits')}: must be in [1, 16], got {bits}")
    opts = OptimizerOptions(
        bits=bits,
        init=r.choice("init", d.init, ("alignment", "zeros", "random")),
        converge=r.flag("converge", d.converge),
        order=r.choice("order", d.order, ("ascending", "random")),
        objective=r.choice("objective", d.objective, ("mean_power", "coverage")),
    )
    r.finish()
    return opts


def _sweep(r: _Reader) -> SweepOptions:
    d = SweepOptions()
    kind = r.choice("kind", d.kind, SWEEP_KINDS)
    start = r.number("from", d.start)
    stop = r.number("to", d.stop)
    step = r.number("step", d.step)
    schemes = r.raw("schemes", list(d.schemes))
    if isinstance(schemes, str):
        schemes = [s.strip() for s in schemes.split(",") if s.strip()]
    r.finish()
    errs = validate_sweep_axis(kind, start, stop, step, schemes)
    r.errors.extend(f"{r.path}.{e}" for e in errs)
    return SweepOptions(kind, start, stop, step, tuple(schemes))


def validate_sweep_axis(kind, start, stop, step, schemes) -> list[str]:
    errs = []
    if not (math.isfinite(start) and math.isfinite(stop)) or start > stop:
        errs.append(f"from: must be finite and <= to ({start!r} > {stop!r})")
    if not (math.isfinite(step) and step > 0):
        errs.append(f"step: must be > 0, got {step!r}")
    if not schemes:
        errs.append("schemes: at least one scheme is required")
    for s in schemes:
        if s not in SCHEMES:
            errs.append(f"schemes: unknown scheme {s!r} (choose from {list(SCHEMES)})")
    if kind in ("elements", "bits"):
        for name, v in (("from", start), ("step", step)):
            if math.isfinite(v) and v != int(v):
                errs.append(f"{name}: {kind} sweeps need integer values, got {v!r}")
        if kind == "bits" and (start < 1 or stop > 16):
            errs.append("from: bits sweeps must stay within [1, 16]")
        if kind == "elements" and start < 0:
            errs.append("from: element counts must be >= 0")
    return errs


def parse_config(data, source: str = "<config>") -> ExperimentConfig:
    """Validate a parsed YAML mapping; raise :class:`ConfigError` listing every problem."""
    errors: list[str] = []
    root = _Reader(data, "", errors)
    sections = {name: _Reader(root.raw(name), name, errors)
                for name in ("scenario", "channel", "coverage", "optimizer",
                             "oracle", "analysis", "sweep")}
    root.finish()
    cfg = _scenario(sections["scenario"])
    params = _channel(sections["channel"], cfg)
    query = _query(sections["coverage"], cfg)
    optimizer = _optimizer(sections["optimizer"])
    oracle = sections["oracle"]
    trials = oracle.number("trials", 100_000, integer=True)
    seed = oracle.number("seed", 1, integer=True)
    oracle.finish()
    if trials is not None and trials < 0:
        errors.append("oracle.trials: must be >= 0")
    if seed is not None and not 0 <= seed < 2 ** 64:
        errors.append("oracle.seed: must be an unsigned 64-bit integer")
    analysis = sections["analysis"]
    slot = analysis.number("slot", None, integer=True)
    variance_model = analysis.choice("variance_model", "cascaded", VARIANCE_MODELS)
    analysis.finish()
    if cfg is not None and slot is not None and not 0 <= slot < cfg.num_slots:
        errors.append(f"analysis.slot: must be in [0, {cfg.num_slots}), got {slot}")
    sweep = _sweep(sections["sweep"])
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(cfg, params, query, optimizer, trials, seed, slot,
                            variance_model, sweep)


def validate_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read ({exc.strerror or exc})"]) from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: YAML syntax error: {exc}"]) from exc
    return parse_config(data, str(path))
