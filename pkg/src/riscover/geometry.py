"""Scene layout: base station, RIS elements and the train-mounted relay.

Coordinate frame: the track is the x-axis (y = 0). The BS and the RIS stand
on the same side of the track at y = -bs_track_offset_m and
y = -ris_track_offset_m. The BS foot is at x = 0 unless ``bs_x_m`` moves it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite point {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry, mobility and RF constants of one deployment.

    Defaults describe the reference deployment (360 km/h, 10 m BS mast,
    2 m RIS, 2.5 m relay, 2.35 GHz, 20 MHz). Track offsets, slot timing and
    the relay start point are free choices documented with each field.
    ``element_spacing_m=None`` resolves to half a carrier wavelength.
    """

    speed_mps: float = 100.0
    slot_duration_s: float = 1e-3
    num_slots: int = 1000
    bs_height_m: float = 10.0
    ris_height_m: float = 2.0
    mr_height_m: float = 2.5
    bs_track_offset_m: float = 50.0
    ris_track_offset_m: float = 5.0
    bs_ris_horizontal_m: float = 0.0
    mr_initial_along_track_m: float = -50.0
    num_elements: int = 16
    element_spacing_m: float | None = None
    carrier_hz: float = 2.35e9
    bandwidth_hz: float = 20e6
    bs_x_m: float = 0.0

    def __post_init__(self):
        if self.element_spacing_m is None and self.carrier_hz > 0:
            object.__setattr__(self, "element_spacing_m", self.wavelength_m / 2)
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        """Invariant violations as ``field: message`` strings (empty when valid)."""
        out = []
        positive = ("bs_height_m", "ris_height_m", "mr_height_m", "bs_track_offset_m",
                    "ris_track_offset_m", "element_spacing_m", "carrier_hz",
                    "bandwidth_hz", "slot_duration_s")
        for name in positive:
            value = getattr(self, name)
            if value is None or not (math.isfinite(value) and value > 0):
                out.append(f"{name}: must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.speed_mps) and self.speed_mps >= 0):
            out.append(f"speed_mps: must be finite and >= 0, got {self.speed_mps!r}")
        if int(self.num_elements) != self.num_elements or self.num_elements < 0:
            out.append(f"num_elements: must be an integer >= 0, got {self.num_elements!r}")
        if int(self.num_slots) != self.num_slots or self.num_slots < 1:
            out.append(f"num_slots: must be an integer >= 1, got {self.num_slots!r}")
        for name in ("bs_ris_horizontal_m", "mr_initial_along_track_m", "bs_x_m"):
            if not math.isfinite(getattr(self, name)):
                out.append(f"{name}: must be finite")
        return out

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class LinkDistances:
    d_direct_m: float
    d_bs_ris_m: np.ndarray = field(repr=False)
    d_ris_mr_m: np.ndarray = field(repr=False)


def _check_slot(cfg: ScenarioConfig, slot: int) -> None:
    if not 0 <= slot < cfg.num_slots:
        raise IndexError(f"slot {slot} outside [0, {cfg.num_slots})")


def bs_position(cfg: ScenarioConfig) -> Point3:
    return Point3(cfg.bs_x_m, -cfg.bs_track_offset_m, cfg.bs_height_m)


def mr_position(cfg: ScenarioConfig, slot: int) -> Point3:
    _check_slot(cfg, slot)
    x = cfg.mr_initial_along_track_m + cfg.speed_mps * cfg.slot_duration_s * slot
    return Point3(x, 0.0, cfg.mr_height_m)


def ris_element_positions(cfg: ScenarioConfig) -> list[Point3]:
    """Elements on a line parallel to the track, centred on ``bs_x + d_BR^h``."""
    n = cfg.num_elements
    center = cfg.bs_x_m + cfg.bs_ris_horizontal_m
    offsets = (np.arange(n) - (n - 1) / 2) * cfg.element_spacing_m
    return [Point3(center + float(o), -cfg.ris_track_offset_m, cfg.ris_height_m)
            for o in offsets]


def euclidean_distance(p: Point3, q: Point3) -> float:
    return math.hypot(p.x - q.x, p.y - q.y, p.z - q.z)


def link_distances(cfg: ScenarioConfig, slot: int) -> LinkDistances:
    bs = bs_position(cfg)
    mr = mr_position(cfg, slot)
    elements = ris_element_positions(cfg)
    d_g = np.array([euclidean_distance(bs, e) for e in elements], dtype=float)
    d_r = np.array([euclidean_distance(e, mr) for e in elements], dtype=float)
    return LinkDistances(euclidean_distance(bs, mr), d_g, d_r)


def nearest_slot(cfg: ScenarioConfig) -> int:
    """Slot at which the relay is closest to the foot of the BS perpendicular."""
    step = cfg.speed_mps * cfg.slot_duration_s
    if step == 0:
        return 0
    s = round((cfg.bs_x_m - cfg.mr_initial_along_track_m) / step)
    return int(min(max(s, 0), cfg.num_slots - 1))
