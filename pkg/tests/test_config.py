import math

import pytest
import yaml

from riscover.channel import thermal_noise_watts
from riscover.config import ConfigError, ExperimentConfig, parse_config, parse_kappa, parse_speed, validate_config
from riscover.coverage import DofVariant


def errors_of(data) -> list[str]:
    with pytest.raises(ConfigError) as exc:
        parse_config(data)
    return exc.value.errors


def test_empty_config_gives_table_defaults():
    for data in (None, {}):
        ec = parse_config(data)
        s, c, q = ec.scenario, ec.channel, ec.query
        assert s.speed_mps == pytest.approx(100.0)
        assert (s.bs_height_m, s.ris_height_m, s.mr_height_m) == (10.0, 2.0, 2.5)
        assert (s.bandwidth_hz, s.carrier_hz) == (20e6, 2.35e9)
        assert c.kappa_direct == c.kappa_bs_ris == c.kappa_ris_mr == pytest.approx(10.0)
        assert q.noise_w == pytest.approx(thermal_noise_watts(20e6))
        assert 10 * math.log10(q.noise_w) + 30 == pytest.approx(-90.99, abs=0.01)
        assert c.wavelength_m == s.wavelength_m


def test_negative_bandwidth_names_key():
    errs = errors_of({"scenario": {"bandwidth_hz": -5}})
    assert len(errs) == 1 and errs[0].startswith("scenario.bandwidth_hz")


def test_kappa_db_string():
    ec = parse_config({"channel": {"kappa_direct": "10 dB", "kappa_bs_ris": "3 linear",
                                   "kappa_ris_mr": "inf"}})
    assert ec.channel.kappa_direct == pytest.approx(10.0)
    assert ec.channel.kappa_bs_ris == 3.0
    assert ec.channel.kappa_ris_mr == math.inf


@pytest.mark.parametrize("text,mps", [("360 km/h", 100.0), ("100 m/s", 100.0), ("0 m/s", 0.0),
                                      ("72km/h", 20.0)])
def test_speed_units(text, mps):
    assert parse_speed(text) == pytest.approx(mps)


@pytest.mark.parametrize("bad", ["360", 360, "fast", "10 mph"])
def test_speed_requires_unit(bad):
    with pytest.raises(ValueError):
        parse_speed(bad)


def test_kappa_parsing():
    assert parse_kappa(0) == 1.0  # bare numbers are dB
    assert parse_kappa("0 linear") == 0.0
    with pytest.raises(ValueError):
        parse_kappa("-1 linear")
    with pytest.raises(ValueError):
        parse_kappa("loud")


def test_errors_aggregate_with_paths():
    errs = errors_of({
        "scenario": {"bs_height_m": -1, "speed": "fast", "bogus": 1},
        "channel": {"eps_direct": "x"},
        "coverage": {"dof": "nu3"},
        "optimizer": {"bits": 40},
        "oracle": {"trials": -3},
        "sweep": {"from": 5, "to": 1},
        "extra": {},
    })
    joined = "\n".join(errs)
    for key in ("scenario.bs_height_m", "scenario.speed", "scenario.bogus", "channel.eps_direct",
                "coverage.dof", "optimizer.bits", "oracle.trials", "sweep.from", "extra"):
        assert key in joined, key


def test_power_and_threshold_forms():
    ec = parse_config({"coverage": {"power_w": 2.0, "snr_threshold": 100.0, "dof": "paper_nu1",
                                    "noise_w": 1e-12}})
    assert (ec.query.power_w, ec.query.snr_threshold, ec.query.noise_w) == (2.0, 100.0, 1e-12)
    assert ec.query.dof_variant is DofVariant.PAPER_NU1
    errs = errors_of({"coverage": {"power_w": 1.0, "power_dbm": 0}})
    assert any("power" in e for e in errs)


def test_slot_range_checked():
    assert parse_config({"analysis": {"slot": 10}}).slot == 10
    assert errors_of({"analysis": {"slot": 5000}})[0].startswith("analysis.slot")


def test_sweep_section():
    ec = parse_config({"sweep": {"kind": "elements", "from": 0, "to": 32, "step": 4,
                                 "schemes": "ris_local_search,random_phase"}})
    assert ec.sweep.schemes == ("ris_local_search", "random_phase")
    errs = errors_of({"sweep": {"kind": "elements", "from": 0.5, "schemes": ["warp"]}})
    assert any("sweep.from" in e for e in errs) and any("sweep.schemes" in e for e in errs)


def test_validate_config_file(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"scenario": {"num_elements": 4}, "oracle": {"seed": 7}}))
    ec = validate_config(path)
    assert ec.scenario.num_elements == 4 and ec.seed == 7
    bad = tmp_path / "bad.yaml"
    bad.write_text("scenario: [1, 2")
    with pytest.raises(ConfigError):
        validate_config(bad)
    with pytest.raises(ConfigError):
        validate_config(tmp_path / "missing.yaml")


def test_shipped_configs_are_valid():
    from pathlib import Path
    root = Path(__file__).resolve().parents[1] / "configs"
    for path in sorted(root.glob("*.yaml")):
        assert isinstance(validate_config(path), ExperimentConfig)
