import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaslab.calibrate import (
    DEFAULT_WEIGHTS,
    PAPER_TOTALS,
    CalibrationError,
    CalibrationTargets,
    apportion,
    calibrate,
    calibrate_pattern,
    cumulative_gas,
    paper_code_sizes,
)
from gaslab.config import ScenarioConfig

TARGETS = CalibrationTargets()


def floor_of(pattern):
    return cumulative_gas(pattern, {pattern: apportion(pattern, 0, DEFAULT_WEIGHTS, TARGETS)})


@pytest.mark.parametrize("pattern", ["classic", "proxy", "diamond"])
def test_floor_gives_zero_sizes(pattern):
    sizes = calibrate_pattern(pattern, floor_of(pattern))
    assert all(c["deployed_size"] == 0 for v in sizes.values() for c in v.values())


@pytest.mark.parametrize("pattern", ["classic", "proxy", "diamond"])
def test_below_floor_names_floor(pattern):
    floor = floor_of(pattern)
    with pytest.raises(CalibrationError, match=str(floor)):
        calibrate_pattern(pattern, floor - 1)


@pytest.mark.parametrize("pattern", ["classic", "proxy", "diamond"])
def test_hits_published_totals(pattern):
    got = cumulative_gas(pattern, paper_code_sizes())
    assert abs(got - PAPER_TOTALS[pattern]) / PAPER_TOTALS[pattern] < 0.001


@settings(max_examples=25)
@given(st.sampled_from(["classic", "proxy", "diamond"]), st.integers(0, 5_000_000))
def test_recalibration_fixed_point(pattern, extra):
    target = floor_of(pattern) + extra
    sizes = calibrate_pattern(pattern, target)
    simulated = cumulative_gas(pattern, {pattern: sizes})
    assert simulated >= target
    assert calibrate_pattern(pattern, simulated) == sizes


def test_calibrated_table_is_valid_scenario():
    ScenarioConfig(code_sizes=paper_code_sizes())


def test_paper_code_sizes_is_a_copy():
    a = paper_code_sizes()
    a["classic"]["V1"]["notary-v1"]["deployed_size"] = -1
    assert paper_code_sizes()["classic"]["V1"]["notary-v1"]["deployed_size"] >= 0


def test_bad_weights_and_targets():
    with pytest.raises(CalibrationError):
        calibrate(TARGETS, {"classic": {"V1": {}}})
    with pytest.raises(CalibrationError):
        CalibrationTargets(totals={"classic": -5})
    with pytest.raises(CalibrationError):
        CalibrationTargets.from_dict({"totals": {"classic": 1}, "extra": 1})


def test_initcode_overhead():
    sizes = apportion("classic", 10_000, DEFAULT_WEIGHTS, TARGETS)
    entry = sizes["V1"]["notary-v1"]
    assert entry["initcode_size"] == entry["deployed_size"] * 110 // 100
