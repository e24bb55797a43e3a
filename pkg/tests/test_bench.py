import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaslab.app import AppVersion, version_functions
from gaslab.bench import (
    CallRecord,
    aggregate,
    diff_patterns,
    name_sequence,
    run_cell,
    run_scenario,
    summarize,
)
from gaslab.config import ConfigError, ScenarioConfig
from gaslab.dispatch import Pattern


def rec(gas, function="addFile", pattern=Pattern.CLASSIC, outcome="ok"):
    return CallRecord(pattern, AppVersion.V1, function, "default", 0, gas, gas, None, outcome)


def test_growing_names():
    assert name_sequence("growing", "a", 3) == ["a", "aa", "aaa"]


def test_identical_names():
    assert name_sequence("identical", "f", 3) == ["f"] * 3


def test_varying_names():
    assert name_sequence("varying-last-char", "aa", 3) == ["aa", "ab", "ac"]
    assert name_sequence("varying-last-char", "file", 2) == ["file", "filf"]


@given(st.text(alphabet="abcxyz.", min_size=2, max_size=12), st.integers(1, 200))
def test_varying_names_distinct_same_length(base, n):
    names = name_sequence("varying-last-char", base, n)
    if 26 ** (len(base)) >= n:
        assert len(set(names)) == n
    assert {len(x) for x in names} == {len(base)}


def test_name_sequence_rejects():
    with pytest.raises(ValueError):
        name_sequence("growing", "a", 0)
    with pytest.raises(ValueError):
        name_sequence("shrinking", "a", 1)


def test_aggregate_single():
    row = aggregate([rec(5)]).row("classic", "V1", "addFile")
    assert (row.calls, row.min, row.avg, row.median, row.max) == (1, 5, 5, 5, 5)


def test_aggregate_even_count():
    row = aggregate([rec(g) for g in (4, 1, 3, 2)]).row("classic", "V1", "addFile")
    assert row.median == 2 and row.avg == 3 and row.min == 1 and row.max == 4


def test_aggregate_empty_and_reverted():
    assert aggregate([]).rows == {}
    report = aggregate([rec(7, outcome="reverted:x")])
    assert report.rows == {}
    assert aggregate([rec(7, outcome="reverted:x")], include_reverted=True).rows


@given(st.lists(st.integers(0, 10**7), min_size=1, max_size=50))
def test_summary_bounds(values):
    row = summarize(values)
    assert row.min <= row.median <= row.max
    assert row.min <= row.avg <= row.max
    assert row.calls == len(values)


def test_cardinality_one_iteration():
    config = ScenarioConfig(patterns=[Pattern.PROXY], versions=[AppVersion.V3], iterations=1)
    records, report = run_scenario(config)
    assert len(report.rows) == len(version_functions(AppVersion.V3))
    # addFile runs once per name config
    assert len(records) == len(version_functions(AppVersion.V3)) - 1 + 3


def test_run_cell_is_deterministic():
    config = ScenarioConfig(iterations=5)
    a = [(r.function, r.config, r.gas) for r in run_cell(config, "diamond", "V2")]
    b = [(r.function, r.config, r.gas) for r in run_cell(config, "diamond", "V2")]
    assert a == b


def test_all_paper_calls_succeed(paper_run):
    _, records, _ = paper_run
    assert all(r.outcome == "ok" for r in records)
    cases = sum(len(version_functions(v)) + 2 for v in AppVersion)
    assert len(records) == 3 * 100 * cases


def test_diff_patterns(paper_run):
    _, _, report = paper_run
    rows = diff_patterns(report)
    assert rows
    for row in rows:
        assert row.delta[Pattern.CLASSIC] == 0
        assert row.delta[Pattern.PROXY] == 4800
        assert row.delta[Pattern.DIAMOND] == 4866


def test_diff_patterns_needs_baseline():
    report = aggregate([rec(1, pattern=Pattern.PROXY)])
    with pytest.raises(ValueError):
        diff_patterns(report)


def test_config_lists_every_error():
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(
            {"iterations": 0, "patterns": ["kite"], "name_configs": ["x"], "bogus": 1}
        )
    assert len(exc.value.errors) == 4


def test_config_roundtrip():
    config = ScenarioConfig(iterations=7, base_name="doc")
    again = ScenarioConfig.from_dict(config.to_dict())
    assert again.to_dict() == config.to_dict()
