from hypothesis import given
from hypothesis import strategies as st

from gaslab.app import AppVersion, CallRequest
from gaslab.bench import GasReport, ReportRow, aggregate, run_scenario
from gaslab.config import ScenarioConfig
from gaslab.dispatch import Pattern, World
from gaslab.emit import (
    REPORT_COLUMNS,
    emit_all,
    load_report_dir,
    parse_report_csv,
    parse_report_json,
    report_json,
    report_rows,
    to_csv,
    to_json,
    trace_csv,
    trace_json,
)


def test_empty_report_csv_is_header_only():
    text = to_csv(report_rows(aggregate([])), REPORT_COLUMNS)
    assert text == ",".join(REPORT_COLUMNS) + "\n"


def test_one_row_two_lines():
    report = GasReport({(Pattern.PROXY, AppVersion.V2, "updateFile"): ReportRow(1, 9, 9, 9, 9)})
    lines = to_csv(report_rows(report), REPORT_COLUMNS).splitlines()
    assert lines == [",".join(REPORT_COLUMNS), "proxy,V2,updateFile,1,9,9,9,9"]


rows = st.dictionaries(
    st.tuples(
        st.sampled_from(list(Pattern)),
        st.sampled_from(list(AppVersion)),
        st.sampled_from(["addFile", "updateFile", "getFileHash"]),
    ),
    st.integers(0, 10**6).map(lambda g: ReportRow(3, g, g + 1, g + 1, g + 2)),
)


@given(rows)
def test_csv_and_json_roundtrip(table):
    report = aggregate([])
    report.rows = table
    assert parse_report_csv(to_csv(report_rows(report), REPORT_COLUMNS)).rows == table
    assert parse_report_json(to_json(report_json(report))).rows == table


def test_emit_is_byte_identical(tmp_path):
    config = ScenarioConfig(iterations=3)
    outputs = []
    for d in ("a", "b"):
        records, report = run_scenario(config)
        paths = emit_all(records, report, tmp_path / d)
        outputs.append({p.name: p.read_bytes() for p in paths})
    assert outputs[0] == outputs[1]
    assert len(outputs[0]) == 5
    loaded = load_report_dir(tmp_path / "a")
    assert loaded.rows == report.rows
    assert loaded.deployment == report.deployment


def test_trace_exports():
    world = World(Pattern.PROXY)
    _, trace = world.call(CallRequest("addFile", "x", 5))
    data = trace_json(trace)
    assert data["outcome"] == "ok"
    assert data["ops"][-1]["cumulative"] == trace.gas
    assert len(trace_csv(trace).splitlines()) == len(trace.ops) + 1
