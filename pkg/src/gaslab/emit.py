"""CSV/JSON emitters and readers for reports, call series and traces."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from gaslab.app import AppVersion
from gaslab.bench import DeploymentRow, GasReport, ReportRow, report_key_order
from gaslab.dispatch import Pattern
from gaslab.trace import OpTrace, format_trace, trace_rows

REPORT_COLUMNS = ("pattern", "version", "function", "calls", "min", "avg", "median", "max")
CALL_COLUMNS = ("pattern", "version", "function", "config", "iteration", "gas")
DEPLOYMENT_COLUMNS = ("pattern", "version", "gas", "cumulative")
TRACE_COLUMNS = ("index", "kind", "target", "cold", "gas", "cumulative")

REPORT_CSV = "report.csv"
REPORT_JSON = "report.json"
CALLS_CSV = "calls.csv"
CALLS_JSON = "calls.json"
DEPLOYMENT_CSV = "deployment.csv"


def report_rows(report: GasReport) -> list[dict]:
    rows = []
    for key in sorted(report.rows, key=report_key_order):
        pattern, version, function = key
        r = report.rows[key]
        rows.append(
            {
                "pattern": str(pattern),
                "version": str(version),
                "function": function,
                "calls": r.calls,
                "min": r.min,
                "avg": r.avg,
                "median": r.median,
                "max": r.max,
            }
        )
    return rows


def deployment_dicts(report: GasReport) -> list[dict]:
    return [
        {"pattern": str(d.pattern), "version": str(d.version), "gas": d.gas, "cumulative": d.cumulative}
        for d in report.deployment
    ]


def call_rows(records) -> list[dict]:
    return [
        {
            "pattern": str(r.pattern),
            "version": str(r.version),
            "function": r.function,
            "config": r.config,
            "iteration": r.iteration,
            "gas": r.gas,
        }
        for r in records
    ]


def to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _csv_value(row[c]) for c in columns})
    return buf.getvalue()


def _csv_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


def to_json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def report_json(report: GasReport) -> dict:
    return {"rows": report_rows(report), "deployment": deployment_dicts(report)}


def report_from_rows(rows, deployment=()) -> GasReport:
    parsed = {}
    for row in rows:
        key = (Pattern.parse(row["pattern"]), AppVersion.parse(row["version"]), row["function"])
        parsed[key] = ReportRow(
            int(row["calls"]), int(row["min"]), int(row["avg"]), int(row["median"]), int(row["max"])
        )
    deploy = [
        DeploymentRow(
            Pattern.parse(d["pattern"]), AppVersion.parse(d["version"]), int(d["gas"]), int(d["cumulative"])
        )
        for d in deployment
    ]
    return GasReport({k: parsed[k] for k in sorted(parsed, key=report_key_order)}, deploy)


def parse_report_csv(text: str, deployment_text: str | None = None) -> GasReport:
    rows = list(csv.DictReader(io.StringIO(text)))
    deployment = list(csv.DictReader(io.StringIO(deployment_text))) if deployment_text else []
    return report_from_rows(rows, deployment)


def parse_report_json(text: str) -> GasReport:
    data = json.loads(text)
    return report_from_rows(data.get("rows", []), data.get("deployment", []))


def trace_json(trace: OpTrace) -> dict:
    return {
        "ops": trace_rows(trace),
        "outcome": "ok" if trace.ok else f"reverted:{trace.reverted}",
        "value": _json_value(trace.value),
    }


def _json_value(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return f"{value:#066x}"
    return str(value)


def trace_csv(trace: OpTrace) -> str:
    return to_csv(trace_rows(trace), TRACE_COLUMNS)


def trace_text(trace: OpTrace) -> str:
    return format_trace(trace)


def emit_all(records, report: GasReport, out_dir) -> list[Path]:
    """Write report, deployment and call-series files into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        REPORT_CSV: to_csv(report_rows(report), REPORT_COLUMNS),
        REPORT_JSON: to_json(report_json(report)),
        DEPLOYMENT_CSV: to_csv(deployment_dicts(report), DEPLOYMENT_COLUMNS),
        CALLS_CSV: to_csv(call_rows(records), CALL_COLUMNS),
        CALLS_JSON: to_json(call_rows(records)),
    }
    paths = []
    for name, text in files.items():
        path = out / name
        path.write_text(text)
        paths.append(path)
    return paths


def load_report_dir(in_dir) -> GasReport:
    """Read a report written by :func:`emit_all`, preferring the JSON copy."""
    src = Path(in_dir)
    if (src / REPORT_JSON).exists():
        return parse_report_json((src / REPORT_JSON).read_text())
    deployment = src / DEPLOYMENT_CSV
    return parse_report_csv(
        (src / REPORT_CSV).read_text(), deployment.read_text() if deployment.exists() else None
    )
