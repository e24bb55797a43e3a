"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad flags, scenario, targets),
2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from gaslab.advisor import QUESTIONS, DecisionAnswers, decide
from gaslab.app import FUNCTIONS, AppVersion, CallRequest
from gaslab.bench import diff_patterns, pseudo_hash, run_scenario
from gaslab.calibrate import (
    DEFAULT_WEIGHTS,
    CalibrationError,
    CalibrationTargets,
    calibrate,
    cumulative_gas,
)
from gaslab.config import ConfigError, env_schedule, load_scenario
from gaslab.dispatch import Pattern, World
from gaslab.emit import (
    REPORT_COLUMNS,
    emit_all,
    load_report_dir,
    report_json,
    report_rows,
    to_csv,
    to_json,
    trace_json,
    trace_text,
)
from gaslab.gas import DEFAULT_SCHEDULE


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gaslab", description="Gas-cost model for upgradeable contract patterns")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a scenario and write reports")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--include-intrinsic", action="store_true")
    p.add_argument("--seed-name", help="override the scenario's base file name")

    p = sub.add_parser("report", help="print a report written by simulate")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--compare", action="store_true", help="print per-pattern deltas vs classic")

    p = sub.add_parser("trace", help="print the op trace of one call")
    p.add_argument("--pattern", required=True, choices=[str(x) for x in Pattern])
    p.add_argument("--version", default="V2")
    p.add_argument("--call", required=True, choices=FUNCTIONS)
    p.add_argument("--name", default="file")
    p.add_argument("--hash", help="hex content hash")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("calibrate", help="fit code sizes to deployment totals")
    p.add_argument("--targets", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--weights", help="JSON file of relative contract weights")

    p = sub.add_parser("decide", help="recommend a pattern")
    p.add_argument("--answers", help="JSON file of answers; prompts when omitted")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from None


def cmd_simulate(args) -> int:
    config = load_scenario(args.scenario)
    if args.include_intrinsic:
        config.include_intrinsic = True
    if args.seed_name is not None:
        config.base_name = args.seed_name
        errors = config.violations()
        if errors:
            raise ConfigError(errors)
    records, report = run_scenario(config)
    for path in emit_all(records, report, args.out):
        print(path)
    return 0


def cmd_report(args) -> int:
    report = load_report_dir(args.in_dir)
    if args.compare:
        rows = []
        for row in diff_patterns(report):
            for pattern, avg in row.averages.items():
                rows.append(
                    {
                        "version": str(row.version),
                        "function": row.function,
                        "pattern": str(pattern),
                        "avg": avg,
                        "delta": row.delta[pattern],
                        "relative": round(row.relative[pattern], 6),
                    }
                )
        if args.format == "json":
            sys.stdout.write(to_json(rows))
        else:
            cols = ("version", "function", "pattern", "avg", "delta", "relative")
            sys.stdout.write(to_csv(rows, cols))
        return 0
    if args.format == "json":
        sys.stdout.write(to_json(report_json(report)))
    else:
        sys.stdout.write(to_csv(report_rows(report), REPORT_COLUMNS))
    return 0


def cmd_trace(args) -> int:
    try:
        version = AppVersion.parse(args.version)
        h = int(args.hash, 16) if args.hash else None
        name = args.name
        name.encode("ascii")
    except (ValueError, UnicodeEncodeError) as exc:
        raise ConfigError([str(exc)]) from None
    schedule = env_schedule() or DEFAULT_SCHEDULE
    world = World.at_version(args.pattern, version, schedule=schedule)
    if args.call in ("updateFile", "getFileName", "getFileHash"):
        world.call(CallRequest("addFile", name, pseudo_hash(name, 0)))
    if h is None:
        h = pseudo_hash(name, 1 if args.call == "updateFile" else 0)
    request = CallRequest(args.call, name, h, h)
    total, trace = world.call(request)
    if args.format == "json":
        out = trace_json(trace)
        out.update({"total": total, "execution": total - trace.intrinsic})
        sys.stdout.write(to_json(out))
    else:
        sys.stdout.write(trace_text(trace))
        sys.stdout.write(f"total {total} execution {total - trace.intrinsic}\n")
    return 0


def cmd_calibrate(args) -> int:
    try:
        targets = CalibrationTargets.from_dict(_read_json(args.targets))
    except TypeError as exc:
        raise CalibrationError(str(exc)) from None
    weights = _read_json(args.weights) if args.weights else DEFAULT_WEIGHTS
    schedule = env_schedule() or DEFAULT_SCHEDULE
    table = calibrate(targets, weights, schedule)
    Path(args.out).write_text(to_json({"code_sizes": table}))
    for pattern, sizes in table.items():
        got = cumulative_gas(pattern, {pattern: sizes}, schedule)
        print(f"{pattern}: target {targets.totals[pattern]} simulated {got}")
    return 0


def _prompt_answers() -> DecisionAnswers:
    values = {}
    for key, question in QUESTIONS.items():
        reply = input(f"{question} [y/N] ").strip().lower()
        values[key] = reply in ("y", "yes", "true", "1")
    return DecisionAnswers(**values)


def cmd_decide(args) -> int:
    if args.answers:
        try:
            answers = DecisionAnswers.from_dict(_read_json(args.answers))
        except ValueError as exc:
            raise ConfigError([str(exc)]) from None
    else:
        answers = _prompt_answers()
    rec = decide(answers)
    if args.format == "json":
        sys.stdout.write(
            to_json({"pattern": str(rec.pattern), "rationale": rec.rationale, "cautions": rec.cautions})
        )
    else:
        print(f"recommended: {rec.pattern}")
        for clause in rec.rationale:
            print(f"  + {clause}")
        for clause in rec.cautions:
            print(f"  ! {clause}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "report": cmd_report,
    "trace": cmd_trace,
    "calibrate": cmd_calibrate,
    "decide": cmd_decide,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ConfigError as exc:
        for error in exc.errors:
            print(f"error: {error}", file=sys.stderr)
        return 1
    except (CalibrationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
