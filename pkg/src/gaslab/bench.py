"""Benchmark protocol: workloads, per-call records and gas reports.

Every test case starts from a fresh copy of the deployed (and upgraded)
world, as a test runner's per-test setup would, and its iterations run as
separate transactions against storage that persists between them.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Optional

from gaslab.app import FUNCTIONS, AppVersion, CallRequest, version_functions
from gaslab.calibrate import per_version_gas
from gaslab.config import ScenarioConfig
from gaslab.dispatch import Pattern, World
from gaslab.storage import keccak256
from gaslab.trace import OpTrace

ALPHABET = string.ascii_lowercase
GROW_CHAR = "a"
DEFAULT_CONFIG = "default"


def name_sequence(config: str, base_name: str, iterations: int) -> list[str]:
    """File names for ``iterations`` runs of one filename configuration.

    ``growing`` appends one character per iteration. ``varying-last-char``
    keeps the length and counts the trailing characters through a-z like
    an odometer (the last character moves first); tail characters outside
    a-z read as ``a``. ``identical`` repeats ``base_name``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if config == "growing":
        return [base_name + GROW_CHAR * i for i in range(iterations)]
    if config == "identical":
        return [base_name] * iterations
    if config != "varying-last-char":
        raise ValueError(f"unknown name config {config!r}")

    radix = len(ALPHABET)
    positions = 1
    while radix**positions < iterations and positions < len(base_name):
        positions += 1
    head, tail = base_name[:-positions], base_name[-positions:]
    start = 0
    for ch in tail:
        start = start * radix + max(ALPHABET.find(ch), 0)
    names = []
    for i in range(iterations):
        value = (start + i) % radix**positions
        digits = []
        for _ in range(positions):
            value, d = divmod(value, radix)
            digits.append(ALPHABET[d])
        names.append(head + "".join(reversed(digits)))
    return names


def pseudo_hash(name: str, iteration: int) -> int:
    """Deterministic content hash for a (name, iteration) pair."""
    return int.from_bytes(keccak256(name.encode() + iteration.to_bytes(32, "big")), "big")


@dataclass
class CallRecord:
    pattern: Pattern
    version: AppVersion
    function: str
    config: str
    iteration: int
    gas: int
    total: int
    trace: Optional[OpTrace] = field(default=None, repr=False, compare=False)
    outcome: str = "ok"


@dataclass(frozen=True)
class ReportRow:
    calls: int
    min: int
    avg: int
    median: int
    max: int


@dataclass(frozen=True)
class DeploymentRow:
    pattern: Pattern
    version: AppVersion
    gas: int
    cumulative: int


@dataclass
class GasReport:
    rows: dict = field(default_factory=dict)  # (pattern, version, function) -> ReportRow
    deployment: list = field(default_factory=list)

    def row(self, pattern, version, function) -> ReportRow:
        return self.rows[(Pattern.parse(pattern), AppVersion.parse(version), function)]

    def patterns(self) -> list[Pattern]:
        return sorted({k[0] for k in self.rows}, key=_pattern_rank)


def _pattern_rank(p: Pattern) -> int:
    return list(Pattern).index(p)


def report_key_order(key) -> tuple:
    pattern, version, function = key
    rank = FUNCTIONS.index(function) if function in FUNCTIONS else len(FUNCTIONS)
    return (_pattern_rank(pattern), int(version), rank, function)


def summarize(values: list[int]) -> ReportRow:
    """min / rounded-half-up average / lower median / max."""
    ordered = sorted(values)
    n = len(ordered)
    avg = (2 * sum(ordered) + n) // (2 * n)
    return ReportRow(n, ordered[0], avg, ordered[(n - 1) // 2], ordered[-1])


def aggregate(records, include_reverted: bool = False, deployment=()) -> GasReport:
    groups: dict = {}
    for r in records:
        if r.outcome != "ok" and not include_reverted:
            continue
        groups.setdefault((r.pattern, r.version, r.function), []).append(r.gas)
    rows = {k: summarize(groups[k]) for k in sorted(groups, key=report_key_order)}
    return GasReport(rows, list(deployment))


class _CaseRunner:
    def __init__(self, config: ScenarioConfig, pattern: Pattern, version: AppVersion):
        self.config = config
        self.pattern = pattern
        self.version = version
        self.records: list[CallRecord] = []

    def call(self, function, name="", h=0, other=0) -> CallRequest:
        c = self.config
        return CallRequest(function, name, h, other, c.caller, c.timestamp)

    def run(self, world: World, request: CallRequest, config: str, iteration: int) -> None:
        total, trace = world.call(request)
        gas = total if self.config.include_intrinsic else total - trace.intrinsic
        outcome = "ok" if trace.ok else f"reverted:{trace.reverted}"
        self.records.append(
            CallRecord(
                self.pattern, self.version, request.function, config, iteration, gas, total,
                trace, outcome,
            )
        )


def run_cell(config: ScenarioConfig, pattern, version, sizes: dict | None = None) -> list:
    """All test cases of one (pattern, version) cell."""
    pattern, version = Pattern.parse(pattern), AppVersion.parse(version)
    base = World.at_version(
        pattern,
        version,
        sizes=sizes if sizes is not None else config.sizes(),
        schedule=config.schedule,
        costs=config.app_costs,
    )
    runner = _CaseRunner(config, pattern, version)
    n = config.iterations
    growing = name_sequence("growing", config.base_name, n)

    for function in version_functions(version):
        if function == "addFile":
            for cfg in config.name_configs:
                world = base.copy()
                names = name_sequence(cfg, config.base_name, n)
                for i, name in enumerate(names):
                    h = pseudo_hash(name, 0 if cfg == "identical" else i)
                    runner.run(world, runner.call("addFile", name, h), cfg, i)
            continue

        world = base.copy()
        if function != "compareHashes":
            for i, name in enumerate(growing):
                world.call(runner.call("addFile", name, pseudo_hash(name, i)))
        for i, name in enumerate(growing):
            if function == "updateFile":
                request = runner.call(function, name, pseudo_hash(name, i + n))
            elif function == "compareHashes":
                h = pseudo_hash(name, i)
                request = runner.call(function, name, h, h)
            else:
                request = runner.call(function, name)
            runner.run(world, request, DEFAULT_CONFIG, i)
    return runner.records


def deployment_rows(config: ScenarioConfig, sizes: dict | None = None) -> list[DeploymentRow]:
    sizes = sizes if sizes is not None else config.sizes()
    rows = []
    for pattern in sorted(set(config.patterns), key=_pattern_rank):
        per_version = per_version_gas(pattern, sizes, config.schedule)
        running = 0
        for version in AppVersion:
            running += per_version[str(version)]
            if version in config.versions:
                rows.append(DeploymentRow(pattern, version, per_version[str(version)], running))
    return rows


def run_scenario(config: ScenarioConfig) -> tuple[list[CallRecord], GasReport]:
    sizes = config.sizes()
    records: list[CallRecord] = []
    for pattern in sorted(set(config.patterns), key=_pattern_rank):
        for version in sorted(set(config.versions)):
            records.extend(run_cell(config, pattern, version, sizes))
    report = aggregate(records, config.include_reverted, deployment_rows(config, sizes))
    return records, report


@dataclass(frozen=True)
class ComparisonRow:
    version: AppVersion
    function: str
    averages: dict  # pattern -> avg gas
    delta: dict  # pattern -> avg - baseline avg
    relative: dict  # pattern -> delta / baseline avg


def diff_patterns(report: GasReport, baseline=Pattern.CLASSIC) -> list[ComparisonRow]:
    baseline = Pattern.parse(baseline)
    patterns = report.patterns()
    if baseline not in patterns:
        raise ValueError(f"baseline pattern {baseline} is not in the report")
    keys = sorted(
        {(k[1], k[2]) for k in report.rows}, key=lambda k: (int(k[0]), FUNCTIONS.index(k[1]))
    )
    out = []
    for version, function in keys:
        base_row = report.rows.get((baseline, version, function))
        if base_row is None:
            continue
        averages, delta, relative = {}, {}, {}
        for p in patterns:
            row = report.rows.get((p, version, function))
            if row is None:
                continue
            averages[p] = row.avg
            delta[p] = row.avg - base_row.avg
            relative[p] = delta[p] / base_row.avg if base_row.avg else 0.0
        out.append(ComparisonRow(version, function, averages, delta, relative))
    return out

