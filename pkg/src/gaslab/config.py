"""Scenario configuration: JSON file <-> :class:`ScenarioConfig`."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from gaslab.app import DEFAULT_CALLER, AppCosts, AppVersion
from gaslab.dispatch import CONTRACTS, Pattern
from gaslab.gas import GasSchedule

NAME_CONFIGS = ("growing", "varying-last-char", "identical")
SCHEDULE_ENV = "GASLAB_SCHEDULE"

KNOWN_KEYS = {
    "patterns",
    "versions",
    "iterations",
    "base_name",
    "name_configs",
    "schedule",
    "app",
    "code_sizes",
    "include_intrinsic",
    "include_reverted",
    "timestamp",
    "caller",
}


class ConfigError(ValueError):
    """Invalid scenario; ``errors`` lists every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ScenarioConfig:
    patterns: list = field(default_factory=lambda: list(Pattern))
    versions: list = field(default_factory=lambda: list(AppVersion))
    iterations: int = 100
    base_name: str = "file"
    name_configs: list = field(default_factory=lambda: list(NAME_CONFIGS))
    schedule: GasSchedule = field(default_factory=GasSchedule)
    app_costs: AppCosts = field(default_factory=AppCosts)
    code_sizes: dict | None = None  # None: sizes calibrated to the published totals
    include_intrinsic: bool = False
    include_reverted: bool = False
    timestamp: int = 1
    caller: int = DEFAULT_CALLER

    def __post_init__(self):
        errors = self.violations()
        if errors:
            raise ConfigError(errors)

    def violations(self) -> list[str]:
        errors = []
        if not isinstance(self.iterations, int) or self.iterations < 1:
            errors.append("iterations must be an integer >= 1")
        if not self.base_name or not self.base_name.isascii():
            errors.append("base_name must be non-empty ASCII")
        for cfg in self.name_configs:
            if cfg not in NAME_CONFIGS:
                errors.append(f"unknown name config {cfg!r}")
        if not self.patterns:
            errors.append("patterns must not be empty")
        if not self.versions:
            errors.append("versions must not be empty")
        if not 0 <= self.caller < 1 << 160 or self.caller == 0:
            errors.append("caller must be a nonzero 20-byte address")
        if self.timestamp < 0:
            errors.append("timestamp must be >= 0")
        if self.code_sizes is not None:
            errors.extend(size_table_violations(self.code_sizes, self.patterns))
        return errors

    def sizes(self) -> dict:
        if self.code_sizes is not None:
            return self.code_sizes
        from gaslab.calibrate import paper_code_sizes

        return paper_code_sizes()

    @classmethod
    def from_dict(cls, data: dict, base_schedule: GasSchedule | None = None) -> "ScenarioConfig":
        errors = []
        if not isinstance(data, dict):
            raise ConfigError(["scenario must be a JSON object"])
        unknown = sorted(set(data) - KNOWN_KEYS)
        if unknown:
            errors.append(f"unknown scenario keys: {', '.join(unknown)}")

        kwargs: dict = {}
        patterns = []
        for p in data.get("patterns", [str(p) for p in Pattern]):
            try:
                patterns.append(Pattern.parse(p))
            except ValueError as exc:
                errors.append(str(exc))
        if patterns or "patterns" not in data or not data["patterns"]:
            kwargs["patterns"] = patterns  # all-invalid lists are already reported
        versions = []
        for v in data.get("versions", [str(v) for v in AppVersion]):
            try:
                versions.append(AppVersion.parse(v))
            except ValueError as exc:
                errors.append(str(exc))
        if versions or "versions" not in data or not data["versions"]:
            kwargs["versions"] = versions
        try:
            kwargs["schedule"] = GasSchedule.from_dict(data.get("schedule"), base_schedule)
        except (TypeError, ValueError) as exc:
            errors.append(str(exc))
        try:
            kwargs["app_costs"] = AppCosts.from_dict(data.get("app"))
        except (TypeError, ValueError) as exc:
            errors.append(str(exc))
        for key in ("iterations", "base_name", "name_configs", "code_sizes", "timestamp"):
            if key in data:
                kwargs[key] = data[key]
        for key in ("include_intrinsic", "include_reverted"):
            if key in data:
                if not isinstance(data[key], bool):
                    errors.append(f"{key} must be a boolean")
                else:
                    kwargs[key] = data[key]
        if "caller" in data:
            try:
                kwargs["caller"] = int(str(data["caller"]), 16)
            except ValueError:
                errors.append("caller must be a hex address")

        try:
            config = cls(**kwargs)
        except ConfigError as exc:
            errors.extend(exc.errors)
        except (TypeError, ValueError) as exc:
            errors.append(str(exc))
        if errors:
            raise ConfigError(errors)
        return config

    def to_dict(self) -> dict:
        out = {
            "patterns": [str(p) for p in self.patterns],
            "versions": [str(v) for v in self.versions],
            "iterations": self.iterations,
            "base_name": self.base_name,
            "name_configs": list(self.name_configs),
            "schedule": self.schedule.to_dict(),
            "app": self.app_costs.to_dict(),
            "include_intrinsic": self.include_intrinsic,
            "include_reverted": self.include_reverted,
            "timestamp": self.timestamp,
            "caller": f"{self.caller:#042x}",
        }
        if self.code_sizes is not None:
            out["code_sizes"] = self.code_sizes
        return out


def size_table_violations(table, patterns) -> list[str]:
    errors = []
    if not isinstance(table, dict):
        return ["code_sizes must be an object"]
    for pattern in patterns:
        for version in AppVersion:
            for name in CONTRACTS[(Pattern(pattern), version)]:
                entry = table.get(str(pattern), {}).get(str(version), {}).get(name)
                where = f"code_sizes.{pattern}.{version}.{name}"
                if not isinstance(entry, dict):
                    errors.append(f"{where} is missing")
                    continue
                deployed = entry.get("deployed_size")
                initcode = entry.get("initcode_size")
                if not isinstance(deployed, int) or not isinstance(initcode, int):
                    errors.append(f"{where} needs integer deployed_size and initcode_size")
                elif deployed < 0 or deployed > initcode:
                    errors.append(f"{where} needs 0 <= deployed_size <= initcode_size")
                frac = entry.get("initcode_nonzero_fraction", 0.85)
                if not isinstance(frac, (int, float)) or not 0 <= frac <= 1:
                    errors.append(f"{where}.initcode_nonzero_fraction must lie in [0, 1]")
    return errors


def env_schedule() -> GasSchedule | None:
    """Schedule overrides named by ``GASLAB_SCHEDULE``, if set."""
    path = os.environ.get(SCHEDULE_ENV)
    if not path:
        return None
    data = json.loads(Path(path).read_text())
    try:
        return GasSchedule.from_dict(data)
    except ValueError as exc:
        raise ConfigError([f"{SCHEDULE_ENV}: {exc}"]) from None


def load_scenario(path) -> ScenarioConfig:
    """Read a scenario file. ``OSError`` propagates; bad content raises ``ConfigError``."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: invalid JSON ({exc})"]) from None
    return ScenarioConfig.from_dict(data, env_schedule())
