"""Fit contract byte sizes so simulated deployment totals hit target figures.

Bytecode sizes are not known, only cumulative deployment gas per pattern.
Each pattern's contracts get relative weights; a single integer budget ``n``
is apportioned as ``floor(weight * n / total_weight)`` deployed bytes per
contract, which keeps every size monotone in ``n``. The smallest ``n`` whose
simulated total reaches the target is returned, so re-calibrating against a
simulated total reproduces the same table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from gaslab.app import AppVersion
from gaslab.dispatch import CONTRACTS, Pattern, deploy_gas, version_plan
from gaslab.gas import DEFAULT_SCHEDULE, GasSchedule

PAPER_TOTALS = {"classic": 1_614_545, "proxy": 4_343_104, "diamond": 4_123_977}

# relative deployed-code weights; only ratios within a pattern matter
DEFAULT_WEIGHTS = {
    "classic": {
        "V1": {"notary-v1": 1000},
        "V2": {"notary-v2": 1300},
        "V3": {"notary-v3": 1700},
    },
    "proxy": {
        "V1": {"impl-v1": 2600, "proxy": 300},
        "V2": {"impl-v2": 3300},
        "V3": {"impl-v3": 4000},
    },
    "diamond": {
        "V1": {"cut-facet": 900, "loupe-facet": 1100, "diamond": 1800, "notary-facet-v1": 1000},
        "V2": {"notary-facet-v2": 1300},
        "V3": {"file-facet-v3": 900, "view-facet-v3": 800},
    },
}


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationTargets:
    totals: dict = field(default_factory=lambda: dict(PAPER_TOTALS))
    initcode_overhead_pct: int = 10
    initcode_nonzero_fraction: float = 0.85

    def __post_init__(self):
        bad = [p for p, t in self.totals.items() if not isinstance(t, int) or t <= 0]
        if bad:
            raise CalibrationError(f"targets must be positive integers: {', '.join(bad)}")
        for p in self.totals:
            Pattern.parse(p)

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationTargets":
        data = dict(data)
        totals = data.pop("totals", None)
        if totals is None:
            raise CalibrationError("targets file needs a 'totals' object")
        unknown = sorted(set(data) - {"initcode_overhead_pct", "initcode_nonzero_fraction"})
        if unknown:
            raise CalibrationError(f"unknown target fields: {', '.join(unknown)}")
        return cls(totals={str(k).lower(): v for k, v in totals.items()}, **data)

    def to_dict(self) -> dict:
        return {
            "totals": dict(self.totals),
            "initcode_overhead_pct": self.initcode_overhead_pct,
            "initcode_nonzero_fraction": self.initcode_nonzero_fraction,
        }


def apportion(pattern: str, n: int, weights: dict, targets: CalibrationTargets) -> dict:
    """Size table for one pattern at byte budget ``n``."""
    table = weights[pattern]
    total_weight = sum(w for version in table.values() for w in version.values())
    sizes = {}
    for version, contracts in table.items():
        sizes[version] = {}
        for name, weight in contracts.items():
            deployed = weight * n // total_weight
            sizes[version][name] = {
                "deployed_size": deployed,
                "initcode_size": deployed + deployed * targets.initcode_overhead_pct // 100,
                "initcode_nonzero_fraction": targets.initcode_nonzero_fraction,
            }
    return sizes


def per_version_gas(pattern, sizes: dict, schedule: GasSchedule = DEFAULT_SCHEDULE) -> dict:
    """Deployment gas of each version for a full size table."""
    return {
        str(v): deploy_gas(version_plan(pattern, v, sizes), schedule) for v in AppVersion
    }


def cumulative_gas(pattern, sizes: dict, schedule: GasSchedule = DEFAULT_SCHEDULE) -> int:
    return sum(per_version_gas(pattern, sizes, schedule).values())


def _check_weights(pattern: str, weights: dict) -> None:
    table = weights.get(pattern)
    if table is None:
        raise CalibrationError(f"no weights for pattern {pattern}")
    for version in AppVersion:
        expected = set(CONTRACTS[(Pattern(pattern), version)])
        got = set(table.get(str(version), {}))
        if got != expected:
            raise CalibrationError(
                f"{pattern}/{version} weights must name exactly {sorted(expected)}"
            )
    if any(w < 0 for v in table.values() for w in v.values()):
        raise CalibrationError(f"{pattern} weights must be >= 0")


def calibrate_pattern(
    pattern: str,
    target: int,
    weights: dict = DEFAULT_WEIGHTS,
    targets: CalibrationTargets | None = None,
    schedule: GasSchedule = DEFAULT_SCHEDULE,
) -> dict:
    targets = targets or CalibrationTargets()
    pattern = str(Pattern.parse(pattern))
    _check_weights(pattern, weights)

    def total(n: int) -> int:
        return cumulative_gas(pattern, {pattern: apportion(pattern, n, weights, targets)}, schedule)

    floor = total(0)
    if target < floor:
        raise CalibrationError(
            f"{pattern}: target {target} is below the fixed deployment overhead {floor}"
        )
    lo, hi = 0, 1
    while total(hi) < target:
        lo, hi = hi, hi * 2
    # invariant: total(lo) < target <= total(hi), or lo == 0 meeting the floor
    if total(lo) >= target:
        hi = lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total(mid) >= target:
            hi = mid
        else:
            lo = mid
    return apportion(pattern, hi, weights, targets)


def calibrate(
    targets: CalibrationTargets,
    weights: dict = DEFAULT_WEIGHTS,
    schedule: GasSchedule = DEFAULT_SCHEDULE,
) -> dict:
    """Code-size table (scenario ``code_sizes`` format) for every targeted pattern."""
    return {
        pattern: calibrate_pattern(pattern, target, weights, targets, schedule)
        for pattern, target in sorted(targets.totals.items())
    }


@lru_cache(maxsize=None)
def _paper_code_sizes() -> dict:
    return calibrate(CalibrationTargets())


def paper_code_sizes() -> dict:
    """Default size table, calibrated against the published deployment totals."""
    import copy

    return copy.deepcopy(_paper_code_sizes())
