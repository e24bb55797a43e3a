"""Print deployment, per-function and name-length tables for scenarios/paper.json.

    python scripts/run_paper.py [scenario.json]
"""

import sys
from pathlib import Path

from gaslab.app import AppVersion
from gaslab.bench import run_scenario
from gaslab.config import load_scenario
from gaslab.dispatch import Pattern

ROOT = Path(__file__).resolve().parents[1]
config = load_scenario(sys.argv[1] if len(sys.argv) > 1 else ROOT / "scenarios/paper.json")
records, report = run_scenario(config)

print("deployment gas (per version / cumulative)")
for row in report.deployment:
    print(f"  {row.pattern:8} {row.version}  {row.gas:>9}  {row.cumulative:>9}")

print("\naverage execution gas per function")
for version in AppVersion:
    functions = [k[2] for k in report.rows if k[0] == Pattern.CLASSIC and k[1] == version]
    print(f"  {version}")
    for fn in functions:
        avgs = "  ".join(f"{p}={report.row(p, version, fn).avg:>6}" for p in report.patterns())
        print(f"    {fn:14} {avgs}")

print("\naddFile gas by iteration, classic V1")
for cfg in config.name_configs:
    series = sorted(
        (r for r in records if r.pattern == Pattern.CLASSIC and r.version == AppVersion.V1
         and r.function == "addFile" and r.config == cfg),
        key=lambda r: r.iteration,
    )
    print(f"  {cfg:18} " + " ".join(str(r.gas) for r in series[:: max(1, len(series) // 10)]))
