"""Regenerate scenarios/paper.json from the published deployment totals.

    python scripts/make_paper_scenario.py
"""

import json
from pathlib import Path

from gaslab.calibrate import CalibrationTargets, calibrate
from gaslab.config import ScenarioConfig

ROOT = Path(__file__).resolve().parents[1]

targets = CalibrationTargets.from_dict(json.loads((ROOT / "targets/paper-totals.json").read_text()))
config = ScenarioConfig(code_sizes=calibrate(targets))
out = ROOT / "scenarios/paper.json"
out.write_text(json.dumps(config.to_dict(), indent=2) + "\n")
print(out)
