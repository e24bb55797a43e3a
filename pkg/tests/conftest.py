import sys
from pathlib import Path

import hypothesis
import pytest

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("default", deadline=None, max_examples=100)
hypothesis.settings.register_profile("ci", deadline=None, max_examples=300)
hypothesis.settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def paper_scenario_path():
    return ROOT / "scenarios" / "paper.json"


@pytest.fixture(scope="session")
def paper_run(paper_scenario_path):
    from gaslab.bench import run_scenario
    from gaslab.config import load_scenario

    config = load_scenario(paper_scenario_path)
    records, report = run_scenario(config)
    return config, records, report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
