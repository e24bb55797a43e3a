"""Deterministic gas-cost model for Classic, Proxy and Diamond contract patterns."""

from gaslab.advisor import DecisionAnswers, Recommendation, decide
from gaslab.app import AppCosts, AppVersion, CallRequest, execute, function_selector
from gaslab.bench import GasReport, aggregate, diff_patterns, name_sequence, run_scenario
from gaslab.calibrate import CalibrationTargets, calibrate, paper_code_sizes
from gaslab.config import ConfigError, ScenarioConfig, load_scenario
from gaslab.dispatch import Pattern, World, deploy_gas, upgrade_plan
from gaslab.gas import GasSchedule, Tx

__version__ = "0.1.0"
