"""Scenario files, trajectory export and Monte Carlo trials."""

from beltgrip.harness.export import HEADER, export_trajectory, format_trajectory, read_trajectory
from beltgrip.harness.scenario import (
    Scenario,
    ScenarioError,
    bundled_names,
    bundled_path,
    bundled_scenario,
    dump_scenario,
    load_scenario,
    loads_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from beltgrip.harness.trials import (
    PerturbationModel,
    SuccessSpec,
    TrialReport,
    TrialResult,
    run_trials,
)

__all__ = [
    "HEADER",
    "PerturbationModel",
    "Scenario",
    "ScenarioError",
    "SuccessSpec",
    "TrialReport",
    "TrialResult",
    "bundled_names",
    "bundled_path",
    "bundled_scenario",
    "dump_scenario",
    "export_trajectory",
    "format_trajectory",
    "load_scenario",
    "loads_scenario",
    "read_trajectory",
    "run_trials",
    "scenario_from_dict",
    "scenario_to_dict",
]
