"""ScenarioRunner – scenario files in, deterministic result documents out."""

from .emit import FORMATS, canonical, emit, render, validate_result_document
from .loader import ScenarioFile, load_scenario, scenario_from_document
from .pipeline import effective_policy, run_scenario
from .schema import KINDS, validate_scenario

__all__ = [
    "FORMATS",
    "KINDS",
    "ScenarioFile",
    "canonical",
    "effective_policy",
    "emit",
    "load_scenario",
    "render",
    "run_scenario",
    "scenario_from_document",
    "validate_result_document",
    "validate_scenario",
]
