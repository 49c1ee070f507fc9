"""DecoherenceModels – record-chain scenarios whose environments keep a memory of past properties."""

from .chains import (
    build_branch_dependent_chain,
    build_measurement_chain,
    canonical_form,
    cumulative_unitary,
    record_gate,
    rotated_basis,
    scenario_history_family,
    scenario_total_state,
    step_family,
    x_basis,
    z_basis,
)
from .models import SYSTEM_FACTOR, CanonicalTerm, RecordingScenario

__all__ = [
    "SYSTEM_FACTOR",
    "CanonicalTerm",
    "RecordingScenario",
    "build_branch_dependent_chain",
    "build_measurement_chain",
    "canonical_form",
    "cumulative_unitary",
    "record_gate",
    "rotated_basis",
    "scenario_history_family",
    "scenario_total_state",
    "step_family",
    "x_basis",
    "z_basis",
]
