"""HistoriesEngine – multi-time history probabilities and the decoherence condition."""

from .histories import (
    branch_vector,
    check_consistency,
    decoherence_functional,
    decoherence_matrix,
    heisenberg_projector,
    history_probability,
    insert_trivial_time,
    luders_probability,
    marginalization_check,
)
from .kent import kent_scenario
from .models import HistoryFamily, HistoryProbabilityTable, TimedFamily

__all__ = [
    "HistoryFamily",
    "HistoryProbabilityTable",
    "TimedFamily",
    "branch_vector",
    "check_consistency",
    "decoherence_functional",
    "decoherence_matrix",
    "heisenberg_projector",
    "history_probability",
    "insert_trivial_time",
    "kent_scenario",
    "luders_probability",
    "marginalization_check",
]
