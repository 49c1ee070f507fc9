"""ModalAssignment – single-time definite-valued families and joint probabilities."""

from .modal import (
    is_definite_valued,
    joint_modal_distribution,
    joint_probability_single_time,
    modal_state,
    spectral_modal,
)
from .models import DefiniteValueReport, ModalState, SchmidtResult
from .schmidt import merge_degenerate, schmidt_decompose

__all__ = [
    "DefiniteValueReport",
    "ModalState",
    "SchmidtResult",
    "is_definite_valued",
    "joint_modal_distribution",
    "joint_probability_single_time",
    "merge_degenerate",
    "modal_state",
    "schmidt_decompose",
    "spectral_modal",
]
