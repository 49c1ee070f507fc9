"""CausalLattice – point-like regions, lightcone order, slice projectors and foliation invariance."""

from .foliation import (
    enumerate_foliations,
    foliation_distribution,
    foliation_invariance,
    linear_extensions,
    sample_linear_extensions,
)
from .lattice import (
    build_lattice_model,
    lattice_consistency_check,
    lattice_history_family,
    lattice_history_probability,
    microcausality_residual,
    slice_family,
    slice_projector,
    to_point_outcomes,
)
from .models import (
    CausalOrder,
    Foliation,
    LatticeDynamics,
    LatticeModel,
    LatticePoint,
    PointKey,
    in_lightcone,
    outcome_array,
)

__all__ = [
    "CausalOrder",
    "Foliation",
    "LatticeDynamics",
    "LatticeModel",
    "LatticePoint",
    "PointKey",
    "build_lattice_model",
    "enumerate_foliations",
    "foliation_distribution",
    "foliation_invariance",
    "in_lightcone",
    "lattice_consistency_check",
    "lattice_history_family",
    "lattice_history_probability",
    "linear_extensions",
    "microcausality_residual",
    "outcome_array",
    "sample_linear_extensions",
    "slice_family",
    "slice_projector",
    "to_point_outcomes",
]
