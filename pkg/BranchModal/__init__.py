"""BranchModal – branch-relative modal properties grown interaction by interaction."""

from .branching import (
    branch_decompose,
    branch_history_family,
    branch_properties,
    build_branch_tree,
    detect_reinterference,
    global_modal_history_family,
    initial_tree,
    tree_to_record,
)
from .models import BranchNode, BranchPath, BranchTree

__all__ = [
    "BranchNode",
    "BranchPath",
    "BranchTree",
    "branch_decompose",
    "branch_history_family",
    "branch_properties",
    "build_branch_tree",
    "detect_reinterference",
    "global_modal_history_family",
    "initial_tree",
    "tree_to_record",
]
