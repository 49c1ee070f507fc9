#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
models.py
=========
Dataclasses describing environment-record ("memory") scenarios.

Factor layout is fixed: factor 0 is the system, factor k (k ≥ 1) is the
record written by step k. Every record starts in the ready state |0⟩.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from shared.qstate import ComplexMatrix, PureState


# =========================
# Type Aliases
# =========================
Basis = np.ndarray                      # orthonormal columns on the system
StepBases = Basis | tuple[Basis, ...]   # common basis, or one per first-step outcome
RecordPath = tuple[int, ...]

SYSTEM_FACTOR = 0


# =========================
# Dataclasses
# =========================

@dataclass(frozen=True, eq=False)
class RecordingScenario:
    """A system recorded step by step into dedicated record factors."""
    kind: str                                   # "chain" | "branch_dependent"
    system_dim: int
    pointer_bases: tuple[StepBases, ...]
    record_dims: tuple[int, ...]
    initial_state: PureState
    step_unitaries: tuple[ComplexMatrix, ...]
    system_evolutions: tuple[ComplexMatrix, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.system_dim,) + tuple(self.record_dims)

    @property
    def steps(self) -> int:
        return len(self.step_unitaries)

    def is_branch_dependent(self, step: int) -> bool:
        """*step* counts from 1."""
        return isinstance(self.pointer_bases[step - 1], tuple)

    def to_record(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "system_dim": self.system_dim,
            "record_dims": list(self.record_dims),
            "steps": self.steps,
            "branch_dependent_steps": [k for k in range(1, self.steps + 1) if self.is_branch_dependent(k)],
        }


@dataclass(frozen=True, eq=False)
class CanonicalTerm:
    """One term c |ψ⟩ ⊗ |Φ⟩ of the record expansion, computed without the total state."""
    path: RecordPath
    amplitude: float
    system_state: np.ndarray
    record_state: np.ndarray
