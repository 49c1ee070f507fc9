#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
models.py
=========
Result types of the single-time property assignment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from shared.projectors import ProjectorFamily


# =========================
# Type Aliases
# =========================
FactorSet = tuple[int, ...]
MergeGroup = list[int]


# =========================
# Dataclasses
# =========================

@dataclass(frozen=True, eq=False)
class SchmidtResult:
    """Biorthogonal decomposition of a pure state across a cut α | β."""
    left_factors: FactorSet
    right_factors: FactorSet
    left_dims: tuple[int, ...]
    right_dims: tuple[int, ...]
    coefficients: np.ndarray          # real, ≥ 0, descending
    left_states: np.ndarray           # columns on α
    right_states: np.ndarray          # columns on β (phase absorbed here)
    merge_groups: list[MergeGroup]
    merged_projectors: ProjectorFamily
    reconstruction_residual: float

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coefficients) ** 2

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def group_weights(self) -> list[float]:
        w = self.weights
        return [float(sum(w[i] for i in g)) for g in self.merge_groups]

    def to_record(self) -> dict[str, Any]:
        return {
            "left_factors": list(self.left_factors),
            "right_factors": list(self.right_factors),
            "weights": [float(x) for x in self.weights],
            "coefficients": [float(x) for x in self.coefficients],
            "merge_groups": [list(g) for g in self.merge_groups],
            "group_weights": self.group_weights(),
            "projector_ranks": self.merged_projectors.ranks(),
            "reconstruction_residual": self.reconstruction_residual,
        }


@dataclass(frozen=True, eq=False)
class ModalState:
    """Definite-valued family of one subsystem plus its probabilities."""
    target_factors: FactorSet
    definite_family: ProjectorFamily
    probabilities: list[float]
    zero_weight: list[bool]
    source: str                                  # "schmidt" | "spectral"
    schmidt: SchmidtResult | None = None
    eigenvalues: np.ndarray | None = None
    merge_groups: list[MergeGroup] = field(default_factory=list)

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "target_factors": list(self.target_factors),
            "source": self.source,
            "labels": list(self.definite_family.labels),
            "ranks": self.definite_family.ranks(),
            "probabilities": list(self.probabilities),
            "zero_weight": list(self.zero_weight),
            "merge_groups": [list(g) for g in self.merge_groups],
        }
        if self.schmidt is not None:
            rec["schmidt"] = self.schmidt.to_record()
        if self.eigenvalues is not None:
            rec["eigenvalues"] = [float(x) for x in self.eigenvalues]
        return rec


@dataclass(frozen=True)
class DefiniteValueReport:
    """Membership of an observable in the commutative core of a family."""
    is_definite: bool
    residual: float
    max_commutator: float
    coefficients: list[float] | None = None
