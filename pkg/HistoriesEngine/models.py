#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
models.py
=========
Dataclasses for multi-time history families and their probability tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterator

import numpy as np

from shared.config import NumericPolicy
from shared.errors import ShapeError, ValidationError
from shared.projectors import ProjectorFamily
from shared.qstate import ComplexMatrix, PureState, as_matrix, check_unitary, prod


# =========================
# Type Aliases
# =========================
HistoryIndex = tuple[int, ...]
HistoryLabels = tuple[Hashable, ...]


# =========================
# Dataclasses
# =========================

@dataclass(frozen=True, eq=False)
class TimedFamily:
    """
    A Schrödinger-picture family at time *time* together with U(time).

    Construction rejects a non-unitary U (ValidationError) and a family that
    is not a complete orthogonal set of projectors.
    """
    time: float
    family: ProjectorFamily
    unitary_from_origin: ComplexMatrix
    policy: NumericPolicy | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        u = as_matrix(self.unitary_from_origin)
        if u.shape != (self.family.dim, self.family.dim):
            raise ShapeError(f"U(t) shape {u.shape} does not match family dimension {self.family.dim}")
        check_unitary(u, self.policy, what=f"U(t={self.time})")
        self.family.validate(self.policy)
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "unitary_from_origin", u)

    @cached_property
    def heisenberg(self) -> tuple[ComplexMatrix, ...]:
        """Heisenberg projectors U(t)† P U(t), one per family member."""
        return self.family.conjugated(self.unitary_from_origin).projectors


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """Initial state plus time-ordered families."""
    state: PureState
    timed_families: tuple[TimedFamily, ...]

    def __post_init__(self) -> None:
        tfs = tuple(self.timed_families)
        if not tfs:
            raise ValidationError("a history family needs at least one timed family")
        for tf in tfs:
            if tf.family.dim != self.state.dim:
                raise ShapeError(f"family at t={tf.time} has dim {tf.family.dim}, state has {self.state.dim}")
        times = [tf.time for tf in tfs]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError(f"time labels must be strictly increasing, got {times}")
        object.__setattr__(self, "timed_families", tfs)

    @property
    def times(self) -> list[float]:
        return [tf.time for tf in self.timed_families]

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(tf.family) for tf in self.timed_families)

    @property
    def history_count(self) -> int:
        return prod(self.shape)

    def index_tuples(self) -> Iterator[HistoryIndex]:
        return itertools.product(*(range(n) for n in self.shape))

    def labels_of(self, indices: HistoryIndex) -> HistoryLabels:
        return tuple(tf.family.labels[i] for tf, i in zip(self.timed_families, indices))

    def without_time(self, position: int) -> "HistoryFamily":
        kept = tuple(tf for k, tf in enumerate(self.timed_families) if k != position)
        return HistoryFamily(self.state, kept)


@dataclass
class HistoryProbabilityTable:
    """Diagonal of the decoherence functional plus the off-diagonal report."""
    times: list[float]
    family_labels: list[list[Hashable]]
    probabilities: dict[HistoryIndex, float]
    normalization_residual: float
    max_offdiagonal: float
    tol: float
    consistent: bool
    offending_pair: tuple[HistoryIndex, HistoryIndex] | None = None
    functional_total: float = 1.0
    nonzero_histories: int = 0
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(sum(self.probabilities.values()))

    def labels_of(self, indices: HistoryIndex) -> HistoryLabels:
        return tuple(self.family_labels[k][i] for k, i in enumerate(indices))

    def rows(self) -> list[dict[str, Any]]:
        """One row per history, in index order, for tabular output."""
        out = []
        for idx in sorted(self.probabilities):
            row: dict[str, Any] = {"history": ",".join(str(i) for i in idx)}
            for k, label in enumerate(self.labels_of(idx)):
                row[f"t{k}"] = str(label)
            row["probability"] = self.probabilities[idx]
            out.append(row)
        return out

    def to_record(self) -> dict[str, Any]:
        return {
            "times": list(self.times),
            "family_labels": [[str(x) for x in labels] for labels in self.family_labels],
            "table": self.rows(),
            "normalization_residual": self.normalization_residual,
            "max_offdiagonal": self.max_offdiagonal,
            "offending_pair": [list(p) for p in self.offending_pair] if self.offending_pair else None,
            "tolerance": self.tol,
            "verdict": "consistent" if self.consistent else "inconsistent",
            "functional_total": self.functional_total,
            "nonzero_histories": self.nonzero_histories,
            **self.extra,
        }


def as_probability_array(table: HistoryProbabilityTable, shape: tuple[int, ...]) -> np.ndarray:
    """Dense ndarray view of a table, indexed by history tuple."""
    arr = np.zeros(shape)
    for idx, p in table.probabilities.items():
        arr[idx] = p
    return arr
