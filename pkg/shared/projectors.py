#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
projectors.py
=============
ProjectorFamily: an exhaustive, mutually orthogonal set of projectors (a PVM)
on one space, with per-member labels.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import ShapeError, ValidationError
from shared.qstate import ComplexMatrix, as_matrix, embed_operator, max_abs, outer

log = logging.getLogger(__name__)

Label = Hashable

REMAINDER_LABEL = "rest"


@dataclass(frozen=True, eq=False)
class ProjectorFamily:
    """Complete orthogonal projector family on a space of dimension *dim*."""
    dim: int
    projectors: tuple[ComplexMatrix, ...]
    labels: tuple[Label, ...]

    def __post_init__(self) -> None:
        projs = tuple(as_matrix(p).copy() for p in self.projectors)
        labels = tuple(self.labels)
        if not projs:
            raise ShapeError("a projector family needs at least one member")
        if len(labels) != len(projs):
            raise ShapeError(f"{len(projs)} projectors but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise ShapeError(f"duplicate labels in family: {labels}")
        for p in projs:
            if p.shape != (self.dim, self.dim):
                raise ShapeError(f"projector shape {p.shape} does not match dim {self.dim}")
            p.setflags(write=False)
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "labels", labels)

    # ------------------------------------------------------------------ #
    #  Constructors                                                        #
    # ------------------------------------------------------------------ #

    @classmethod
    def trivial(cls, dim: int, label: Label = "I") -> "ProjectorFamily":
        return cls(dim, (np.eye(dim, dtype=complex),), (label,))

    @classmethod
    def from_basis(
        cls,
        basis: np.ndarray,
        groups: Sequence[Sequence[int]] | None = None,
        labels: Sequence[Label] | None = None,
    ) -> "ProjectorFamily":
        """
        Build from orthonormal basis columns. *groups* merges columns into
        one projector each; by default every column is its own group.
        """
        b = as_matrix(basis)
        dim = b.shape[0]
        groups = [[j] for j in range(b.shape[1])] if groups is None else [list(g) for g in groups]
        projs = [sum((outer(b[:, j]) for j in g), np.zeros((dim, dim), dtype=complex)) for g in groups]
        labels = list(range(len(groups))) if labels is None else list(labels)
        return cls(dim, tuple(projs), tuple(labels))

    # ------------------------------------------------------------------ #
    #  Access                                                              #
    # ------------------------------------------------------------------ #

    def __len__(self) -> int:
        return len(self.projectors)

    def __iter__(self) -> Iterator[tuple[Label, ComplexMatrix]]:
        return iter(zip(self.labels, self.projectors))

    def __getitem__(self, index: int) -> ComplexMatrix:
        return self.projectors[index]

    def index_of(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"label {label!r} not in family {self.labels}") from None

    def ranks(self) -> list[int]:
        return [int(round(float(np.trace(p).real))) for p in self.projectors]

    # ------------------------------------------------------------------ #
    #  Invariants                                                          #
    # ------------------------------------------------------------------ #

    def residuals(self) -> dict[str, float]:
        """Worst idempotence, Hermiticity, pairwise-orthogonality and completeness residuals."""
        idem = max(max_abs(p @ p - p) for p in self.projectors)
        herm = max(max_abs(p - p.conj().T) for p in self.projectors)
        ortho = 0.0
        for i, p in enumerate(self.projectors):
            for q in self.projectors[i + 1:]:
                ortho = max(ortho, max_abs(p @ q))
        total = sum(self.projectors, np.zeros((self.dim, self.dim), dtype=complex))
        comp = max_abs(total - np.eye(self.dim))
        return {"idempotence": idem, "hermiticity": herm, "orthogonality": ortho, "completeness": comp}

    def validate(self, policy: NumericPolicy | None = None) -> "ProjectorFamily":
        policy = resolve(policy)
        r = self.residuals()
        problems = []
        if r["idempotence"] > policy.projector_tol:
            problems.append(f"‖P² − P‖ = {r['idempotence']:.3e}")
        if r["hermiticity"] > policy.projector_tol:
            problems.append(f"‖P − P†‖ = {r['hermiticity']:.3e}")
        if r["orthogonality"] > policy.projector_tol:
            problems.append(f"‖P_i P_j‖ = {r['orthogonality']:.3e}")
        if r["completeness"] > policy.projector_tol:
            problems.append(f"‖ΣP − I‖ = {r['completeness']:.3e}")
        if problems:
            raise ValidationError("invalid projector family: " + ", ".join(problems))
        return self

    # ------------------------------------------------------------------ #
    #  Transformations                                                     #
    # ------------------------------------------------------------------ #

    def embed(self, dims: Sequence[int], factors: Sequence[int], policy: NumericPolicy | None = None) -> "ProjectorFamily":
        """Same family lifted to the full space (identity on the other factors)."""
        lifted = tuple(embed_operator(p, dims, factors, policy) for p in self.projectors)
        return ProjectorFamily(lifted[0].shape[0], lifted, self.labels)

    def conjugated(self, u: ComplexMatrix) -> "ProjectorFamily":
        """Family of U† P U."""
        ud = u.conj().T
        return ProjectorFamily(self.dim, tuple(ud @ p @ u for p in self.projectors), self.labels)


def complete_with_remainder(
    projectors: Sequence[ComplexMatrix],
    labels: Sequence[Label],
    dim: int,
    policy: NumericPolicy | None = None,
    remainder_label: Label = REMAINDER_LABEL,
) -> ProjectorFamily:
    """
    Close a set of orthogonal projectors into a complete family by appending
    I − ΣP when it is nonzero.
    """
    policy = resolve(policy)
    total = sum((as_matrix(p) for p in projectors), np.zeros((dim, dim), dtype=complex))
    rest = np.eye(dim, dtype=complex) - total
    projs = list(projectors)
    labs = list(labels)
    if float(np.trace(rest).real) > 0.5:
        projs.append(rest)
        labs.append(remainder_label)
    family = ProjectorFamily(dim, tuple(projs), tuple(labs))
    return family.validate(policy)
