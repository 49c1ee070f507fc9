#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
models.py
=========
Branch tree built from per-branch biorthogonal decompositions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

from shared.qstate import ComplexMatrix, PureState


# =========================
# Type Aliases
# =========================
BranchPath = tuple[int, ...]


# =========================
# Dataclasses
# =========================

@dataclass(frozen=True, eq=False)
class BranchNode:
    """
    One branch. ``amplitude`` is real and nonnegative; the phase lives in
    ``branch_state``, the normalized component of the total state carried by
    this branch. Projectors are the spans of the merge group's left (system)
    and right (environment) Schmidt vectors.
    """
    path: BranchPath
    amplitude: float
    branch_state: np.ndarray
    rank: int = 1
    system_projector: ComplexMatrix | None = None
    environment_projector: ComplexMatrix | None = None
    environment_basis: np.ndarray | None = None      # columns spanning the environment projector
    system_state: np.ndarray | None = None           # only when rank == 1
    environment_state: np.ndarray | None = None      # only when rank == 1
    children: tuple["BranchNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def probability(self) -> float:
        return self.amplitude ** 2

    def leaves(self) -> Iterator["BranchNode"]:
        if self.is_leaf:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def nodes_at(self, depth: int) -> Iterator["BranchNode"]:
        if self.depth == depth:
            yield self
            return
        for child in self.children:
            yield from child.nodes_at(depth)

    def to_record(self) -> dict[str, Any]:
        return {
            "path": list(self.path),
            "amplitude": self.amplitude,
            "probability": self.probability,
            "rank": self.rank,
            "children": [c.to_record() for c in self.children],
        }


@dataclass(frozen=True, eq=False)
class BranchTree:
    """Root (pre-interaction state) plus the interactions applied so far."""
    root: BranchNode
    dims: tuple[int, ...]
    system_factor: int
    total_state: PureState
    interactions: tuple[ComplexMatrix, ...] = ()
    reconstruction_residual: float = 0.0
    reinterference: dict[str, Any] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.interactions)

    @property
    def environment_factors(self) -> list[int]:
        return [i for i in range(len(self.dims)) if i != self.system_factor]

    def leaves(self) -> list[BranchNode]:
        return list(self.root.leaves())

    def nodes_at(self, depth: int) -> list[BranchNode]:
        return list(self.root.nodes_at(depth))

    def find(self, path: BranchPath) -> BranchNode:
        node = self.root
        for k in path:
            node = node.children[k]
        return node
