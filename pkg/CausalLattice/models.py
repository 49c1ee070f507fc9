#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
models.py
=========
Lattice points, the lightcone order, foliations and the assembled model.

Points are keyed by ``(x, t)`` and always listed in canonical order
(by t, then x). The order is held as a transitively closed networkx DiGraph
with an edge y → x whenever y lies in the causal past of x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import networkx as nx
import numpy as np

from shared.errors import CausalityError, ShapeError, ValidationError
from shared.projectors import ProjectorFamily
from shared.qstate import ComplexMatrix, PureState


# =========================
# Type Aliases
# =========================
PointKey = tuple[int, int]            # (x, t)
Outcomes = tuple[int, ...]            # one family index per point, canonical order


def _key(p: Sequence[int]) -> PointKey:
    if len(p) != 2:
        raise ValidationError(f"lattice point must be (x, t), got {p!r}")
    return (int(p[0]), int(p[1]))


def in_lightcone(y: PointKey, x: PointKey) -> bool:
    """y < x: strictly earlier and within the speed-1 cone."""
    return y[1] < x[1] and abs(x[0] - y[0]) <= x[1] - y[1]


# =========================
# Dataclasses
# =========================

@dataclass(frozen=True)
class LatticePoint:
    x: int
    t: int
    factor_index: int
    record_factor_indices: tuple[int, ...] = ()

    @property
    def key(self) -> PointKey:
        return (self.x, self.t)


@dataclass(frozen=True, eq=False)
class CausalOrder:
    """Strict partial order on a width × timesteps grid."""
    width: int
    timesteps: int
    graph: nx.DiGraph

    @classmethod
    def grid(cls, width: int, timesteps: int) -> "CausalOrder":
        if width < 1 or timesteps < 1:
            raise ShapeError(f"lattice needs positive width and timesteps, got {width} × {timesteps}")
        g = nx.DiGraph()
        for t in range(timesteps):
            for x in range(width):
                g.add_node((x, t))
        for t in range(timesteps - 1):
            for x in range(width):
                for dx in (-1, 0, 1):
                    if 0 <= x + dx < width:
                        g.add_edge((x, t), (x + dx, t + 1))
        return cls(width, timesteps, nx.transitive_closure_dag(g))

    @property
    def points(self) -> list[PointKey]:
        return sorted(self.graph.nodes, key=lambda p: (p[1], p[0]))

    def precedes(self, y: PointKey, x: PointKey) -> bool:
        return self.graph.has_edge(y, x)

    def spacelike(self, a: PointKey, b: PointKey) -> bool:
        return a != b and not self.precedes(a, b) and not self.precedes(b, a)

    def past(self, x: PointKey) -> set[PointKey]:
        return set(self.graph.predecessors(x))


@dataclass(frozen=True)
class Foliation:
    """Ordered partition into pairwise spacelike slices."""
    slices: tuple[tuple[PointKey, ...], ...]

    @classmethod
    def from_sequence(cls, order: Sequence[PointKey]) -> "Foliation":
        """One point per slice."""
        return cls(tuple((tuple(p),) for p in order))

    @property
    def points(self) -> list[PointKey]:
        return [p for s in self.slices for p in s]

    def slice_index(self) -> dict[PointKey, int]:
        return {p: k for k, s in enumerate(self.slices) for p in s}

    def validate(self, order: CausalOrder) -> "Foliation":
        pts = self.points
        expected = set(order.points)
        if len(pts) != len(set(pts)) or set(pts) != expected:
            raise ValidationError(
                f"foliation covers {sorted(set(pts))}, lattice has {sorted(expected)}"
            )
        for s in self.slices:
            if not s:
                raise ValidationError("foliation has an empty slice")
            for i, a in enumerate(s):
                for b in s[i + 1:]:
                    if not order.spacelike(a, b):
                        raise CausalityError(f"slice contains timelike pair {a}, {b}")
        index = self.slice_index()
        for y, x in order.graph.edges:
            if index[y] >= index[x]:
                raise CausalityError(f"{y} precedes {x} but is not in an earlier slice")
        return self

    def to_record(self) -> list[list[list[int]]]:
        return [[list(p) for p in s] for s in self.slices]


@dataclass(frozen=True)
class LatticeDynamics:
    """
    Slice-to-slice dynamics.

    - ``initial_angle``: every t = 0 point starts in exp(−iθG)|0⟩.
    - ``mixing_angle``: local rotation applied to each point at t ≥ 1 after
      its content arrives.
    - ``couplings``: (p, q) pairs at equal t; controlled shift from p onto q.
    - ``moves``: where the content of (x, t) goes at t + 1 (default: same x).
    - ``records``: points whose value is copied into their own record factor
      at their own slice; ``None`` records every point. The record chain
      then propagates with the point's content along ``moves``.
    - ``erasures``: recorded points whose record is undone one step later.
    """
    initial_angle: float = math.pi / 5
    mixing_angle: float = math.pi / 7
    couplings: tuple[tuple[PointKey, PointKey], ...] = ()
    moves: Mapping[PointKey, int] = field(default_factory=dict)
    records: Sequence[PointKey] | None = None
    erasures: tuple[PointKey, ...] = ()
    enforce_causality: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "couplings", tuple((_key(p), _key(q)) for p, q in self.couplings))
        object.__setattr__(self, "moves", {_key(p): int(x) for p, x in dict(self.moves).items()})
        object.__setattr__(self, "erasures", tuple(_key(p) for p in self.erasures))
        if self.records is not None:
            object.__setattr__(self, "records", tuple(_key(p) for p in self.records))

    def recorded_points(self, points: Sequence[PointKey]) -> set[PointKey]:
        return set(points) if self.records is None else set(self.records)

    def to_record(self) -> dict[str, Any]:
        return {
            "initial_angle": self.initial_angle,
            "mixing_angle": self.mixing_angle,
            "couplings": [[list(p), list(q)] for p, q in self.couplings],
            "moves": [[list(p), x] for p, x in sorted(self.moves.items())],
            "records": None if self.records is None else [list(p) for p in self.records],
            "erasures": [list(p) for p in self.erasures],
            "enforce_causality": self.enforce_causality,
        }


@dataclass(frozen=True, eq=False)
class LatticeModel:
    """
    Points, factor layout, dynamics and the per-point definite families.

    ``local_families`` act on the point's own factor; ``heisenberg`` holds
    the same families lifted to the full space and conjugated with U(t).
    """
    order: CausalOrder
    points: dict[PointKey, LatticePoint]
    dims: tuple[int, ...]
    initial_state: PureState
    unitaries: tuple[ComplexMatrix, ...]                 # U(t), t = 0 … timesteps − 1
    local_families: dict[PointKey, ProjectorFamily]
    heisenberg: dict[PointKey, ProjectorFamily]
    probabilities: dict[PointKey, list[float]]
    dynamics: LatticeDynamics
    commutator_residual: float = 0.0

    @property
    def point_keys(self) -> list[PointKey]:
        return self.order.points

    @property
    def dim(self) -> int:
        return self.initial_state.dim

    def shape(self) -> tuple[int, ...]:
        return tuple(len(self.heisenberg[p]) for p in self.point_keys)

    def to_record(self) -> dict[str, Any]:
        return {
            "width": self.order.width,
            "timesteps": self.order.timesteps,
            "dims": list(self.dims),
            "points": [
                {
                    "x": p.x,
                    "t": p.t,
                    "factor": p.factor_index,
                    "records": list(p.record_factor_indices),
                    "probabilities": self.probabilities[p.key],
                }
                for p in (self.points[k] for k in self.point_keys)
            ],
            "commutator_residual": self.commutator_residual,
            "dynamics": self.dynamics.to_record(),
        }


def outcome_array(distribution: Mapping[Outcomes, float], shape: tuple[int, ...]) -> np.ndarray:
    arr = np.zeros(shape)
    for idx, p in distribution.items():
        arr[idx] = p
    return arr
