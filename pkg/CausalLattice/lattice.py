#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
lattice.py
==========
Finite lattice of point-like regions with record-chain dynamics.

Factor layout
-------------
One factor of dimension d per point (canonical order), followed by one
record factor per recorded point. The evolution up to slice t is

    U(0)     = Rec_0
    U(t + 1) = Rec_{t+1} · Mix_{t+1} · Erase_t · Move_t · Couple_t · U(t)

where Move_t swaps the content of (x, t) into its successor's factor, Rec
copies a point's z value into its record (controlled shift) and Erase
undoes that copy from the successor. A record is always written at its own
point; its chain then follows the point's content along Move, so a move
outside the future lightcone is where an acausal record shows up.

Each point's definite family is the spectral family of its reduced state
at U(t_p)Ψ₀, used in the Heisenberg picture, so a slice projector is the
product of the Heisenberg projectors of its points.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import replace
from typing import Any, Mapping, Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CausalityError, ScenarioError, ShapeError, ValidationError
from shared.projectors import ProjectorFamily
from shared.qstate import (
    ComplexMatrix,
    PureState,
    check_dim_cap,
    commutator,
    dagger,
    embed_operator,
    hermiticity_residual,
    ket,
    matrix_exponential_unitary,
    max_abs,
    prod,
    pure_partial_trace,
    shift_operator,
    swap_operator,
    y_like_generator,
)

from ModalAssignment.modal import spectral_modal

from .models import (
    CausalOrder,
    Foliation,
    LatticeDynamics,
    LatticeModel,
    LatticePoint,
    Outcomes,
    PointKey,
)

log = logging.getLogger(__name__)


# =========================
# Dynamics validation
# =========================

def _moves_by_slice(order: CausalOrder, dyn: LatticeDynamics) -> dict[PointKey, PointKey]:
    """Successor of every point with t < timesteps − 1; must be a bijection per slice."""
    successor: dict[PointKey, PointKey] = {}
    for t in range(order.timesteps - 1):
        targets = []
        for x in range(order.width):
            nx_ = int(dyn.moves.get((x, t), x))
            if not 0 <= nx_ < order.width:
                raise ScenarioError(f"move of {(x, t)} lands outside the lattice at x={nx_}")
            successor[(x, t)] = (nx_, t + 1)
            targets.append(nx_)
        if sorted(targets) != list(range(order.width)):
            raise ScenarioError(f"moves at t={t} are not a permutation: {targets}")
    return successor


def _check_causal(
    order: CausalOrder,
    dyn: LatticeDynamics,
    successor: dict[PointKey, PointKey],
    recorded: set[PointKey],
) -> list[str]:
    """Every influence the dynamics creates, checked against the lightcone."""
    problems = []
    for p, q in successor.items():
        if not order.precedes(p, q):
            what = "record chain" if p in recorded else "content"
            problems.append(f"{what} of {p} moves to {q}, outside its future lightcone")
    for p, q in dyn.couplings:
        if q in successor and not order.precedes(p, successor[q]):
            problems.append(f"coupling {p} → {q} reaches {successor[q]}, outside the lightcone of {p}")
    return problems


def _validate_dynamics(order: CausalOrder, dyn: LatticeDynamics) -> tuple[dict, set]:
    points = set(order.points)
    successor = _moves_by_slice(order, dyn)
    recorded = dyn.recorded_points(order.points)
    for p in sorted(recorded):
        if p not in points:
            raise ScenarioError(f"record of {p} refers to a point outside the lattice")
    for p, q in dyn.couplings:
        if p not in points or q not in points or p == q or p[1] != q[1]:
            raise ScenarioError(f"coupling {p} → {q} must join two distinct points of one slice")
    for p in dyn.erasures:
        if p not in recorded:
            raise ScenarioError(f"cannot erase the record of unrecorded point {p}")
        if p not in successor:
            raise ScenarioError(f"cannot erase the record of {p}: it has no successor")

    problems = _check_causal(order, dyn, successor, recorded)
    if problems:
        if dyn.enforce_causality:
            raise CausalityError("; ".join(problems))
        for msg in problems:
            log.warning("Acausal dynamics: %s", msg)
    return successor, recorded


# =========================
# Construction
# =========================

def _layout(
    order: CausalOrder, recorded: set[PointKey], local_dim: int
) -> tuple[dict[PointKey, LatticePoint], dict[PointKey, int], tuple[int, ...]]:
    keys = order.points
    factor = {p: i for i, p in enumerate(keys)}
    record_factor = {}
    nxt = len(keys)
    for p in keys:
        if p in recorded:
            record_factor[p] = nxt
            nxt += 1
    points = {
        p: LatticePoint(
            x=p[0],
            t=p[1],
            factor_index=factor[p],
            record_factor_indices=(record_factor[p],) if p in record_factor else (),
        )
        for p in keys
    }
    return points, record_factor, tuple([local_dim] * nxt)


def _product(ops: Sequence[ComplexMatrix], dim: int) -> ComplexMatrix:
    u = np.eye(dim, dtype=complex)
    for op in ops:
        u = op @ u
    return u


def build_lattice_model(
    width: int,
    timesteps: int,
    local_dim: int = 2,
    dynamics: LatticeDynamics | None = None,
    policy: NumericPolicy | None = None,
) -> LatticeModel:
    policy = resolve(policy)
    dyn = dynamics or LatticeDynamics()
    if local_dim < 2:
        raise ShapeError(f"local dimension must be at least 2, got {local_dim}")
    order = CausalOrder.grid(width, timesteps)
    successor, recorded = _validate_dynamics(order, dyn)
    points, record_factor, dims = _layout(order, recorded, local_dim)
    total = prod(dims)
    check_dim_cap(total, policy, what="lattice dimension")
    log.info(
        "Lattice %d × %d: %d point factor(s), %d record factor(s), dimension %d",
        width, timesteps, len(points), len(record_factor), total,
    )

    d = local_dim
    gen = y_like_generator(d)
    prepare = matrix_exponential_unitary(gen, dyn.initial_angle, policy)
    mix = matrix_exponential_unitary(gen, dyn.mixing_angle, policy)
    shift = shift_operator(d, d)
    swap = swap_operator(d)

    def s(p: PointKey) -> int:
        return points[p].factor_index

    def rec(t: int) -> ComplexMatrix:
        return _product(
            [embed_operator(shift, dims, [s(p), record_factor[p]], policy)
             for p in order.points if p[1] == t and p in record_factor],
            total,
        )

    # initial product state
    local_states = [
        prepare @ ket(0, d) if p[1] == 0 else ket(0, d) for p in order.points
    ] + [ket(0, d)] * len(record_factor)
    amps = local_states[0]
    for v in local_states[1:]:
        amps = np.kron(amps, v)
    psi0 = PureState(dims, amps)

    unitaries = [rec(0)]
    for t in range(timesteps - 1):
        ops = []
        for p, q in dyn.couplings:
            if p[1] == t:
                ops.append(embed_operator(shift, dims, [s(p), s(q)], policy))
        for x in range(width):
            ops.append(embed_operator(swap, dims, [s((x, t)), s(successor[(x, t)])], policy))
        for p in dyn.erasures:
            if p[1] == t:
                ops.append(embed_operator(dagger(shift), dims, [s(successor[p]), record_factor[p]], policy))
        for x in range(width):
            ops.append(embed_operator(mix, dims, [s((x, t + 1))], policy))
        step = rec(t + 1) @ _product(ops, total)
        unitaries.append(step @ unitaries[-1])

    local_families: dict[PointKey, ProjectorFamily] = {}
    heisenberg: dict[PointKey, ProjectorFamily] = {}
    probabilities: dict[PointKey, list[float]] = {}
    for p in order.points:
        u = unitaries[p[1]]
        state = PureState(dims, u @ psi0.amplitudes)
        modal = spectral_modal(pure_partial_trace(state, [s(p)]), policy)
        local_families[p] = modal.definite_family
        probabilities[p] = list(modal.probabilities)
        heisenberg[p] = modal.definite_family.embed(dims, [s(p)], policy).conjugated(u)

    model = LatticeModel(
        order=order,
        points=points,
        dims=dims,
        initial_state=psi0,
        unitaries=tuple(unitaries),
        local_families=local_families,
        heisenberg=heisenberg,
        probabilities=probabilities,
        dynamics=dyn,
    )
    residual = microcausality_residual(model)
    if residual > policy.hermitian_tol:
        log.warning("Spacelike projectors fail to commute: max ‖[P(x), P(y)]‖ = %.3e", residual)
    return replace(model, commutator_residual=residual)


def microcausality_residual(model: LatticeModel) -> float:
    """Max ‖[P(x), P(y)]‖_max over spacelike pairs and all family members."""
    worst = 0.0
    keys = model.point_keys
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            if not model.order.spacelike(a, b):
                continue
            for pa in model.heisenberg[a].projectors:
                for pb in model.heisenberg[b].projectors:
                    worst = max(worst, max_abs(commutator(pa, pb)))
    return worst


# =========================
# Slices and histories
# =========================

def _labels_to_indices(model: LatticeModel, points: Sequence[PointKey], labels: Sequence[Any]) -> list[int]:
    if len(points) != len(labels):
        raise ValidationError(f"{len(labels)} outcome label(s) for {len(points)} point(s)")
    return [model.heisenberg[p].index_of(m) for p, m in zip(points, labels)]


def slice_projector(
    model: LatticeModel,
    points: Sequence[PointKey],
    outcomes: Sequence[Any],
    policy: NumericPolicy | None = None,
) -> ComplexMatrix:
    """Product of the Heisenberg projectors of pairwise spacelike *points* for the given labels."""
    policy = resolve(policy)
    points = [tuple(p) for p in points]
    for i, a in enumerate(points):
        if a not in model.heisenberg:
            raise ValidationError(f"point {a} is not on the lattice")
        for b in points[i + 1:]:
            if not model.order.spacelike(a, b):
                raise CausalityError(f"slice points {a} and {b} are not spacelike separated")
    idx = _labels_to_indices(model, points, outcomes)
    p = np.eye(model.dim, dtype=complex)
    for point, i in zip(points, idx):
        p = p @ model.heisenberg[point].projectors[i]
    idem = max_abs(p @ p - p)
    herm = hermiticity_residual(p)
    if idem > policy.projector_tol or herm > policy.projector_tol:
        raise ValidationError(
            f"slice product is not a projector (‖P² − P‖ = {idem:.3e}, ‖P − P†‖ = {herm:.3e})"
        )
    return p


def slice_family(
    model: LatticeModel,
    points: Sequence[PointKey],
    policy: NumericPolicy | None = None,
) -> ProjectorFamily:
    """All slice projectors of *points*, labelled by the tuple of point labels."""
    points = [tuple(p) for p in points]
    members = []
    labels = []
    for combo in itertools.product(*(model.heisenberg[p].labels for p in points)):
        members.append(slice_projector(model, points, combo, policy))
        labels.append(tuple(combo))
    return ProjectorFamily(model.dim, tuple(members), tuple(labels))


def lattice_history_family(
    model: LatticeModel,
    foliation: Foliation,
    policy: NumericPolicy | None = None,
):
    """The foliation's slice families as a history family (already Heisenberg-picture, U = I)."""
    from HistoriesEngine.models import HistoryFamily, TimedFamily

    foliation.validate(model.order)
    identity = np.eye(model.dim, dtype=complex)
    timed = tuple(
        TimedFamily(float(k), slice_family(model, s, policy), identity, policy)
        for k, s in enumerate(foliation.slices)
    )
    return HistoryFamily(model.initial_state, timed)


def _outcome_labels(model: LatticeModel, outcomes: Mapping[PointKey, Any] | Sequence[Any]) -> dict[PointKey, Any]:
    if isinstance(outcomes, Mapping):
        labels = {tuple(k): v for k, v in outcomes.items()}
    else:
        keys = model.point_keys
        if len(outcomes) != len(keys):
            raise ValidationError(f"{len(outcomes)} outcome(s) for {len(keys)} lattice point(s)")
        labels = dict(zip(keys, outcomes))
    if set(labels) != set(model.point_keys):
        raise ValidationError("outcomes must name every lattice point exactly once")
    return labels


def lattice_history_probability(
    model: LatticeModel,
    foliation: Foliation,
    outcomes: Mapping[PointKey, Any] | Sequence[Any],
    policy: NumericPolicy | None = None,
) -> float:
    """‖P*(slice_n) … P*(slice_1) Ψ₀‖² for the labelled outcome of every point."""
    foliation.validate(model.order)
    labels = _outcome_labels(model, outcomes)
    v = np.array(model.initial_state.amplitudes)
    for s in foliation.slices:
        v = slice_projector(model, s, [labels[p] for p in s], policy) @ v
    return float(min(1.0, max(0.0, np.vdot(v, v).real)))


def to_point_outcomes(foliation: Foliation, model: LatticeModel, history: Sequence[int]) -> Outcomes:
    """History index over slices → family index per point in canonical order."""
    per_point: dict[PointKey, int] = {}
    for s, k in zip(foliation.slices, history):
        sizes = [len(model.heisenberg[p]) for p in s]
        for p, i in zip(s, np.unravel_index(k, sizes)):
            per_point[p] = int(i)
    return tuple(per_point[p] for p in model.point_keys)


def lattice_consistency_check(
    model: LatticeModel,
    foliation: Foliation,
    tol: float | None = None,
    policy: NumericPolicy | None = None,
) -> dict[str, Any]:
    """
    Off-diagonal report for the foliation, plus the two correlation identities:
    ⟨Ψ|P_l P′_k P′_k′ P_l|Ψ⟩ = 0 for k ≠ k′ and ⟨Ψ|P_l P′_k P_l′|Ψ⟩ = 0 for l ≠ l′,
    over every ordered pair of slices.
    """
    from HistoriesEngine.histories import check_consistency

    policy = resolve(policy)
    tol = policy.consistency_tol if tol is None else float(tol)
    hf = lattice_history_family(model, foliation, policy)
    table = check_consistency(hf, tol, policy)

    psi = np.array(model.initial_state.amplitudes)
    families = [tf.family.projectors for tf in hf.timed_families]
    ortho = 0.0
    incompat = 0.0
    for a in range(len(families)):
        first = [p @ psi for p in families[a]]
        for b in range(a + 1, len(families)):
            for l, vl in enumerate(first):
                later = [q @ vl for q in families[b]]
                for k, wk in enumerate(later):
                    for wk2 in later[k + 1:]:
                        ortho = max(ortho, abs(np.vdot(wk, wk2)))
                    for vl2 in first[l + 1:]:
                        incompat = max(incompat, abs(np.vdot(vl2, families[b][k] @ vl)))

    report = {
        "foliation": foliation.to_record(),
        "slice_count": len(foliation.slices),
        "max_offdiagonal": table.max_offdiagonal,
        "offending_pair": [list(p) for p in table.offending_pair] if table.offending_pair else None,
        "orthogonality_residual": float(ortho),
        "incompatibility_residual": float(incompat),
        "normalization_residual": table.normalization_residual,
        "tolerance": tol,
        "consistent": table.consistent and incompat <= tol,
    }
    if not report["consistent"]:
        log.warning("Lattice histories inconsistent: max |D| = %.3e", table.max_offdiagonal)
    return report
