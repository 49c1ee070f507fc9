#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
chains.py
=========
Builders for measurement-like record chains.

Step k applies an optional free system evolution V_k and then copies the
system's pointer value into record factor k:

    S_k = (B_k ⊗ I) · CS · (B_k† ⊗ I) · (V_k ⊗ I)      on (system, record_k)

where B_k holds the pointer basis as columns and CS is the controlled cyclic
shift |c⟩|r⟩ → |c⟩|r + c⟩. On the ready state this maps
|β_j⟩|0⟩ → |β_j⟩|j⟩, and it is a permutation conjugated by a basis change,
so no unitary completion is needed. Earlier records are untouched.

The branch-dependent second step conditions on record 1:

    S_2 = Σ_i |i⟩⟨i|_{r1} ⊗ G_i,    G_i = record gate in basis β_{i,·}
"""
from __future__ import annotations

import itertools
import logging
from typing import Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import ScenarioError
from shared.projectors import ProjectorFamily
from shared.qstate import (
    ComplexMatrix,
    PureState,
    as_matrix,
    check_dim_cap,
    dagger,
    embed_operator,
    ket,
    outer,
    prod,
    shift_operator,
    unitarity_residual,
)

from .models import SYSTEM_FACTOR, Basis, CanonicalTerm, RecordingScenario, StepBases

log = logging.getLogger(__name__)


# =========================
# Basis helpers
# =========================

def z_basis(d: int = 2) -> Basis:
    return np.eye(d, dtype=complex)


def x_basis() -> Basis:
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rotated_basis(theta: float) -> Basis:
    """Real qubit basis rotated by *theta* from the z basis."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _check_basis(basis: Sequence | np.ndarray, d: int, policy: NumericPolicy, what: str) -> Basis:
    try:
        b = as_matrix(basis)
    except Exception as exc:
        raise ScenarioError(f"{what}: {exc}") from exc
    if b.shape != (d, d):
        raise ScenarioError(f"{what} must have {d} orthonormal columns, got shape {b.shape}")
    if unitarity_residual(b) > policy.unitary_tol:
        raise ScenarioError(f"{what} is not an orthonormal complete basis")
    return b


def _check_evolution(u: ComplexMatrix | None, d: int, policy: NumericPolicy, what: str) -> ComplexMatrix:
    if u is None:
        return np.eye(d, dtype=complex)
    u = as_matrix(u)
    if u.shape != (d, d) or unitarity_residual(u) > policy.unitary_tol:
        raise ScenarioError(f"{what} must be a {d}×{d} unitary")
    return u


# =========================
# Gates
# =========================

def record_gate(basis: Basis) -> ComplexMatrix:
    """|β_j⟩|r⟩ → |β_j⟩|r + j⟩ on (system, record)."""
    d = basis.shape[0]
    change = np.kron(basis, np.eye(d, dtype=complex))
    return change @ shift_operator(d, d) @ dagger(change)


def _step_unitary(
    dims: tuple[int, ...], step: int, bases: StepBases, evolution: ComplexMatrix, policy: NumericPolicy
) -> ComplexMatrix:
    d = dims[SYSTEM_FACTOR]
    free = embed_operator(evolution, dims, [SYSTEM_FACTOR], policy)
    if isinstance(bases, tuple):
        # conditioned on record 1, acting on (r1, system, r_step)
        local = sum(
            np.kron(outer(ket(i, d)), record_gate(b)) for i, b in enumerate(bases)
        )
        gate = embed_operator(local, dims, [1, SYSTEM_FACTOR, step], policy)
    else:
        gate = embed_operator(record_gate(bases), dims, [SYSTEM_FACTOR, step], policy)
    return gate @ free


def _assemble(
    kind: str,
    system_dim: int,
    step_bases: list[StepBases],
    initial_system: np.ndarray,
    evolutions: list[ComplexMatrix],
    policy: NumericPolicy,
) -> RecordingScenario:
    record_dims = tuple(system_dim for _ in step_bases)
    dims = (system_dim,) + record_dims
    check_dim_cap(prod(dims), policy)
    ready = [ket(0, system_dim) for _ in step_bases]
    initial = PureState.product(initial_system, *ready)
    unitaries = tuple(
        _step_unitary(dims, k, b, v, policy)
        for k, (b, v) in enumerate(zip(step_bases, evolutions), start=1)
    )
    for k, u in enumerate(unitaries, start=1):
        residual = unitarity_residual(u)
        if residual > policy.unitary_tol:
            raise ScenarioError(f"step {k} unitary residual {residual:.3e}")
    log.debug("Built %s scenario: %d step(s), dims %s", kind, len(unitaries), dims)
    return RecordingScenario(
        kind=kind,
        system_dim=system_dim,
        pointer_bases=tuple(step_bases),
        record_dims=record_dims,
        initial_state=initial,
        step_unitaries=unitaries,
        system_evolutions=tuple(evolutions),
    )


def _initial_vector(initial_system, d: int) -> np.ndarray:
    if initial_system is None:
        return np.ones(d, dtype=complex) / np.sqrt(d)
    v = np.asarray(initial_system, dtype=complex).reshape(-1)
    if v.size != d:
        raise ScenarioError(f"initial system vector has length {v.size}, expected {d}")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-10:
        raise ScenarioError(f"initial system vector is not normalized (‖v‖ = {norm:.12g})")
    return v


# =========================
# Builders
# =========================

def build_measurement_chain(
    system_dim: int,
    pointer_bases: Sequence[Basis],
    initial_system: Sequence | np.ndarray | None = None,
    system_evolutions: Sequence[ComplexMatrix | None] | None = None,
    policy: NumericPolicy | None = None,
) -> RecordingScenario:
    """One record factor per pointer basis; step k records the system in basis k."""
    policy = resolve(policy)
    if system_dim < 2:
        raise ScenarioError("system dimension must be at least 2")
    if not pointer_bases:
        raise ScenarioError("at least one pointer basis is required")
    bases = [_check_basis(b, system_dim, policy, f"pointer basis {k}") for k, b in enumerate(pointer_bases, start=1)]
    evolutions = list(system_evolutions) if system_evolutions is not None else [None] * len(bases)
    if len(evolutions) != len(bases):
        raise ScenarioError(f"{len(evolutions)} system evolutions for {len(bases)} steps")
    evolutions = [_check_evolution(v, system_dim, policy, f"system evolution {k}") for k, v in enumerate(evolutions, start=1)]
    return _assemble("chain", system_dim, bases, _initial_vector(initial_system, system_dim), evolutions, policy)


def build_branch_dependent_chain(
    system_dim: int,
    per_branch_bases: Sequence[Basis],
    initial_system: Sequence | np.ndarray | None = None,
    first_basis: Basis | None = None,
    trailing_bases: Sequence[Basis] = (),
    policy: NumericPolicy | None = None,
) -> RecordingScenario:
    """
    Step 1 records in *first_basis* (default z). Step 2 records in the basis
    chosen by the step-1 outcome i: ``per_branch_bases[i]``. Any
    *trailing_bases* are further common-basis steps.
    """
    policy = resolve(policy)
    if system_dim < 2:
        raise ScenarioError("system dimension must be at least 2")
    if len(per_branch_bases) != system_dim:
        raise ScenarioError(
            f"{len(per_branch_bases)} per-branch bases for {system_dim} first-step outcomes"
        )
    first = _check_basis(z_basis(system_dim) if first_basis is None else first_basis, system_dim, policy, "first basis")
    branch = tuple(
        _check_basis(b, system_dim, policy, f"branch basis {i}") for i, b in enumerate(per_branch_bases)
    )
    trailing = [_check_basis(b, system_dim, policy, f"trailing basis {k}") for k, b in enumerate(trailing_bases, start=3)]
    bases: list[StepBases] = [first, branch, *trailing]
    evolutions = [np.eye(system_dim, dtype=complex) for _ in bases]
    return _assemble("branch_dependent", system_dim, bases, _initial_vector(initial_system, system_dim), evolutions, policy)


def scenario_total_state(s: RecordingScenario, upto_step: int | None = None) -> PureState:
    """Apply steps 1..upto_step (default: all) to the initial state."""
    upto = s.steps if upto_step is None else int(upto_step)
    if not 0 <= upto <= s.steps:
        raise ScenarioError(f"upto_step {upto} outside 0..{s.steps}")
    vec = np.array(s.initial_state.amplitudes)
    for u in s.step_unitaries[:upto]:
        vec = u @ vec
    return PureState(s.dims, vec)


def cumulative_unitary(s: RecordingScenario, upto_step: int) -> ComplexMatrix:
    """U(t_k) = S_k … S_1."""
    u = np.eye(prod(s.dims), dtype=complex)
    for step in s.step_unitaries[:upto_step]:
        u = step @ u
    return u


def step_family(s: RecordingScenario, step: int, policy: NumericPolicy | None = None) -> ProjectorFamily:
    """
    Pointer family of *step* on the full space (Schrödinger picture).

    For a branch-dependent step the member j is Σ_i |i⟩⟨i|_{r1} ⊗ |β_{i,j}⟩⟨β_{i,j}|,
    which is again complete and orthogonal.
    """
    bases = s.pointer_bases[step - 1]
    d = s.system_dim
    if isinstance(bases, tuple):
        members = []
        for j in range(d):
            local = sum(np.kron(outer(ket(i, d)), outer(b[:, j])) for i, b in enumerate(bases))
            members.append(embed_operator(local, s.dims, [1, SYSTEM_FACTOR], policy))
        return ProjectorFamily(prod(s.dims), tuple(members), tuple(range(d)))
    return ProjectorFamily.from_basis(bases).embed(s.dims, [SYSTEM_FACTOR], policy)


def scenario_history_family(
    s: RecordingScenario,
    times: Sequence[float] | None = None,
    policy: NumericPolicy | None = None,
):
    """History family of the pointer families at t_k (default k = 1..K), U(t_k) = S_k…S_1."""
    # lazy import keeps the two subprojects importable in either order
    from HistoriesEngine.models import HistoryFamily, TimedFamily

    labels = list(times) if times is not None else [float(k) for k in range(1, s.steps + 1)]
    if len(labels) != s.steps:
        raise ScenarioError(f"{len(labels)} time labels for {s.steps} steps")
    timed = tuple(
        TimedFamily(t, step_family(s, k, policy), cumulative_unitary(s, k), policy)
        for k, t in enumerate(labels, start=1)
    )
    return HistoryFamily(s.initial_state, timed)


def canonical_form(s: RecordingScenario, policy: NumericPolicy | None = None) -> list[CanonicalTerm]:
    """
    Record expansion Σ c_path |ψ_path⟩ ⊗ |Φ_path⟩ computed by sequential
    projection on the system alone. Zero terms are omitted.
    """
    policy = resolve(policy)
    d = s.system_dim
    v0 = amplitudes_of_system(s)
    terms: list[CanonicalTerm] = []
    for path in itertools.product(range(d), repeat=s.steps):
        v = v0
        for k, j in enumerate(path, start=1):
            v = s.system_evolutions[k - 1] @ v
            bases = s.pointer_bases[k - 1]
            b = bases[path[0]] if isinstance(bases, tuple) else bases
            v = outer(b[:, j]) @ v
        c = float(np.linalg.norm(v))
        if c * c < policy.rank_cutoff:
            continue
        record = np.ones(1, dtype=complex)
        for j in path:
            record = np.kron(record, ket(j, d))
        terms.append(CanonicalTerm(path=tuple(path), amplitude=c, system_state=v / c, record_state=record))
    return terms


def amplitudes_of_system(s: RecordingScenario) -> np.ndarray:
    """System vector of the (product) initial state."""
    t = s.initial_state.tensor()
    return np.array(t[(slice(None),) + (0,) * s.steps]).reshape(-1)
