#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
modal.py
========
Single-time property assignment: the definite-valued family of a subsystem
(from the total state or from a reduced density operator), membership of an
observable in that family's commutative core, and the single-time joint
probability over disjoint subsystems.
"""
from __future__ import annotations

import itertools
import logging
from typing import Hashable, Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CapacityError, DisjointnessError, ShapeError, ValidationError
from shared.projectors import ProjectorFamily
from shared.qstate import (
    ComplexMatrix,
    DensityOperator,
    PureState,
    apply_local_vector,
    as_matrix,
    check_hermitian,
    commutator,
    eig_hermitian,
    max_abs,
    outer,
    prod,
)

from .models import DefiniteValueReport, ModalState
from .schmidt import merge_degenerate, schmidt_decompose

log = logging.getLogger(__name__)

Assignment = tuple[Sequence[int], ComplexMatrix]


# =========================
# Definite-valued families
# =========================

def modal_state(
    psi: PureState,
    target: Sequence[int],
    policy: NumericPolicy | None = None,
) -> ModalState:
    """Definite-valued family of the *target* factors, read off the Schmidt decomposition of ψ."""
    policy = resolve(policy)
    result = schmidt_decompose(psi, target, policy)
    probabilities = result.group_weights()
    if len(result.merged_projectors) > len(probabilities):
        probabilities.append(0.0)
    zero = [p <= policy.rank_cutoff for p in probabilities]
    return ModalState(
        target_factors=result.left_factors,
        definite_family=result.merged_projectors,
        probabilities=probabilities,
        zero_weight=zero,
        source="schmidt",
        schmidt=result,
        merge_groups=result.merge_groups,
    )


def spectral_modal(rho: DensityOperator, policy: NumericPolicy | None = None) -> ModalState:
    """
    Definite-valued family from the spectral resolution of ρ.

    Degenerate eigenvalues are merged; zero-eigenvalue projectors are kept so
    the family stays complete, and flagged in ``zero_weight``.
    """
    policy = resolve(policy)
    rho.validate(policy)
    w, v = eig_hermitian(rho.matrix, policy)
    groups = merge_degenerate(list(w), policy.degeneracy_tol)

    projectors = []
    probabilities = []
    for g in groups:
        p = np.zeros((rho.dim, rho.dim), dtype=complex)
        for i in g:
            p += outer(v[:, i])
        projectors.append(p)
        probabilities.append(float(min(1.0, max(0.0, sum(w[i] for i in g)))))

    family = ProjectorFamily(rho.dim, tuple(projectors), tuple(range(len(groups))))
    zero = [p <= policy.rank_cutoff for p in probabilities]
    log.debug("Spectral family: %d group(s), %d flagged weight-zero", len(groups), sum(zero))
    return ModalState(
        target_factors=tuple(range(len(rho.dims))),
        definite_family=family,
        probabilities=probabilities,
        zero_weight=zero,
        source="spectral",
        eigenvalues=w,
        merge_groups=groups,
    )


def is_definite_valued(
    a: ComplexMatrix,
    family: ProjectorFamily,
    policy: NumericPolicy | None = None,
) -> DefiniteValueReport:
    """
    Test a = Σ_l a_l P_l with real a_l, using a_l = tr(P_l a) / tr(P_l).

    Only the commutative core of the definite-valued set is decided here.
    """
    policy = resolve(policy)
    a = as_matrix(a)
    check_hermitian(a, policy, what="observable")
    if a.shape != (family.dim, family.dim):
        raise ShapeError(f"observable shape {a.shape} does not match family dimension {family.dim}")

    coefficients = []
    rebuilt = np.zeros_like(a)
    for p in family.projectors:
        trace_p = float(np.trace(p).real)
        coef = float(np.trace(p @ a).real / trace_p) if trace_p > 0.5 else 0.0
        coefficients.append(coef)
        rebuilt += coef * p
    residual = max_abs(a - rebuilt)
    max_comm = max(max_abs(commutator(a, p)) for p in family.projectors)
    definite = residual <= policy.definite_tol and max_comm <= policy.definite_tol
    return DefiniteValueReport(
        is_definite=definite,
        residual=residual,
        max_commutator=max_comm,
        coefficients=coefficients if definite else None,
    )


# =========================
# Single-time joint probability
# =========================

def _check_assignments(dims: Sequence[int], assignments: Sequence[Assignment], policy: NumericPolicy) -> None:
    seen: set[int] = set()
    for factors, proj in assignments:
        fs = [int(f) for f in factors]
        if not fs or any(not 0 <= f < len(dims) for f in fs):
            raise ShapeError(f"invalid factor set {fs} for {len(dims)} factors")
        overlap = seen.intersection(fs)
        if overlap or len(set(fs)) != len(fs):
            raise DisjointnessError(f"factor sets overlap on {sorted(overlap) or fs}")
        seen.update(fs)
        p = as_matrix(proj)
        d = prod(dims[f] for f in fs)
        if p.shape != (d, d):
            raise ShapeError(f"projector shape {p.shape} does not act on factors {fs} (dim {d})")
        if max_abs(p @ p - p) > policy.projector_tol or max_abs(p - p.conj().T) > policy.projector_tol:
            raise ValidationError(f"operator on factors {fs} is not a projector")


def joint_probability_single_time(
    psi: PureState,
    assignments: Sequence[Assignment],
    policy: NumericPolicy | None = None,
) -> float:
    """⟨Ψ| P^α P^β … |Ψ⟩ for projectors on pairwise disjoint factor sets, clamped to [0, 1]."""
    policy = resolve(policy)
    _check_assignments(psi.dims, assignments, policy)
    vec = psi.amplitudes
    for factors, proj in assignments:
        vec = apply_local_vector(vec, psi.dims, as_matrix(proj), factors)
    value = np.vdot(psi.amplitudes, vec)
    if abs(value.imag) > 1e-12:
        log.debug("joint probability has imaginary part %.3e", value.imag)
    return float(min(1.0, max(0.0, value.real)))


def joint_modal_distribution(
    psi: PureState,
    targets: Sequence[Sequence[int]],
    policy: NumericPolicy | None = None,
) -> dict[tuple[Hashable, ...], float]:
    """
    Joint distribution over the definite-valued families of several disjoint
    subsystems, each family taken from ψ itself.
    """
    policy = resolve(policy)
    states = [modal_state(psi, t, policy) for t in targets]
    count = prod(len(s.definite_family) for s in states)
    if count > policy.max_histories:
        raise CapacityError("joint outcome tuples", count, policy.max_histories)

    table: dict[tuple[Hashable, ...], float] = {}
    members = [list(s.definite_family) for s in states]
    for combo in itertools.product(*members):
        labels = tuple(label for label, _ in combo)
        assignments = [(s.target_factors, proj) for s, (_, proj) in zip(states, combo)]
        table[labels] = joint_probability_single_time(psi, assignments, policy)
    return table
