#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
histories.py
============
History probabilities, the decoherence functional and Kolmogorov checks.

Branch vectors
--------------
For a history α = (i, j, …, l) the branch vector is

    C_α Ψ = P_l(t_n) … P_j(t_2) P_i(t_1) Ψ,      P(t) = U(t)† P U(t)

so that the history probability is ‖C_α Ψ‖² and the decoherence functional
is D(α, α′) = ⟨C_α Ψ | C_α′ Ψ⟩. The consistency check enumerates every
history, keeps the nonzero branch vectors and scans their Gram matrix in
column blocks.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CapacityError, HistoryError, ShapeError, ValidationError
from shared.projectors import ProjectorFamily
from shared.qstate import ComplexMatrix, as_matrix, check_unitary, dagger, max_abs

from .models import HistoryFamily, HistoryIndex, HistoryProbabilityTable, TimedFamily

log = logging.getLogger(__name__)

# Branch vectors with norm at or below this are dropped from the Gram scan;
# their contribution to any entry is bounded by the same amount.
_ZERO_BRANCH = 1e-14

_GRAM_BLOCK = 256


# =========================
# Single histories
# =========================

def heisenberg_projector(
    p: ComplexMatrix, u: ComplexMatrix, policy: NumericPolicy | None = None
) -> ComplexMatrix:
    """U† P U for a projector P and unitary U."""
    policy = resolve(policy)
    p = as_matrix(p)
    u = as_matrix(u)
    if p.shape != u.shape:
        raise ShapeError(f"projector shape {p.shape} does not match unitary shape {u.shape}")
    if max_abs(p @ p - p) > policy.projector_tol or max_abs(p - dagger(p)) > policy.projector_tol:
        raise ValidationError("input is not a projector")
    check_unitary(u, policy)
    return dagger(u) @ p @ u


def _check_indices(hf: HistoryFamily, indices: Sequence[int]) -> HistoryIndex:
    idx = tuple(int(i) for i in indices)
    if len(idx) != len(hf.timed_families):
        raise HistoryError(f"expected {len(hf.timed_families)} indices, got {len(idx)}")
    for k, (i, n) in enumerate(zip(idx, hf.shape)):
        if not 0 <= i < n:
            raise HistoryError(f"index {i} out of range at time position {k} (family size {n})")
    return idx


def branch_vector(hf: HistoryFamily, indices: Sequence[int]) -> np.ndarray:
    """C_α Ψ for one history."""
    idx = _check_indices(hf, indices)
    vec = np.array(hf.state.amplitudes)
    for tf, i in zip(hf.timed_families, idx):
        vec = tf.heisenberg[i] @ vec
    return vec


def history_probability(hf: HistoryFamily, indices: Sequence[int]) -> float:
    """‖C_α Ψ‖², real and nonnegative whether or not the family is consistent."""
    vec = branch_vector(hf, indices)
    return float(np.vdot(vec, vec).real)


def decoherence_functional(
    hf: HistoryFamily, indices: Sequence[int], indices_primed: Sequence[int]
) -> complex:
    """D(α, α′) = ⟨Ψ| C_α† C_α′ |Ψ⟩."""
    a = branch_vector(hf, indices)
    b = branch_vector(hf, indices_primed)
    return complex(np.vdot(a, b))


def luders_probability(hf: HistoryFamily, indices: Sequence[int]) -> float:
    """
    Sequential state-update probability of a history, computed on density
    operators in the Schrödinger picture. Independent of the Heisenberg
    route; used as an oracle.
    """
    idx = _check_indices(hf, indices)
    psi = hf.state.amplitudes
    rho = np.outer(psi, psi.conj())
    prev_u = np.eye(hf.state.dim, dtype=complex)
    for tf, i in zip(hf.timed_families, idx):
        step = tf.unitary_from_origin @ dagger(prev_u)
        rho = step @ rho @ dagger(step)
        p = tf.family.projectors[i]
        rho = p @ rho @ p
        prev_u = tf.unitary_from_origin
    return float(np.trace(rho).real)


def insert_trivial_time(hf: HistoryFamily, time: float) -> HistoryFamily:
    """Same family with an extra time whose only member is the identity."""
    if any(abs(t - time) == 0.0 for t in hf.times):
        raise HistoryError(f"time {time} already present")
    trivial = TimedFamily(
        time, ProjectorFamily.trivial(hf.state.dim), np.eye(hf.state.dim, dtype=complex)
    )
    tfs = sorted(list(hf.timed_families) + [trivial], key=lambda tf: tf.time)
    return HistoryFamily(hf.state, tuple(tfs))


# =========================
# Enumeration
# =========================

def _check_count(hf: HistoryFamily, policy: NumericPolicy) -> int:
    count = hf.history_count
    if count > policy.max_histories:
        raise CapacityError("histories", count, policy.max_histories)
    return count


def _all_branches(hf: HistoryFamily) -> tuple[list[HistoryIndex], np.ndarray]:
    """Every history in index order with its branch vector (columns), prefix-shared."""
    prefixes: list[HistoryIndex] = [()]
    vecs = np.array(hf.state.amplitudes).reshape(-1, 1)
    for tf in hf.timed_families:
        new_prefixes: list[HistoryIndex] = []
        blocks = [hp @ vecs for hp in tf.heisenberg]
        # prefix-major column order
        stacked = np.stack(blocks, axis=2)              # D × prefixes × members
        vecs = stacked.reshape(stacked.shape[0], -1)
        for pre in prefixes:
            for i in range(len(tf.heisenberg)):
                new_prefixes.append(pre + (i,))
        prefixes = new_prefixes
    return prefixes, vecs


def _scan_block(branches: np.ndarray, start: int, stop: int) -> tuple[float, int, int]:
    """Largest off-diagonal |G_ab| with b in [start, stop)."""
    g = dagger(branches) @ branches[:, start:stop]
    for j in range(stop - start):
        g[start + j, j] = 0.0
    mags = np.abs(g)
    flat = int(np.argmax(mags))
    a, b = np.unravel_index(flat, mags.shape)
    return float(mags[a, b]), int(a), int(b) + start


def _max_offdiagonal(branches: np.ndarray, policy: NumericPolicy) -> tuple[float, int, int]:
    m = branches.shape[1]
    if m < 2:
        return 0.0, -1, -1
    bounds = [(s, min(s + _GRAM_BLOCK, m)) for s in range(0, m, _GRAM_BLOCK)]
    if policy.parallel and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=policy.workers) as pool:
            results = list(pool.map(lambda b: _scan_block(branches, *b), bounds))
    else:
        results = [_scan_block(branches, *b) for b in bounds]
    # fixed reduction order: first block wins ties
    best = (0.0, -1, -1)
    for r in results:
        if r[0] > best[0]:
            best = r
    return best


def check_consistency(
    hf: HistoryFamily,
    tol: float | None = None,
    policy: NumericPolicy | None = None,
) -> HistoryProbabilityTable:
    """
    Enumerate all histories, fill the diagonal table and report the largest
    off-diagonal decoherence-functional magnitude.
    """
    policy = resolve(policy)
    tol = policy.consistency_tol if tol is None else float(tol)
    count = _check_count(hf, policy)
    tuples, vecs = _all_branches(hf)

    norms = np.linalg.norm(vecs, axis=0)
    probabilities = {t: float(n * n) for t, n in zip(tuples, norms)}
    nonzero = np.flatnonzero(norms > _ZERO_BRANCH)
    branches = vecs[:, nonzero]

    max_off, a, b = _max_offdiagonal(branches, policy)
    offending = (tuples[nonzero[a]], tuples[nonzero[b]]) if a >= 0 else None

    total_vec = vecs.sum(axis=1)
    functional_total = float(np.vdot(total_vec, total_vec).real)
    norm_residual = abs(sum(probabilities.values()) - 1.0)
    consistent = max_off <= tol

    log.debug(
        "Consistency: %d histories (%d nonzero), max off-diagonal %.3e, normalization residual %.3e",
        count, nonzero.size, max_off, norm_residual,
    )
    if not consistent:
        log.info("History family inconsistent at tol %.1e: max |D| = %.3e at %s", tol, max_off, offending)

    return HistoryProbabilityTable(
        times=hf.times,
        family_labels=[list(tf.family.labels) for tf in hf.timed_families],
        probabilities=probabilities,
        normalization_residual=norm_residual,
        max_offdiagonal=max_off,
        tol=tol,
        consistent=consistent,
        offending_pair=offending,
        functional_total=functional_total,
        nonzero_histories=int(nonzero.size),
    )


def decoherence_matrix(
    hf: HistoryFamily, policy: NumericPolicy | None = None
) -> tuple[list[HistoryIndex], np.ndarray]:
    """Full decoherence functional over all histories, rows/columns in index order."""
    policy = resolve(policy)
    count = _check_count(hf, policy)
    if count > policy.max_leaves:
        raise CapacityError("decoherence matrix rows", count, policy.max_leaves)
    tuples, vecs = _all_branches(hf)
    return tuples, dagger(vecs) @ vecs


def marginalization_check(
    table: HistoryProbabilityTable,
    hf: HistoryFamily,
    drop_time: int,
    policy: NumericPolicy | None = None,
) -> float:
    """
    Max over shortened histories of |Σ_dropped table − probability in the
    family without *drop_time*|.
    """
    policy = resolve(policy)
    n = len(hf.timed_families)
    if n < 2:
        raise HistoryError("cannot marginalize the only time of a history family")
    if not 0 <= drop_time < n:
        raise HistoryError(f"drop_time {drop_time} out of range for {n} times")
    if not table.consistent:
        log.warning("Marginalizing an inconsistent table: residual is reported, no consistency claim is made")

    shortened = hf.without_time(drop_time)
    _check_count(shortened, policy)
    tuples, vecs = _all_branches(shortened)
    reference = {t: float(np.vdot(vecs[:, k], vecs[:, k]).real) for k, t in enumerate(tuples)}

    summed: dict[HistoryIndex, float] = {t: 0.0 for t in tuples}
    for idx, p in table.probabilities.items():
        reduced = idx[:drop_time] + idx[drop_time + 1:]
        summed[reduced] += p
    residual = max(abs(summed[t] - reference[t]) for t in tuples)
    log.debug("Marginalization over time %d: residual %.3e", drop_time, residual)
    return residual
