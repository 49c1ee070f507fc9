#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
schmidt.py
==========
Biorthogonal (Schmidt) decomposition with degeneracy merging.

The decomposition is taken from the SVD of the reshaped amplitude matrix so
that left and right states come out together. Coefficients are real and
nonnegative; the phase convention is applied to the left states and the
compensating phase is absorbed into the right states.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import ShapeError, ValidationError
from shared.projectors import REMAINDER_LABEL, ProjectorFamily
from shared.qstate import PureState, amplitude_matrix, outer, phase_factor, prod

from .models import MergeGroup, SchmidtResult

log = logging.getLogger(__name__)


def merge_degenerate(weights: Sequence[float], tol: float) -> list[MergeGroup]:
    """
    Cluster descending *weights* into degenerate groups.

    Adjacent weights w_a ≥ w_b join the same group when
    |w_a − w_b| ≤ tol · max(w_a, 1); groups are the transitive closure.
    """
    groups: list[MergeGroup] = []
    for i, w in enumerate(weights):
        if groups and abs(weights[i - 1] - w) <= tol * max(weights[i - 1], 1.0):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _split_cut(n_factors: int, cut: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    left = tuple(sorted(set(int(c) for c in cut)))
    if not left or len(left) >= n_factors:
        raise ShapeError(f"cut {list(cut)} must leave both sides nonempty ({n_factors} factors)")
    if left[0] < 0 or left[-1] >= n_factors:
        raise ShapeError(f"cut {list(cut)} out of range for {n_factors} factors")
    right = tuple(i for i in range(n_factors) if i not in left)
    return left, right


def schmidt_decompose(
    psi: PureState,
    cut: Sequence[int],
    policy: NumericPolicy | None = None,
) -> SchmidtResult:
    """
    Decompose ψ across the bipartition (cut | rest).

    *cut* lists the factors of side α; everything else is side β.
    Both sides are taken in original factor order.
    """
    policy = resolve(policy)
    norm = psi.norm()
    if abs(norm - 1.0) > policy.norm_tol:
        raise ValidationError(f"state is not normalized (‖ψ‖ = {norm:.15g})")

    left, right = _split_cut(len(psi.dims), cut)
    left_dims = tuple(psi.dims[i] for i in left)
    right_dims = tuple(psi.dims[i] for i in right)
    if prod(left_dims) == 1 or prod(right_dims) == 1:
        raise ValidationError(f"cut {left} | {right} has a trivial (dimension-1) side")

    m = amplitude_matrix(psi, left)
    u, s, vh = np.linalg.svd(m, full_matrices=False)

    keep = s ** 2 >= policy.rank_cutoff
    s = s[keep]
    u = u[:, keep]
    vh = vh[keep, :]

    left_states = np.empty_like(u)
    right_states = np.empty((vh.shape[1], vh.shape[0]), dtype=complex)
    for i in range(s.size):
        phase = phase_factor(u[:, i])
        left_states[:, i] = u[:, i] * phase
        right_states[:, i] = vh[i, :] * np.conj(phase)

    approx = (left_states * s) @ right_states.T
    residual = float(np.linalg.norm(m - approx))
    if residual > policy.reconstruction_tol:
        log.warning("Schmidt reconstruction residual %.3e exceeds %.1e", residual, policy.reconstruction_tol)

    weights = s ** 2
    groups = merge_degenerate(list(weights), policy.degeneracy_tol)
    d_left = prod(left_dims)
    projectors = []
    labels: list = []
    for label, g in enumerate(groups):
        p = np.zeros((d_left, d_left), dtype=complex)
        for i in g:
            p += outer(left_states[:, i])
        projectors.append(p)
        labels.append(label)
    if s.size < d_left:
        projectors.append(np.eye(d_left, dtype=complex) - sum(projectors))
        labels.append(REMAINDER_LABEL)

    family = ProjectorFamily(d_left, tuple(projectors), tuple(labels))
    log.debug(
        "Schmidt %s|%s: rank %d, %d merge group(s), residual %.2e",
        left, right, s.size, len(groups), residual,
    )
    return SchmidtResult(
        left_factors=left,
        right_factors=right,
        left_dims=left_dims,
        right_dims=right_dims,
        coefficients=s.astype(float),
        left_states=left_states,
        right_states=right_states,
        merge_groups=groups,
        merged_projectors=family,
        reconstruction_residual=residual,
    )
