#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
branching.py
============
Branch-relative property assignment.

Each interaction is applied to every leaf's component of the total state
separately; the evolved component is Schmidt-decomposed across
(system | rest) and every merge group becomes a child. Sibling system
projectors are orthogonal by construction, while orthogonality of
environment projectors across different paths is checked afterwards
(reinterference detection).

Histories
---------
At depth k a node n with parent p contributes

    Q_n = S_n ⊗ Π_p,     Π_p = Σ_{c child of p} E_c

(S = system projector, E = environment projector), and the family is
closed with the remainder I − Σ Q_n. Siblings are separated by S, different
parents by Π. When every branch uses the same pointer basis the members act
on the tree exactly like the plain system projectors.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Any, Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CapacityError, ReinterferenceError, ShapeError
from shared.projectors import complete_with_remainder
from shared.qstate import (
    ComplexMatrix,
    PureState,
    as_matrix,
    check_unitary,
    dagger,
    embed_operator,
)

from ModalAssignment.modal import modal_state
from ModalAssignment.schmidt import schmidt_decompose

from .models import BranchNode, BranchPath, BranchTree

log = logging.getLogger(__name__)


# =========================
# Tree construction
# =========================

def initial_tree(psi: PureState, system_factor: int = 0) -> BranchTree:
    if not 0 <= system_factor < len(psi.dims):
        raise ShapeError(f"system factor {system_factor} out of range for {len(psi.dims)} factors")
    root = BranchNode(path=(), amplitude=1.0, branch_state=np.array(psi.amplitudes))
    return BranchTree(root=root, dims=psi.dims, system_factor=system_factor, total_state=psi)


def _to_state_vector(m: np.ndarray, dims: tuple[int, ...], system_factor: int) -> np.ndarray:
    """Inverse of the (system | rest) reshape."""
    rest = [d for i, d in enumerate(dims) if i != system_factor]
    t = m.reshape([dims[system_factor]] + rest)
    return np.moveaxis(t, 0, system_factor).reshape(-1)


def _children_of(
    leaf: BranchNode,
    interaction: ComplexMatrix,
    tree: BranchTree,
    policy: NumericPolicy,
) -> tuple[BranchNode, ...]:
    evolved = interaction @ leaf.branch_state
    psi = PureState(tree.dims, evolved / np.linalg.norm(evolved))
    result = schmidt_decompose(psi, [tree.system_factor], policy)
    weights = result.weights

    groups = sorted(
        result.merge_groups,
        key=lambda g: (-float(sum(weights[i] for i in g)), g[0]),
    )
    children = []
    for g in groups:
        group_weight = float(sum(weights[i] for i in g))
        amplitude = leaf.amplitude * float(np.sqrt(group_weight))
        if amplitude ** 2 < policy.rank_cutoff:
            continue
        left = result.left_states[:, g]
        right = result.right_states[:, g]
        component = (left * result.coefficients[g]) @ right.T
        state = _to_state_vector(component, tree.dims, tree.system_factor) / np.sqrt(group_weight)
        rank = len(g)
        children.append(
            BranchNode(
                path=leaf.path + (len(children),),
                amplitude=amplitude,
                branch_state=state,
                rank=rank,
                system_projector=left @ dagger(left),
                environment_projector=right @ dagger(right),
                environment_basis=right,
                system_state=left[:, 0].copy() if rank == 1 else None,
                environment_state=right[:, 0].copy() if rank == 1 else None,
            )
        )
    return tuple(children)


def _attach(node: BranchNode, new_children: dict[BranchPath, tuple[BranchNode, ...]]) -> BranchNode:
    if node.is_leaf:
        return replace(node, children=new_children[node.path])
    return replace(node, children=tuple(_attach(c, new_children) for c in node.children))


def branch_decompose(
    tree: BranchTree,
    interaction: ComplexMatrix,
    policy: NumericPolicy | None = None,
) -> BranchTree:
    """Apply *interaction* leaf by leaf and attach one child per merge group."""
    policy = resolve(policy)
    u = as_matrix(interaction)
    if u.shape != (tree.total_state.dim, tree.total_state.dim):
        raise ShapeError(f"interaction shape {u.shape} does not act on dimension {tree.total_state.dim}")
    check_unitary(u, policy, what="interaction")

    leaves = tree.leaves()
    if policy.parallel and len(leaves) > 1:
        with ThreadPoolExecutor(max_workers=policy.workers) as pool:
            produced = list(pool.map(lambda leaf: _children_of(leaf, u, tree, policy), leaves))
    else:
        produced = [_children_of(leaf, u, tree, policy) for leaf in leaves]

    count = sum(len(c) for c in produced)
    if count > policy.max_leaves:
        raise CapacityError("branch leaves", count, policy.max_leaves)

    new_children = {leaf.path: kids for leaf, kids in zip(leaves, produced)}
    root = _attach(tree.root, new_children)
    total = PureState(tree.dims, u @ tree.total_state.amplitudes)

    rebuilt = sum((leaf.amplitude * leaf.branch_state for leaf in root.leaves()), np.zeros(total.dim, dtype=complex))
    residual = float(np.linalg.norm(rebuilt - total.amplitudes))
    if residual > policy.reconstruction_tol:
        log.warning("Branch reconstruction residual %.3e exceeds %.1e", residual, policy.reconstruction_tol)

    grown = BranchTree(
        root=root,
        dims=tree.dims,
        system_factor=tree.system_factor,
        total_state=total,
        interactions=tree.interactions + (u,),
        reconstruction_residual=residual,
    )
    report = detect_reinterference(grown, policy.consistency_tol)
    if not report["decoherent"]:
        log.warning(
            "Reinterference at depth %d: max environment overlap %.3e (%d offending pair(s))",
            grown.depth, report["max_overlap"], len(report["offending_pairs"]),
        )
    log.debug("Depth %d: %d leaves, residual %.2e", grown.depth, count, residual)
    return replace(grown, reinterference=report)


def build_branch_tree(
    initial_state: PureState,
    interactions: Sequence[ComplexMatrix],
    system_factor: int = 0,
    policy: NumericPolicy | None = None,
) -> BranchTree:
    tree = initial_tree(initial_state, system_factor)
    for u in interactions:
        tree = branch_decompose(tree, u, policy)
    return tree


# =========================
# Properties and reinterference
# =========================

def branch_properties(tree: BranchTree) -> list[dict[str, Any]]:
    """Per leaf: system projector, environment projector and probability |amplitude|²."""
    if tree.depth == 0:
        return []
    return [
        {
            "path": leaf.path,
            "system_projector": leaf.system_projector,
            "environment_projector": leaf.environment_projector,
            "probability": leaf.probability,
            "rank": leaf.rank,
        }
        for leaf in tree.leaves()
    ]


def _overlap(a: BranchNode, b: BranchNode) -> float:
    """Largest singular value of E_a† E_b over the two environment bases."""
    m = dagger(a.environment_basis) @ b.environment_basis
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def detect_reinterference(
    tree: BranchTree,
    tol: float,
    depth: int | None = None,
) -> dict[str, Any]:
    """Max environment overlap between distinct paths at *depth* (default: the leaves)."""
    depth = tree.depth if depth is None else depth
    nodes = tree.nodes_at(depth) if depth > 0 else []
    max_overlap = 0.0
    offending: list[tuple[BranchPath, BranchPath, float]] = []
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            ov = _overlap(a, b)
            max_overlap = max(max_overlap, ov)
            if ov > tol:
                offending.append((a.path, b.path, ov))
    return {
        "depth": depth,
        "leaf_count": len(nodes),
        "max_overlap": max_overlap,
        "offending_pairs": offending,
        "tol": tol,
        "decoherent": max_overlap <= tol,
    }


# =========================
# History families
# =========================

def _cumulative(interactions: Sequence[ComplexMatrix], dim: int) -> list[ComplexMatrix]:
    out = []
    u = np.eye(dim, dtype=complex)
    for step in interactions:
        u = as_matrix(step) @ u
        out.append(u)
    return out


def branch_history_family(
    tree: BranchTree,
    unitaries: Sequence[ComplexMatrix] | None = None,
    policy: NumericPolicy | None = None,
):
    """
    History family of the branch system projectors at depths 1..depth.

    Refuses (ReinterferenceError) when environment records of different
    paths overlap at any depth.
    """
    from HistoriesEngine.models import HistoryFamily, TimedFamily

    policy = resolve(policy)
    if tree.depth == 0:
        raise ShapeError("branch tree has no interactions yet")
    for k in range(1, tree.depth + 1):
        report = detect_reinterference(tree, policy.consistency_tol, depth=k)
        if not report["decoherent"]:
            raise ReinterferenceError(report)

    dim = tree.total_state.dim
    us = list(unitaries) if unitaries is not None else _cumulative(tree.interactions, dim)
    if len(us) != tree.depth:
        raise ShapeError(f"{len(us)} unitaries for a tree of depth {tree.depth}")

    order = [tree.system_factor] + tree.environment_factors
    timed = []
    for k in range(1, tree.depth + 1):
        members = []
        labels = []
        for parent in tree.nodes_at(k - 1):
            if not parent.children:
                continue
            pi_parent = sum(c.environment_projector for c in parent.children)
            for child in parent.children:
                local = np.kron(child.system_projector, pi_parent)
                members.append(embed_operator(local, tree.dims, order, policy))
                labels.append(".".join(str(i) for i in child.path))
        family = complete_with_remainder(members, labels, dim, policy)
        timed.append(TimedFamily(float(k), family, us[k - 1], policy))
    return HistoryFamily(PureState(tree.dims, tree.root.branch_state), tuple(timed))


def global_modal_history_family(
    initial_state: PureState,
    interactions: Sequence[ComplexMatrix],
    system_factor: int = 0,
    policy: NumericPolicy | None = None,
):
    """History family of the global biorthogonal decomposition at every depth."""
    from HistoriesEngine.models import HistoryFamily, TimedFamily

    policy = resolve(policy)
    us = _cumulative(interactions, initial_state.dim)
    timed = []
    for k, u in enumerate(us, start=1):
        state = PureState(initial_state.dims, u @ initial_state.amplitudes)
        family = modal_state(state, [system_factor], policy).definite_family
        timed.append(TimedFamily(float(k), family.embed(initial_state.dims, [system_factor], policy), u, policy))
    return HistoryFamily(initial_state, tuple(timed))


def tree_to_record(tree: BranchTree) -> dict[str, Any]:
    """Nested record (paths, amplitudes, probabilities) for output."""
    reinterference = dict(tree.reinterference)
    reinterference["offending_pairs"] = [
        [list(a), list(b), ov] for a, b, ov in reinterference.get("offending_pairs", [])
    ]
    return {
        "depth": tree.depth,
        "system_factor": tree.system_factor,
        "dims": list(tree.dims),
        "leaf_count": len(tree.leaves()) if tree.depth else 0,
        "reconstruction_residual": tree.reconstruction_residual,
        "reinterference": reinterference,
        "root": tree.root.to_record(),
    }
