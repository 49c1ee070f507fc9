#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
foliation.py
============
Foliations and linear extensions of the lattice order, and the check that
the outcome distribution depends on the causal order only.

Small lattices (at most ``policy.exhaustive_point_cap`` points) are handled
exhaustively over every foliation; larger ones use a seeded sample of
linear extensions (one point per slice).
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Iterator

import networkx as nx
import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import CapacityError, ModalError

from .lattice import lattice_history_family, to_point_outcomes
from .models import CausalOrder, Foliation, LatticeModel, Outcomes, PointKey

log = logging.getLogger(__name__)


# =========================
# Enumeration
# =========================

def _minimal(graph: nx.DiGraph, remaining: set[PointKey]) -> list[PointKey]:
    return sorted(
        (p for p in remaining if not any(q in remaining for q in graph.predecessors(p))),
        key=lambda p: (p[1], p[0]),
    )


def _foliations(graph: nx.DiGraph, remaining: set[PointKey]) -> Iterator[tuple[tuple[PointKey, ...], ...]]:
    if not remaining:
        yield ()
        return
    minimal = _minimal(graph, remaining)
    for r in range(1, len(minimal) + 1):
        for chosen in itertools.combinations(minimal, r):
            for rest in _foliations(graph, remaining - set(chosen)):
                yield (chosen,) + rest


def enumerate_foliations(order: CausalOrder, limit: int | None = None) -> list[Foliation]:
    """Every ordered partition into spacelike slices that respects the order."""
    out = []
    for slices in _foliations(order.graph, set(order.points)):
        out.append(Foliation(slices))
        if limit is not None and len(out) > limit:
            raise CapacityError("foliations", len(out), limit)
    return out


def linear_extensions(order: CausalOrder, limit: int | None = None) -> list[tuple[PointKey, ...]]:
    sorts = nx.all_topological_sorts(order.graph)
    if limit is not None:
        sorts = itertools.islice(sorts, limit)
    return [tuple(s) for s in sorts]


def sample_linear_extensions(order: CausalOrder, count: int, seed: int) -> list[tuple[PointKey, ...]]:
    """Seeded random topological sorts, deduplicated, in first-seen order."""
    rng = np.random.default_rng(seed)
    seen: dict[tuple[PointKey, ...], None] = {}
    for _ in range(count):
        remaining = set(order.points)
        seq = []
        while remaining:
            minimal = _minimal(order.graph, remaining)
            p = minimal[int(rng.integers(len(minimal)))]
            seq.append(p)
            remaining.discard(p)
        seen.setdefault(tuple(seq), None)
    return list(seen)


# =========================
# Distributions
# =========================

def foliation_distribution(
    model: LatticeModel,
    foliation: Foliation,
    policy: NumericPolicy | None = None,
) -> tuple[dict[Outcomes, float], float]:
    """Outcome distribution per point tuple and the foliation's max off-diagonal."""
    from HistoriesEngine.histories import check_consistency

    hf = lattice_history_family(model, foliation, policy)
    table = check_consistency(hf, policy=policy)
    dist: dict[Outcomes, float] = {}
    for history, p in table.probabilities.items():
        dist[to_point_outcomes(foliation, model, history)] = p
    return dist, table.max_offdiagonal


def _evaluate(model: LatticeModel, foliation: Foliation, policy: NumericPolicy):
    try:
        return foliation_distribution(model, foliation, policy)
    except ModalError as exc:
        # non-commuting points sharing a slice
        log.warning("Skipping ill-defined foliation %s: %s", foliation.to_record(), exc)
        return None


def foliation_invariance(
    model: LatticeModel,
    tol: float | None = None,
    policy: NumericPolicy | None = None,
) -> dict[str, Any]:
    """Max over foliation pairs and outcome tuples of |p − p′|."""
    policy = resolve(policy)
    tol = policy.consistency_tol if tol is None else float(tol)
    n = len(model.point_keys)

    if n <= policy.exhaustive_point_cap:
        mode = "exhaustive"
        foliations = enumerate_foliations(model.order, limit=policy.max_histories)
    else:
        mode = "sampled"
        foliations = [
            Foliation.from_sequence(s)
            for s in sample_linear_extensions(model.order, policy.sample_count, policy.seed)
        ]
    log.info("Foliation invariance (%s): %d foliation(s) over %d point(s)", mode, len(foliations), n)

    if policy.parallel and len(foliations) > 1:
        with ThreadPoolExecutor(max_workers=policy.workers) as pool:
            results = list(pool.map(lambda f: _evaluate(model, f, policy), foliations))
    else:
        results = [_evaluate(model, f, policy) for f in foliations]

    evaluated = [(f, r) for f, r in zip(foliations, results) if r is not None]
    shape = model.shape()
    outcomes = list(itertools.product(*(range(k) for k in shape)))
    if evaluated:
        table = np.array([[r[0].get(o, 0.0) for o in outcomes] for _, r in evaluated])
        spread = table.max(axis=0) - table.min(axis=0)
        worst = int(np.argmax(spread))
        max_distance = float(spread[worst])
        pair = [int(np.argmax(table[:, worst])), int(np.argmin(table[:, worst]))]
        max_off = max(r[1] for _, r in evaluated)
    else:
        table = np.zeros((0, len(outcomes)))
        max_distance, worst, pair, max_off = 0.0, -1, [], 0.0

    report = {
        "mode": mode,
        "point_count": n,
        "foliation_count": len(foliations),
        "evaluated": len(evaluated),
        "skipped": len(foliations) - len(evaluated),
        "max_distance": max_distance,
        "worst_outcome": list(outcomes[worst]) if worst >= 0 else None,
        "worst_pair": [evaluated[i][0].to_record() for i in pair] if pair else [],
        "max_offdiagonal": float(max_off),
        "tolerance": tol,
        "invariant": max_distance <= tol,
        "distributions": [
            {"foliation": f.to_record(), "probabilities": [float(x) for x in row]}
            for (f, _), row in zip(evaluated, table)
        ],
    }
    if not report["invariant"]:
        log.warning("Foliation dependence: max |p − p′| = %.3e", max_distance)
    return report
