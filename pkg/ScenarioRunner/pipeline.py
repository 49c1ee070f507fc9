#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
pipeline.py
===========
Dispatch a validated scenario to the computation modules and assemble the
result document.

Every run returns a dict with the same top-level keys:

    scenario   – scenario name
    kind       – scenario kind
    status     – "ok"
    tolerance  – consistency tolerance in effect
    result     – kind-specific payload
    table      – flat rows for tabular output
"""
from __future__ import annotations

import logging
from typing import Any, Callable

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import ScenarioError
from shared.projectors import ProjectorFamily
from shared.qstate import PureState, matrix_exponential_unitary

from .loader import ScenarioFile
from .schema import parse_matrix, parse_vector

log = logging.getLogger(__name__)


# =========================
# Document → objects
# =========================

def _basis(b: Any, d: int) -> np.ndarray:
    from DecoherenceModels import rotated_basis, x_basis, z_basis

    if b == "z":
        return z_basis(d)
    if isinstance(b, str) or isinstance(b, dict):
        if d != 2:
            raise ScenarioError(f"basis {b!r} is only defined for qubits, got dimension {d}")
        return x_basis() if b == "x" else rotated_basis(float(b["rotated"]))
    return parse_matrix(b)


def _explicit_state(block: dict[str, Any]) -> PureState:
    amps = parse_vector(block["amplitudes"])
    dims = tuple(block["dims"])
    if block.get("normalize", False):
        return PureState.normalized(dims, amps)
    return PureState(dims, amps)


def _recording_scenario(block: dict[str, Any], policy: NumericPolicy):
    from DecoherenceModels import build_branch_dependent_chain, build_measurement_chain

    d = int(block.get("system_dim", 2))
    initial = parse_vector(block["initial"]) if block.get("initial") is not None else None
    if block["builder"] == "measurement_chain":
        evolutions = block.get("system_evolutions")
        return build_measurement_chain(
            d,
            [_basis(b, d) for b in block["pointer_bases"]],
            initial,
            system_evolutions=[None if u is None else parse_matrix(u) for u in evolutions] if evolutions else None,
            policy=policy,
        )
    return build_branch_dependent_chain(
        d,
        [_basis(b, d) for b in block["per_branch_bases"]],
        initial,
        first_basis=_basis(block["first_basis"], d) if block.get("first_basis") is not None else None,
        trailing_bases=[_basis(b, d) for b in block.get("trailing_bases", [])],
        policy=policy,
    )


def _final_state(doc: dict[str, Any], policy: NumericPolicy) -> PureState:
    block = doc["state"]
    if "builder" in block:
        from DecoherenceModels import scenario_total_state

        return scenario_total_state(_recording_scenario(block, policy))
    return _explicit_state(block)


# =========================
# Kinds
# =========================

def _run_decompose(doc: dict[str, Any], policy: NumericPolicy) -> tuple[dict, list]:
    from ModalAssignment import modal_state

    psi = _final_state(doc, policy)
    cut = doc.get("cut", [0])
    modal = modal_state(psi, cut, policy)
    schmidt = modal.schmidt
    group_of = {i: k for k, g in enumerate(schmidt.merge_groups) for i in g}
    rows = [
        {"index": i, "coefficient": float(c), "weight": float(c * c), "group": group_of[i]}
        for i, c in enumerate(schmidt.coefficients)
    ]
    log.info("Schmidt rank %d, %d merge group(s)", schmidt.rank, len(schmidt.merge_groups))
    return {"dims": list(psi.dims), "cut": list(cut), "modal": modal.to_record()}, rows


def _run_single_time(doc: dict[str, Any], policy: NumericPolicy) -> tuple[dict, list]:
    from ModalAssignment import joint_modal_distribution

    psi = _final_state(doc, policy)
    targets = [list(t) for t in doc["targets"]]
    dist = joint_modal_distribution(psi, targets, policy)
    rows = []
    for labels in sorted(dist, key=lambda ls: tuple(str(x) for x in ls)):
        row: dict[str, Any] = {"outcome": ",".join(str(x) for x in labels)}
        for k, label in enumerate(labels):
            row[f"s{k}"] = str(label)
        row["probability"] = dist[labels]
        rows.append(row)
    total = float(sum(dist.values()))
    log.info("Joint distribution over %d target(s): %d tuple(s), total %.12f", len(targets), len(dist), total)
    return {"dims": list(psi.dims), "targets": targets, "total": total}, rows


def _explicit_history_family(doc: dict[str, Any], policy: NumericPolicy):
    from HistoriesEngine import HistoryFamily, TimedFamily

    psi = _explicit_state(doc["state"])
    h = parse_matrix(doc["hamiltonian"]) if doc.get("hamiltonian") is not None else None
    timed = []
    for f in doc["families"]:
        factors = list(f["factors"])
        d = int(np.prod([psi.dims[i] for i in factors]))
        basis = _basis(f["basis"], d)
        family = ProjectorFamily.from_basis(basis, groups=f.get("groups"))
        family = family.validate(policy).embed(psi.dims, factors, policy)
        if h is not None:
            u = matrix_exponential_unitary(h, float(f["time"]), policy)
        elif f.get("unitary") is not None:
            u = parse_matrix(f["unitary"])
        else:
            u = np.eye(psi.dim, dtype=complex)
        timed.append(TimedFamily(float(f["time"]), family, u, policy))
    return HistoryFamily(psi, tuple(timed))


def _history_family(doc: dict[str, Any], policy: NumericPolicy):
    block = doc["state"]
    if "builder" not in block:
        return _explicit_history_family(doc, policy)
    if block["builder"] == "kent":
        from HistoriesEngine import kent_scenario

        kwargs: dict[str, Any] = {
            "variant": block.get("variant", "naive"),
            "commuting": bool(block.get("commuting", False)),
        }
        if block.get("dt") is not None:
            kwargs["dt"] = float(block["dt"])
        if block.get("initial") is not None:
            kwargs["initial"] = parse_vector(block["initial"])
        return kent_scenario(policy=policy, **kwargs)
    from DecoherenceModels import scenario_history_family

    return scenario_history_family(_recording_scenario(block, policy), policy=policy)


def _run_histories(doc: dict[str, Any], policy: NumericPolicy) -> tuple[dict, list]:
    from HistoriesEngine import check_consistency, marginalization_check

    hf = _history_family(doc, policy)
    table = check_consistency(hf, policy.consistency_tol, policy)
    record = table.to_record()
    record.pop("table")
    if len(hf.timed_families) > 1:
        record["marginalization_residuals"] = [
            marginalization_check(table, hf, k, policy) for k in range(len(hf.timed_families))
        ]
    log.info(
        "Histories: %d time(s), verdict %s, max off-diagonal %.3e",
        len(hf.timed_families), record["verdict"], table.max_offdiagonal,
    )
    return record, table.rows()


def _run_branch(doc: dict[str, Any], policy: NumericPolicy) -> tuple[dict, list]:
    from BranchModal import (
        branch_history_family,
        branch_properties,
        build_branch_tree,
        global_modal_history_family,
        tree_to_record,
    )
    from HistoriesEngine import check_consistency

    block = doc["state"]
    if "builder" in block:
        scenario = _recording_scenario(block, policy)
        psi, interactions, system_factor = scenario.initial_state, list(scenario.step_unitaries), 0
    else:
        psi = _explicit_state(block)
        system_factor = int(doc.get("system_factor", 0))
        if doc.get("interactions") is not None:
            interactions = [parse_matrix(u) for u in doc["interactions"]]
        else:
            h = parse_matrix(doc["hamiltonian"])
            times = [0.0] + [float(t) for t in doc["times"]]
            interactions = [matrix_exponential_unitary(h, b - a, policy) for a, b in zip(times, times[1:])]

    tree = build_branch_tree(psi, interactions, system_factor, policy)
    result: dict[str, Any] = {"tree": tree_to_record(tree)}

    # ReinterferenceError propagates: the CLI reports it as a refusal
    branch_table = check_consistency(branch_history_family(tree, policy=policy), policy.consistency_tol, policy)
    result["branch_histories"] = {k: v for k, v in branch_table.to_record().items() if k != "table"}
    if doc.get("compare_global", True):
        global_hf = global_modal_history_family(psi, interactions, system_factor, policy)
        global_table = check_consistency(global_hf, policy.consistency_tol, policy)
        result["global_histories"] = {k: v for k, v in global_table.to_record().items() if k != "table"}
        log.info(
            "Branch family max |D| %.3e vs global family max |D| %.3e",
            branch_table.max_offdiagonal, global_table.max_offdiagonal,
        )

    rows = [
        {"path": ".".join(str(i) for i in p["path"]), "rank": p["rank"], "probability": p["probability"]}
        for p in branch_properties(tree)
    ]
    return result, rows


def _run_lattice(doc: dict[str, Any], policy: NumericPolicy) -> tuple[dict, list]:
    from CausalLattice import (
        Foliation,
        LatticeDynamics,
        build_lattice_model,
        foliation_distribution,
        foliation_invariance,
        lattice_consistency_check,
    )

    dyn_doc = doc.get("dynamics", {})
    kwargs: dict[str, Any] = {
        "couplings": tuple((tuple(p), tuple(q)) for p, q in dyn_doc.get("couplings", [])),
        "moves": {tuple(p): int(x) for p, x in dyn_doc.get("moves", [])},
        "records": [tuple(p) for p in dyn_doc["records"]] if dyn_doc.get("records") is not None else None,
        "erasures": tuple(tuple(p) for p in dyn_doc.get("erasures", [])),
        "enforce_causality": bool(dyn_doc.get("enforce_causality", True)),
    }
    for key in ("initial_angle", "mixing_angle"):
        if dyn_doc.get(key) is not None:
            kwargs[key] = float(dyn_doc[key])
    model = build_lattice_model(
        int(doc["width"]), int(doc["timesteps"]), int(doc.get("local_dim", 2)), LatticeDynamics(**kwargs), policy
    )

    by_time = Foliation(tuple(
        tuple(p for p in model.point_keys if p[1] == t) for t in range(model.order.timesteps)
    ))
    consistency = lattice_consistency_check(model, by_time, policy.consistency_tol, policy)
    invariance = foliation_invariance(model, policy.consistency_tol, policy)
    dist, _ = foliation_distribution(model, by_time, policy)

    keys = model.point_keys
    rows = []
    for outcome in sorted(dist):
        row: dict[str, Any] = {"outcome": ",".join(str(i) for i in outcome)}
        for p, i in zip(keys, outcome):
            row[f"x{p[0]}t{p[1]}"] = str(model.heisenberg[p].labels[i])
        row["probability"] = dist[outcome]
        rows.append(row)
    return {"model": model.to_record(), "consistency": consistency, "invariance": invariance}, rows


_RUNNERS: dict[str, Callable[[dict[str, Any], NumericPolicy], tuple[dict, list]]] = {
    "decompose": _run_decompose,
    "single_time": _run_single_time,
    "histories": _run_histories,
    "branch": _run_branch,
    "lattice": _run_lattice,
}


# =========================
# Entry point
# =========================

def effective_policy(scenario: ScenarioFile, policy: NumericPolicy | None, cli_tol: float | None = None) -> NumericPolicy:
    """The scenario's own tolerance applies unless a CLI tolerance was given."""
    policy = resolve(policy)
    if cli_tol is None and scenario.document.get("tolerance") is not None:
        return policy.with_overrides(consistency_tol=float(scenario.document["tolerance"]))
    return policy


def run_scenario(scenario: ScenarioFile, policy: NumericPolicy | None = None) -> dict[str, Any]:
    policy = resolve(policy)
    log.info("=== Running scenario %r (kind=%s) ===", scenario.name, scenario.kind)
    result, rows = _RUNNERS[scenario.kind](scenario.document, policy)
    return {
        "scenario": scenario.name,
        "kind": scenario.kind,
        "status": "ok",
        "tolerance": policy.consistency_tol,
        "result": result,
        "table": rows,
    }
