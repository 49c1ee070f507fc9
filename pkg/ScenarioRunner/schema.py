#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
schema.py
=========
Scenario document validation and value parsing.

A scenario is one JSON object with a ``kind`` discriminator. Complex
numbers are written as ``[re, im]`` pairs; matrices are lists of rows of
such pairs. Every problem found is collected (with a path such as
``state.amplitudes[3]``) before ScenarioSchemaError is raised, so a bad file
is reported in one go.
"""
from __future__ import annotations

import math
from typing import Any

import numpy as np

from shared.errors import ScenarioSchemaError

KINDS = ("decompose", "single_time", "histories", "branch", "lattice")
BUILDERS = ("measurement_chain", "branch_dependent", "kent")
NAMED_BASES = ("z", "x")

# builders each kind accepts through its "state" block
_KIND_BUILDERS = {
    "decompose": ("measurement_chain", "branch_dependent"),
    "single_time": ("measurement_chain", "branch_dependent"),
    "histories": BUILDERS,
    "branch": ("measurement_chain", "branch_dependent"),
    "lattice": (),
}


# =========================
# Primitive checks
# =========================

def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_complex(x: Any) -> bool:
    return isinstance(x, list) and len(x) == 2 and all(_is_number(v) for v in x)


def _check_vector(v: Any, path: str, problems: list[str]) -> int | None:
    if not isinstance(v, list) or not v:
        problems.append(f"{path}: expected a nonempty list of [re, im] pairs")
        return None
    for i, z in enumerate(v):
        if not _is_complex(z):
            problems.append(f"{path}[{i}]: expected [re, im], got {z!r}")
    return len(v)


def _check_matrix(m: Any, path: str, problems: list[str], square: bool = True) -> tuple[int, int] | None:
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        problems.append(f"{path}: expected a nonempty list of rows")
        return None
    cols = {len(r) for r in m}
    if len(cols) != 1:
        problems.append(f"{path}: rows have different lengths {sorted(cols)}")
        return None
    n_cols = cols.pop()
    for i, row in enumerate(m):
        for j, z in enumerate(row):
            if not _is_complex(z):
                problems.append(f"{path}[{i}][{j}]: expected [re, im], got {z!r}")
    if square and len(m) != n_cols:
        problems.append(f"{path}: expected a square matrix, got {len(m)} × {n_cols}")
    return len(m), n_cols


def _check_int_list(v: Any, path: str, problems: list[str], nonempty: bool = True) -> None:
    if not isinstance(v, list) or (nonempty and not v) or not all(isinstance(i, int) and not isinstance(i, bool) for i in v):
        problems.append(f"{path}: expected a {'nonempty ' if nonempty else ''}list of integers")


def _check_point(v: Any, path: str, problems: list[str]) -> None:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(i, int) and not isinstance(i, bool) for i in v)):
        problems.append(f"{path}: expected a point [x, t]")


def _check_basis(b: Any, path: str, problems: list[str]) -> None:
    if isinstance(b, str):
        if b not in NAMED_BASES:
            problems.append(f"{path}: unknown basis {b!r}; expected one of {NAMED_BASES}")
    elif isinstance(b, dict):
        if set(b) != {"rotated"} or not _is_number(b.get("rotated")):
            problems.append(f"{path}: expected {{\"rotated\": angle}}")
    else:
        _check_matrix(b, path, problems)


def _check_optional_number(doc: dict, key: str, path: str, problems: list[str], positive: bool = False) -> None:
    if key in doc and doc[key] is not None:
        v = doc[key]
        if not _is_number(v) or (positive and v <= 0):
            problems.append(f"{path}.{key}: expected a {'positive ' if positive else ''}number")


# =========================
# Blocks
# =========================

def _check_state(state: Any, kind: str, problems: list[str]) -> None:
    path = "state"
    if not isinstance(state, dict):
        problems.append(f"{path}: expected an object")
        return
    if "builder" in state:
        builder = state["builder"]
        allowed = _KIND_BUILDERS[kind]
        if builder not in allowed:
            problems.append(f"{path}.builder: {builder!r} not allowed for kind {kind!r} (allowed: {list(allowed)})")
            return
        if "initial" in state and state["initial"] is not None:
            _check_vector(state["initial"], f"{path}.initial", problems)
        if builder == "kent":
            if state.get("variant", "naive") not in ("naive", "dilated"):
                problems.append(f"{path}.variant: expected 'naive' or 'dilated'")
            _check_optional_number(state, "dt", path, problems, positive=True)
            if not isinstance(state.get("commuting", False), bool):
                problems.append(f"{path}.commuting: expected a boolean")
            return
        d = state.get("system_dim", 2)
        if not isinstance(d, int) or isinstance(d, bool) or d < 2:
            problems.append(f"{path}.system_dim: expected an integer ≥ 2")
        if builder == "measurement_chain":
            bases = state.get("pointer_bases")
            if not isinstance(bases, list) or not bases:
                problems.append(f"{path}.pointer_bases: expected a nonempty list of bases")
            else:
                for i, b in enumerate(bases):
                    _check_basis(b, f"{path}.pointer_bases[{i}]", problems)
            evs = state.get("system_evolutions")
            if evs is not None:
                if not isinstance(evs, list):
                    problems.append(f"{path}.system_evolutions: expected a list")
                else:
                    for i, u in enumerate(evs):
                        if u is not None:
                            _check_matrix(u, f"{path}.system_evolutions[{i}]", problems)
        else:
            per = state.get("per_branch_bases")
            if not isinstance(per, list) or not per:
                problems.append(f"{path}.per_branch_bases: expected a nonempty list of bases")
            else:
                for i, b in enumerate(per):
                    _check_basis(b, f"{path}.per_branch_bases[{i}]", problems)
            if state.get("first_basis") is not None:
                _check_basis(state["first_basis"], f"{path}.first_basis", problems)
            trailing = state.get("trailing_bases", [])
            if not isinstance(trailing, list):
                problems.append(f"{path}.trailing_bases: expected a list")
            else:
                for i, b in enumerate(trailing):
                    _check_basis(b, f"{path}.trailing_bases[{i}]", problems)
        return

    dims = state.get("dims")
    _check_int_list(dims, f"{path}.dims", problems)
    n = _check_vector(state.get("amplitudes"), f"{path}.amplitudes", problems)
    if isinstance(dims, list) and dims and all(isinstance(d, int) and d >= 1 for d in dims) and n is not None:
        if math.prod(dims) != n:
            problems.append(f"{path}: {n} amplitudes for dims {dims} (expected {math.prod(dims)})")
    if not isinstance(state.get("normalize", False), bool):
        problems.append(f"{path}.normalize: expected a boolean")


def _uses_builder(doc: dict) -> bool:
    state = doc.get("state")
    return isinstance(state, dict) and "builder" in state


def _check_histories(doc: dict, problems: list[str]) -> None:
    if _uses_builder(doc):
        return
    fams = doc.get("families")
    if not isinstance(fams, list) or not fams:
        problems.append("families: expected a nonempty list (required without a builder)")
        return
    for i, f in enumerate(fams):
        path = f"families[{i}]"
        if not isinstance(f, dict):
            problems.append(f"{path}: expected an object")
            continue
        if not _is_number(f.get("time")):
            problems.append(f"{path}.time: expected a number")
        _check_int_list(f.get("factors"), f"{path}.factors", problems)
        if "basis" not in f:
            problems.append(f"{path}.basis: required")
        else:
            _check_basis(f["basis"], f"{path}.basis", problems)
        if "groups" in f:
            g = f["groups"]
            if not isinstance(g, list) or not all(isinstance(x, list) for x in g):
                problems.append(f"{path}.groups: expected a list of index lists")
        if f.get("unitary") is not None:
            _check_matrix(f["unitary"], f"{path}.unitary", problems)
    if doc.get("hamiltonian") is not None:
        _check_matrix(doc["hamiltonian"], "hamiltonian", problems)
        if any(isinstance(f, dict) and f.get("unitary") is not None for f in fams):
            problems.append("hamiltonian: give either a hamiltonian or per-family unitaries, not both")


def _check_branch(doc: dict, problems: list[str]) -> None:
    if not isinstance(doc.get("system_factor", 0), int):
        problems.append("system_factor: expected an integer")
    if not isinstance(doc.get("compare_global", True), bool):
        problems.append("compare_global: expected a boolean")
    if _uses_builder(doc):
        return
    has_u = doc.get("interactions") is not None
    has_h = doc.get("hamiltonian") is not None
    if has_u == has_h:
        problems.append("interactions/hamiltonian: give exactly one of them")
    if has_u:
        us = doc["interactions"]
        if not isinstance(us, list) or not us:
            problems.append("interactions: expected a nonempty list of matrices")
        else:
            for i, u in enumerate(us):
                _check_matrix(u, f"interactions[{i}]", problems)
    if has_h:
        _check_matrix(doc["hamiltonian"], "hamiltonian", problems)
        times = doc.get("times")
        if not isinstance(times, list) or not times or not all(_is_number(t) for t in times):
            problems.append("times: expected a nonempty list of numbers")
        elif any(b <= a for a, b in zip(times, times[1:])) or times[0] <= 0:
            problems.append("times: expected positive, strictly increasing values")


def _check_lattice(doc: dict, problems: list[str]) -> None:
    for key in ("width", "timesteps"):
        v = doc.get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            problems.append(f"{key}: expected a positive integer")
    d = doc.get("local_dim", 2)
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        problems.append("local_dim: expected an integer ≥ 2")
    dyn = doc.get("dynamics", {})
    if not isinstance(dyn, dict):
        problems.append("dynamics: expected an object")
        return
    for key in ("initial_angle", "mixing_angle"):
        _check_optional_number(dyn, key, "dynamics", problems)
    for key in ("couplings", "moves", "erasures"):
        if not isinstance(dyn.get(key, []), list):
            problems.append(f"dynamics.{key}: expected a list")
            return
    for i, pair in enumerate(dyn.get("couplings", [])):
        if not isinstance(pair, list) or len(pair) != 2:
            problems.append(f"dynamics.couplings[{i}]: expected [[x, t], [x, t]]")
        else:
            _check_point(pair[0], f"dynamics.couplings[{i}][0]", problems)
            _check_point(pair[1], f"dynamics.couplings[{i}][1]", problems)
    for i, mv in enumerate(dyn.get("moves", [])):
        if not isinstance(mv, list) or len(mv) != 2 or not isinstance(mv[1], int):
            problems.append(f"dynamics.moves[{i}]: expected [[x, t], x_next]")
        else:
            _check_point(mv[0], f"dynamics.moves[{i}][0]", problems)
    records = dyn.get("records")
    if records is not None:
        if not isinstance(records, list):
            problems.append("dynamics.records: expected a list of points or null")
        else:
            for i, p in enumerate(records):
                _check_point(p, f"dynamics.records[{i}]", problems)
    for i, p in enumerate(dyn.get("erasures", [])):
        _check_point(p, f"dynamics.erasures[{i}]", problems)
    if not isinstance(dyn.get("enforce_causality", True), bool):
        problems.append("dynamics.enforce_causality: expected a boolean")


def validate_scenario(doc: Any) -> dict[str, Any]:
    """Return *doc* unchanged when valid, else raise ScenarioSchemaError with every problem found."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ScenarioSchemaError(["scenario must be a JSON object"])
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioSchemaError([f"kind: expected one of {KINDS}, got {kind!r}"])
    if "name" in doc and not isinstance(doc["name"], str):
        problems.append("name: expected a string")
    _check_optional_number(doc, "tolerance", "", problems, positive=True)

    if kind != "lattice":
        if "state" not in doc:
            problems.append("state: required")
        else:
            _check_state(doc["state"], kind, problems)

    if kind == "decompose":
        _check_int_list(doc.get("cut", [0]), "cut", problems)
    elif kind == "single_time":
        targets = doc.get("targets")
        if not isinstance(targets, list) or not targets:
            problems.append("targets: expected a nonempty list of factor lists")
        else:
            for i, t in enumerate(targets):
                _check_int_list(t, f"targets[{i}]", problems)
    elif kind == "histories":
        _check_histories(doc, problems)
    elif kind == "branch":
        _check_branch(doc, problems)
    elif kind == "lattice":
        _check_lattice(doc, problems)

    if problems:
        raise ScenarioSchemaError(problems)
    return doc


# =========================
# Parsing (after validation)
# =========================

def parse_vector(v: list) -> np.ndarray:
    return np.array([complex(re, im) for re, im in v], dtype=complex)


def parse_matrix(m: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in m], dtype=complex)
