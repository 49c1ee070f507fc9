"""Record-chain scenarios."""
from __future__ import annotations

import math

import numpy as np
import pytest

from shared.errors import ScenarioError
from shared.qstate import unitarity_residual

from DecoherenceModels import (
    build_branch_dependent_chain,
    build_measurement_chain,
    canonical_form,
    record_gate,
    rotated_basis,
    scenario_history_family,
    scenario_total_state,
    step_family,
    x_basis,
    z_basis,
)
from HistoriesEngine import (
    check_consistency,
    history_probability,
    luders_probability,
    marginalization_check,
)

TILT = math.pi / 8


def test_record_gate_is_unitary():
    for b in (z_basis(2), x_basis(), rotated_basis(0.3)):
        assert unitarity_residual(record_gate(b)) < 1e-14


def test_chain_histories_are_consistent(tilted_qubit):
    s = build_measurement_chain(2, [z_basis(2), rotated_basis(TILT), x_basis()], tilted_qubit)
    hf = scenario_history_family(s)
    table = check_consistency(hf)
    assert table.consistent
    assert table.total == pytest.approx(1.0, abs=1e-12)
    for k in range(3):
        assert marginalization_check(table, hf, k) <= 1e-10


def test_canonical_form_matches_history_table(tilted_qubit):
    s = build_measurement_chain(2, [z_basis(2), rotated_basis(TILT)], tilted_qubit)
    table = check_consistency(scenario_history_family(s))
    terms = canonical_form(s)
    assert sum(t.amplitude ** 2 for t in terms) == pytest.approx(1.0, abs=1e-12)
    for t in terms:
        assert t.amplitude ** 2 == pytest.approx(table.probabilities[t.path], abs=1e-12)

    total = scenario_total_state(s).amplitudes
    rebuilt = sum(t.amplitude * np.kron(t.system_state, t.record_state) for t in terms)
    np.testing.assert_allclose(rebuilt, total, atol=1e-12)


def test_branch_dependent_step_family_is_complete(tilted_qubit):
    s = build_branch_dependent_chain(2, [z_basis(2), rotated_basis(TILT)], tilted_qubit)
    assert s.is_branch_dependent(2) and not s.is_branch_dependent(1)
    step_family(s, 2).validate()
    assert check_consistency(scenario_history_family(s)).consistent


def test_builder_parameter_checks(tilted_qubit):
    with pytest.raises(ScenarioError):
        build_measurement_chain(2, [], tilted_qubit)
    with pytest.raises(ScenarioError):
        build_measurement_chain(2, [np.ones((2, 2))], tilted_qubit)
    with pytest.raises(ScenarioError):
        build_measurement_chain(2, [z_basis(2)], [1, 1])
    with pytest.raises(ScenarioError):
        build_branch_dependent_chain(2, [z_basis(2)], tilted_qubit)


def test_recorded_z_then_x_on_plus_is_consistent():
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    s = build_measurement_chain(2, [z_basis(2), x_basis()], plus)
    hf = scenario_history_family(s)
    for idx in hf.index_tuples():
        assert history_probability(hf, idx) == pytest.approx(0.25, abs=1e-12)
        assert history_probability(hf, idx) == pytest.approx(luders_probability(hf, idx), abs=1e-12)
    table = check_consistency(hf)
    assert table.consistent
    assert table.max_offdiagonal <= 1e-12
