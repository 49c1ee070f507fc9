"""Schmidt decomposition, definite-valued families and single-time joint probabilities."""
from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import unitary_group

from shared.errors import DisjointnessError, ShapeError
from shared.projectors import REMAINDER_LABEL, ProjectorFamily
from shared.qstate import SIGMA_X, SIGMA_Z, PureState, ket, pure_partial_trace

from ModalAssignment import (
    is_definite_valued,
    joint_modal_distribution,
    joint_probability_single_time,
    merge_degenerate,
    modal_state,
    schmidt_decompose,
    spectral_modal,
)


def test_merge_degenerate_groups_adjacent_weights():
    assert merge_degenerate([0.5, 0.5, 0.0], 1e-9) == [[0, 1], [2]]
    assert merge_degenerate([0.7, 0.2, 0.1], 1e-9) == [[0], [1], [2]]


def test_schmidt_reconstructs_random_state():
    u = unitary_group.rvs(6, random_state=11)
    psi = PureState((2, 3), u[:, 0])
    result = schmidt_decompose(psi, [0])
    m = psi.amplitudes.reshape(2, 3)
    approx = (result.left_states * result.coefficients) @ result.right_states.T
    np.testing.assert_allclose(approx, m, atol=1e-12)
    assert result.reconstruction_residual < 1e-12
    assert abs(result.weights.sum() - 1.0) < 1e-12
    assert np.all(np.diff(result.coefficients) <= 0)


def test_bell_state_merges_into_one_group(bell):
    result = schmidt_decompose(bell, [0])
    assert result.merge_groups == [[0, 1]]
    assert result.merged_projectors.ranks() == [2]
    np.testing.assert_allclose(result.group_weights(), [1.0])


def test_product_state_gets_remainder():
    psi = PureState.product(ket(0, 2), np.array([1, 1]) / np.sqrt(2))
    modal = modal_state(psi, [0])
    assert modal.definite_family.labels == (0, REMAINDER_LABEL)
    assert modal.probabilities == pytest.approx([1.0, 0.0])
    assert modal.zero_weight == [False, True]
    np.testing.assert_allclose(modal.definite_family[0], np.diag([1, 0]), atol=1e-12)


def test_invalid_cut():
    psi = PureState.product(ket(0, 2), ket(0, 2))
    with pytest.raises(ShapeError):
        schmidt_decompose(psi, [0, 1])


def test_schmidt_and_spectral_families_coincide():
    u = unitary_group.rvs(6, random_state=5)
    psi = PureState((2, 3), u[:, 0])
    from_state = modal_state(psi, [0])
    from_rho = spectral_modal(pure_partial_trace(psi, [0]))
    assert from_state.probabilities == pytest.approx(from_rho.probabilities, abs=1e-12)
    for p, q in zip(from_state.definite_family.projectors, from_rho.definite_family.projectors):
        np.testing.assert_allclose(p, q, atol=1e-10)


def test_definite_valued_membership():
    z = modal_state(PureState.normalized((2, 2), [0.6, 0, 0, 0.8]), [0]).definite_family
    report = is_definite_valued(SIGMA_Z, z)
    assert report.is_definite
    assert sorted(report.coefficients) == pytest.approx([-1.0, 1.0])
    assert not is_definite_valued(SIGMA_X, z).is_definite


def test_trivial_family_fixes_only_multiples_of_identity():
    trivial = ProjectorFamily.trivial(2)
    report = is_definite_valued(SIGMA_Z, trivial)
    assert not report.is_definite
    assert report.residual == pytest.approx(1.0)
    assert report.coefficients is None
    assert is_definite_valued(3.0 * np.eye(2), trivial).is_definite


def test_ghz_joint_distribution():
    amps = np.zeros(8)
    amps[0], amps[7] = 0.6, 0.8
    psi = PureState((2, 2, 2), amps)
    dist = joint_modal_distribution(psi, [[0], [1], [2]])
    assert sum(dist.values()) == pytest.approx(1.0)
    # label 0 is the heavier Schmidt term, |111⟩
    assert dist[(0, 0, 0)] == pytest.approx(0.64)
    assert dist[(1, 1, 1)] == pytest.approx(0.36)
    assert dist[(0, 1, 0)] == pytest.approx(0.0, abs=1e-14)


def test_overlapping_factor_sets_rejected(bell):
    p = np.diag([1, 0]).astype(complex)
    with pytest.raises(DisjointnessError):
        joint_probability_single_time(bell, [([0], p), ([0], p)])


@pytest.mark.parametrize("seed", [3, 17, 29])
def test_marginalizing_one_target_matches_smaller_distribution(seed):
    u = unitary_group.rvs(12, random_state=seed)
    psi = PureState((2, 3, 2), u[:, 0])
    full = joint_modal_distribution(psi, [[0], [1], [2]])
    reduced = joint_modal_distribution(psi, [[0], [2]])
    marginal: dict[tuple, float] = {}
    for (a, _, c), p in full.items():
        marginal[(a, c)] = marginal.get((a, c), 0.0) + p
    assert marginal.keys() == reduced.keys()
    for key, p in reduced.items():
        assert marginal[key] == pytest.approx(p, abs=1e-10)


@pytest.mark.parametrize("seed", [4, 8])
def test_summing_a_complete_family_drops_its_factor(seed):
    u = unitary_group.rvs(12, random_state=seed)
    psi = PureState((2, 3, 2), u[:, 0])
    x_family = ProjectorFamily.from_basis(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))
    reduced = joint_modal_distribution(psi, [[0], [1]])
    states = [modal_state(psi, [0]), modal_state(psi, [1])]
    for (la, pa), (lb, pb) in (
        (a, b) for a in states[0].definite_family for b in states[1].definite_family
    ):
        summed = sum(
            joint_probability_single_time(psi, [([0], pa), ([1], pb), ([2], px)])
            for _, px in x_family
        )
        assert summed == pytest.approx(reduced[(la, lb)], abs=1e-10)
