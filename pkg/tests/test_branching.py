"""Branch-relative property assignment and its history family."""
from __future__ import annotations

import math

import numpy as np
import pytest

from shared.config import NumericPolicy
from shared.errors import CapacityError, ReinterferenceError, ShapeError
from shared.qstate import PureState, ket, shift_operator

from BranchModal import (
    branch_history_family,
    branch_properties,
    build_branch_tree,
    detect_reinterference,
    global_modal_history_family,
    initial_tree,
    tree_to_record,
)
from DecoherenceModels import (
    build_branch_dependent_chain,
    build_measurement_chain,
    rotated_basis,
    scenario_history_family,
    z_basis,
)
from HistoriesEngine import check_consistency

TILT = math.pi / 8


@pytest.fixture
def contrast(tilted_qubit):
    """Branch 0 keeps recording z, branch 1 switches to a tilted basis, then a common z step."""
    return build_branch_dependent_chain(
        2, [z_basis(2), rotated_basis(TILT)], tilted_qubit, trailing_bases=[z_basis(2)]
    )


def _tree(s, upto=None, policy=None):
    steps = list(s.step_unitaries)[:upto]
    return build_branch_tree(s.initial_state, steps, 0, policy)


class TestTree:

    def test_leaf_counts(self, contrast):
        assert len(_tree(contrast, 1).leaves()) == 2
        assert len(_tree(contrast, 2).leaves()) == 3
        assert len(_tree(contrast, 3).leaves()) == 5

    def test_leaves_rebuild_total_state(self, contrast):
        tree = _tree(contrast)
        rebuilt = sum(leaf.amplitude * leaf.branch_state for leaf in tree.leaves())
        np.testing.assert_allclose(rebuilt, tree.total_state.amplitudes, atol=1e-10)
        assert tree.reconstruction_residual <= 1e-9
        assert sum(leaf.probability for leaf in tree.leaves()) == pytest.approx(1.0, abs=1e-12)

    def test_children_ordered_by_weight(self, contrast):
        tree = _tree(contrast, 1)
        first, second = tree.root.children
        assert first.probability == pytest.approx(0.75)
        assert second.probability == pytest.approx(0.25)
        # the heavier branch carries the |1⟩ system state
        np.testing.assert_allclose(first.system_projector, np.diag([0, 1]), atol=1e-12)

    def test_sibling_system_projectors_orthogonal(self, contrast):
        tree = _tree(contrast)
        for depth in range(tree.depth):
            for parent in tree.nodes_at(depth):
                kids = parent.children
                for i, a in enumerate(kids):
                    for b in kids[i + 1:]:
                        assert np.abs(a.system_projector @ b.system_projector).max() < 1e-10

    def test_identity_interaction_keeps_one_branch(self, bell):
        tree = build_branch_tree(bell, [np.eye(4, dtype=complex)])
        (leaf,) = tree.leaves()
        assert leaf.rank == 2
        assert leaf.probability == pytest.approx(1.0)

    def test_single_branch_cannot_reinterfere(self, bell):
        tree = build_branch_tree(bell, [np.eye(4, dtype=complex)])
        report = detect_reinterference(tree, 1e-10)
        assert report["leaf_count"] == 1
        assert report["max_overlap"] == 0.0
        assert report["offending_pairs"] == []
        assert report["decoherent"]

    def test_properties_and_record(self, contrast):
        assert branch_properties(initial_tree(contrast.initial_state)) == []
        tree = _tree(contrast, 2)
        props = branch_properties(tree)
        assert [p["path"] for p in props] == [leaf.path for leaf in tree.leaves()]
        record = tree_to_record(tree)
        assert record["leaf_count"] == 3
        assert record["reinterference"]["decoherent"]

    def test_shape_and_cap_checks(self, contrast):
        with pytest.raises(ShapeError):
            build_branch_tree(contrast.initial_state, [np.eye(2, dtype=complex)])
        with pytest.raises(CapacityError):
            _tree(contrast, policy=NumericPolicy(max_leaves=4))
        with pytest.raises(ShapeError):
            initial_tree(contrast.initial_state, system_factor=7)


class TestHistories:

    def test_branch_family_decoheres_where_global_family_does_not(self, contrast):
        tree = _tree(contrast)
        branch = check_consistency(branch_history_family(tree))
        assert branch.max_offdiagonal <= 1e-10
        assert branch.normalization_residual <= 1e-10

        interactions = list(contrast.step_unitaries)
        global_ = check_consistency(global_modal_history_family(contrast.initial_state, interactions))
        assert global_.max_offdiagonal > 1e-3

    def test_branch_probabilities_match_leaves(self, contrast):
        tree = _tree(contrast)
        table = check_consistency(branch_history_family(tree))
        leaf_probs = sorted(leaf.probability for leaf in tree.leaves())
        table_probs = sorted(p for p in table.probabilities.values() if p > 1e-12)
        assert table_probs == pytest.approx(leaf_probs, abs=1e-12)

    def test_common_basis_reproduces_chain_probabilities(self, tilted_qubit):
        s = build_measurement_chain(2, [z_basis(2), rotated_basis(TILT)], tilted_qubit)
        tree = _tree(s)
        chain = check_consistency(scenario_history_family(s))
        leaf_probs = sorted(leaf.probability for leaf in tree.leaves())
        chain_probs = sorted(p for p in chain.probabilities.values() if p > 1e-12)
        assert leaf_probs == pytest.approx(chain_probs, abs=1e-12)

    def test_erased_record_is_refused(self, tilted_qubit):
        # unequal weights so the first record splits into two branches
        psi = PureState.product(tilted_qubit, ket(0, 2))
        cnot = shift_operator(2, 2)
        tree = build_branch_tree(psi, [cnot, cnot])
        report = detect_reinterference(tree, 1e-10)
        assert not report["decoherent"]
        assert report["max_overlap"] == pytest.approx(1.0, abs=1e-12)
        assert detect_reinterference(tree, 1e-10, depth=1)["decoherent"]
        with pytest.raises(ReinterferenceError) as excinfo:
            branch_history_family(tree)
        assert excinfo.value.report["depth"] == 2
