"""State, operator and projector-family primitives."""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from shared.config import NumericPolicy
from shared.errors import CapacityError, ShapeError, ValidationError
from shared.projectors import REMAINDER_LABEL, ProjectorFamily, complete_with_remainder
from shared.qstate import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityOperator,
    PureState,
    apply_local,
    check_dim_cap,
    eig_hermitian,
    embed_operator,
    evolve,
    ket,
    kron_all,
    matrix_exponential_unitary,
    partial_trace,
    pure_partial_trace,
    shift_operator,
    swap_operator,
    tensor_product,
    unitarity_residual,
    y_like_generator,
)


class TestPureState:

    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            PureState((2,), [1, 1])

    def test_rejects_wrong_length(self):
        with pytest.raises(ShapeError):
            PureState((2, 2), [1, 0, 0])

    def test_normalized_and_product(self):
        psi = PureState.normalized((2,), [3, 4])
        np.testing.assert_allclose(psi.amplitudes, [0.6, 0.8])
        prod = PureState.product(ket(1, 2), ket(0, 3))
        assert prod.dims == (2, 3)
        assert prod.amplitudes[3] == 1.0

    def test_zero_vector_cannot_be_normalized(self):
        with pytest.raises(ValidationError):
            PureState.normalized((2,), [0, 0])

    def test_evolve_checks_unitarity(self):
        psi = PureState((2,), ket(0, 2))
        with pytest.raises(ValidationError):
            evolve(psi, np.array([[1, 1], [0, 1]], dtype=complex))
        np.testing.assert_allclose(evolve(psi, SIGMA_X).amplitudes, ket(1, 2))


class TestPartialTrace:

    def test_bell_reduces_to_maximally_mixed(self, bell):
        rho = pure_partial_trace(bell, [0])
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-14)

    def test_pure_and_density_routes_agree(self):
        u = unitary_group.rvs(12, random_state=7)
        psi = PureState((2, 3, 2), u[:, 0])
        for keep in ([0], [1], [2], [0, 2]):
            direct = pure_partial_trace(psi, keep).matrix
            via_rho = partial_trace(psi.density(), psi.dims, keep).matrix
            np.testing.assert_allclose(direct, via_rho, atol=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_pure_and_density_routes_agree_on_seeded_states(self, seed):
        u = unitary_group.rvs(8, random_state=seed)
        psi = PureState((2, 4), u[:, 0])
        for keep in ([0], [1]):
            direct = pure_partial_trace(psi, keep).matrix
            via_rho = partial_trace(psi.density(), psi.dims, keep).matrix
            np.testing.assert_allclose(direct, via_rho, atol=1e-12)
            assert np.trace(direct).real == pytest.approx(1.0, abs=1e-12)

    def test_keep_out_of_range(self, bell):
        with pytest.raises(ShapeError):
            pure_partial_trace(bell, [2])

    def test_density_validation(self):
        DensityOperator(2, np.eye(2) / 2).validate()
        with pytest.raises(ValidationError):
            DensityOperator(2, np.diag([1.5, -0.5])).validate()


class TestOperators:

    def test_embed_respects_factor_order(self):
        a = np.array([[1, 2], [3, 4]], dtype=complex)
        b = SIGMA_Y
        np.testing.assert_allclose(embed_operator(np.kron(a, b), (2, 2), [1, 0]), np.kron(b, a))
        np.testing.assert_allclose(embed_operator(SIGMA_X, (2, 3), [0]), np.kron(SIGMA_X, np.eye(3)))

    def test_embed_rejects_bad_factors(self):
        with pytest.raises(ShapeError):
            embed_operator(SIGMA_X, (2, 2), [0, 0])
        with pytest.raises(ShapeError):
            embed_operator(SIGMA_X, (3, 2), [0])

    def test_gate_builders(self):
        for d in (2, 3):
            assert unitarity_residual(shift_operator(d, d)) < 1e-14
            assert unitarity_residual(swap_operator(d)) < 1e-14
        v, w = ket(1, 3), ket(2, 3)
        np.testing.assert_allclose(swap_operator(3) @ np.kron(v, w), np.kron(w, v))
        # |1⟩|1⟩ → |1⟩|0⟩ for qubits
        np.testing.assert_allclose(shift_operator(2, 2) @ np.kron(ket(1, 2), ket(1, 2)), np.kron(ket(1, 2), ket(0, 2)))
        np.testing.assert_allclose(y_like_generator(2), SIGMA_Y)

    def test_matrix_exponential(self):
        np.testing.assert_allclose(
            matrix_exponential_unitary(SIGMA_Z, math.pi / 2), np.diag([-1j, 1j]), atol=1e-14
        )
        np.testing.assert_allclose(matrix_exponential_unitary(SIGMA_Z, math.pi), -np.eye(2), atol=1e-14)

    def test_eig_phase_convention(self):
        h = unitary_group.rvs(4, random_state=3)
        h = h + h.conj().T
        w, v = eig_hermitian(h)
        assert np.all(np.diff(w) <= 0)
        for j in range(4):
            k = int(np.argmax(np.abs(v[:, j])))
            assert abs(v[k, j].imag) < 1e-12 and v[k, j].real > 0

    def test_dimension_cap(self):
        with pytest.raises(CapacityError):
            check_dim_cap(64, NumericPolicy(max_dim=32))
        check_dim_cap(32, NumericPolicy(max_dim=32))
        with pytest.raises(CapacityError):
            tensor_product(np.eye(8), np.eye(8), NumericPolicy(max_dim=32))

    def test_tensor_product_squares_to_identity(self):
        xx = tensor_product(SIGMA_X, SIGMA_X)
        np.testing.assert_allclose(xx @ xx, np.eye(4), atol=1e-14)
        np.testing.assert_allclose(kron_all([SIGMA_X, SIGMA_Z, SIGMA_Y]), np.kron(np.kron(SIGMA_X, SIGMA_Z), SIGMA_Y))
        np.testing.assert_allclose(kron_all([ket(0, 2), ket(1, 3)]), ket(1, 6))

    def test_apply_local_matches_embedded_operator(self):
        psi = PureState((2, 3), unitary_group.rvs(6, random_state=5)[:, 0])
        op = unitary_group.rvs(3, random_state=6)
        np.testing.assert_allclose(
            apply_local(psi, op, [1]), embed_operator(op, (2, 3), [1]) @ psi.amplitudes, atol=1e-12
        )
        # projectors give unnormalized vectors
        p0 = np.diag([1, 0]).astype(complex)
        plus = PureState.normalized((2,), [1, 1])
        assert np.linalg.norm(apply_local(plus, p0, [0])) == pytest.approx(math.sqrt(0.5))


class TestProjectorFamily:

    def test_from_basis_is_valid(self):
        x = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        family = ProjectorFamily.from_basis(x).validate()
        assert family.ranks() == [1, 1]
        assert family.index_of(1) == 1

    def test_grouped_members(self):
        family = ProjectorFamily.from_basis(np.eye(3, dtype=complex), groups=[[0, 2], [1]], labels=["a", "b"])
        assert family.ranks() == [2, 1]
        np.testing.assert_allclose(family[0], np.diag([1, 0, 1]))

    def test_invalid_family_rejected(self):
        bad = ProjectorFamily(2, (np.diag([1, 0]), np.diag([1, 1])), (0, 1))
        with pytest.raises(ValidationError):
            bad.validate()
        with pytest.raises(ShapeError):
            ProjectorFamily(2, (np.eye(2), np.eye(2)), (0, 0))

    def test_remainder_completion(self):
        family = complete_with_remainder([np.diag([1, 0, 0]).astype(complex)], ["a"], 3)
        assert family.labels == ("a", REMAINDER_LABEL)
        np.testing.assert_allclose(family[1], np.diag([0, 1, 1]))

    def test_embed_and_conjugate(self):
        z = ProjectorFamily.from_basis(np.eye(2, dtype=complex))
        lifted = z.embed((2, 2), [1])
        assert lifted.dim == 4
        flipped = lifted.conjugated(np.kron(np.eye(2), SIGMA_X))
        np.testing.assert_allclose(flipped[0], np.kron(np.eye(2), np.diag([0, 1])))
