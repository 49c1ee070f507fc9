"""Causal lattice: order, foliations, slice projectors and foliation invariance."""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from shared.errors import CausalityError, ScenarioError, ValidationError

from CausalLattice import (
    CausalOrder,
    Foliation,
    LatticeDynamics,
    build_lattice_model,
    enumerate_foliations,
    foliation_invariance,
    in_lightcone,
    lattice_consistency_check,
    lattice_history_family,
    lattice_history_probability,
    linear_extensions,
    microcausality_residual,
    sample_linear_extensions,
    slice_projector,
)
from HistoriesEngine import history_probability

ACAUSAL_MOVES = {(0, 0): 2, (1, 0): 1, (2, 0): 0}


def by_time(model) -> Foliation:
    return Foliation(tuple(
        tuple(p for p in model.point_keys if p[1] == t) for t in range(model.order.timesteps)
    ))


@pytest.fixture(scope="module")
def lattice_2x2():
    return build_lattice_model(2, 2, dynamics=LatticeDynamics(couplings=(((0, 0), (1, 0)),)))


@pytest.fixture(scope="module")
def erased_2x2():
    return build_lattice_model(2, 2, dynamics=LatticeDynamics(erasures=((0, 0),)))


@pytest.fixture(scope="module")
def acausal_3x2():
    dyn = LatticeDynamics(moves=ACAUSAL_MOVES, records=[(0, 0), (2, 1)], enforce_causality=False)
    return build_lattice_model(3, 2, dynamics=dyn)


class TestOrder:

    def test_lightcone(self):
        assert in_lightcone((0, 0), (1, 1))
        assert not in_lightcone((0, 0), (2, 1))
        assert not in_lightcone((0, 1), (0, 1))

    def test_grid_order(self):
        order = CausalOrder.grid(3, 3)
        assert order.precedes((0, 0), (2, 2))
        assert order.spacelike((0, 0), (2, 1))
        assert order.past((1, 1)) == {(0, 0), (1, 0), (2, 0)}

    def test_foliation_and_extension_counts(self):
        order = CausalOrder.grid(2, 2)
        assert len(enumerate_foliations(order)) == 9
        assert len(linear_extensions(order)) == 4
        sampled = sample_linear_extensions(order, 32, seed=1)
        assert set(sampled) <= set(linear_extensions(order))
        assert sample_linear_extensions(order, 32, seed=1) == sampled

    def test_foliation_validation(self):
        order = CausalOrder.grid(2, 2)
        with pytest.raises(CausalityError):
            Foliation((((0, 0), (0, 1)), ((1, 0),), ((1, 1),))).validate(order)
        with pytest.raises(CausalityError):
            Foliation.from_sequence([(0, 1), (0, 0), (1, 0), (1, 1)]).validate(order)
        with pytest.raises(ValidationError):
            Foliation.from_sequence([(0, 0), (1, 0), (0, 1)]).validate(order)


class TestModel:

    def test_layout(self, lattice_2x2):
        assert lattice_2x2.dims == (2,) * 8
        assert lattice_2x2.dim == 256
        assert lattice_2x2.points[(1, 1)].record_factor_indices == (7,)

    def test_spacelike_projectors_commute(self, lattice_2x2):
        assert microcausality_residual(lattice_2x2) <= 1e-12
        assert lattice_2x2.commutator_residual <= 1e-12

    def test_slice_projector(self, lattice_2x2):
        p = slice_projector(lattice_2x2, [(0, 0), (1, 0)], [0, 0])
        np.testing.assert_allclose(p @ p, p, atol=1e-10)
        assert np.trace(p).real == pytest.approx(64.0)
        with pytest.raises(CausalityError):
            slice_projector(lattice_2x2, [(0, 0), (0, 1)], [0, 0])

    def test_single_point_lattice(self):
        model = build_lattice_model(1, 1)
        assert model.dims == (2, 2)
        report = foliation_invariance(model)
        assert report["foliation_count"] == 1
        assert report["invariant"]
        assert lattice_consistency_check(model, by_time(model))["consistent"]

    def test_dynamics_checks(self):
        with pytest.raises(ScenarioError):
            build_lattice_model(2, 2, dynamics=LatticeDynamics(moves={(0, 0): 1}))
        with pytest.raises(ScenarioError):
            build_lattice_model(2, 2, dynamics=LatticeDynamics(records=[(0, 0)], erasures=((1, 0),)))
        with pytest.raises(CausalityError):
            build_lattice_model(3, 2, dynamics=LatticeDynamics(moves=ACAUSAL_MOVES))

    def test_acausal_record_chain_is_refused(self):
        dyn = LatticeDynamics(moves=ACAUSAL_MOVES, records=[(0, 0), (2, 1)])
        with pytest.raises(CausalityError, match=r"record chain of \(0, 0\) moves to \(2, 1\)"):
            build_lattice_model(3, 2, dynamics=dyn)

    def test_records_select_record_factors(self, acausal_3x2):
        assert acausal_3x2.dims == (2,) * 8
        assert acausal_3x2.points[(0, 0)].record_factor_indices == (6,)
        assert acausal_3x2.points[(2, 1)].record_factor_indices == (7,)
        assert acausal_3x2.points[(1, 0)].record_factor_indices == ()
        assert acausal_3x2.dynamics.to_record()["records"] == [[0, 0], [2, 1]]


class TestConsistency:

    def test_recorded_lattice_is_consistent(self, lattice_2x2):
        report = lattice_consistency_check(lattice_2x2, by_time(lattice_2x2))
        assert report["consistent"]
        assert report["max_offdiagonal"] <= 1e-10
        assert report["orthogonality_residual"] <= 1e-10
        assert report["incompatibility_residual"] <= 1e-10
        assert report["normalization_residual"] <= 1e-10

    def test_foliation_invariance(self, lattice_2x2):
        report = foliation_invariance(lattice_2x2)
        assert report["mode"] == "exhaustive"
        assert report["evaluated"] == 9
        assert report["max_distance"] <= 1e-10
        assert report["invariant"]

    def test_erased_record_breaks_consistency(self, erased_2x2):
        report = lattice_consistency_check(erased_2x2, by_time(erased_2x2))
        assert not report["consistent"]
        assert report["max_offdiagonal"] > 1e-3

    def test_acausal_record_chain_breaks_invariance(self, acausal_3x2):
        assert acausal_3x2.commutator_residual > 1e-3
        report = foliation_invariance(acausal_3x2)
        assert report["max_distance"] > 1e-3
        assert not report["invariant"]

    def test_probability_agrees_with_history_engine(self, lattice_2x2):
        fol = by_time(lattice_2x2)
        hf = lattice_history_family(lattice_2x2, fol)
        keys = lattice_2x2.point_keys
        for outcome in itertools.product(*(lattice_2x2.heisenberg[p].labels for p in keys)):
            labels = dict(zip(keys, outcome))
            indices = tuple(
                hf.timed_families[k].family.index_of(tuple(labels[p] for p in s))
                for k, s in enumerate(fol.slices)
            )
            assert lattice_history_probability(lattice_2x2, fol, labels) == pytest.approx(
                history_probability(hf, indices), abs=1e-12
            )
