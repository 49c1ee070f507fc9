#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
kent.py
=======
The closed-system counterexample to multi-time modal histories, and its
resolution once the system is dilated with a recording environment.

Both variants use z families at t₁ = 0 and t₂ = dt. The default initial
state is (|0⟩ + i|1⟩)/√2, for which the interference terms are real and
show up in the marginals as well as in the off-diagonal entries:

- "naive": a bare qubit, U(t₂) = exp(−iσ_x dt). The families do not
  decohere; for dt = π/4 the largest off-diagonal term is 1/4 and
  marginalizing over t₁ misses the single-time value by 1/2.
  With ``commuting=True`` the evolution is exp(−iσ_z dt), which commutes
  with the families, and the histories are consistent.
- "dilated": the same qubit recorded in z at t₁, evolved freely, and recorded
  in z again at t₂. The records are orthogonal and the family is consistent.
"""
from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from shared.config import NumericPolicy, resolve
from shared.errors import ScenarioError
from shared.projectors import ProjectorFamily
from shared.qstate import SIGMA_X, SIGMA_Z, PureState, matrix_exponential_unitary

from .models import HistoryFamily, TimedFamily

log = logging.getLogger(__name__)

VARIANTS = ("naive", "dilated")


def _initial(initial) -> np.ndarray:
    if initial is None:
        return np.array([1, 1j], dtype=complex) / math.sqrt(2)
    v = np.asarray(initial, dtype=complex).reshape(-1)
    if v.size != 2 or abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ScenarioError("initial state must be a normalized qubit vector")
    return v


def kent_scenario(
    variant: str = "naive",
    dt: float = math.pi / 4,
    commuting: bool = False,
    initial: Sequence[complex] | np.ndarray | None = None,
    policy: NumericPolicy | None = None,
) -> HistoryFamily:
    policy = resolve(policy)
    if variant not in VARIANTS:
        raise ScenarioError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    generator = SIGMA_Z if commuting else SIGMA_X
    evolution = matrix_exponential_unitary(generator, dt, policy)
    psi0 = _initial(initial)

    if variant == "naive":
        z_family = ProjectorFamily.from_basis(np.eye(2, dtype=complex))
        state = PureState((2,), psi0)
        timed = (
            TimedFamily(0.0, z_family, np.eye(2, dtype=complex)),
            TimedFamily(dt, z_family, evolution),
        )
        log.debug("Kent scenario (naive, dt=%.6g, commuting=%s)", dt, commuting)
        return HistoryFamily(state, timed)

    from DecoherenceModels import build_measurement_chain, scenario_history_family, z_basis

    scenario = build_measurement_chain(
        2, [z_basis(2), z_basis(2)], psi0, system_evolutions=[None, evolution], policy=policy
    )
    log.debug("Kent scenario (dilated, dt=%.6g, commuting=%s)", dt, commuting)
    return scenario_history_family(scenario, times=[0.0, dt], policy=policy)
