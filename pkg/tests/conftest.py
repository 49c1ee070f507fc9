"""Shared fixtures: numeric policy, common states and a scenario-file writer."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from shared.config import NumericPolicy
from shared.qstate import PureState


@pytest.fixture
def policy() -> NumericPolicy:
    return NumericPolicy()


@pytest.fixture
def bell() -> PureState:
    return PureState.normalized((2, 2), [1, 0, 0, 1])


@pytest.fixture
def tilted_qubit() -> np.ndarray:
    """cos(π/3)|0⟩ + sin(π/3)|1⟩."""
    return np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)], dtype=complex)


@pytest.fixture
def write_scenario(tmp_path):
    def _write(doc: dict, name: str = "scenario.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return path
    return _write
