"""Scenario loading, result documents and CLI exit codes."""
from __future__ import annotations

import io
import json
import math
from pathlib import Path

import pandas as pd
import pytest

from shared.errors import OutputError, ScenarioSchemaError

from main import ExitCode, main
from ScenarioRunner import (
    canonical,
    effective_policy,
    load_scenario,
    render,
    run_scenario,
    scenario_from_document,
    validate_result_document,
)

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
C, S = math.cos(math.pi / 3), math.sin(math.pi / 3)
CNOT = [
    [[1, 0], [0, 0], [0, 0], [0, 0]],
    [[0, 0], [1, 0], [0, 0], [0, 0]],
    [[0, 0], [0, 0], [0, 0], [1, 0]],
    [[0, 0], [0, 0], [1, 0], [0, 0]],
]


def _eraser_doc() -> dict:
    return {
        "kind": "branch",
        "state": {"dims": [2, 2], "amplitudes": [[C, 0], [0, 0], [S, 0], [0, 0]]},
        "interactions": [CNOT, CNOT],
    }


class TestSchema:

    def test_all_problems_are_collected(self):
        doc = {"kind": "histories", "state": {"dims": [2], "amplitudes": [[1, 0], "x"]}, "families": []}
        with pytest.raises(ScenarioSchemaError) as excinfo:
            scenario_from_document(doc)
        problems = excinfo.value.problems
        assert any(p.startswith("state.amplitudes[1]") for p in problems)
        assert any(p.startswith("families") for p in problems)

    def test_unknown_kind(self):
        with pytest.raises(ScenarioSchemaError):
            scenario_from_document({"kind": "teleport"})

    def test_branch_needs_exactly_one_dynamics_source(self):
        doc = _eraser_doc()
        doc["hamiltonian"] = CNOT
        doc["times"] = [1.0]
        with pytest.raises(ScenarioSchemaError):
            scenario_from_document(doc)

    def test_invalid_json_file(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ScenarioSchemaError):
            load_scenario(bad)
        with pytest.raises(ScenarioSchemaError):
            load_scenario(tmp_path / "missing.json")


class TestPipeline:

    @pytest.mark.parametrize("path", sorted(SCENARIO_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_shipped_scenarios_produce_valid_documents(self, path):
        scenario = load_scenario(path)
        doc = run_scenario(scenario)
        assert doc["status"] == "ok"
        assert validate_result_document(json.loads(render(doc))) == []

    def test_json_output_is_deterministic(self):
        scenario = load_scenario(SCENARIO_DIR / "measurement_chain.json")
        assert render(run_scenario(scenario)) == render(run_scenario(scenario))

    def test_plus_z_then_x_table(self):
        doc = run_scenario(load_scenario(SCENARIO_DIR / "plus_z_then_x.json"))
        assert doc["result"]["verdict"] == "inconsistent"
        frame = pd.read_csv(io.StringIO(render(doc, "csv")))
        assert list(frame.columns) == ["history", "t0", "t1", "probability"]
        assert len(frame) == 4
        assert frame["probability"].tolist() == pytest.approx([0.25] * 4)

    def test_recorded_z_then_x_is_consistent(self):
        doc = run_scenario(load_scenario(SCENARIO_DIR / "plus_recorded_z_then_x.json"))
        assert doc["result"]["verdict"] == "consistent"
        assert [row["probability"] for row in doc["table"]] == pytest.approx([0.25] * 4)

    def test_branch_contrast_result(self):
        doc = run_scenario(load_scenario(SCENARIO_DIR / "branch_dependent.json"))
        result = doc["result"]
        assert result["tree"]["leaf_count"] == 5
        assert result["branch_histories"]["verdict"] == "consistent"
        assert result["global_histories"]["verdict"] == "inconsistent"

    def test_scenario_tolerance_applies(self, write_scenario):
        doc = json.loads((SCENARIO_DIR / "kent_naive.json").read_text(encoding="utf-8"))
        doc["tolerance"] = 0.5
        scenario = load_scenario(write_scenario(doc))
        result = run_scenario(scenario, effective_policy(scenario, None))
        assert result["tolerance"] == 0.5
        assert result["result"]["verdict"] == "consistent"

    def test_canonical_numbers(self):
        assert canonical({"a": (1, -0.0, 0.1 + 0.2, 2j)}) == {"a": [1, 0.0, 0.3, [0.0, 2.0]]}
        with pytest.raises(OutputError):
            canonical([float("nan")])


class TestExitCodes:

    def test_success_and_deterministic_file_output(self, tmp_path):
        scenario = str(SCENARIO_DIR / "kent_dilated.json")
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["histories", scenario, "--out", str(first)]) == ExitCode.OK
        assert main(["run", scenario, "--out", str(second)]) == ExitCode.OK
        assert first.read_bytes() == second.read_bytes()
        assert json.loads(first.read_text(encoding="utf-8"))["result"]["verdict"] == "consistent"

    def test_kind_mismatch_is_a_schema_error(self):
        assert main(["histories", str(SCENARIO_DIR / "bell.json")]) == ExitCode.SCHEMA

    def test_invalid_file_is_a_schema_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("[]", encoding="utf-8")
        assert main(["run", str(bad)]) == ExitCode.SCHEMA

    def test_unnormalized_state_is_a_validation_error(self, write_scenario):
        path = write_scenario({"kind": "decompose", "state": {"dims": [2, 2], "amplitudes": [[1, 0]] * 4}})
        assert main(["decompose", str(path)]) == ExitCode.VALIDATION

    def test_acausal_lattice_is_a_validation_error(self, write_scenario):
        doc = {
            "kind": "lattice", "width": 3, "timesteps": 2,
            "dynamics": {"moves": [[[0, 0], 2], [[1, 0], 1], [[2, 0], 0]], "records": [[0, 0], [2, 1]]},
        }
        assert main(["lattice", str(write_scenario(doc))]) == ExitCode.VALIDATION

    def test_oversized_lattice_is_a_capacity_error(self, write_scenario):
        path = write_scenario({"kind": "lattice", "width": 4, "timesteps": 2})
        assert main(["lattice", str(path)]) == ExitCode.CAPACITY

    def test_reinterference_is_a_refusal(self, write_scenario):
        assert main(["branch", str(write_scenario(_eraser_doc()))]) == ExitCode.REFUSAL

    def test_unwritable_destination_is_an_output_error(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("", encoding="utf-8")
        out = blocker / "result.json"
        assert main(["run", str(SCENARIO_DIR / "bell.json"), "--out", str(out)]) == ExitCode.OUTPUT
