import json

import pandas as pd
import pytest

from conftest import SCENARIOS
from harness.cli import EXIT_INVALID, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, run

CANONICAL = str(SCENARIOS / "canonical.json")
WINDER = str(SCENARIOS / "canonical_winder.json")


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out.strip()
    return code, (json.loads(out) if out else None), out


def test_validate(capsys):
    code, payload, _ = _run(capsys, "validate", "--scenario", CANONICAL)
    assert code == EXIT_OK
    assert payload == {"valid": True, "violations": []}


def test_ik_centered_pose(capsys, tmp_path):
    out = tmp_path / "lengths.csv"
    code, payload, _ = _run(capsys, "ik", "--scenario", CANONICAL, "--pose", "0", "0", "1", "--out", str(out))
    assert code == EXIT_OK
    upper = payload["lengths"][:4]
    assert max(upper) - min(upper) <= 1e-12
    assert len(pd.read_csv(out)) == 8


def test_statics_strict_fails_outside_footprint(capsys):
    code, payload, _ = _run(capsys, "statics", "--scenario", CANONICAL, "--pose", "1.5", "0", "1", "--strict")
    assert code == EXIT_NUMERICAL
    assert payload["verdict"] == "tension-low"


def test_workspace_grid_rows(capsys, tmp_path):
    out = tmp_path / "workspace.csv"
    code, payload, _ = _run(capsys, "workspace", "--scenario", CANONICAL, "--grid", "11", "11", "5", "--out", str(out))
    assert code == EXIT_OK
    assert len(pd.read_csv(out)) == 605
    assert sum(payload["counts"].values()) == 605
    assert payload["symmetry"]["half-turn"] == pytest.approx(1.0)


def test_winder_sweep_finds_two_regions(capsys):
    code, payload, _ = _run(capsys, "jacobian", "--scenario", WINDER, "--sweep", "40")
    assert code == EXIT_OK
    assert len(payload["singular_regions"]) == 2


def test_fk_is_byte_identical_across_runs(capsys):
    argv = ("fk", "--scenario", CANONICAL, "--perturb", "0.01", "--seed", "3")
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first[0] == second[0] == EXIT_OK
    assert first[2] == second[2]
    assert first[1]["residual"] <= 1e-8


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport"],
        ["ik", "--pose", "0", "0"],
        ["workspace", "--grid", "3", "3"],
    ],
)
def test_usage_errors(capsys, argv):
    code = run(argv + ["--scenario", CANONICAL])
    capsys.readouterr()
    assert code == EXIT_USAGE


def test_unknown_scenario_key(capsys, tmp_path):
    document = json.loads((SCENARIOS / "canonical.json").read_text())
    document["geometry"]["pulleys"] = []
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(document))
    code, payload, _ = _run(capsys, "validate", "--scenario", str(path))
    assert code == EXIT_INVALID
    assert payload["error"] == "ScenarioError"
    assert payload["field"] == "geometry.pulleys"


def test_missing_scenario_file(capsys, tmp_path):
    code, payload, _ = _run(capsys, "ik", "--scenario", str(tmp_path / "nope.json"))
    assert code == EXIT_INVALID
    assert "not found" in payload["message"]


def test_out_of_stroke_configuration(capsys):
    code, payload, _ = _run(capsys, "ik", "--scenario", CANONICAL, "--internal", "0.3", "0")
    assert code == EXIT_INVALID
    assert payload["error"] == "StrokeError"


def test_rollout_and_workspace_outputs_are_byte_identical(capsys, tmp_path):
    runs = []
    for k in range(2):
        rollout_csv = tmp_path / f"rollout_{k}.csv"
        workspace_csv = tmp_path / f"workspace_{k}.csv"
        code_r, _, out_r = _run(
            capsys, "rollout", "--scenario", CANONICAL, "--to", "0.05", "0", "1", "--duration", "0.2",
            "--seed", "1", "--out", str(rollout_csv),
        )
        code_w, _, out_w = _run(
            capsys, "workspace", "--scenario", CANONICAL, "--grid", "3", "3", "2", "--seed", "1",
            "--out", str(workspace_csv),
        )
        assert code_r == code_w == EXIT_OK
        runs.append((out_r, rollout_csv.read_bytes(), out_w, workspace_csv.read_bytes()))
    assert runs[0] == runs[1]
