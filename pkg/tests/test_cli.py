"""End-to-end tests of the command line interface."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from limas.cli import main
from limas.model_io import save_model
from conftest import four_agent_model

SHOWCASE_PATH = Path(__file__).resolve().parent.parent / "models" / "four_agent_cycle.json"


@pytest.fixture
def showcase_file(tmp_path) -> str:
    if SHOWCASE_PATH.exists():
        return str(SHOWCASE_PATH)
    path = tmp_path / "model.json"
    save_model(four_agent_model(), path)
    return str(path)


def test_analyze_showcase_exits_zero(showcase_file, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["analyze", showcase_file, "--format", "json", "--out", str(out)])
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report == json.loads(out.read_text())
    assert report["sufficient"]["holds"] is True
    assert report["necessary"]["holds"] is True
    assert max(report["modal_radii"]) < 1.0
    assert report["verdict"] == "consensusable"
    assert np.allclose(sorted(report["spectra"]["lambda_p"]), [0, 0.2, 0.2, 0.4], atol=1e-9)
    assert np.allclose(sorted(report["spectra"]["lambda_c"]), [0, 4, 4, 4], atol=1e-9)


def test_analyze_text_format(showcase_file, capsys):
    code = main(["analyze", showcase_file])
    assert code == 0
    text = capsys.readouterr().out
    assert "verdict: CONSENSUSABLE" in text
    assert "sufficient condition: holds" in text


def test_analyze_disconnected_communication_graph(tmp_path, capsys):
    data = {
        "schema_version": "1", "n": 1, "N": 4,
        "A": [0.5], "B": [1.0], "alpha": 0.0,
        "physical_edges": [{"i": 1, "j": 2, "weight": 0.1}],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0},
                                {"i": 3, "j": 4, "weight": 1.0}],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code = main(["analyze", str(path)])
    assert code == 1
    assert "communication graph must be connected" in capsys.readouterr().err


def test_analyze_scalar_refuted_exits_two(tmp_path, capsys):
    data = {
        "schema_version": "1", "n": 1, "N": 3,
        "A": [0.0], "B": [1.0], "Ap": [1.0],
        "physical_edges": [{"i": 1, "j": 2, "weight": 5.0},
                           {"i": 2, "j": 3, "weight": 5.0}],
        "communication_edges": [{"i": a, "j": b, "weight": 1.0}
                                for a in range(1, 4) for b in range(a + 1, 4)],
    }
    path = tmp_path / "refuted.json"
    path.write_text(json.dumps(data))
    code = main(["analyze", str(path), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 2
    assert report["verdict"] == "not-consensusable"
    assert report["necessary"]["holds"] is False


def test_analyze_inconclusive_exits_three(tmp_path, capsys):
    # non-commuting graphs, vector dynamics: nothing can be decided
    data = {
        "schema_version": "1", "n": 2, "N": 3,
        "A": [1.0, 2.0, 0.0, 1.5], "B": [0.0, 1.0], "alpha": 0.3,
        "physical_edges": [{"i": 1, "j": 2, "weight": 1.0},
                           {"i": 2, "j": 3, "weight": 1.0}],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0},
                                {"i": 1, "j": 3, "weight": 3.0}],
    }
    path = tmp_path / "odd.json"
    path.write_text(json.dumps(data))
    code = main(["analyze", str(path), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert code == 3
    assert report["verdict"] == "inconclusive"


def test_analyze_output_is_deterministic(showcase_file, tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    main(["analyze", showcase_file, "--out", str(out1)])
    main(["analyze", showcase_file, "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_writes_csv(showcase_file, tmp_path, capsys):
    csv_path = tmp_path / "traj.csv"
    code = main(["simulate", showcase_file, "--seed", "42", "--steps", "100",
                 "--out-csv", str(csv_path)])
    assert code == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "step,delta_norm_1,delta_norm_2,delta_norm_3,delta_norm_4,xbar_1,xbar_2"
    assert len(lines) == 102
    settled = [int(row.split(",")[0]) for row in lines[1:]
               if max(float(v) for v in row.split(",")[1:5]) < 1e-3]
    assert settled and settled[0] <= 300
    summary = capsys.readouterr().out
    assert "settled below" in summary
    assert f"step {settled[0]}" in summary


def test_simulate_deterministic_csv(showcase_file, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", showcase_file, "--seed", "7", "--steps", "50",
          "--out-csv", str(p1)])
    main(["simulate", showcase_file, "--seed", "7", "--steps", "50",
          "--out-csv", str(p2)])
    assert p1.read_bytes() == p2.read_bytes()


def test_simulate_with_gain_file_overflow(tmp_path, capsys):
    # an unstable decoupled loop with zero gain must report the overflow step
    data = {
        "schema_version": "1", "n": 1, "N": 2,
        "A": [2.0], "B": [1.0], "alpha": 0.0,
        "physical_edges": [{"i": 1, "j": 2, "weight": 0.1}],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0}],
    }
    model_path = tmp_path / "unstable.json"
    model_path.write_text(json.dumps(data))
    gain_path = tmp_path / "gain.json"
    gain_path.write_text('{"K": [0.0]}')
    code = main(["simulate", str(model_path), "--gain", str(gain_path),
                 "--steps", "500", "--out-csv", str(tmp_path / "t.csv")])
    assert code == 1
    assert "overflow at step" in capsys.readouterr().err


def test_oracle_grid_interval(tmp_path, capsys):
    data = {
        "schema_version": "1", "n": 1, "N": 3,
        "A": [1.2], "B": [1.0], "alpha": 0.0,
        "physical_edges": [],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0},
                                {"i": 2, "j": 3, "weight": 1.0}],
    }
    path = tmp_path / "scalar.json"
    path.write_text(json.dumps(data))
    code = main(["oracle", str(path), "--lo", "-2", "--hi", "2", "--count", "4001"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "grid"
    (lo, hi), = out["stabilizing_intervals"]
    assert lo == pytest.approx(-0.7333, abs=0.01)
    assert hi == pytest.approx(-0.2, abs=0.01)


def test_oracle_grid_stable_origin(tmp_path, capsys):
    data = {
        "schema_version": "1", "n": 1, "N": 3,
        "A": [0.5], "B": [1.0], "alpha": 0.0,
        "physical_edges": [],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0},
                                {"i": 2, "j": 3, "weight": 1.0}],
    }
    path = tmp_path / "stable.json"
    path.write_text(json.dumps(data))
    code = main(["oracle", str(path), "--lo", "-1", "--hi", "1", "--count", "801"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    (lo, hi), = out["stabilizing_intervals"]
    assert lo < 0.0 < hi


def test_oracle_grid_rejects_vector_dynamics(showcase_file, capsys):
    code = main(["oracle", showcase_file])
    assert code == 1
    assert "n = 1" in capsys.readouterr().err


def test_oracle_verify_mode(showcase_file, tmp_path, capsys):
    gain_path = tmp_path / "gain.json"
    gain_path.write_text('{"K": [0.0, -0.3412]}')
    code = main(["oracle", showcase_file, "--gain", str(gain_path)])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "verify"
    assert out["stable"] is True
    assert out["max_radius"] == pytest.approx(0.94, abs=1e-6)


def test_analyze_scalar_non_commuting_oracle_certificate(tmp_path, capsys):
    # interval gain exists but modal radii are unavailable; the projected
    # closed-loop radius certifies instead
    data = {
        "schema_version": "1", "n": 1, "N": 3,
        "A": [1.2], "B": [1.0], "alpha": 0.1,
        "physical_edges": [{"i": 1, "j": 2, "weight": 1.0},
                           {"i": 2, "j": 3, "weight": 1.0}],
        "communication_edges": [{"i": 1, "j": 2, "weight": 1.0},
                                {"i": 1, "j": 3, "weight": 3.0}],
    }
    path = tmp_path / "scalar_nc.json"
    path.write_text(json.dumps(data))
    code = main(["analyze", str(path), "--format", "json"])
    report = json.loads(capsys.readouterr().out)
    assert report["assumptions"]["commuting_laplacians"]["holds"] is False
    if report["gain"] and "K" in report["gain"]:
        assert report["certificate"]["method"] == "projected-radius"
        if report["certificate"]["max_radius"] < 1.0:
            assert code == 0
