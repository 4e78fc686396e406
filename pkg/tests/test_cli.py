import csv
import json

import pytest

from rpsense import __version__
from rpsense.cli import DATA_COLUMNS, RunManifest, fmt, main
from rpsense.model import FieldParams, ModelSpec, PairParams
from rpsense.observables import YieldParams, singlet_yield


def run(tmp_path, command, config, name="out.csv"):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / name
    code = main([command, "--config", str(cfg), "--out", str(out), "--workers", "1"])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(1 / 3) == "0.333333333333333"
    assert fmt(True) == "true"
    assert fmt(3) == "3"


def test_response_curve_csv_and_manifest(tmp_path):
    config = {"theta": 0.0, "g_ab": 0.1, "k": 0.2, "sweep": {"axis": "theta", "grid": [0.0, 0.5, 1.0]}}
    code, out = run(tmp_path, "response-curve", config)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == DATA_COLUMNS
    assert len(rows) == 4
    assert rows[2][:5] == ["0.5", "0", "0.1", "0.2", "0"]
    expected = singlet_yield(ModelSpec(PairParams(1.0, 0.1), FieldParams(0.5)), "Singlet", 0, YieldParams(0.2))
    assert float(rows[2][5]) == pytest.approx(expected, abs=1e-14)
    manifest = RunManifest.from_json((tmp_path / "out.csv.manifest.json").read_text())
    assert manifest.command == "response-curve" and manifest.version == __version__
    assert manifest.parameters["sweep"]["values"] == [0.0, 0.5, 1.0]
    assert RunManifest.from_json(manifest.to_json()) == manifest


def test_response_pattern_rows_are_axis2_major(tmp_path):
    config = {
        "topology": "two_pair_G4", "observed_pair": 1,
        "axis1": {"name": "theta", "grid": {"start": 0, "stop": 1, "num": 3}},
        "axis2": {"name": "g", "grid": {"start": 0, "stop": 0.2, "step": 0.1}},
    }
    code, out = run(tmp_path, "response-pattern", config)
    assert code == 0
    rows = read_csv(out)[1:]
    assert len(rows) == 9
    assert [r[1] for r in rows[:3]] == ["0", "0", "0"]
    assert [r[0] for r in rows[:3]] == ["0", "0.5", "1"]
    assert {r[4] for r in rows} == {"1"}


def test_deterministic_output(tmp_path):
    config = {"topology": "two_pair_G2", "g": 0.1, "sweep": {"axis": "theta", "grid": [0.2, 0.4]}}
    run(tmp_path, "response-curve", config, "a.csv")
    run(tmp_path, "response-curve", config, "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_sensitivity_command(tmp_path):
    config = {"initial_state": "ClassicalMixed", "sweep": {"axis": "theta", "grid": [0.0, 0.5]}}
    code, out = run(tmp_path, "sensitivity", config)
    assert code == 0
    rows = read_csv(out)
    assert rows[0][-3:] == ["derivative", "sensitivity", "insensitive"]
    assert rows[1][-1] == "true" and rows[1][-2] == "inf"
    assert rows[2][-1] == "false"
    manifest = json.loads((tmp_path / "out.csv.manifest.json").read_text())
    assert manifest["warnings"] == ["insensitive at theta=0"]


def test_peaks_command(tmp_path):
    config = {"topology": "two_pair_G4", "theta": 1.0, "sweep": {"axis": "g", "grid": {"start": 0, "stop": 0.6, "step": 0.01}}}
    code, out = run(tmp_path, "peaks", config)
    assert code == 0
    rows = read_csv(out)
    assert rows[0] == ["axis", "location", "height", "prominence"]
    assert len(rows) >= 3


def test_infer_field_command(tmp_path, capsys):
    config = {"topology": "two_pair_G4", "theta": 1.0, "sweep": {"axis": "g", "grid": {"start": 0, "stop": 0.6, "step": 0.002}}}
    code, out = run(tmp_path, "infer-field", config)
    assert code == 0
    assert "theta_hat" in capsys.readouterr().out
    rows = read_csv(out)
    assert sum(r[3] == "true" for r in rows[1:]) == 2


def test_infer_field_insufficient_peaks(tmp_path, capsys):
    config = {"topology": "two_pair_G4", "theta": 1.0, "sweep": {"axis": "g", "grid": [0.0, 0.01, 0.02]}}
    code, _ = run(tmp_path, "infer-field", config)
    assert code == 1
    assert "insufficient peaks" in capsys.readouterr().err


@pytest.mark.parametrize("config", [
    {"sweep": {"axis": "theta", "grid": [1.0, 0.5]}},
    {"sweep": {"axis": "theta", "grid": []}},
    {"k": -1, "sweep": {"axis": "theta", "grid": [0.5]}},
    {"topology": "two_pair_G7", "sweep": {"axis": "theta", "grid": [0.5]}},
    {"initial_state": "W", "sweep": {"axis": "theta", "grid": [0.5]}},
    {},
])
def test_config_errors_exit_2(tmp_path, config):
    code, _ = run(tmp_path, "response-curve", config)
    assert code == 2


def test_unreadable_config_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["response-curve", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == 2
    assert main(["response-curve", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o.csv")]) == 2


def test_capacity_errors_exit_3(tmp_path):
    big = {"topology": "chain_G4:6", "sweep": {"axis": "theta", "grid": [0.5]}}
    assert run(tmp_path, "response-curve", big)[0] == 3
    budget = {"topology": "chain_G4:4", "axis1": {"name": "theta", "grid": {"start": 0, "stop": 1, "num": 50}},
              "axis2": {"name": "g", "grid": {"start": 0, "stop": 1, "num": 50}}}
    assert run(tmp_path, "response-pattern", budget)[0] == 3


def test_validate_command(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert main(["validate", "--out", str(out), "--oracle-instances", "2"]) == 0
    text = capsys.readouterr().out
    assert text.count("[PASS]") == 4 and "[INFO]" in text
    assert read_csv(out)[0] == ["check", "max_deviation", "tolerance", "passed", "detail"]


def test_curve_row_count(tmp_path):
    config = {"sweep": {"axis": "theta", "grid": {"start": 0, "stop": 3, "num": 301}}}
    code, out = run(tmp_path, "response-curve", config)
    assert code == 0 and len(read_csv(out)) == 302


def test_ridge_example_near_unit_field(tmp_path):
    config = {"g_ab": 0.5, "k": 0.1, "sweep": {"axis": "theta", "grid": {"start": 0, "stop": 3, "num": 301}}}
    _, out = run(tmp_path, "response-curve", config)
    rows = read_csv(out)[1:]
    best = max(rows, key=lambda r: float(r[5]))
    # the exact maximum sits about 0.022 above theta = 1 at k = 0.1
    assert abs(float(best[0]) - 1.0) <= 0.03


def test_pattern_g0_row_equals_curve(tmp_path):
    grid = {"start": 0, "stop": 2, "num": 11}
    curve_cfg = {"topology": "two_pair_G4", "sweep": {"axis": "theta", "grid": grid}}
    pattern_cfg = {"topology": "two_pair_G4", "axis1": {"name": "theta", "grid": grid},
                   "axis2": {"name": "g", "grid": [0.0, 0.1]}}
    _, curve = run(tmp_path, "response-curve", curve_cfg, "c.csv")
    _, pattern = run(tmp_path, "response-pattern", pattern_cfg, "p.csv")
    assert read_csv(pattern)[1:12] == read_csv(curve)[1:]


@pytest.mark.parametrize("theta,strategy", [(1.0, "smallest"), (1.5, "consistent")])
def test_infer_field_estimates(tmp_path, capsys, theta, strategy):
    config = {"topology": "two_pair_G4", "theta": theta, "k": 0.1, "strategy": strategy,
              "sweep": {"axis": "g", "grid": {"start": 0, "stop": 0.6, "step": 0.002}}}
    assert run(tmp_path, "infer-field", config)[0] == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("theta_hat"))
    assert abs(float(line.rsplit("=", 1)[1]) - theta) <= 0.1 * theta
