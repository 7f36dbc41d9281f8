import json

import pytest

from hetcov import read_rows
from hetcov.cli import main

NETWORK = {
    "user_density": 0.05,
    "bandwidth_hz": 1e7,
    "path_loss_exponent": 3.5,
    "tiers": [
        {"power_dbm": 46.0, "density": 5e-4, "rate_threshold_bps": 1e6},
        {"power_dbm": 20.0, "density": 1e-2, "rate_threshold_bps": 1e6},
    ],
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(
        json.dumps(
            {
                "network": NETWORK,
                "sweep": {"values_bps": [5e5, 1e6], "modes": ["joint", "equal_fractions"]},
                "solve": {"restarts": 2},
            }
        )
    )
    return str(path)


def test_optimize_success(config_path, tmp_path, capsys):
    out = tmp_path / "row.csv"
    assert main(["optimize", "--config", config_path, "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "objective:" in stdout
    assert "converged: yes" in stdout
    rows = read_rows(out)
    assert rows[0]["mode"] == "joint"
    assert rows[0]["threshold"] == 1e6


def test_optimize_json_output(config_path, tmp_path):
    out = tmp_path / "row.json"
    assert main(["optimize", "--config", config_path, "--mode", "equal_fractions",
                 "--out", str(out), "--format", "json"]) == 0
    payload = json.loads(out.read_text())
    assert payload[0]["mode"] == "equal_fractions"


def test_optimize_nonconvergence_exit_code(tmp_path, capsys):
    path = tmp_path / "hard.json"
    path.write_text(
        json.dumps(
            {
                "network": NETWORK,
                "solve": {"tolerance": 1e-15, "max_iterations": 2, "restarts": 0},
            }
        )
    )
    assert main(["optimize", "--config", str(path)]) == 2
    assert "converged: NO" in capsys.readouterr().out


def test_missing_config_exits_one(tmp_path, capsys):
    assert main(["optimize", "--config", str(tmp_path / "nope.json")]) == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_config_exits_one(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"network": {**NETWORK, "typo_field": 1}}))
    assert main(["validate", "--config", str(path)]) == 1
    assert "network.typo_field" in capsys.readouterr().err


def test_sweep_writes_rows(config_path, tmp_path, capsys):
    out = tmp_path / "rows.csv"
    assert main(["sweep", "--config", config_path, "--out", str(out)]) == 0
    assert "wrote 4 rows" in capsys.readouterr().out
    assert len(read_rows(out)) == 4


def test_sweep_mode_override(config_path, tmp_path):
    out = tmp_path / "rows.json"
    assert main(["sweep", "--config", config_path, "--mode", "equal_fractions",
                 "--out", str(out), "--format", "json"]) == 0
    rows = read_rows(out)
    assert {r["mode"] for r in rows} == {"equal_fractions"}


def test_sweep_nonconvergence_still_exits_zero(tmp_path):
    path = tmp_path / "hard.json"
    path.write_text(
        json.dumps(
            {
                "network": NETWORK,
                "sweep": {"values_bps": [1e6], "modes": ["joint"]},
                "solve": {"tolerance": 1e-15, "max_iterations": 2, "restarts": 0},
            }
        )
    )
    out = tmp_path / "rows.csv"
    assert main(["sweep", "--config", str(path), "--out", str(out)]) == 0
    assert read_rows(out)[0]["converged"] is False


def test_simulate_uses_config_allocation(tmp_path, capsys):
    path = tmp_path / "alloc.json"
    path.write_text(
        json.dumps(
            {
                "network": NETWORK,
                "sim": {"num_drops": 2000, "seed": 3},
                "allocation": {"assoc": [0.35, 0.65], "spectrum": [0.4, 0.6]},
            }
        )
    )
    out = tmp_path / "sim.json"
    assert main(["simulate", "--config", str(path), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["drops"] == 2000
    assert 0.0 < payload["coverage_estimate"] < 1.0
    assert "coverage:" in capsys.readouterr().out


def test_simulate_seed_override(tmp_path):
    path = tmp_path / "alloc.json"
    path.write_text(json.dumps({"network": NETWORK, "sim": {"num_drops": 1500}}))
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    assert main(["simulate", "--config", str(path), "--seed", "5", "--out", str(out_a)]) == 0
    assert main(["simulate", "--config", str(path), "--seed", "5", "--out", str(out_b)]) == 0
    assert out_a.read_text() == out_b.read_text()
