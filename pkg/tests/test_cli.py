import csv
import json

import pytest

from nebcert import cli
from nebcert.decoy import IntensitySet
from nebcert.optics import SimConfig


def write_config(path, **overrides):
    config = {
        "parameter": "gamma",
        "values": [0.0, 0.5, 1.0],
        "table_kind": "six_state",
        "states_source": "ideal",
        "sim": {
            "intensities": {"mu": 0.05, "nu": 0.01, "omega": 0.0},
            "detector": {"efficiency": 0.27, "dark_prob": 1.1e-6,
                         "window_fraction": 0.85},
            "trials_per_setting": 10**9,
            "seed": 3,
            "mode": "analytic",
        },
    }
    config.update(overrides)
    path.write_text(json.dumps(config))
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sweep_spec_validation():
    sim = SimConfig(intensities=IntensitySet(0.05, 0.01))
    with pytest.raises(ValueError):
        cli.SweepSpec("delta", (0.1,), "six_state", "ideal", sim)
    with pytest.raises(ValueError):
        cli.SweepSpec("gamma", (0.5, 0.1), "six_state", "ideal", sim)
    with pytest.raises(ValueError):
        cli.SweepSpec("gamma", (1.5,), "six_state", "ideal", sim)
    with pytest.raises(ValueError):
        cli.SweepSpec("gamma", (0.5,), "custom", "ideal", sim)


def test_certify_outputs(tmp_path):
    config = write_config(tmp_path / "sweep.json")
    out = tmp_path / "run"
    assert cli.main(["certify", "--config", str(config), "--out", str(out)]) == 0
    rows = read_rows(out / "certify.csv")
    assert [r["param"] for r in rows] == ["0.0", "0.5", "1.0"]
    assert rows[0]["certified"] == "true"
    assert rows[-1]["certified"] == "false"
    assert (out / "certify.png").stat().st_size > 0
    meta = json.loads((out / "certify.json").read_text())
    assert meta["spec"]["parameter"] == "gamma"
    assert "environment" in meta and "eb_bound" in meta


def test_certify_deterministic_csv(tmp_path):
    config = write_config(tmp_path / "sweep.json")
    out1, out2 = tmp_path / "a", tmp_path / "b"
    cli.main(["certify", "--config", str(config), "--out", str(out1), "--no-figures"])
    cli.main(["certify", "--config", str(config), "--out", str(out2), "--no-figures"])
    assert (out1 / "certify.csv").read_bytes() == (out2 / "certify.csv").read_bytes()


def test_certify_beta_sweep_has_key_rate(tmp_path):
    config = write_config(tmp_path / "sweep.json", parameter="beta",
                          values=[0.0, 0.3])
    out = tmp_path / "run"
    assert cli.main(["certify", "--config", str(config), "--out", str(out),
                     "--no-figures"]) == 0
    rows = read_rows(out / "certify.csv")
    assert "key_rate" in rows[0]
    assert float(rows[0]["key_rate"]) > float(rows[1]["key_rate"])


def test_certify_empty_values(tmp_path):
    config = write_config(tmp_path / "sweep.json", values=[])
    out = tmp_path / "run"
    assert cli.main(["certify", "--config", str(config), "--out", str(out),
                     "--no-figures"]) == 0
    assert read_rows(out / "certify.csv") == []


def test_certify_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"parameter": "gamma"}')
    assert cli.main(["certify", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2
    missing = tmp_path / "missing.json"
    assert cli.main(["certify", "--config", str(missing), "--out", str(tmp_path / "x")]) == 2
    invalid = tmp_path / "invalid.json"
    invalid.write_text("{nope")
    assert cli.main(["certify", "--config", str(invalid), "--out", str(tmp_path / "x")]) == 2


def test_certify_montecarlo_override(tmp_path):
    config = write_config(tmp_path / "sweep.json", values=[0.0])
    data = json.loads(config.read_text())
    data["sim"]["trials_per_setting"] = 5000
    config.write_text(json.dumps(data))
    out = tmp_path / "run"
    assert cli.main(["certify", "--config", str(config), "--out", str(out),
                     "--mode", "montecarlo", "--seed", "9", "--no-figures"]) == 0
    meta = json.loads((out / "certify.json").read_text())
    assert meta["spec"]["sim"]["mode"] == "montecarlo"
    assert meta["spec"]["sim"]["seed"] == 9


def test_theory_curve_values(capsys):
    assert cli.main(["theory", "--table", "six", "--param", "gamma",
                     "--values", "0,1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "param,ideal_payoff,rsmdi_payoff"
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(0.5, abs=1e-9)
    last = lines[2].split(",")
    assert float(last[1]) == pytest.approx(0.0, abs=1e-9)


def test_theory_four_state_and_empty(tmp_path, capsys):
    assert cli.main(["theory", "--table", "four", "--param", "gamma",
                     "--values", "0"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert float(out[1].split(",")[1]) == pytest.approx(0.25, abs=1e-9)
    assert cli.main(["theory", "--table", "four", "--param", "gamma",
                     "--values", ""]) == 0
    assert capsys.readouterr().out.strip() == "param,ideal_payoff,rsmdi_payoff"


def test_theory_lower_bounds_ideal(tmp_path):
    rows = cli.report_theory_curve("six_state", "gamma", [0.0, 0.25, 0.5, 0.75, 1.0])
    for row in rows:
        assert row["rsmdi_payoff"] <= row["ideal_payoff"] + 1e-9


def test_theory_writes_files(tmp_path):
    out = tmp_path / "theory"
    assert cli.main(["theory", "--table", "six", "--param", "gamma",
                     "--values", "0,0.5,1", "--out", str(out)]) == 0
    assert (out / "theory.csv").exists()
    assert (out / "theory.png").stat().st_size > 0


def test_bound_command(tmp_path, capsys):
    tomo = tmp_path / "tomo.csv"
    rows = ["basis,bit,exp_x,exp_y,exp_z"]
    axes = {"Z": (0.0, 0.0, 1.0), "X": (1.0, 0.0, 0.0), "Y": (0.0, 1.0, 0.0)}
    for basis, axis in axes.items():
        for bit in (0, 1):
            sign = 0.98 if bit == 0 else -0.98
            rows.append(f"{basis},{bit},{sign*axis[0]},{sign*axis[1]},{sign*axis[2]}")
    tomo.write_text("\n".join(rows) + "\n")
    assert cli.main(["bound", "--states", str(tomo), "--table", "six"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert set(record) == {"value", "argmax_a", "argmax_b", "restarts", "converged"}
    assert record["value"] <= 1e-6  # shrunk-only states cannot beat the ideal bound


def test_bound_command_missing_state(tmp_path):
    tomo = tmp_path / "tomo.csv"
    tomo.write_text("basis,bit,exp_x,exp_y,exp_z\nZ,0,0,0,0.99\n")
    assert cli.main(["bound", "--states", str(tomo), "--table", "six"]) == 2


def test_custom_table_config(tmp_path):
    config = write_config(
        tmp_path / "sweep.json",
        table_kind="custom",
        values=[0.0],
        table={"xi": ["Z0", "Z1"], "psi": ["Z0", "Z1"],
               "payoff": [["Z0", "Z1", 0.25], ["Z1", "Z0", 0.25],
                          ["Z0", "Z0", -0.25], ["Z1", "Z1", -0.25]]},
    )
    out = tmp_path / "run"
    assert cli.main(["certify", "--config", str(config), "--out", str(out),
                     "--no-figures"]) == 0
    rows = read_rows(out / "certify.csv")
    assert len(rows) == 1
