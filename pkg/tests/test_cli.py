import json
import math

import numpy as np
import pytest

from braggbell import cli
from braggbell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- preset / coeffs ---------------------------------------------------------


def test_preset_list(capsys):
    code, out, _ = run(capsys, "preset", "list")
    assert code == 0
    assert "rubidium" in out.splitlines()


def test_preset_show_json(capsys):
    code, out, _ = run(capsys, "preset", "show", "rubidium")
    assert code == 0
    payload = json.loads(out)
    assert payload["physical"]["mass_kg"] == 1.42e-25
    assert payload["derived"]["chi_rad_s"] == pytest.approx(492.6017280828795)
    assert payload["regime_verdict"] == "good"


def test_preset_show_unknown(capsys):
    code, _, err = run(capsys, "preset", "show", "cesium")
    assert code == 1
    assert "unknown preset" in err


def test_coeffs_table(capsys):
    code, out, _ = run(capsys, "coeffs", "--l0", "2,4", "--n", "1,2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "n,l0,a_n_rad_s,b_n_rad_s,pi_pulse_s"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert first[:2] == ["1", "2"]
    assert float(first[3]) == pytest.approx(492.6017280828795, rel=1e-12)


def test_coeffs_bad_list(capsys):
    code, _, err = run(capsys, "coeffs", "--l0", "2;4")
    assert code == 1
    assert "comma-separated" in err


# --- simulate ----------------------------------------------------------------


def test_simulate_row_count(capsys):
    code, out, _ = run(capsys, "simulate", "--cycles", "1", "--samples", "17")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 18
    assert lines[0].startswith("t_s,tau,p_")


def test_simulate_duration_zero_single_row(capsys):
    code, out, _ = run(capsys, "simulate", "--duration", "0", "--samples", "50")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 2
    cells = lines[1].split(",")
    header = lines[0].split(",")
    assert float(cells[header.index("p_0")]) == 1.0


def test_simulate_vacuum_rows_identical(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "0", "--duration", "0.01", "--samples", "9")
    assert code == 0
    lines = out.strip().split("\n")
    pop_rows = {line.split(",", 2)[2] for line in lines[1:]}
    assert len(pop_rows) == 1  # populations frozen without photons


def test_simulate_peak_transfer(capsys):
    code, out, _ = run(capsys, "simulate", "--cycles", "0.5", "--samples", "101")
    assert code == 0
    lines = out.strip().split("\n")
    header = lines[0].split(",")
    col = header.index("p_-2")
    last = lines[-1].split(",")
    assert float(last[col]) > 0.99


def test_simulate_sidecar(tmp_path, capsys):
    out_file = tmp_path / "run.csv"
    code, _, _ = run(capsys, "simulate", "--cycles", "1", "--samples", "5", "--output", str(out_file))
    assert code == 0
    assert out_file.exists()
    meta = json.loads((tmp_path / "run.csv.meta.json").read_text())
    assert meta["command"] == "simulate"
    assert meta["samples"] == 5
    assert meta["regime_verdict"] == "good"
    assert "duration_s" in meta and "l_range" in meta


def test_simulate_regime_gate(capsys):
    code, _, err = run(capsys, "simulate", "--chi-ratio", "0.5", "--cycles", "1")
    assert code == 2
    assert "Bragg" in err
    code, _, err = run(capsys, "simulate", "--chi-ratio", "0.1", "--cycles", "0.1")
    assert code == 0
    assert "marginal" in err


def test_simulate_cycles_needs_coupling(capsys):
    code, _, err = run(capsys, "simulate", "--n", "0", "--cycles", "1")
    assert code == 1
    assert "duration" in err


# --- bell / ghz --------------------------------------------------------------


def test_bell_adiabatic_report(capsys):
    code, out, _ = run(capsys, "bell", "--mode", "opposite", "--s", "1", "--r", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["scenario"] == "bell-opposite"
    assert rep["target_kind"] == "psi_plus"
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-12)
    assert rep["phase_reference_rad"] == 0.0
    assert set(rep["outcome_probabilities"]) == {"plus", "minus"}


def test_bell_same_r1_kind(capsys):
    code, out, _ = run(capsys, "bell", "--mode", "same", "--r", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["target_kind"] == "phi_minus"
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-12)


def test_bell_ladder_engine(capsys):
    code, out, _ = run(capsys, "bell", "--engine", "ladder")
    assert code == 0
    rep = json.loads(out)
    assert rep["fidelity"] > 0.95
    assert rep["concurrence"] > 0.9
    assert rep["leakage"] < 1e-4


def test_bell_rejects_even_s(capsys):
    code, _, err = run(capsys, "bell", "--s", "2")
    assert code == 1
    assert "odd" in err


def test_bell_regime_violation(capsys):
    code, _, err = run(capsys, "bell", "--chi-ratio", "0.5")
    assert code == 2


def test_ghz_report(capsys):
    code, out, _ = run(capsys, "ghz", "--k", "3", "--engine", "ladder")
    assert code == 0
    rep = json.loads(out)
    assert rep["scenario"] == "ghz"
    assert rep["fidelity"] > 0.9
    assert "ghz_collapse" in rep
    assert rep["ghz_collapse"]["x_plus"]["concurrence"] > 0.9


def test_ghz_k_bounds(capsys):
    code, _, err = run(capsys, "ghz", "--k", "2")
    assert code == 1
    code, _, _ = run(capsys, "ghz", "--k", "11")
    assert code == 1


# --- validate ----------------------------------------------------------------


def test_validate_good_regime(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "good"
    assert 0.98 <= rep["freq_ratio"] <= 1.02
    assert rep["max_pop_dev"] < 1e-2
    assert rep["two_mode_min"] > 0.98
    assert rep["bell_fidelity"] > 0.95
    assert "shift_comparison" not in rep  # l0=2 has no shift to compare


def test_validate_violated_regime(capsys):
    code, out, err = run(capsys, "validate", "--chi-ratio", "0.5")
    assert code == 2
    rep = json.loads(out)
    assert rep["verdict"] == "violated"
    assert "two_mode_min" in rep  # numbers still reported


def test_validate_l0_4_shift_block(capsys):
    code, out, _ = run(capsys, "validate", "--l0", "4", "--chi-ratio", "0.02")
    assert code == 0
    rep = json.loads(out)
    block = rep["shift_comparison"]
    assert block["closer_mode"] == "quadratic"
    assert block["a_quadratic_rad_s"] > 0 > block["a_linear_rad_s"]
    # the ladder's actual shift sits below the quadratic chain estimate
    assert 0 < block["a_measured_rad_s"] < block["a_quadratic_rad_s"]


# --- sweep -------------------------------------------------------------------


def test_sweep_csv_shape(capsys):
    code, out, _ = run(
        capsys, "sweep", "--var", "chi_ratio", "--values", "0.01,0.02", "--samples", "128"
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == ",".join(cli.SWEEP_COLUMNS)
    assert len(lines) == 3
    assert lines[1].startswith("chi_ratio,0.01,")


def test_sweep_confinement_monotone(capsys):
    code, out, _ = run(
        capsys, "sweep", "--var", "chi_ratio", "--values", "0.01,0.02,0.05,0.1",
        "--samples", "128",
    )
    assert code == 0
    lines = out.strip().split("\n")
    col = cli.SWEEP_COLUMNS.index("two_mode_min")
    vals = [float(line.split(",")[col]) for line in lines[1:]]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_sweep_l0_coupling_monotone(capsys):
    code, out, _ = run(
        capsys, "sweep", "--var", "l0", "--values", "2,4,6", "--chi-ratio", "0.02",
        "--samples", "128",
    )
    assert code == 0
    lines = out.strip().split("\n")
    col = cli.SWEEP_COLUMNS.index("b_rad_s")
    vals = [float(line.split(",")[col]) for line in lines[1:]]
    assert vals[0] > vals[1] > vals[2]


def test_sweep_single_point_matches_validate(capsys):
    code_v, out_v, _ = run(capsys, "validate", "--chi-ratio", "0.02", "--samples", "128")
    assert code_v == 0
    rep = json.loads(out_v)
    code_s, out_s, _ = run(
        capsys, "sweep", "--var", "chi_ratio", "--values", "0.02", "--format", "json",
        "--samples", "128",
    )
    assert code_s == 0
    point = json.loads(out_s)[0]
    for key in ("b_rad_s", "freq_rad_s", "max_pop_dev", "two_mode_min", "bell_fidelity"):
        assert point[key] == rep[key], key


def test_sweep_empty_values(capsys):
    code, _, err = run(capsys, "sweep", "--var", "l0", "--values", ",")
    assert code == 1


def test_sweep_unknown_var(capsys):
    code, _, _ = run(capsys, "sweep", "--var", "mass", "--values", "1")
    assert code == 1


# --- config plumbing ---------------------------------------------------------


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("n0 = 2\n")
    code, out, _ = run(capsys, "coeffs", "--config", str(cfg))
    assert code == 0
    assert out.strip().split("\n")[1].startswith("2,2,")
    code, out, _ = run(capsys, "coeffs", "--config", str(cfg), "--set", "n0=3")
    assert out.strip().split("\n")[1].startswith("3,2,")


def test_env_var_config(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("l0 = 4\n")
    monkeypatch.setenv("BRAGG_CONFIG", str(cfg))
    code, out, _ = run(capsys, "coeffs")
    assert code == 0
    assert out.strip().split("\n")[1].split(",")[1] == "4"
    # explicit --config wins over the environment
    other = tmp_path / "other.txt"
    other.write_text("l0 = 6\n")
    code, out, _ = run(capsys, "coeffs", "--config", str(other))
    assert out.strip().split("\n")[1].split(",")[1] == "6"


def test_missing_config_is_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "coeffs", "--config", str(tmp_path / "nope.txt"))
    assert code == 3


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("tuning = 1\n")
    code, _, err = run(capsys, "coeffs", "--config", str(cfg))
    assert code == 1
    assert "unknown key" in err


def test_conflicting_spellings(capsys):
    code, _, err = run(capsys, "coeffs", "--set", "g_rad_s=1.0", "--set", "g_2pi_hz=1.0")
    assert code == 1
    assert "both set" in err


def test_unwritable_output(capsys):
    code, _, _ = run(capsys, "coeffs", "--output", "/proc/definitely/not/here.csv")
    assert code == 3


def test_usage_error_exit_code(capsys):
    assert main(["bogus-command"]) == 1
    assert main([]) == 1
    assert main(["--help"]) == 0


# --- determinism -------------------------------------------------------------


def test_simulate_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "simulate", "--cycles", "2", "--samples", "64",
                         "--output", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.meta.json").read_bytes() == (tmp_path / "b.csv.meta.json").read_bytes()


def test_bell_report_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "bell", "--engine", "ladder", "--output", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_byte_identical_despite_threads(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "sweep", "--var", "chi_ratio",
                         "--values", "0.01,0.02,0.03,0.04", "--samples", "128",
                         "--output", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
