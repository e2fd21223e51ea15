import csv
import json
import re

import pytest

import pilotopt.optimize
from pilotopt import cli

SCI = re.compile(r"^-?\d\.\d{17}e[+-]\d+$")


def run(argv):
    return cli.main(argv)


def test_optimize_csv_outputs(tmp_path, capsys):
    prefix = str(tmp_path / "run")
    code = run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "6",
                "--out", prefix])
    assert code == 0
    out = capsys.readouterr().out
    assert "best period:" in out

    with open(prefix + "_rates.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["period", "rate_bits", "pilot_power", "converged", "iterations"]
    assert [r[0] for r in rows[1:]] == [str(t) for t in range(2, 7)]
    for r in rows[1:]:
        assert SCI.match(r[1]), r[1]
        assert SCI.match(r[2])
        assert r[3] == "true"

    with open(prefix + "_profile.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["slot", "role", "power"]
    assert rows[1][:2] == ["0", "pilot"]
    assert all(r[1] == "data" for r in rows[2:])
    best_period = int(out.split("best period:")[1].split()[0])
    assert len(rows) == 1 + best_period


def test_optimize_json_output(tmp_path):
    prefix = str(tmp_path / "run")
    code = run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "5",
                "--format", "json", "--out", prefix])
    assert code == 0
    with open(prefix + ".json") as fh:
        doc = json.load(fh)
    assert doc["objective"] == "bpsk"
    assert doc["config"]["alpha"] == 0.9
    best = doc["best"]
    assert isinstance(best["period"], int)
    assert len(best["data_powers"]) == best["period"] - 1
    assert {entry["period"] for entry in doc["per_period"]} == set(range(2, 6))


def test_byte_identical_reruns(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "5", "--seed", "3"]
    assert run(args + ["--out", a]) == 0
    assert run(args + ["--out", b]) == 0
    for suffix in ("_rates.csv", "_profile.csv"):
        with open(a + suffix, "rb") as fa, open(b + suffix, "rb") as fb:
            assert fa.read() == fb.read()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({
        "alpha": 0.9, "snr_db": 0.0, "t_max": 5, "out": str(tmp_path / "fromfile"),
    }))
    assert run(["optimize", "--config", str(cfgfile)]) == 0
    assert (tmp_path / "fromfile_rates.csv").exists()
    # an explicit flag beats the file value
    assert run(["optimize", "--config", str(cfgfile), "--t-max", "3",
                "--out", str(tmp_path / "over")]) == 0
    out = capsys.readouterr().out
    assert "best period: 3" in out


def test_default_output_dir_env(tmp_path, monkeypatch):
    target = tmp_path / "artifacts"
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(target))
    assert run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "4"]) == 0
    assert (target / "optimize_rates.csv").exists()
    assert (target / "optimize_profile.csv").exists()


def test_sweep_csv_and_single_point_grid(tmp_path):
    prefix = str(tmp_path / "sw")
    code = run(["sweep", "--alpha", "0.9", "--snr-grid", "0:0:0.5", "--t-max", "8",
                "--out", prefix])
    assert code == 0
    with open(prefix + ".csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["snr_db", "snr_linear", "rate_bits", "eb_n0_db", "best_period"]
    assert len(rows) == 2
    assert SCI.match(rows[1][3])


def test_sweep_grid_spacing(tmp_path):
    prefix = str(tmp_path / "sw")
    # grids starting below zero need the = form so argparse keeps the token
    code = run(["sweep", "--alpha", "0.9", "--snr-grid=-2:0:1", "--t-max", "10",
                "--format", "json", "--out", prefix])
    assert code == 0
    with open(prefix + ".json") as fh:
        doc = json.load(fh)
    assert [p["snr_db"] for p in doc["points"]] == [-2.0, -1.0, 0.0]


def test_config_errors_exit_2(tmp_path, capsys):
    bad = [
        ["optimize", "--snr-db", "0"],                                    # no alpha
        ["optimize", "--alpha", "0.9"],                                   # no power spec
        ["optimize", "--alpha", "0.9", "--snr-db", "0", "--power", "1"],  # both specs
        ["optimize", "--alpha", "0.9", "--sigma-h-sq", "1", "--power", "1"],  # partial triple
        ["optimize", "--alpha", "1.5", "--snr-db", "0"],                  # alpha out of range
        ["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-min", "9", "--t-max", "4"],
        ["optimize", "--alpha", "0.9", "--snr-db", "0", "--samples", "10"],
        ["sweep", "--alpha", "0.9"],                                      # no grid
        ["sweep", "--alpha", "0.9", "--snr-grid", "1:2"],                 # malformed grid
        ["sweep", "--alpha", "0.9", "--snr-grid", "2:0:1"],               # descending grid
        ["sweep", "--alpha", "0.9", "--snr-grid", "0:2:1", "--power", "1"],
        ["optimize", "--alpha", "0.9", "--snr-db", "0",
         "--config", str(tmp_path / "missing.json")],
    ]
    for argv in bad:
        assert run(argv) == 2, argv
        assert "error:" in capsys.readouterr().err


def test_unknown_method_exits_2():
    # argparse enforces the choices list itself
    with pytest.raises(SystemExit) as exc:
        run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--method", "qam"])
    assert exc.value.code == 2


def test_unwritable_output_exits_3(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory\n")
    code = run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "4",
                "--out", str(blocker / "x")])
    assert code == 3
    assert "cannot write" in capsys.readouterr().err


def test_non_convergence_exits_4_but_writes(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(pilotopt.optimize, "MAX_ITERATIONS", 1)
    prefix = str(tmp_path / "rough")
    code = run(["optimize", "--alpha", "0.9", "--snr-db", "0", "--t-max", "5",
                "--out", prefix])
    assert code == 4
    assert "tolerance" in capsys.readouterr().err
    with open(prefix + "_rates.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert any(r[3] == "false" for r in rows[1:])


def test_validate_passes_and_writes_report(tmp_path, capsys):
    prefix = str(tmp_path / "val")
    code = run(["validate", "--alpha", "0.9", "--snr-db", "0", "--samples", "2000",
                "--seed", "1", "--out", prefix])
    assert code == 0
    out = capsys.readouterr().out
    assert "bands within 3 standard errors" in out
    with open(prefix + ".csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["check", "label", "analytic", "estimate", "std_error", "z", "passed"]
    checks = {r[0] for r in rows[1:]}
    assert {"estimate_variance", "error_variance", "cross_correlation",
            "bpsk_mi", "frame_rate_bpsk", "frame_rate_gaussian"} <= checks
    assert all(r[6] == "true" for r in rows[1:])


def test_validate_small_sample_bands_still_pass(tmp_path):
    # fewer frames widen the bands proportionally; the check stays calibrated
    code = run(["validate", "--alpha", "0.8", "--snr-db", "0", "--samples", "1000",
                "--seed", "2", "--out", str(tmp_path / "v")])
    assert code == 0


def test_validate_tampered_reference_fails(tmp_path):
    cfg = cli.ScenarioConfig(command="validate", alpha=0.9, snr_db=0.0,
                             samples=2000, seed=1, out=str(tmp_path / "neg"))
    assert cli.cmd_validate(cfg, analytic_shift=0.25) == 1


def test_validate_json_report(tmp_path):
    prefix = str(tmp_path / "valj")
    code = run(["validate", "--alpha", "0.9", "--snr-db", "0", "--samples", "2000",
                "--seed", "1", "--format", "json", "--out", prefix])
    assert code == 0
    with open(prefix + ".json") as fh:
        doc = json.load(fh)
    assert all(entry["passed"] for entry in doc["results"])
