import csv
import io

import pytest

from coexlab.cli import SIM_COLUMNS, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_model(capsys):
    code, out = run_cli(capsys, "model", "--n", "1", "--t-on-ms", "10", "--t-off-ms", "10")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["p_lte"]) == pytest.approx(0.53186, abs=1e-5)


def test_model_invalid_regime(capsys):
    code = main(["model", "--scheme", "lbe", "--n", "9", "--n-agg", "64", "--t-on-ms", "1"])
    assert code == 2


def test_propfair(capsys):
    code, out = run_cli(capsys, "propfair", "--n", "1", "--t-on-ms", "10", "--header")
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["t_off_star_ms"]) == pytest.approx(10.0702, abs=1e-4)
    code, out = run_cli(capsys, "propfair", "--scheme", "lbe", "--n", "3", "--t-on-ms", "50")
    assert out.strip().split(",")[4] == "150.0"


def test_simulate(tmp_path, capsys):
    delays = tmp_path / "d.txt"
    code, out = run_cli(capsys, "simulate", "--n", "2", "--propfair", "--horizon-s", "0.5",
                        "--runs", "2", "--delays", str(delays))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and tuple(rows[0]) == SIM_COLUMNS
    assert [r["run"] for r in rows] == ["0", "1", "mean"]
    assert delays.read_text().strip()
    _, again = run_cli(capsys, "simulate", "--n", "2", "--propfair", "--horizon-s", "0.5", "--runs", "2")
    assert again == out


def test_experiment_and_validate(tmp_path, capsys):
    cfg = tmp_path / "e.ini"
    cfg.write_text("[experiment]\nname = e\nruns = 2\nhorizon = 0.5\nschemes = lbe\n[sweep]\nn_agg = 16\n")
    code, out = run_cli(capsys, "experiment", str(cfg), "--out-dir", str(tmp_path / "o"))
    assert code == 0
    path = out.strip().splitlines()[-1]
    assert main(["validate", path, "--rel-tol", "10"]) == 0
    assert main(["validate", path, "--rel-tol", "0"]) == 1


def test_unknown_verb():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
