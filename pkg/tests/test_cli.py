import csv
import io
import json
import math

import pytest

from sksmzi.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_csv(capsys):
    code, out, _ = run(capsys, "eval", "--alpha", "3", "--phi", "pi/2", "--scheme", "idd")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["scheme"] == "idd"
    assert float(row["delta_phi"]) == pytest.approx(1 / 3, rel=1e-12)
    assert float(row["theta"]) == math.pi


def test_eval_all_schemes_json(capsys):
    code, out, _ = run(capsys, "eval", "--beta", "5", "--gamma", "0.01", "--phi", "7pi/4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert [d["scheme"] for d in data] == ["sid", "idd", "hd"]


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", "--alpha", "50", "--r", "1.5", "--scheme", "hd", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert row["ratio_snl"] == pytest.approx(0.2233, abs=1e-3)


def test_qfi(capsys):
    code, out, _ = run(capsys, "qfi", "--alpha", "3", "--beta", "1.2", "--gamma", "0.3", "--r", "0.8")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["qfi"]) == pytest.approx(46.957628322765, rel=1e-10)


def test_qfi_zero_photons(capsys):
    code, _, err = run(capsys, "qfi")
    assert code == 1 and "photons" in err


def test_config_and_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": 3, "phi": "pi/2", "beta": 1}))
    code, out, _ = run(capsys, "eval", "--config", str(cfg), "--beta", "0", "--scheme", "idd")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["beta"]) == 0.0 and float(row["delta_phi"]) == pytest.approx(1 / 3)


def test_sweep_to_file(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, stdout, _ = run(capsys, "sweep", "--vary", "gamma:0:0.2:11", "--beta", "5", "--out", str(out))
    assert code == 0 and stdout == ""
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 33


def test_sweep_config_deterministic(capsys, tmp_path):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({"vary": [{"name": "beta", "from": 1, "to": 3, "steps": 3}, {"name": "phi", "from": 0, "to": "pi", "steps": 4}], "fixed": {"alpha": 1}}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--alpha", "-1"],
        ["eval", "--mu", "0"],
        ["eval", "--theta", "pix"],
        ["eval", "--scheme", "foo"],
        ["eval", "--config", "/nonexistent.json"],
        ["sweep", "--vary", "gamma:0:1"],
        ["sweep", "--vary", "gamma:0:1:1"],
        ["sweep", "--vary", "gamma:0:1:3", "--gamma", "0.1"],
        ["verify", "--alpha", "5"],
        ["bogus"],
        ["eval", "--format", "xml"],
    ],
)
def test_validation_exit_code(argv, capsys):
    # argparse usage errors also map to 1; 2 is kept for verification failures
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    assert code == 1


def test_verify_small_grid(capsys, tmp_path):
    cfg = tmp_path / "g.json"
    cfg.write_text(json.dumps({"alpha": [0, 1.4], "beta": [0.7, 2.2], "gamma": [0.3], "r": [0.4], "theta": ["pi"], "phi": [0.3, 2.0]}))
    code, out, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 0
    assert "pass" in err
    assert len(list(csv.DictReader(io.StringIO(out)))) == 4


def test_verify_generous_dim_corner(capsys):
    code, _, err = run(capsys, "verify", "--alpha", "3", "--beta", "3", "--r", "1.2", "--gamma", "0.9", "--theta", "pi")
    assert code == 0, err


def test_verify_failure_exit_code(capsys, monkeypatch):
    import sksmzi.verify as v

    monkeypatch.setattr(v, "MOMENT_TOL", 0.0)
    code, _, err = run(capsys, "verify", "--alpha", "1", "--beta", "1", "--r", "0.4", "--gamma", "0.3", "--theta", "pi")
    assert code == 2 and "FAIL" in err


def test_numerical_exit_code(capsys, monkeypatch):
    import sksmzi.cli as cli
    from sksmzi.params import ConsistencyError

    def boom(*a, **k):
        raise ConsistencyError("routes disagree")

    monkeypatch.setattr(cli, "evaluate_point", boom)
    code, _, err = run(capsys, "eval", "--alpha", "1")
    assert code == 3 and "routes disagree" in err
