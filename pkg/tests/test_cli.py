import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from tsflip.allpass import AllPassFilter
from tsflip.cli import main
from tsflip.series import load_csv, write_csv

OUTPUTS = ("csv", "report.json", "filter.json", "paths.csv", "acf.csv", "spectrum.csv")


def run(argv):
    try:
        return main(argv)
    except SystemExit as e:
        return e.code


def fixture_args(qwi_path, *extra):
    return ["--x", str(qwi_path), "--x-column", "asian", "--z", str(qwi_path), "--z-column", "white", *extra]


def test_privatize_writes_files(tmp_path, qwi_path, capsys):
    out = tmp_path / "p"
    code = run(["privatize", *fixture_args(qwi_path, "--delta", "0.1", "--trend-order", "3",
                                           "--standardize", "--seed", "3", "--out", str(out))])
    assert code == 0
    for ext in OUTPUTS:
        assert (tmp_path / f"p.{ext}").exists()
    assert "D_path" in capsys.readouterr().out
    priv = load_csv(tmp_path / "p.csv", "asian")
    assert priv.T == 100
    rep = json.loads((tmp_path / "p.report.json").read_text())
    assert rep["delta"] == 0.1 and rep["lip"] >= 0.9
    assert rep["provenance"]["seed"] == 3
    filt = AllPassFilter.from_json(tmp_path / "p.filter.json")
    assert filt.M == 45 and filt.cepstral.K == 25
    header = (tmp_path / "p.csv").read_text().splitlines()[0]
    assert header == "t,asian"


def test_privatize_byte_identical(tmp_path, qwi_path):
    for name in ("a", "b"):
        assert run(["privatize", *fixture_args(qwi_path, "--delta", "0.1", "--trend-order", "3",
                                               "--seed", "5", "--out", str(tmp_path / name))]) == 0
    for ext in OUTPUTS:
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def test_usage_errors(tmp_path, qwi_path, capsys):
    assert run(["privatize", "--x", str(qwi_path), "--out", str(tmp_path / "o")]) == 1
    assert "usage" in capsys.readouterr().err
    assert run(["privatize", *fixture_args(qwi_path, "--delta", "1.5", "--out", str(tmp_path / "o"))]) == 1
    assert run(["privatize", *fixture_args(qwi_path, "--bogus", "--out", str(tmp_path / "o"))]) == 1
    assert run(["simulate", "--rho", "0.99999", "--out", str(tmp_path / "s")]) == 1
    assert run(["simulate", "--T", "10", "--out", str(tmp_path / "s")]) == 1
    assert run([]) == 1
    assert run(["privatize", *fixture_args(qwi_path, "--estimator", "arma", "--out", str(tmp_path / "o"))]) == 1


def test_computation_errors(tmp_path, capsys):
    const = tmp_path / "c.csv"
    write_csv(const, {"v": np.full(60, 3.0)})
    noise = tmp_path / "n.csv"
    write_csv(noise, {"v": np.random.default_rng(0).normal(size=60)})
    assert run(["privatize", "--x", str(const), "--z", str(noise), "--out", str(tmp_path / "o")]) == 2
    assert "PerfectPrediction" in capsys.readouterr().err
    assert run(["privatize", "--x", str(tmp_path / "missing.csv"), "--z", str(noise), "--out", str(tmp_path / "o")]) == 2


def test_config_file_and_flag_precedence(tmp_path, qwi_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"delta": 0.1, "d": 3, "standardize": True, "M": 40}))
    assert run(["privatize", *fixture_args(qwi_path, "--config", str(cfg), "--M", "45",
                                           "--out", str(tmp_path / "o"))]) == 0
    rep = json.loads((tmp_path / "o.report.json").read_text())
    assert rep["provenance"]["config"]["M"] == 45
    assert rep["provenance"]["config"]["d"] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["privatize", *fixture_args(qwi_path, "--config", str(bad), "--out", str(tmp_path / "o"))]) == 1


def test_simulate_outputs_and_determinism(tmp_path, capsys):
    args = ["simulate", "--rho", "0.1", "--sigma2", "0.5", "--T", "100", "--reps", "3", "--delta", "0", "--seed", "7"]
    assert run([*args, "--out", str(tmp_path / "a")]) == 0
    assert run([*args, "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a.summary.json").read_bytes() == (tmp_path / "b.summary.json").read_bytes()
    assert (tmp_path / "a.replicates.csv").read_bytes() == (tmp_path / "b.replicates.csv").read_bytes()
    s = json.loads((tmp_path / "a.summary.json").read_text())
    assert s["mean_privacy"] > 0.99
    lines = (tmp_path / "a.replicates.csv").read_text().splitlines()
    assert lines[0].startswith("replicate,privacy") and len(lines) == 4


def test_simulate_with_trend(tmp_path):
    assert run(["simulate", "--T", "100", "--reps", "2", "--delta", "0.1", "--trend",
                "--out", str(tmp_path / "t")]) == 0
    s = json.loads((tmp_path / "t.summary.json").read_text())
    assert s["config"]["d"] == 1 and "trend_recovered_within_2se" in s


def test_metrics(tmp_path, capsys):
    x = np.random.default_rng(1).normal(size=80)
    write_csv(tmp_path / "a.csv", {"v": x})
    write_csv(tmp_path / "b.csv", {"v": x})
    write_csv(tmp_path / "c.csv", {"v": x[:-1]})
    assert run(["metrics", "--original", str(tmp_path / "a.csv"), "--privatized", str(tmp_path / "b.csv")]) == 0
    out = capsys.readouterr().out.split()
    assert out[out.index("D_path") + 1] == "0"
    assert out[-1] == "0"
    assert run(["metrics", "--original", str(tmp_path / "a.csv"), "--privatized", str(tmp_path / "c.csv")]) == 2
    assert run(["metrics", "--original", str(tmp_path / "a.csv"), "--privatized", str(tmp_path / "c.csv"),
                "--trend-order", "1"]) == 2


def test_compare_noise(tmp_path, qwi_path, capsys):
    out = tmp_path / "cmp.json"
    assert run(["compare-noise", *fixture_args(qwi_path, "--trend-order", "3", "--snr", "1",
                                               "--out", str(out))]) == 0
    d = json.loads(out.read_text())
    assert d["attenuation"] == 0.5
    assert d["d_acf_noise"] > d["d_acf_flip"]


def test_console_script_help():
    exe = shutil.which("tsflip")
    cmd = [exe] if exe else [sys.executable, "-m", "tsflip.cli"]
    r = subprocess.run([*cmd, "privatize", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "default 45" in r.stdout and "--grid-N" in r.stdout
