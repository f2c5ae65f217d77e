import json

import pytest

from sensormove.cli import main


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    for sub in ("simulate", "replicate-case2", "fit", "oracle-2d", "verify-beta", "verify-ci"):
        assert main([sub, "--help"]) == 0
    out = capsys.readouterr().out
    for flag in ("--experiment", "--n-grid", "--rho-n", "--s-n", "--r-2n", "--reps", "--seed",
                 "--workers", "--out", "--config", "--stride"):
        assert flag in out


def test_simulate_and_fit(tmp_path, capsys):
    out = tmp_path / "t.csv"
    code = main(["simulate", "--experiment", "anchors_1d", "--n", "3600", "--a", "2", "--reps", "200",
                 "--seed", "42", "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    assert "3600," in text and (tmp_path / "t.agg.csv").exists()

    out2 = tmp_path / "m.csv"
    assert main(["simulate", "--experiment", "mv_1d", "--stride", "500", "--a", "2", "--reps", "10",
                 "--seed", "1", "--out", str(out2)]) == 0
    capsys.readouterr()
    assert main(["fit", "--in", str(tmp_path / "m.agg.csv"), "--n-min", "500"]) == 0
    assert "slope=" in capsys.readouterr().out


def test_identical_runs_identical_bytes(tmp_path):
    args = ["simulate", "--experiment", "cv1_1d", "--n-grid", "10,20", "--a", "1", "--reps", "5", "--seed", "3"]
    main(args + ["--out", str(tmp_path / "a.csv")])
    main(args + ["--out", str(tmp_path / "b.csv"), "--workers", "2"])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "mv_1d", "a": 1.0, "n_grid": [10], "reps": 2, "master_seed": 4}))
    assert main(["simulate", "--config", str(cfg), "--reps", "3"]) == 0
    assert "reps=3" in capsys.readouterr().out
    cfg.write_text(json.dumps({"experiment": "mv_1d", "a": 1.0, "n_grid": [10], "bogus": 1}))
    assert main(["simulate", "--config", str(cfg), "--seed", "1"]) == 1


def test_bad_arguments():
    assert main(["simulate", "--experiment", "anchors_1d", "--n", "10", "--a", "2"]) == 1
    assert main(["simulate", "--experiment", "warp", "--n", "10", "--a", "2", "--seed", "1"]) == 1
    assert main(["simulate", "--experiment", "anchors_1d", "--n", "10", "--a", "-1", "--seed", "1"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["simulate", "--unknown-flag"]) == 1
    assert main(["replicate-case2", "--a", "1"]) == 1


def test_ci_failure_exit_code(monkeypatch, capsys):
    from sensormove import harness
    from sensormove.geometry import CIResult

    monkeypatch.setattr(harness, "verify_ci_1d", lambda p, prm: CIResult(False, "coverage", 0.5, "forced"))
    code = main(["simulate", "--experiment", "cv1_1d", "--n", "10", "--a", "1", "--reps", "2", "--seed", "5"])
    assert code == 2
    assert "master_seed=5" in capsys.readouterr().out


def test_verify_beta(capsys):
    assert main(["verify-beta", "--check", "lemma_first", "--n-max", "10000"]) == 0
    assert "39996/39996 true" in capsys.readouterr().out
    assert main(["verify-beta", "--check", "prohorov", "--samples", "500", "--seed", "1"]) == 0
    assert main(["verify-beta", "--check", "normalization"]) == 0


def test_verify_ci(tmp_path, capsys):
    f = tmp_path / "p.csv"
    f.write_text("0.25\n0.75\n")
    assert main(["verify-ci", "--in", str(f), "--r", "0.25", "--s", "0.5"]) == 0
    f.write_text("0.10\n0.15\n")
    assert main(["verify-ci", "--in", str(f), "--r", "0.05", "--s", "0.1"]) == 2
    f.write_text("0.25,0.25\n0.25,0.75\n0.75,0.25\n0.75,0.75\n")
    assert main(["verify-ci", "--in", str(f), "--r", "0.25", "--s", "0.5"]) == 0
    assert main(["verify-ci", "--in", str(tmp_path / "missing.csv"), "--r", "0.25", "--s", "0.5"]) == 1


def test_oracle_and_replicate(tmp_path, capsys):
    assert main(["oracle-2d", "--a", "1", "--q-grid", "2,3", "--reps", "3", "--seed", "1",
                 "--out", str(tmp_path / "o.csv")]) == 0
    assert main(["replicate-case2", "--a", "2", "--reps", "20", "--q-max", "3", "--seed", "1",
                 "--out", str(tmp_path / "r.csv")]) == 0
    assert (tmp_path / "r.csv").read_text().startswith("n,a,batch,batch_mean,centerline,batch_std_err")
