import os

import numpy as np
import pytest

from slm.cli import (EXIT_DATA, EXIT_OK, EXIT_USAGE, build_parser, emit_table,
                     run)


def test_help_exits_zero():
    for argv in (["--help"], ["simulate", "--help"], ["fit", "--help"],
                 ["benchmark", "--help"], ["bayes-risk", "--help"]):
        with pytest.raises(SystemExit) as e:
            build_parser().parse_args(argv)
        assert e.value.code == 0


def test_unknown_flag_is_usage_error(capsys):
    assert run(["simulate", "--bogus"]) == EXIT_USAGE
    assert run(["no-such-command"]) == EXIT_USAGE


def test_simulate_writes_self_schema_csv(tmp_path):
    out = tmp_path / "train.csv"
    code = run(["simulate", "--model", "1", "--d", "4", "--p", "3",
                "--n1", "6", "--n2", "5", "--seed", "7", "--out", str(out)])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "u1,u2,u3,u4,z1,z2,z3,label"
    assert len(lines) == 1 + 11


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["simulate", "--model", "2", "--d", "3", "--p", "2",
            "--n1", "4", "--n2", "4", "--seed", "3", "--out"]
    assert run(argv + [str(a)]) == EXIT_OK
    assert run(argv + [str(b)]) == EXIT_OK
    assert a.read_text() == b.read_text()


def test_fit_predict_roundtrip(tmp_path, capsys):
    train = tmp_path / "train.csv"
    test = tmp_path / "test.csv"
    model = tmp_path / "model.slm"
    preds = tmp_path / "preds.csv"
    assert run(["simulate", "--model", "1", "--d", "4", "--p", "3",
                "--n1", "12", "--n2", "12", "--seed", "1",
                "--out", str(train), "--test-out", str(test)]) == EXIT_OK
    assert run(["fit", "--train", str(train), "--auto-schema",
                "--thetas", "0.3", "--lambdas-beta", "0.5,0.05",
                "--lambdas-eta", "0.1", "--out", str(model)]) == EXIT_OK
    assert run(["predict", "--model", str(model), "--test", str(test),
                "--out", str(preds)]) == EXIT_OK
    lines = preds.read_text().splitlines()
    assert lines[0] == "label"
    assert set(lines[1:]) <= {"1", "2"}
    assert len(lines) == 1 + 200


def test_fit_without_schema_is_data_error(tmp_path):
    train = tmp_path / "train.csv"
    run(["simulate", "--model", "1", "--d", "3", "--p", "2",
         "--n1", "4", "--n2", "4", "--seed", "2", "--out", str(train)])
    assert run(["fit", "--train", str(train),
                "--out", str(tmp_path / "m.slm")]) == EXIT_DATA


def test_missing_input_file_is_data_error(tmp_path):
    assert run(["fit", "--train", str(tmp_path / "nope.csv"),
                "--auto-schema", "--out", str(tmp_path / "m.slm")]) == EXIT_DATA


def test_bayes_risk_prints_estimate(capsys):
    assert run(["bayes-risk", "--model", "1", "--d", "10", "--p", "20",
                "--draws", "20000", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out.strip().split(",")
    est, se = float(out[0]), float(out[1])
    assert 0.0 < est < 0.5 and 0.0 < se < 0.01


def test_seed_echoed_to_stderr(capsys):
    run(["bayes-risk", "--model", "1", "--d", "4", "--p", "2",
         "--draws", "1000", "--seed", "42"])
    assert "'seed': 42" in capsys.readouterr().err


def test_emit_table_roundtrip(tmp_path):
    path = tmp_path / "t.csv"
    emit_table([(1, "SLM", 0.5), (2, "DSDA", 0.25)], str(path),
               header=["n", "method", "value"])
    lines = path.read_text().split("\n")
    assert lines[0] == "n,method,value"
    assert lines[1] == "1,SLM,0.5"
    assert lines[-1] == ""  # trailing LF


def test_emit_table_empty_rows_header_only(tmp_path):
    path = tmp_path / "t.csv"
    emit_table([], str(path), header=["a", "b"])
    assert path.read_text() == "a,b\n"


def test_probe_and_regret_small(tmp_path, capsys):
    out = tmp_path / "probe.csv"
    assert run(["probe", "--model", "1", "--d", "4", "--p", "2",
                "--n-list", "20,40", "--radius", "0", "--probes", "2",
                "--seed", "3", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "n,sup_error"
    assert len(lines) == 3
