import json
import subprocess
import sys

import numpy as np
import pytest

import vlink as vl
from vlink.cli import main


@pytest.fixture
def workdir(tmp_path):
    vl.save_model(vl.transmission_model(2), str(tmp_path / "transmission.json"))
    vl.save_model(vl.knot_counting_model(), str(tmp_path / "knots.json"))
    vl.save_model(
        vl.random_model(2, np.random.default_rng(4), real=True),
        str(tmp_path / "real.json"),
    )
    vl.save_tangle(vl.loop_diagram(1), str(tmp_path / "loop.vld"))
    vl.save_tangle(vl.parse_tangle("x v1 a b a b"), str(tmp_path / "two_knots.vld"))
    vl.save_tangle(
        vl.parse_tangle("x v1 a b c c\nleg 1 a\nleg 2 b"),
        str(tmp_path / "open.vld"),
    )
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# eval


def test_eval_scalars(workdir, capsys):
    code, out, _ = run(
        capsys,
        "eval", "--model", workdir / "transmission.json",
        workdir / "loop.vld", workdir / "two_knots.vld",
    )
    assert code == 0
    assert out == "2 0\n4 0\n"


def test_eval_open_tangle_lists_entries(workdir, capsys):
    code, out, _ = run(
        capsys, "eval", "--model", workdir / "knots.json", workdir / "open.vld"
    )
    assert code == 0
    # Kink closure of the knot-counting model: the matrix square.
    assert out.splitlines() == ["1 1 3 0", "1 2 0 2", "2 1 0 2", "2 2 -1 0"]


def test_eval_json_lines(workdir, capsys):
    code, out, _ = run(
        capsys,
        "eval", "--format", "json-lines", "--model", workdir / "transmission.json",
        workdir / "loop.vld",
    )
    assert code == 0
    record = json.loads(out)
    assert record["re"] == 2.0
    assert record["im"] == 0.0
    assert record["path"].endswith("loop.vld")


def test_eval_csv(workdir, capsys):
    code, out, _ = run(
        capsys,
        "eval", "--format", "csv", "--model", workdir / "transmission.json",
        workdir / "loop.vld",
    )
    assert code == 0
    path, re, im = out.strip().split(",")
    assert path.endswith("loop.vld")
    assert float(re) == 2.0 and float(im) == 0.0


def test_eval_qtl(workdir, capsys):
    manifest = workdir / "combo.qtl"
    manifest.write_text("term 1 0 loop.vld\nterm 0.5 0 two_knots.vld\n")
    code, out, _ = run(
        capsys, "eval", "--model", workdir / "transmission.json", manifest
    )
    assert code == 0
    assert out == "4 0\n"


def test_eval_missing_file(workdir, capsys):
    code, _, err = run(
        capsys, "eval", "--model", workdir / "transmission.json", workdir / "nope.vld"
    )
    assert code == 1
    assert "error" in err


def test_eval_malformed_vld(workdir, capsys):
    bad = workdir / "bad.vld"
    bad.write_text("x v1 a b c\n")
    code, _, err = run(
        capsys, "eval", "--model", workdir / "transmission.json", bad
    )
    assert code == 1
    assert "bad.vld:1" in err


def test_symmetrize_flag(workdir, capsys):
    raw = {"n": 2, "entries": [{"i": 1, "j": 1, "k": 2, "l": 2, "re": 1.0, "im": 0.0}]}
    path = workdir / "asym.json"
    path.write_text(json.dumps(raw))
    code, _, err = run(capsys, "eval", "--model", path, workdir / "loop.vld")
    assert code == 1 and "swap" in err
    code, out, _ = run(
        capsys, "eval", "--symmetrize", "--model", path, workdir / "loop.vld"
    )
    assert code == 0
    assert out == "2 0\n"


# ---------------------------------------------------------------------------
# check


def test_check_passing_model(workdir, capsys):
    code, out, _ = run(capsys, "check", "--model", workdir / "transmission.json")
    assert code == 0
    assert out == "r1 0\nr2 0\nr3 0\npass\n"


def test_check_failing_model(workdir, capsys):
    code, out, _ = run(capsys, "check", "--model", workdir / "knots.json")
    assert code == 2
    lines = out.splitlines()
    assert lines[0] == "r1 4"
    assert lines[-1] == "fail"


def test_check_json_lines(workdir, capsys):
    code, out, _ = run(
        capsys, "check", "--format", "json-lines", "--model", workdir / "knots.json"
    )
    assert code == 2
    record = json.loads(out)
    assert record["passed"] is False
    assert abs(record["r1"] - 4.0) < 1e-12


def test_check_tolerance_is_plumbed(workdir, capsys):
    code, out, _ = run(
        capsys, "check", "--tol", "20", "--model", workdir / "knots.json"
    )
    assert code == 0
    assert out.splitlines()[-1] == "pass"


# ---------------------------------------------------------------------------
# moves test


def test_moves_pass_and_deterministic(workdir, capsys):
    args = (
        "moves", "--model", workdir / "knots.json", "test",
        workdir / "two_knots.vld", workdir / "loop.vld",
        "--count", "25", "--seed", "7",
    )
    code_a, out_a, _ = run(capsys, *args)
    code_b, out_b, _ = run(capsys, *args)
    assert code_a == code_b == 0
    assert out_a == out_b
    assert out_a.splitlines()[-1] == "pass"
    assert out_a.startswith("applied ")


def test_moves_rejects_open_tangles(workdir, capsys):
    code, _, err = run(
        capsys,
        "moves", "--model", workdir / "knots.json", "test", workdir / "open.vld",
    )
    assert code == 1
    assert "arity 0" in err


# ---------------------------------------------------------------------------
# kernel


def test_kernel_random_model(capsys):
    code, out, _ = run(
        capsys, "kernel", "--n", "2", "--samples", "10", "--max-vertices", "2",
        "--seed", "1",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("max_scaled_residual ")
    assert lines[1].startswith("negative_control ")
    assert lines[2] == "pass"


def test_kernel_zero_model_fails_control(workdir, capsys):
    path = workdir / "zero.json"
    path.write_text(json.dumps({"n": 2, "entries": []}))
    code, out, _ = run(
        capsys, "kernel", "--model", path, "--samples", "1", "--max-vertices", "1",
        "--seed", "0",
    )
    assert code == 2
    assert out.splitlines()[-1] == "fail"


# ---------------------------------------------------------------------------
# gram


def test_gram_outputs_matrix_and_eigenvalue(workdir, capsys):
    code, out, err = run(
        capsys, "gram", "--model", workdir / "real.json", "--max-vertices", "1"
    )
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == 60
    assert all(len(row.split(",")) == 60 for row in rows)
    assert err.startswith("min_eigenvalue ")


def test_gram_complex_model_is_input_error(workdir, capsys):
    code, _, err = run(
        capsys, "gram", "--model", workdir / "knots.json", "--max-vertices", "1"
    )
    assert code == 1
    assert "real" in err


# ---------------------------------------------------------------------------
# enumerate


def test_enumerate_text(capsys):
    code, out, err = run(capsys, "enumerate", "--k", "2", "--max-vertices", "1")
    assert code == 0
    assert out.count("%%") == 10
    assert err == "count 10\n"


def test_enumerate_csv_deterministic(capsys):
    code_a, out_a, _ = run(
        capsys, "enumerate", "--format", "csv", "--k", "4", "--max-vertices", "1"
    )
    code_b, out_b, _ = run(
        capsys, "enumerate", "--format", "csv", "--k", "4", "--max-vertices", "1"
    )
    assert code_a == code_b == 0
    assert out_a == out_b
    assert len(out_a.splitlines()) == 60


def test_enumerate_json_lines_parse_back(capsys):
    code, out, _ = run(
        capsys, "enumerate", "--format", "json-lines", "--k", "2", "--max-vertices", "1"
    )
    assert code == 0
    for line in out.splitlines():
        record = json.loads(line)
        t = vl.parse_tangle(record["vld"])
        assert t.arity == 2
        assert t.num_vertices == record["num_vertices"]


def test_enumerate_budget_error(capsys):
    code, _, err = run(capsys, "enumerate", "--k", "2", "--max-vertices", "9")
    assert code == 1
    assert "endpoint budget" in err


# ---------------------------------------------------------------------------
# random


def test_random_model_round_trips(tmp_path, capsys):
    code, out, _ = run(capsys, "random", "--kind", "model", "--n", "3", "--seed", "5")
    assert code == 0
    path = tmp_path / "m.json"
    path.write_text(out)
    model = vl.load_model(str(path))
    assert model.n == 3
    assert not model.is_real


def test_random_model_deterministic_bytes(capsys):
    _, out_a, _ = run(capsys, "random", "--kind", "model", "--n", "2", "--seed", "9")
    _, out_b, _ = run(capsys, "random", "--kind", "model", "--n", "2", "--seed", "9")
    assert out_a == out_b
    _, out_c, _ = run(capsys, "random", "--kind", "model", "--n", "2", "--seed", "10")
    assert out_a != out_c


def test_random_real_model(capsys):
    code, out, _ = run(
        capsys, "random", "--kind", "model", "--n", "2", "--seed", "3", "--real"
    )
    assert code == 0
    assert all(entry["im"] == 0.0 for entry in json.loads(out)["entries"])


def test_random_tangle_parses(capsys):
    code, out, _ = run(
        capsys,
        "random", "--kind", "tangle", "--k", "4", "--vertices", "2",
        "--loops", "1", "--seed", "8",
    )
    assert code == 0
    t = vl.parse_tangle(out)
    assert (t.arity, t.num_vertices, t.loop_count) == (4, 2, 1)


# ---------------------------------------------------------------------------
# Usage and entry point


def test_usage_errors_exit_one(capsys):
    assert run(capsys, "eval", "x.vld")[0] == 1  # --model required
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys)[0] == 1


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
    assert run(capsys, "eval", "--help")[0] == 0


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "vlink.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "vlink" in proc.stdout
