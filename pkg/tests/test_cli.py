import json
import subprocess
import sys

import numpy as np
import pytest

from ledpgraph import cli
from ledpgraph.graph import exact_core_numbers, parse_generator


def _run(argv, capsys):
    code = cli.run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _json(argv, capsys):
    code, out, _ = _run(argv, capsys)
    assert code == 0
    return json.loads(out)


@pytest.fixture
def triangle_file(tmp_path):
    f = tmp_path / "tri.txt"
    f.write_text("# triangle\n0 1\n1 2\n0 2\n")
    return str(f)


def test_kcore_exact_triangle(triangle_file, capsys):
    assert _json(["kcore-exact", "-i", triangle_file], capsys)["labels"] == [2, 2, 2]


def test_kcore_dp_zero_noise_k4(capsys):
    res = _json(["kcore-dp", "-g", "clique:4", "--zero-noise", "--step", "1"], capsys)
    assert res["labels"] == [2, 2, 2, 2]


def test_densest_1round_cap(capsys):
    code, out, err = _run(["densest-1round", "-g", "gnp:30:0.2:1"], capsys)
    assert code == cli.EXIT_CAP
    assert out == ""
    assert "26" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus", "-g", "path:3"],
        ["kcore-dp"],
        ["kcore-dp", "-g", "path:3", "--epsilon", "0"],
        ["kcore-dp", "-g", "path:3", "--epsilon", "abc"],
        ["kcore-dp", "-g", "wheel:5"],
        ["kcore-dp", "-g", "path:3", "-i", "x.txt"],
        ["kcore-dp", "-g", "path:3", "--fast"],
        ["eval", "-g", "path:3", "--trials", "0"],
        ["kcore-exact", "-i", "/nonexistent/graph.txt"],
    ],
)
def test_usage_errors(argv, capsys):
    try:
        code = cli.run(argv)
    except SystemExit as exc:  # argparse rejects it before run() returns
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_bad_file_format(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("0 1\n1 x\n")
    assert _run(["kcore-exact", "-i", str(f)], capsys)[0] == cli.EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ["kcore-dp", "-g", "gnp:60:0.2:3", "--seed", "7", "--transcript"],
        ["kcore-levels", "-g", "gnp:60:0.2:3", "--seed", "7"],
        ["ordering", "-g", "gnp:60:0.2:3", "--seed", "7", "--low-rounds"],
        ["coloring", "-g", "gnp:60:0.2:3", "--seed", "7"],
        ["densest", "-g", "gnp:20:0.3:3", "--seed", "7"],
        ["densest-1round", "-g", "gnp:10:0.3:3", "--seed", "7"],
        ["eval", "-g", "gnp:60:0.2:3", "--seed", "7", "--trials", "3"],
    ],
)
def test_byte_identical_output(argv, capsys):
    a = _run(argv, capsys)
    b = _run(argv, capsys)
    assert a[0] == 0 and a[1] == b[1]


def test_seed_changes_output(capsys):
    base = ["kcore-levels", "-g", "gnp:60:0.2:3"]
    a = _run(base + ["--seed", "1"], capsys)[1]
    b = _run(base + ["--seed", "2"], capsys)[1]
    assert a != b


def test_separate_processes_agree(tmp_path):
    argv = [sys.executable, "-m", "ledpgraph.cli", "coloring", "-g", "gnp:40:0.2:1", "--seed", "4"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["colors"]


@pytest.mark.parametrize(
    "argv",
    [
        ["kcore-dp", "-g", "gnp:80:0.1:2", "--epsilon", "2"],
        ["kcore-dp", "-g", "gnp:80:0.1:2", "--schedule", "multiplicative", "--fast"],
        ["kcore-levels", "-g", "gnp:80:0.1:2"],
        ["ordering", "-g", "gnp:80:0.1:2", "--step", "2"],
        ["ordering", "-g", "gnp:80:0.1:2", "--low-rounds"],
        ["coloring", "-g", "gnp:80:0.1:2", "--epsilon", "4", "--threshold-override", "6"],
        ["coloring", "-g", "gnp:80:0.1:2", "--low-rounds"],
        ["densest-1round", "-g", "gnp:9:0.4:2"],
    ],
)
def test_check_passes(argv, capsys):
    code, out, err = _run(argv + ["--check"], capsys)
    assert code == 0, err
    assert "invariant violated" not in err


def test_check_reports_eval_misses(capsys):
    argv = ["eval", "-g", "clique:6", "--zero-noise", "--step", "1", "--check"]
    assert _run(argv, capsys)[0] == 0
    # a coarse step with a tiny additive allowance puts K200's labels 49 off
    argv = ["eval", "-g", "clique:200", "--zero-noise", "--step", "150", "--epsilon", "100", "--check"]
    code, out, err = _run(argv, capsys)
    res = json.loads(out)
    assert res["fraction_inside"] == 0.0 and res["worst_max_error"] == 49.0
    assert code == cli.EXIT_INVARIANT
    assert "outside the bound" in err


def test_eval_recomputes_from_stored_labels(capsys):
    spec = "gnp:120:0.1:5"
    res = _json(["eval", "-g", spec, "--seed", "3", "--trials", "4", "--epsilon", "2", "--step", "3"], capsys)
    exact = exact_core_numbers(parse_generator(spec)).astype(float)
    assert len(res["per_trial"]) == 4
    zeta = res["bound_rhs"]["zeta"]
    for rec in res["per_trial"]:
        labels = np.array(rec["labels"])
        err = np.abs(labels - exact)
        assert rec["errors"] == err.tolist()
        assert rec["max_error"] == err.max()
        assert rec["mean_error"] == pytest.approx(err.mean())
        assert rec["band_violations"] == int(np.count_nonzero((labels < exact - zeta) | (labels > exact + zeta)))
    assert res["worst_max_error"] == max(r["max_error"] for r in res["per_trial"])
    assert res["fraction_inside"] == sum(r["inside"] for r in res["per_trial"]) / 4
    assert [r["trial"] for r in res["per_trial"]] == [0, 1, 2, 3]


def test_eval_trials_use_different_seeds(capsys):
    res = _json(["eval", "-g", "gnp:80:0.1:5", "--epsilon", "20", "--step", "1", "--trials", "3"], capsys)
    labels = [tuple(r["labels"]) for r in res["per_trial"]]
    assert len(set(labels)) > 1


@pytest.mark.parametrize("target", cli.EVAL_TARGETS)
def test_eval_targets(target, capsys):
    spec = "gnp:12:0.4:1" if target == "densest-1round" else "gnp:50:0.2:1"
    res = _json(["eval", "-g", spec, "--target", target, "--trials", "2"], capsys)
    assert res["target"] == target and res["fraction_inside"] == 1.0


def test_timing_is_opt_in(capsys):
    base = ["eval", "-g", "path:5", "--trials", "2"]
    assert "wall_time" not in _json(base, capsys)["per_trial"][0]
    assert "wall_time" in _json(base + ["--timing"], capsys)["per_trial"][0]


def test_generate_round_trip(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert _run(["generate", "-g", "union:clique:4,star:3", "-o", str(out)], capsys)[0] == 0
    text = out.read_text()
    assert text.splitlines()[0] == "n 8"
    res = _json(["kcore-exact", "-i", str(out)], capsys)
    assert res["labels"] == [3, 3, 3, 3, 1, 1, 1, 1]


def test_output_file(tmp_path, capsys):
    out = tmp_path / "res.json"
    code, stdout, err = _run(["kcore-exact", "-g", "clique:3", "-o", str(out)], capsys)
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["labels"] == [2, 2, 2]
    assert "kcore-exact" in err


def test_densest_recovers_clique(capsys):
    res = _json(["densest", "-g", "union:clique:5,path:5", "--zero-noise", "--step", "1", "--alpha", "1"], capsys)
    assert res["subset"] == [0, 1, 2, 3, 4]
    assert res["true_density"] == 2.0


def test_coloring_k8_proper(capsys):
    res = _json(["coloring", "-g", "clique:8", "--zero-noise", "--threshold-override", "1"], capsys)
    assert sorted(res["colors"]) == list(range(1, 9))
    assert res["max_defect"] == 0


def test_main_exits_with_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["densest-1round", "-g", "empty:27"])
    assert exc.value.code == cli.EXIT_CAP
