import subprocess
import sys

import pytest

from liedg import harness
from liedg.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, main


def test_simulate(tmp_path, capsys):
    out = tmp_path / "s.csv"
    rc = main(["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "0.05", "--t-end", "1", "--out", str(out)])
    assert rc == EXIT_OK
    cols, data = harness.read_csv(out)
    assert cols == ["t", "p1", "p2", "p3", "H", "H_err", "norm"]
    assert data.shape == (21, 7)
    assert "max |H_err|" in capsys.readouterr().out


def test_simulate_with_problem_flags(tmp_path):
    out = tmp_path / "p.csv"
    rc = main(
        [
            "simulate", "--problem", "pseudo-rigid", "--method", "dg-gonzalez", "--h", "0.0625",
            "--t-end", "0.25", "--out", str(out), "--lame", "0.5,2", "--inertia", "1,1,2",
            "--p0", "0.1,0.2,0.3", "--f0", "1,1,1",
        ]
    )
    assert rc == EXIT_OK
    cols, data = harness.read_csv(out)
    assert cols[-1] == "detF" and data.shape[0] == 5


def test_converge(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(
        [
            "converge", "--problem", "quat-rb", "--method", "dg-gonzalez", "--h-list", "0.25,0.125,0.0625,0.03125",
            "--t-end", "1", "--out", str(out), "--inertia", "1,2,3", "--reference-h", "0.0078125",
        ]
    )
    assert rc == EXIT_OK
    cols, data = harness.read_csv(out)
    assert cols == harness.CONVERGENCE_COLUMNS
    assert data[:, 3] == pytest.approx(2.0, abs=0.2)


def test_compare(tmp_path):
    out = tmp_path / "m.csv"
    rc = main(
        [
            "compare", "--problem", "pseudo-rigid", "--methods", "sym-alpha0,dg-gonzalez", "--h", "0.0625",
            "--t-end", "0.5", "--out", str(out),
        ]
    )
    assert rc == EXIT_OK
    cols, _ = harness.read_csv(out)
    assert cols == ["t", "H_err_sym-alpha0", "H_err_dg-gonzalez", harness.DET_DIFF_COLUMN]


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--problem", "sphere-rb", "--method", "colloc4", "--h", "0.1", "--t-end", "1"],
        ["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "-0.1", "--t-end", "1"],
        ["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "0.3", "--t-end", "1"],
        ["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "0.1", "--t-end", "1", "--lame", "1,1"],
        ["simulate", "--problem", "quat-rb", "--method", "dg-avf", "--h", "0.1", "--t-end", "1", "--inertia", "1,2"],
        ["simulate", "--problem", "nope", "--method", "dg-avf", "--h", "0.1", "--t-end", "1"],
        ["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "abc", "--t-end", "1"],
        ["converge", "--problem", "quat-rb", "--method", "dg-avf", "--h-list", "0.1,0.2,0.05,0.025", "--t-end", "1"],
        ["compare", "--problem", "sphere-rb", "--methods", ",", "--h", "0.1", "--t-end", "1"],
        ["simulate"],
    ],
)
def test_invalid_input_exits_3(tmp_path, argv):
    with_out = argv + ["--out", str(tmp_path / "x.csv")] if len(argv) > 1 else argv
    try:
        rc = main(with_out)
    except SystemExit as exc:  # argparse usage errors
        rc = exc.code
    assert rc == EXIT_INVALID


def test_unwritable_output_exits_3(tmp_path):
    rc = main(
        ["simulate", "--problem", "sphere-rb", "--method", "dg-avf", "--h", "0.5", "--t-end", "1",
         "--out", str(tmp_path / "missing" / "x.csv")]
    )
    assert rc == EXIT_INVALID


def test_solver_failure_exits_2(tmp_path, capsys):
    rc = main(
        ["simulate", "--problem", "quat-rb", "--method", "dg-gonzalez", "--h", "0.5", "--t-end", "2",
         "--max-iter", "2", "--out", str(tmp_path / "x.csv")]
    )
    assert rc == EXIT_SOLVER
    assert "step 1" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "liedg", "simulate", "--problem", "sphere-rb", "--method", "dg-gonzalez",
         "--h", "0.5", "--t-end", "1", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("# liedg v1\n")
    proc = subprocess.run([sys.executable, "-m", "liedg", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 3
