import math

import numpy as np
import pytest

from liedg import harness
from liedg.harness import ExperimentSpec, InvalidSpec, StepFailure


def _spec(**kw):
    base = dict(problem="sphere-rb", method="dg-gonzalez", h=0.05, t_end=1.0)
    base.update(kw)
    return ExperimentSpec(**base)


def test_zero_horizon_gives_the_initial_record():
    recs = harness.run_trajectory(_spec(t_end=0.0))
    assert len(recs) == 1
    assert recs[0].t == 0.0 and recs[0].H_err == 0.0


def test_record_count_and_times():
    recs = harness.run_trajectory(_spec(h=0.125, t_end=2.0))
    assert len(recs) == 17
    assert [r.t for r in recs] == [0.125 * n for n in range(17)]


def test_sphere_dg_run_conserves_energy():
    recs = harness.run_trajectory(_spec(t_end=10.0))
    assert max(abs(r.H_err) for r in recs) <= 1e-12
    assert max(abs(r.aux["norm"] - 1.0) for r in recs) <= 1e-12


@pytest.mark.parametrize(
    "kw",
    [
        dict(problem="double-pendulum"),
        dict(method="rk4"),
        dict(method="colloc4"),  # needs a group
        dict(method="heun"),
        dict(h=0.0),
        dict(h=-0.1),
        dict(h=float("nan")),
        dict(t_end=-1.0),
        dict(t_end=1.01),  # not a multiple of h
        dict(solver_tol=0.0),
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        harness.run_trajectory(_spec(**kw))


@pytest.mark.parametrize(
    "h_list",
    [(0.1, 0.05, 0.025), (0.1, 0.05, 0.05, 0.025), (0.025, 0.05, 0.1, 0.2), (0.1, 0.05, -0.025, 0.0125)],
)
def test_invalid_convergence_lists(h_list):
    with pytest.raises(InvalidSpec):
        ExperimentSpec("quat-rb", "dg-gonzalez", h_list=h_list).validate(convergence=True)


def test_bad_problem_parameters_are_invalid_specs():
    with pytest.raises(InvalidSpec):
        harness.make_problem("pseudo-rigid", lam=1.0, mu=-1.0)
    with pytest.raises(InvalidSpec):
        harness.make_problem("quat-rb", colour="red")


def test_step_failure_reports_the_step_index():
    spec = ExperimentSpec("quat-rb", "dg-gonzalez", h=0.5, t_end=2.0, max_iter=2)
    with pytest.raises(StepFailure) as info:
        harness.run_trajectory(spec)
    assert info.value.step == 1
    assert "step 1" in str(info.value)


def test_undefined_bivector_is_a_step_failure():
    # spin about a principal axis: grad H vanishes but the field does not
    spec = ExperimentSpec("quat-rb", "dg-gonzalez", h=0.1, t_end=1.0, problem_options=dict(v0=(0.0, 0.0, 1.0)))
    with pytest.raises(StepFailure):
        harness.run_trajectory(spec)


def test_constraint_violation_aborts():
    P = harness.make_problem("sphere-rb")
    with pytest.raises(StepFailure) as info:
        harness._record(P, 1.001 * P.x0, 0.3, 0.0, 7)
    assert info.value.step == 7


# -- CSV -----------------------------------------------------------------------------


def test_csv_layout_and_round_trip(tmp_path):
    P = harness.make_problem("quat-rb")
    recs = harness.run_trajectory(ExperimentSpec("quat-rb", "dg-avf", h=0.0625, t_end=0.25), P)
    path = tmp_path / "traj.csv"
    cols = harness.trajectory_columns(P)
    harness.write_csv(path, cols, harness.trajectory_rows(recs))
    lines = path.read_text().splitlines()
    assert lines[0] == "# liedg v1"
    assert lines[1] == "t,q0,q1,q2,q3,H,H_err,qnorm"
    assert len(lines) == 2 + 5
    cols2, data = harness.read_csv(path)
    assert cols2 == cols
    ref = np.array(list(harness.trajectory_rows(recs)), dtype=float)
    assert np.array_equal(data, ref)  # 17 significant digits round-trip exactly


def test_seventeen_significant_digits(tmp_path):
    path = tmp_path / "x.csv"
    harness.write_csv(path, ["a", "n"], [[1.0 / 3.0, 5]])
    assert path.read_text().splitlines()[2] == "0.33333333333333331,5"


def test_row_length_mismatch(tmp_path):
    with pytest.raises(ValueError):
        harness.write_csv(tmp_path / "x.csv", ["a", "b"], [[1.0]])


def test_read_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        harness.read_csv(p)


def test_output_is_byte_identical_across_runs(tmp_path):
    P = harness.make_problem("pseudo-rigid")
    spec = ExperimentSpec("pseudo-rigid", "dg-gonzalez", h=0.0625, t_end=0.5)
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        harness.write_csv(path, harness.trajectory_columns(P), harness.trajectory_rows(harness.run_trajectory(spec)))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


# -- convergence -----------------------------------------------------------------------


def test_fit_slope_on_synthetic_data():
    h = np.array([0.1, 0.05, 0.025, 0.0125])
    assert harness.fit_slope(h, 3.0 * h**2) == pytest.approx(2.0, abs=1e-12)
    assert harness.fit_slope(h, 0.5 * h**4) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ValueError):
        harness.fit_slope(h, [1.0, 0.0, 1.0, 1.0])


def test_method_as_its_own_reference_has_zero_error():
    spec = ExperimentSpec(
        "quat-rb",
        "dg-gonzalez",
        t_end=0.5,
        h_list=(0.125, 0.0625, 0.03125, 0.015625),
        reference_method="dg-gonzalez",
        reference_h=0.015625,
        problem_options=dict(inertia=(1.0, 2.0, 3.0)),
    )
    res = harness.convergence_study(spec)
    assert res.errors[-1] == 0.0
    assert np.all(res.errors[:-1] > 0)
    assert math.isnan(res.slope)


def test_convergence_rows():
    res = harness.ConvergenceResult(np.array([0.5, 0.25]), np.array([1e-2, 2.5e-3]), 2.0, 0.03125, "colloc4")
    assert list(harness.convergence_rows(res, 1.0)) == [[0.5, 2, 1e-2, 2.0], [0.25, 4, 2.5e-3, 2.0]]


# -- comparisons -----------------------------------------------------------------------


def test_same_method_twice_gives_identical_columns():
    cols, rows = harness.compare_methods([_spec(t_end=0.5), _spec(t_end=0.5)])
    assert cols == ["t", "H_err_dg-gonzalez", "H_err_dg-gonzalez_2"]
    assert all(r[1] == r[2] for r in rows)


def test_pseudo_rigid_comparison_has_det_column():
    specs = [ExperimentSpec("pseudo-rigid", m, h=0.0625, t_end=1.0) for m in ("sym-alpha0", "dg-gonzalez")]
    cols, rows = harness.compare_methods(specs)
    assert cols[-1] == harness.DET_DIFF_COLUMN
    assert rows[0][-1] == 0.0
    assert all(np.isfinite(r[-1]) for r in rows)
    assert max(abs(r[2]) for r in rows) <= 1e-10
    assert max(abs(r[1]) for r in rows) > 1e-8


def test_grid_mismatch():
    with pytest.raises(InvalidSpec):
        harness.compare_methods([_spec(), _spec(h=0.1)])
    with pytest.raises(InvalidSpec):
        harness.compare_methods([_spec(), _spec(t_end=2.0)])
    with pytest.raises(InvalidSpec):
        harness.compare_methods([])
