"""Experiment driver: trajectories, convergence studies and method comparisons.

Everything here is deterministic; CSV files start with ``# liedg v1``,
then a header line, then rows with reals printed to 17 significant digits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .discrete_diff import Scheme
from .integrator import (
    GAUSS2,
    SolverError,
    StepConfig,
    collocation_step,
    dg_step,
    heun_step,
    manifold_dg_step,
)
from .lie_core import DomainError
from .problems import PROBLEMS

CSV_MAGIC = "# liedg v1"
METHODS = ("dg-gonzalez", "dg-avf", "colloc4", "sym-alpha0", "heun")
_SCHEME_OF = {"dg-gonzalez": "gonzalez", "dg-avf": "avf", "sym-alpha0": "midpoint"}
# methods that only make sense on a Lie group
_GROUP_ONLY = ("colloc4", "heun")
# tolerance for the norm constraints checked on every record
CONSTRAINT_TOL = 1e-10


class InvalidSpec(ValueError):
    """The experiment description is inconsistent (CLI exit code 3)."""


class StepFailure(RuntimeError):
    """A step failed inside a trajectory (CLI exit code 2)."""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause


@dataclass
class ExperimentSpec:
    problem: str
    method: str
    h: float | None = None
    t_end: float = 1.0
    h_list: tuple = ()
    out: str | None = None
    solver_tol: float = 1e-14
    max_iter: int = 100
    reference_method: str = "colloc4"
    reference_h: float | None = None
    problem_options: dict = field(default_factory=dict)

    def validate(self, convergence: bool = False):
        if self.problem not in PROBLEMS:
            raise InvalidSpec(f"unknown problem {self.problem!r}; choose from {sorted(PROBLEMS)}")
        for m in (self.method, self.reference_method) if convergence else (self.method,):
            if m not in METHODS:
                raise InvalidSpec(f"unknown method {m!r}; choose from {list(METHODS)}")
            if self.problem == "sphere-rb" and m in _GROUP_ONLY:
                raise InvalidSpec(f"method {m!r} needs a Lie group problem, not the sphere")
        if not (np.isfinite(self.t_end) and self.t_end >= 0):
            raise InvalidSpec("t_end must be finite and non-negative")
        if not self.solver_tol > 0:
            raise InvalidSpec("solver tolerance must be positive")
        if convergence:
            hs = list(self.h_list)
            if len(hs) < 4:
                raise InvalidSpec("a convergence study needs at least 4 step sizes")
            if any(not h > 0 for h in hs) or any(a <= b for a, b in zip(hs, hs[1:])):
                raise InvalidSpec("h-list must be positive and strictly decreasing")
            if not self.t_end > 0:
                raise InvalidSpec("t_end must be positive for a convergence study")
            for h in hs + [self.reference_h or hs[-1] / 8]:
                steps_for(self.t_end, h)
        else:
            if self.h is None or not np.isfinite(self.h) or self.h <= 0:
                raise InvalidSpec("step size h must be a positive number")
        return self


@dataclass(frozen=True)
class StepRecord:
    t: float
    state: np.ndarray
    H: float
    H_err: float
    aux: dict


def steps_for(t_end: float, h: float) -> int:
    """round(t_end / h), insisting that the grid lands on t_end."""
    n = int(round(t_end / h))
    if abs(n * h - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise InvalidSpec(f"t_end = {t_end} is not a multiple of h = {h}")
    return n


def make_problem(name: str, **options):
    try:
        cls = PROBLEMS[name]
    except KeyError:
        raise InvalidSpec(f"unknown problem {name!r}") from None
    try:
        return cls(**options)
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad parameters for {name}: {exc}") from exc


def make_stepper(problem, method: str, h: float, solver_tol=1e-14, max_iter=100) -> Callable:
    """Return ``x -> x_next`` for one of ``METHODS``."""
    if method not in METHODS:
        raise InvalidSpec(f"unknown method {method!r}")
    on_sphere = problem.kind == "sphere"
    if on_sphere and method in _GROUP_ONLY:
        raise InvalidSpec(f"method {method!r} needs a Lie group problem")
    if method == "heun":
        return lambda x: heun_step(x, h, problem)
    scheme = Scheme(_SCHEME_OF.get(method, "gonzalez"))
    cfg = StepConfig(h, solver_tol=solver_tol, max_iter=max_iter, scheme=scheme)
    if method == "colloc4":
        return lambda x: collocation_step(x, GAUSS2, cfg, problem)
    if on_sphere:
        return lambda x: manifold_dg_step(x, cfg, problem)
    return lambda x: dg_step(x, cfg, problem)


def _check_constraints(problem, x, aux, step):
    for key in ("norm", "qnorm"):
        if key in aux and abs(aux[key] - 1.0) > CONSTRAINT_TOL:
            raise StepFailure(step, ValueError(f"{key} = {aux[key]!r} left the constraint"))
    if "detF" in aux and not aux["detF"] > 0.0:
        raise StepFailure(step, ValueError(f"det(F) = {aux['detF']!r} is not positive"))


def _record(problem, x, t, H0, step) -> StepRecord:
    H = problem.energy(x)
    aux = problem.invariants(x)
    _check_constraints(problem, x, aux, step)
    return StepRecord(t, problem.flatten(x).copy(), H, H - H0, aux)


def integrate(problem, method, h, n_steps, solver_tol=1e-14, max_iter=100, x0=None):
    """Yield (step index, state) for n = 0..n_steps."""
    step = make_stepper(problem, method, h, solver_tol, max_iter)
    x = problem.x0 if x0 is None else x0
    yield 0, x
    for n in range(1, n_steps + 1):
        try:
            x = step(x)
        except (SolverError, DomainError, np.linalg.LinAlgError) as exc:
            raise StepFailure(n, exc) from exc
        yield n, x


def run_trajectory(spec: ExperimentSpec, problem=None) -> list[StepRecord]:
    spec.validate()
    if problem is None:
        problem = make_problem(spec.problem, **spec.problem_options)
    n_steps = steps_for(spec.t_end, spec.h)
    H0 = problem.energy(problem.x0)
    return [
        _record(problem, x, n * spec.h, H0, n)
        for n, x in integrate(problem, spec.method, spec.h, n_steps, spec.solver_tol, spec.max_iter)
    ]


def terminal_state(problem, method, h, t_end, solver_tol=1e-14, max_iter=100):
    x = problem.x0
    for _, x in integrate(problem, method, h, steps_for(t_end, h), solver_tol, max_iter):
        pass
    return x


def trajectory_columns(problem) -> list[str]:
    aux = list(problem.invariants(problem.x0))
    return ["t"] + list(problem.state_columns()) + ["H", "H_err"] + aux


def trajectory_rows(records: Sequence[StepRecord]):
    for r in records:
        yield [r.t, *r.state, r.H, r.H_err, *r.aux.values()]


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceResult:
    h: np.ndarray
    errors: np.ndarray
    slope: float
    reference_h: float
    reference_method: str


def fit_slope(h, errors) -> float:
    """Least-squares slope of log(error) against log(h)."""
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if np.any(e <= 0):
        raise ValueError("errors must be positive to fit a log-log slope")
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def convergence_study(spec: ExperimentSpec, problem=None, reference=None) -> ConvergenceResult:
    """Terminal global errors against a reference run, with the fitted order.

    The error is the Euclidean norm of the embedded state difference. The
    reference defaults to ``spec.reference_method`` at ``min(h) / 8``;
    ``reference`` may supply a precomputed terminal state instead.
    """
    spec.validate(convergence=True)
    if problem is None:
        problem = make_problem(spec.problem, **spec.problem_options)
    hs = np.asarray(spec.h_list, dtype=float)
    h_ref = spec.reference_h or hs[-1] / 8.0
    if reference is None:
        reference = terminal_state(
            problem, spec.reference_method, h_ref, spec.t_end, spec.solver_tol, spec.max_iter
        )
    ref = problem.flatten(reference)
    errs = np.array(
        [
            np.linalg.norm(
                problem.flatten(
                    terminal_state(problem, spec.method, h, spec.t_end, spec.solver_tol, spec.max_iter)
                )
                - ref
            )
            for h in hs
        ]
    )
    slope = fit_slope(hs, errs) if np.all(errs > 0) else float("nan")
    return ConvergenceResult(hs, errs, slope, float(h_ref), spec.reference_method)


def convergence_rows(res: ConvergenceResult, t_end: float):
    for h, e in zip(res.h, res.errors):
        yield [h, steps_for(t_end, h), e, res.slope]


CONVERGENCE_COLUMNS = ["h", "steps", "global_error", "fitted_slope"]


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------


DET_DIFF_COLUMN = "detF_sym_minus_EP"


def compare_methods(specs: Sequence[ExperimentSpec]):
    """Side-by-side energy errors of several methods on one time grid.

    Returns ``(columns, rows)``. For the pseudo-rigid body with both
    ``sym-alpha0`` and ``dg-gonzalez`` present, a column with
    det(F_sym) - det(F_EP) is appended.
    """
    if not specs:
        raise InvalidSpec("nothing to compare")
    first = specs[0]
    for s in specs[1:]:
        if (s.problem, s.h, s.t_end, s.problem_options) != (
            first.problem,
            first.h,
            first.t_end,
            first.problem_options,
        ):
            raise InvalidSpec("compared runs must share problem, parameters, h and t_end (grid mismatch)")
    problem = make_problem(first.problem, **first.problem_options)
    runs = [run_trajectory(s, problem) for s in specs]
    columns = ["t"]
    seen: dict = {}
    for s in specs:
        seen[s.method] = seen.get(s.method, 0) + 1
        suffix = "" if seen[s.method] == 1 else f"_{seen[s.method]}"
        columns.append(f"H_err_{s.method}{suffix}")
    methods = [s.method for s in specs]
    det_pair = None
    if first.problem == "pseudo-rigid" and "sym-alpha0" in methods and "dg-gonzalez" in methods:
        det_pair = (methods.index("sym-alpha0"), methods.index("dg-gonzalez"))
        columns.append(DET_DIFF_COLUMN)
    rows = []
    for k in range(len(runs[0])):
        row = [runs[0][k].t] + [run[k].H_err for run in runs]
        if det_pair is not None:
            a, b = det_pair
            row.append(runs[a][k].aux["detF"] - runs[b][k].aux["detF"])
        rows.append(row)
    return columns, rows


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_MAGIC + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            if len(row) != len(columns):
                raise ValueError("row length does not match the header")
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    """Inverse of write_csv: returns (columns, float array of rows)."""
    with open(path, encoding="utf-8") as fh:
        magic = fh.readline().rstrip("\n")
        if magic != CSV_MAGIC:
            raise ValueError(f"{path}: not a liedg CSV file")
        columns = fh.readline().rstrip("\n").split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return columns, data
