"""Command line front end: ``liedg simulate | converge | compare``.

Exit codes: 0 success, 2 solver failure, 3 invalid experiment description.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness
from .harness import ExperimentSpec, InvalidSpec, StepFailure

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_INVALID = 3


class _Parser(argparse.ArgumentParser):
    # argparse uses exit status 2 for usage errors, which would collide with
    # the solver-failure code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _floats(text: str, what: str, sizes=None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidSpec(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if sizes is not None and len(vals) not in sizes:
        raise InvalidSpec(f"{what}: expected {' or '.join(map(str, sizes))} numbers, got {len(vals)}")
    return vals


def problem_options(args) -> dict:
    """Translate the shared problem flags into constructor keywords."""
    opts: dict = {}
    prob = args.problem
    if args.inertia is not None:
        d = _floats(args.inertia, "--inertia", (3,))
        opts["E" if prob == "pseudo-rigid" else "inertia"] = d
    if args.lame is not None:
        if prob != "pseudo-rigid":
            raise InvalidSpec("--lame only applies to pseudo-rigid")
        opts["lam"], opts["mu"] = _floats(args.lame, "--lame", (2,))
    if args.p0 is not None:
        if prob == "sphere-rb":
            opts["p0"] = _floats(args.p0, "--p0", (3,))
        elif prob == "pseudo-rigid":
            vals = _floats(args.p0, "--p0", (3, 9))
            opts["P0"] = vals if len(vals) == 3 else np.reshape(vals, (3, 3))
        else:
            raise InvalidSpec("--p0 does not apply to quat-rb (use --v0)")
    if args.f0 is not None:
        if prob != "pseudo-rigid":
            raise InvalidSpec("--f0 only applies to pseudo-rigid")
        vals = _floats(args.f0, "--f0", (3, 9))
        opts["F0"] = np.diag(vals) if len(vals) == 3 else np.reshape(vals, (3, 3))
    if args.v0 is not None:
        if prob != "quat-rb":
            raise InvalidSpec("--v0 only applies to quat-rb")
        opts["v0"] = _floats(args.v0, "--v0", (3,))
    return opts


def _add_common(p, method_flag=True):
    p.add_argument("--problem", required=True, choices=sorted(harness.PROBLEMS))
    if method_flag:
        p.add_argument("--method", required=True, choices=harness.METHODS)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--tol", type=float, default=1e-14, help="solver tolerance (default 1e-14)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--inertia", help="d1,d2,d3: inertia diagonal (E for pseudo-rigid)")
    p.add_argument("--lame", help="lambda,mu")
    p.add_argument("--p0", help="initial momentum: p for sphere-rb, P0 (3 diag or 9) for pseudo-rigid")
    p.add_argument("--f0", help="initial deformation gradient (3 diag or 9 entries)")
    p.add_argument("--v0", help="initial body velocity for quat-rb")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liedg", description="Energy-preserving Lie group integrators")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="integrate one trajectory and write it as CSV")
    _add_common(p)
    p.add_argument("--h", type=float, required=True)

    p = sub.add_parser("converge", help="global error vs step size, with fitted order")
    _add_common(p)
    p.add_argument("--h-list", required=True, help="strictly decreasing h1,h2,...")
    p.add_argument("--reference-method", default="colloc4", choices=harness.METHODS)
    p.add_argument("--reference-h", type=float, help="default: smallest h / 8")

    p = sub.add_parser("compare", help="energy errors of several methods side by side")
    _add_common(p, method_flag=False)
    p.add_argument("--methods", required=True, help="comma-separated method ids")
    p.add_argument("--h", type=float, required=True)
    return parser


def _spec(args, method, **extra) -> ExperimentSpec:
    return ExperimentSpec(
        problem=args.problem,
        method=method,
        t_end=args.t_end,
        out=args.out,
        solver_tol=args.tol,
        max_iter=args.max_iter,
        problem_options=problem_options(args),
        **extra,
    )


def _simulate(args) -> str:
    spec = _spec(args, args.method, h=args.h)
    problem = harness.make_problem(spec.problem, **spec.problem_options)
    records = harness.run_trajectory(spec, problem)
    harness.write_csv(args.out, harness.trajectory_columns(problem), harness.trajectory_rows(records))
    worst = max(abs(r.H_err) for r in records)
    return f"{len(records) - 1} steps, max |H_err| = {worst:.3e}"


def _converge(args) -> str:
    spec = _spec(
        args,
        args.method,
        h_list=tuple(_floats(args.h_list, "--h-list")),
        reference_method=args.reference_method,
        reference_h=args.reference_h,
    )
    res = harness.convergence_study(spec)
    harness.write_csv(args.out, harness.CONVERGENCE_COLUMNS, harness.convergence_rows(res, spec.t_end))
    return f"fitted slope {res.slope:.4f} (reference {res.reference_method} at h = {res.reference_h:g})"


def _compare(args) -> str:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if len(methods) < 1:
        raise InvalidSpec("--methods needs at least one method")
    specs = [_spec(args, m, h=args.h) for m in methods]
    columns, rows = harness.compare_methods(specs)
    harness.write_csv(args.out, columns, rows)
    peaks = {c: max(abs(r[i]) for r in rows) for i, c in enumerate(columns) if c.startswith("H_err")}
    return ", ".join(f"max |{c}| = {v:.3e}" for c, v in peaks.items())


_COMMANDS = {"simulate": _simulate, "converge": _converge, "compare": _compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        msg = _COMMANDS[args.command](args)
    except InvalidSpec as exc:
        print(f"liedg: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except StepFailure as exc:
        print(f"liedg: solver failure at {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"liedg: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(msg)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
