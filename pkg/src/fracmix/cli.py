"""``fracmix`` command line.

Exit codes: 0 success, 1 a verification check failed, 2 usage error
(including parameters outside a routine's domain), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import exprlang, greens, solver, spectrum, verify
from .errors import DomainError, FracMixError, InvalidParams, NumericError, OrderViolation
from .mlf import ml_deriv, ml_eval

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    action: str | None
    output_path: str | None
    format: str
    seed: int


# ---------------------------------------------------------------- output


def fmt(x):
    return "nan" if isinstance(x, float) and math.isnan(x) else f"{x:.11e}"


def write_csv(stream, columns, rows):
    stream.write("# " + ",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(float(v)) for v in row) + "\n")


def write_json(stream, obj):
    stream.write(json.dumps(obj, indent=2, sort_keys=False, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serialisable: {type(o).__name__}")


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def read_candidate(path, alpha):
    """Two-column ``t, w`` CSV ('#' lines ignored) as a grid function."""
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if data.shape[1] < 2:
        raise UsageError(f"{path}: expected two columns t, w")
    return solver.WGridFunction(data[:, 0], data[:, 1], alpha)


# ---------------------------------------------------------------- argument types


def _range(text):
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("need lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="fracmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ml = sub.add_parser("ml", parents=[common], help="Mittag-Leffler function")
    ml.add_argument("--alpha", type=float, required=True)
    ml.add_argument("--beta", type=float, required=True)
    ml.add_argument("--x", type=float, nargs="+", required=True)
    ml.add_argument("--deriv", action="store_true", help="derivative in x")

    sp = sub.add_parser("spectrum", parents=[common], help="principal eigenvalues")
    sp.add_argument("action", choices=("mixed", "dirichlet", "subinterval", "scan"))
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--alpha-range", type=_range)
    sp.add_argument("--t0", type=float)
    sp.add_argument("--t0-range", type=_range)

    gr = sub.add_parser("green", parents=[common], help="Green's function and its bounds")
    gr.add_argument("action", choices=("eval", "scan", "bounds", "positivity"))
    gr.add_argument("--alpha", type=float, required=True)
    gr.add_argument("--lambda", dest="lam", type=float, required=True)
    gr.add_argument("--t", type=float)
    gr.add_argument("--s", type=float)
    gr.add_argument("--grid", type=int, default=257)
    gr.add_argument("--c1", type=float, default=0.5)

    so = sub.add_parser("solve", parents=[common], help="linear and nonlinear solves")
    so.add_argument("action", choices=("linear", "picard", "monotone"))
    so.add_argument("--alpha", type=float, required=True)
    so.add_argument("--lambda", dest="lam", type=float, required=True)
    so.add_argument("--A", type=float, default=0.0)
    so.add_argument("--B", type=float, default=0.0)
    so.add_argument("--interval", type=float, nargs=2, default=(0.0, 1.0), metavar=("A", "B"))
    src = so.add_mutually_exclusive_group()
    src.add_argument("--rhs-expr", help="y(t) for the linear problem")
    src.add_argument("--f-expr", help="f(t, u), u standing for the weighted value")
    src.add_argument("--builtin", help='registered nonlinearity, e.g. "example3(p=2, lam=0)"')
    so.add_argument("--lower-file")
    so.add_argument("--upper-file")
    so.add_argument("--K", type=float, help="Lipschitz constant for the contraction certificate")
    so.add_argument("--tol", type=float, default=solver.DEFAULT_TOL)
    so.add_argument("--max-iter", type=int, default=solver.DEFAULT_MAX_ITER)
    so.add_argument("--grid", type=int, default=solver.DEFAULT_GRID)

    ve = sub.add_parser("verify", parents=[common], help="reproduction and invariant checks")
    ve.add_argument("action", choices=("table1", "figures", "invariants", "examples"))
    ve.add_argument("--tol", type=float, default=1e-5)
    ve.add_argument("--fast", action="store_true")
    return parser


# ---------------------------------------------------------------- commands


def _emit_scalar(cfg, value, payload):
    with _output(cfg.output_path) as out:
        if cfg.format == "json":
            write_json(out, payload)
        elif cfg.format == "csv":
            cols = [k for k, v in payload.items() if isinstance(v, (int, float)) and v is not None]
            write_csv(out, cols, [[payload[k] for k in cols]])
        else:
            out.write(f"{value:.6g}\n")


def _emit_table(cfg, columns, rows, extra=None):
    with _output(cfg.output_path) as out:
        if cfg.format == "json":
            obj = {"columns": list(columns), "rows": [[float(v) for v in r] for r in rows]}
            obj.update(extra or {})
            write_json(out, obj)
        else:
            write_csv(out, columns, rows)


def cmd_ml(args, cfg):
    f = ml_deriv if args.deriv else ml_eval
    xs = np.asarray(args.x, dtype=float)
    vals = np.atleast_1d(f(args.alpha, args.beta, xs))
    if xs.size == 1:
        _emit_scalar(cfg, float(vals[0]), {"alpha": args.alpha, "beta": args.beta, "x": float(xs[0]),
                                           "value": float(vals[0])})
    else:
        _emit_table(cfg, ("x", "value"), zip(xs, vals))
    return EXIT_OK


def _alphas(args):
    if args.alpha_range is not None:
        return args.alpha_range
    if args.alpha is None:
        raise UsageError("give --alpha or --alpha-range")
    return np.array([args.alpha])


def _t0s(args, required):
    if args.t0_range is not None:
        return args.t0_range
    if args.t0 is not None:
        return np.array([args.t0])
    if required:
        raise UsageError("give --t0 or --t0-range")
    return np.array([])


def cmd_spectrum(args, cfg):
    alphas = _alphas(args)
    if args.action == "scan":
        rows = spectrum.eigen_scan(alphas, _t0s(args, False))
        _emit_table(cfg, spectrum.COLUMNS, [r.as_tuple() for r in rows])
        return EXIT_OK
    if args.action == "subinterval":
        results = [spectrum.subinterval_eigenvalue(a, t0) for a in alphas for t0 in _t0s(args, True)]
    else:
        fn = spectrum.principal_mixed_eigenvalue if args.action == "mixed" else spectrum.principal_dirichlet_eigenvalue
        results = [fn(a) for a in alphas]
    if len(results) == 1:
        r = results[0]
        _emit_scalar(cfg, r.value, r.to_dict())
        return EXIT_OK
    cols = ("alpha", "t0", "value", "bracket_lo", "bracket_hi", "residual")
    rows = [(r.alpha, math.nan if r.t0 is None else r.t0, r.value, *r.bracket, r.residual) for r in results]
    if cfg.format == "text":
        with _output(cfg.output_path) as out:
            for r in results:
                where = f"alpha={r.alpha:g}" + ("" if r.t0 is None else f" t0={r.t0:g}")
                out.write(f"{where}  {r.value:.6g}\n")
    else:
        _emit_table(cfg, cols, rows)
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n for n in missing))


def cmd_green(args, cfg):
    params = greens.ProblemParams(args.alpha, args.lam)
    if args.action == "eval":
        _need(args, "t", "s")
        v = float(greens.green_eval(params, args.t, args.s))
        _emit_scalar(cfg, v, {"alpha": args.alpha, "lambda": args.lam, "t": args.t, "s": args.s, "value": v})
        return EXIT_OK
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    if args.action == "scan":
        params.require_valid()
        x = np.arange(1, args.grid + 1) / (args.grid + 1.0)
        T, S = np.meshgrid(x, x, indexing="ij")
        G = greens.green_unit(params.alpha, params.lam, T, S)
        _emit_table(cfg, ("t", "s", "G"), zip(T.ravel(), S.ravel(), G.ravel()))
        return EXIT_OK
    if args.action == "bounds":
        env = greens.bounds_envelope(params, grid_n=args.grid, c1=args.c1)
        if cfg.format == "json":
            with _output(cfg.output_path) as out:
                write_json(out, env.to_dict())
        else:
            with _output(cfg.output_path) as out:
                out.write(f"# M={fmt(env.M)} m0={fmt(env.m0)} c1={fmt(env.c1)} allowance={fmt(env.allowance)}\n")
                write_csv(out, ("t", "m"), zip(env.t_grid, env.m_grid))
        return EXIT_OK
    rep = greens.positivity_report(params, grid_n=args.grid)
    with _output(cfg.output_path) as out:
        if cfg.format == "json":
            write_json(out, rep.to_dict())
        else:
            out.write(
                f"all_positive={rep.all_positive} min_value={rep.min_value:.6g} "
                f"argmin=({rep.argmin[0]:.6g}, {rep.argmin[1]:.6g}) negative_count={rep.negative_count}\n"
            )
    return EXIT_OK


def _nonlinearity(args):
    if args.f_expr is not None:
        return exprlang.to_callable(exprlang.parse(args.f_expr))
    if args.builtin is not None:
        return exprlang.to_callable(exprlang.builtin_from_text(args.builtin))
    raise UsageError("give --f-expr or --builtin")


def _solution_out(cfg, sol, report=None):
    with _output(cfg.output_path) as out:
        if cfg.format == "json":
            if report is not None:
                write_json(out, report.to_dict())
            else:
                write_json(out, {"alpha": sol.alpha, "t": sol.grid, "w": sol.w_values, **sol.meta})
        else:
            write_csv(out, ("t", "w", "u"), sol.to_rows())
    if report is not None and cfg.format != "json":
        sys.stderr.write(
            f"{report.method}: iterations={report.iterations} converged={report.converged} "
            f"residual_fp={report.residual_fp:.3e} residual_ode={report.residual_ode}"
            + ("" if report.certificate_q is None else f" q={report.certificate_q:.6g}")
            + "\n"
        )


def cmd_solve(args, cfg):
    params = greens.ProblemParams(args.alpha, args.lam, tuple(args.interval), args.A, args.B)
    if args.grid < 16:
        raise UsageError("--grid must be at least 16")
    if args.action == "linear":
        if args.rhs_expr is None:
            raise UsageError("solve linear needs --rhs-expr")
        y = exprlang.to_callable(exprlang.parse(args.rhs_expr))
        sol = solver.solve_linear(params, lambda t: y(t, 0.0), n_points=args.grid)
        _solution_out(cfg, sol)
        return EXIT_OK
    f = _nonlinearity(args)
    if args.action == "picard":
        rep = solver.picard_solve(params, f, tol=args.tol, max_iter=args.max_iter, n_points=args.grid, K=args.K)
    else:
        if args.lower_file is None or args.upper_file is None:
            raise UsageError("solve monotone needs --lower-file and --upper-file")
        lo = read_candidate(args.lower_file, args.alpha)
        hi = read_candidate(args.upper_file, args.alpha)
        rep = solver.monotone_solve(params, f, lo, hi, tol=args.tol, max_iter=args.max_iter, n_points=args.grid)
    _solution_out(cfg, rep.solution, rep)
    if not rep.converged:
        return EXIT_NUMERIC
    if rep.details.get("in_bracket") is False:
        sys.stderr.write(
            f"fracmix: the fixed point leaves the lower/upper bracket by {rep.details['final_excess']:.3e}\n"
        )
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args, cfg):
    if args.action == "table1":
        checks = verify.table1(args.tol)
    elif args.action == "figures":
        checks = verify.figures(args.fast)
    elif args.action == "invariants":
        checks = verify.invariants(args.fast, cfg.seed)
    else:
        checks = verify.examples()
    with _output(cfg.output_path) as out:
        if cfg.format == "json":
            write_json(out, [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks])
        else:
            for c in checks:
                out.write(c.line() + "\n")
            n_ok = sum(c.passed for c in checks)
            out.write(f"{n_ok}/{len(checks)} checks passed\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {"ml": cmd_ml, "spectrum": cmd_spectrum, "green": cmd_green, "solve": cmd_solve, "verify": cmd_verify}


def dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(args.command, getattr(args, "action", None), args.out, args.format, args.seed)
    try:
        return COMMANDS[args.command](args, cfg)
    except (UsageError, InvalidParams, DomainError, OrderViolation, exprlang.ExprSyntaxError,
            exprlang.UnknownBuiltin) as exc:
        sys.stderr.write(f"fracmix: error: {exc}\n")
        return EXIT_USAGE
    except (NumericError, FracMixError) as exc:
        sys.stderr.write(f"fracmix: numeric failure: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main(argv=None):
    try:
        return dispatch(sys.argv[1:] if argv is None else argv)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
