"""Command-line front end.

Every command writes either a CSV file (``solve``, ``field``, ``contours``)
or ``key=value`` report lines. Output goes to ``--output`` or stdout; a
relative ``--output`` path is resolved against ``$SELFSIM_OUTPUT_DIR`` when
that variable is set.

Exit status: 0 on success, 1 when a certified bound fails, 2 on bad arguments.
"""
from __future__ import annotations

import argparse
import io
import os
import sys

import numpy as np

from . import __version__
from .errors import IntegrationError, InvariantViolation, ParameterError
from .integrator import SolveConfig, find_asymptote, find_crossing, integrate
from .ode_core import Params, State
from .similarity_field import (build_profile, contour_eta, eval_u, eval_u_derivatives,
                               pde_residual, recover_scaling)
from . import verification as vf

COMMANDS = ("solve", "crossing", "asymptote", "field", "contours", "residual",
            "energy", "verify-all")


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _add_common(p):
    p.add_argument("--a0", type=float, default=-1.0, help="f(0), must be < 0")
    p.add_argument("--a1", type=float, default=1.0, help="f'(0), must be > 0")
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.add_argument("--h-init", type=float, default=1e-3)
    p.add_argument("--h-max", type=float, default=0.1)
    p.add_argument("--max-steps", type=int, default=200_000)
    p.add_argument("--tail-g-tol", type=float, default=1e-12)
    p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")


def _add_grid(p, nx=100, ny=100):
    p.add_argument("--x-min", type=float, default=0.1)
    p.add_argument("--x-max", type=float, default=10.0)
    p.add_argument("--y-min", type=float, default=0.0)
    p.add_argument("--y-max", type=float, default=10.0)
    p.add_argument("--nx", type=int, default=nx)
    p.add_argument("--ny", type=int, default=ny)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfsim",
        description="Self-similar sign-changing solutions of u u_x = u_yy.")
    parser.add_argument("--version", action="version", version=f"selfsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="dense samples of (eta, f, g) as CSV")
    _add_common(p)
    p.add_argument("--A", type=float, default=1.0, help="transport coefficient, > 0")
    p.add_argument("--eta-end", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=1001)

    for name, text in (("crossing", "first zero T1 of f with its bounds"),
                       ("asymptote", "limit a of f at infinity")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--A", type=float, default=1.0, help="transport coefficient, > 0")

    p = sub.add_parser("field", help="u and its derivatives on a grid as CSV")
    _add_common(p)
    _add_grid(p, 50, 50)

    p = sub.add_parser("contours", help="level sets eta_c and parabolas y = eta_c sqrt(x)")
    _add_common(p)
    p.add_argument("--levels", type=float, nargs="+", default=None,
                   help="levels of u (default: 0 and u at eta = 1, 2, 3)")
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=41)

    p = sub.add_parser("residual", help="max |u u_x - u_yy| on a grid")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=vf.RESIDUAL_TOL)

    p = sub.add_parser("energy", help="both sides of the energy balance on a rectangle")
    _add_common(p)
    for name in ("X1", "X2", "Y1", "Y2"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--quad-points", type=int, default=64)
    p.add_argument("--tol", type=float, default=vf.ENERGY_RTOL)

    p = sub.add_parser("verify-all", help="run every certificate; exit 0 iff all pass")
    _add_common(p)
    p.add_argument("--quad-points", type=int, default=64)
    return parser


def _config(args) -> SolveConfig:
    return SolveConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol, h_init=args.h_init,
                       h_max=args.h_max, max_steps=args.max_steps,
                       tail_g_tol=args.tail_g_tol)


def _provenance(args) -> str:
    skip = {"output"}
    items = " ".join(f"{k}={_fmt(v) if isinstance(v, float) else v}"
                     for k, v in sorted(vars(args).items())
                     if k not in skip and k != "command" and v is not None
                     and not isinstance(v, list))
    levels = getattr(args, "levels", None)
    if levels:
        items += " levels=" + ",".join(_fmt(v) for v in levels)
    return f"# selfsim {__version__} command={args.command} {items}"


def _validate(args):
    if not args.a0 < 0:
        raise ParameterError(f"--a0 must be < 0, got {args.a0}")
    if not args.a1 > 0:
        raise ParameterError(f"--a1 must be > 0, got {args.a1}")
    if hasattr(args, "A") and not args.A > 0:
        raise ParameterError(f"--A must be > 0, got {args.A}")


def _csv(out, args, header, rows):
    out.write(_provenance(args) + "\n")
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def _report(out, lines):
    for line in lines:
        out.write(line + "\n")


def _cmd_solve(args, out):
    traj = integrate(State(0.0, args.a0, args.a1), Params(args.A, 0.0), _config(args),
                     args.eta_end)
    if traj.n_steps == 0:
        eta = np.array([0.0])
    else:
        eta = np.linspace(0.0, args.eta_end, max(args.samples, 2))
    f, g = traj.evaluate(eta)
    _csv(out, args, ("eta", "f", "g"), zip(eta, f, g))
    return 0


def _cmd_crossing(args, out):
    initial = State(0.0, args.a0, args.a1)
    event, _ = find_crossing(initial, Params(args.A, 0.0), _config(args))
    report = vf.check_crossing_bounds(args.a0, args.a1, event, A=args.A, tol=args.abs_tol)
    _report(out, [f"T1={_fmt(event.T1)}", f"g_at_T1={_fmt(event.g_at_T1)}"] + report.lines())
    return 0 if report.passed else 1


def _cmd_asymptote(args, out):
    est, _ = find_asymptote(State(0.0, args.a0, args.a1), Params(args.A, 0.0), _config(args))
    report = vf.check_asymptote(args.a0, args.a1, est, args.tail_g_tol)
    _report(out, [f"a={_fmt(est.a)}", f"eta_stop={_fmt(est.eta_stop)}",
                  f"tail_correction={_fmt(est.tail_correction)}",
                  f"residual_g={_fmt(est.residual_g)}"] + report.lines())
    return 0 if report.passed else 1


def _grid(args):
    return vf.field_grid((args.x_min, args.x_max), (args.y_min, args.y_max), args.nx, args.ny)


def _cmd_field(args, out):
    profile = build_profile(args.a0, args.a1, _config(args))
    X, Y = _grid(args)
    u, u_x, u_y, u_yy = eval_u_derivatives(profile, X, Y)
    res = u * u_x - u_yy
    cols = [a.ravel() for a in (X, Y, u, u_x, u_y, u_yy, res)]
    _csv(out, args, ("x", "y", "u", "ux", "uy", "uyy", "residual"), zip(*cols))
    return 0


def _cmd_contours(args, out):
    profile = build_profile(args.a0, args.a1, _config(args))
    levels = args.levels
    if levels is None:
        levels = [0.0] + [float(eval_u(profile, 1.0, e)) for e in (1.0, 2.0, 3.0)]
    x = np.linspace(0.0, args.x_max, args.points)
    rows = []
    for level in levels:
        eta_c = contour_eta(profile, level)
        y = eta_c * profile.scaling.delta(x)
        rows.extend((level, eta_c, xi, yi) for xi, yi in zip(x, y))
    _csv(out, args, ("level", "eta_c", "x", "y"), rows)
    return 0


def _cmd_residual(args, out):
    profile = build_profile(args.a0, args.a1, _config(args))
    report = vf.residual_check(profile, args.tol, x_range=(args.x_min, args.x_max),
                               y_range=(args.y_min, args.y_max), nx=args.nx, ny=args.ny)
    _report(out, [f"max_abs_residual={_fmt(report.checks[0].value)}",
                  f"grid={args.nx}x{args.ny}"] + report.lines())
    return 0 if report.passed else 1


def _cmd_energy(args, out):
    profile = build_profile(args.a0, args.a1, _config(args))
    rect = vf.default_rectangle(profile)
    given = {k: getattr(args, k) for k in ("X1", "X2", "Y1", "Y2")
             if getattr(args, k) is not None}
    if given:
        rect = vf.Rectangle(**{**vars(rect), **given})
    energy = vf.energy_balance(profile, rect, args.quad_points)
    report = energy.report(args.tol)
    _report(out, [f"{k}={_fmt(v)}" for k, v in vars(rect).items()]
            + energy.lines() + report.lines())
    return 0 if report.passed else 1


def _cmd_verify_all(args, out):
    profile = build_profile(args.a0, args.a1, _config(args))
    reports = vf.verify_all(profile, args.quad_points)
    for r in reports:
        _report(out, r.lines())
    ok = all(r.passed for r in reports)
    out.write(f"verify-all: {'pass' if ok else 'FAIL'}\n")
    return 0 if ok else 1


_DISPATCH = {
    "solve": _cmd_solve, "crossing": _cmd_crossing, "asymptote": _cmd_asymptote,
    "field": _cmd_field, "contours": _cmd_contours, "residual": _cmd_residual,
    "energy": _cmd_energy, "verify-all": _cmd_verify_all,
}


def _output_path(path):
    base = os.environ.get("SELFSIM_OUTPUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def run(argv=None, stdout=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    stdout = stdout or sys.stdout
    buf = io.StringIO(newline="")
    try:
        _validate(args)
        recover_scaling()
        status = _DISPATCH[args.command](args, buf)
    except ParameterError as exc:
        print(f"selfsim: error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, IntegrationError) as exc:
        print(f"selfsim: violated: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(_output_path(args.output), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
