"""Command-line interface: ``stablehit <command> [options]``.

Output goes to stdout as CSV (default) or JSON with the same fields;
diagnostics go to stderr. Exit codes: 0 success, 2 bad configuration,
3 tolerance unreachable, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import applications as apps
from .density_series import (
    density,
    density_irrational,
    density_rational,
    make_plan,
)
from .errors import StableHitError, ToleranceUnreachable, ValidationFailure
from .map_exponent import stable_kappa
from .mellin_inversion import invert_density, survival
from .mellin_law import functional_equation_residual, mellin_T0
from .montecarlo import estimate_hitting_law
from .params import AlphaKind, Sign, StableParams, make_params

EXIT_CONFIG = 2
EXIT_TOLERANCE = 3
EXIT_VALIDATION = 4


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit(header, rows, fmt_name, out):
    text_rows = [[fmt(v) for v in row] for row in rows]
    if fmt_name == "json":
        records = []
        for row in text_rows:
            fields = []
            for key, val in zip(header, row):
                try:
                    ok = math.isfinite(float(val))
                except ValueError:
                    ok = False
                token = val if ok else json.dumps(val)
                fields.append(f"{json.dumps(key)}: {token}")
            records.append("{" + ", ".join(fields) + "}")
        out.write("[" + ",\n ".join(records) + "]\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(text_rows)
    out.write(buf.getvalue())


def _t_values(args):
    if args.t:
        return [float(x) for x in args.t]
    if args.t_min is not None and args.t_max is not None:
        if not 0 < args.t_min < args.t_max or args.t_steps < 2:
            raise argparse.ArgumentTypeError("need 0 < t-min < t-max and t-steps >= 2")
        return np.geomspace(args.t_min, args.t_max, args.t_steps).tolist()
    raise argparse.ArgumentTypeError("give --t or --t-min/--t-max")


def _params(args) -> StableParams:
    return make_params(args.alpha, args.rho)


def _density_value(params, sign, t, args):
    if args.terms is None:
        return density(params, sign, t, tol=args.tol, liouville_unsafe=args.liouville_unsafe)
    kind = params.alpha_class().kind
    if kind is AlphaKind.RATIONAL:
        return density_rational(params, sign, t, args.terms)
    if kind is AlphaKind.IRRATIONAL:
        plan = make_plan(params, sign, t, args.terms)
        return density_irrational(params, sign, t, plan, liouville_unsafe=args.liouville_unsafe)
    return invert_density(params, sign, t, tol=args.tol)


# -- commands ----------------------------------------------------------------


def cmd_mellin(args, out):
    params = _params(args)
    sign = Sign.from_value(args.sign)
    rows = []
    for text in args.s or ["1"]:
        s = complex(text.replace(" ", ""))
        v = complex(mellin_T0(params, sign, s if s.imag else s.real).value)
        rows.append([s.real, s.imag, v.real, v.imag])
    emit(["s_re", "s_im", "value_re", "value_im"], rows, args.format, out)


def cmd_density(args, out):
    params = _params(args)
    sign = Sign.from_value(args.sign)
    x = float(args.x) if args.x is not None else float(sign.unit)
    if x == 0:
        raise argparse.ArgumentTypeError("--x must be nonzero")
    start = Sign.PLUS if x > 0 else Sign.MINUS
    scale = abs(x) ** (-params.alpha)
    rows = []
    for t in _t_values(args):
        res = _density_value(params, start, scale * t, args)
        rows.append([t, scale * res.value, res.method.value, scale * res.err_estimate])
    emit(["t", "value", "method", "err"], rows, args.format, out)


def cmd_survival(args, out):
    params = _params(args)
    sign = Sign.from_value(args.sign)
    rows = [[t, survival(params, sign, t, args.tol)] for t in _t_values(args)]
    emit(["t", "survival"], rows, args.format, out)


def cmd_table(args, out):
    params = _params(args)
    rows = []
    for t in _t_values(args):
        dp = _density_value(params, Sign.PLUS, t, args).value
        dm = _density_value(params, Sign.MINUS, t, args).value
        rows.append([t, dp, dm, survival(params, Sign.PLUS, t, args.tol), survival(params, Sign.MINUS, t, args.tol)])
    emit(["t", "density_plus", "density_minus", "survival_plus", "survival_minus"], rows, args.format, out)


def validation_report(params: StableParams, tol: float = 1e-10):
    """Rows (check, measured, threshold, status) for one parameter pair."""
    a = params.alpha
    rows = []
    s_grid = np.linspace(0.0, 1.0 - 1.0 / a, 12)[1:-1]
    fe = max(functional_equation_residual(params, float(s)) for s in s_grid)
    rows.append(["functional_equation_residual", fe, 1e-10])
    norm = max(abs(complex(mellin_T0(params, sg, 1.0).value) - 1.0) for sg in Sign)
    rows.append(["normalization", norm, 1e-12])
    rows.append(["cramer_root", abs(stable_kappa(params, 1.0 / a - 1.0)), 1e-10])
    series_available = params.alpha_class().kind is not AlphaKind.NEAR_RATIONAL
    worst = 0.0
    for sg in Sign:
        for t in (0.5, 1.0, 2.0, 5.0, 10.0):
            inv = invert_density(params, sg, t, tol=1e-12).value
            if series_available:
                other = density(params, sg, t, tol=tol).value
            else:
                # no series for this alpha: compare two contours instead
                other = invert_density(params, sg, t, tol=1e-12, c=0.8).value
                inv = invert_density(params, sg, t, tol=1e-12, c=1.2).value
            worst = max(worst, abs(other / inv - 1.0))
    rows.append(["dual_method_density" if series_available else "contour_independence", worst, 1e-6])
    mass = max(abs(survival(params, sg, 0.0) - 1.0) for sg in Sign)
    rows.append(["total_mass", mass, 1e-6])
    return [r + ["pass" if r[1] < r[2] else "fail"] for r in rows]


def cmd_validate(args, out):
    params = _params(args)
    rows = validation_report(params, args.tol)
    emit(["check", "measured", "threshold", "status"], rows, args.format, out)
    failed = [r[0] for r in rows if r[3] != "pass"]
    if failed:
        raise ValidationFailure("failed checks: " + ", ".join(failed))


def cmd_simulate(args, out):
    params = _params(args)
    sign = Sign.from_value(args.sign)
    x0 = float(args.x) if args.x is not None else float(sign.unit)
    ts = _t_values(args)
    est = estimate_hitting_law(params, x0, args.eps, args.dt, args.paths, ts, seed=args.seed)
    if args.stopping_times:
        est.to_csv(args.stopping_times)
    rows = []
    for i, t in enumerate(est.t):
        analytic = apps.survival_from(params, x0, t, args.tol)
        rows.append([t, est.survival[i], est.stderr[i], est.survival_half[i], est.stderr_half[i],
                     est.extrapolated[i], analytic])
    emit(["t", "survival", "stderr", "survival_half_eps", "stderr_half_eps", "extrapolated", "analytic"],
         rows, args.format, out)


def cmd_applications(args, out):
    params = _params(args)
    hp, hm = apps.h_function(params, 1.0), apps.h_function(params, -1.0)
    rows = []
    for t in _t_values(args):
        rows.append([
            t, hp, hm,
            apps.excursion_length_density(params, t),
            apps.excursion_length_tail(params, t),
            apps.ratio_Y(params, 1.0, t, args.tol),
            apps.ratio_Y(params, -1.0, t, args.tol),
        ])
    emit(["t", "h_plus", "h_minus", "excursion_density", "excursion_tail", "Y_plus", "Y_minus"],
         rows, args.format, out)


COMMANDS = {
    "mellin": cmd_mellin,
    "density": cmd_density,
    "survival": cmd_survival,
    "table": cmd_table,
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "applications": cmd_applications,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablehit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", required=True, help='index in (1,2); "m/n" declares an exact rational')
    common.add_argument("--rho", required=True, type=float, help="positivity parameter")
    common.add_argument("--sign", default="+1", help="start at +1 or -1")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--t", nargs="+", help="time points")
    common.add_argument("--t-min", type=float)
    common.add_argument("--t-max", type=float)
    common.add_argument("--t-steps", type=int, default=20)
    common.add_argument("--terms", type=int, help="fixed series truncation (k_max or N)")
    common.add_argument("--liouville-unsafe", action="store_true",
                        help="allow N outside K(alpha); convergence is unproven if alpha is Liouville-like")
    common.add_argument("--x", help="starting point (default: the sign)")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "mellin":
            p.add_argument("--s", nargs="+", help="arguments, complex allowed as a+bj")
        if name == "simulate":
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--paths", type=int, default=10_000)
            p.add_argument("--eps", type=float, default=1e-2)
            p.add_argument("--dt", type=float, default=1e-4)
            p.add_argument("--stopping-times", help="CSV file for per-path stopping times")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args, sys.stdout)
    except ValidationFailure as exc:
        print(f"stablehit: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ToleranceUnreachable as exc:
        print(f"stablehit: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (StableHitError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"stablehit: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
