"""
Command-line interface.

Exit codes: 0 success, 2 invalid arguments, 3 numerical overflow,
4 quadrature or search failure.  Every output carries the fully resolved
run configuration (JSON ``config`` key, or a leading ``# config:`` comment
line in CSV).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from tarch import conditions, deterministic, drift, montecarlo
from tarch.dist import get_model
from tarch.errors import (
    DomainError,
    NumericalOverflowError,
    QuadratureError,
    SearchError,
    TruncationWarning,
)
from tarch.model import DEFAULT_CAP, ModelParams, simulate_path

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_OVERFLOW = 3
EXIT_NUMERIC = 4


def _num(x):
    return f"{x:.17g}"


def _clean(obj):
    """JSON-safe copy: NaN/inf become None, numpy scalars become Python."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _display(result, digits=4):
    out = {}
    for key, v in result.items():
        if isinstance(v, float) and math.isfinite(v):
            out[key] = round(v, digits)
    return out


# argparse types: messages name the violated constraint
def _real(constraint):
    def parse(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not a real number")
        if not math.isfinite(v) or not constraint[0](v):
            raise argparse.ArgumentTypeError(f"must be {constraint[1]}, got {text}")
        return v

    return parse


positive = _real((lambda v: v > 0, "> 0"))
nonneg = _real((lambda v: v >= 0, ">= 0"))
real = _real((lambda v: True, "finite"))


def _int(minimum):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {v}")
        return v

    return parse


def _seed(text):
    v = _int(0)(text)
    if v >= 2**64:
        raise argparse.ArgumentTypeError("must be < 2**64")
    return v


class _Formatter(argparse.ArgumentDefaultsHelpFormatter):
    # required flags and flags whose help already names the default stay bare
    def _get_help_string(self, action):
        if action.default is None or "default:" in (action.help or ""):
            return action.help
        return super()._get_help_string(action)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # one-line diagnostic, usage-error exit code
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "output")}
    return cfg


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _emit_json(args, result, display=True):
    doc = {"config": _config(args), "result": result}
    if display:
        doc["display"] = _display(result)
    text = json.dumps(_clean(doc), indent=2, allow_nan=False)
    with _sink(args.output) as fh:
        fh.write(text + "\n")


def _config_line(args):
    return "# config: " + json.dumps(_clean(_config(args))) + "\n"


def _emit_csv(args, header, rows, trailer=None):
    buf = io.StringIO()
    buf.write(_config_line(args))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_num(v) if isinstance(v, float) else v for v in row])
    if trailer is not None:
        writer.writerow(trailer)
    with _sink(args.output) as fh:
        fh.write(buf.getvalue())


def _model(args):
    return get_model(args.innovation, getattr(args, "nu", None))


def _params(args):
    return ModelParams(args.omega, args.alpha, args.k)


# commands -------------------------------------------------------------------


def cmd_simulate(args):
    params = _params(args)
    rng = montecarlo.replicate_stream(args.seed, 0)
    path = simulate_path(
        params, _model(args), args.n, burnin=args.burnin, stream=rng, cap=args.cap
    )
    if args.format == "json":
        result = {
            "epsilon": path.epsilon.tolist(),
            "sigma2": path.sigma2.tolist(),
            "regime": path.regime.astype(int).tolist(),
            "overflowed": path.overflowed,
            "overflow_step": path.overflow_step,
        }
        _emit_json(args, result, display=False)
    else:
        rows = (
            (i + 1, float(e), float(s), int(r))
            for i, (e, s, r) in enumerate(zip(path.epsilon, path.sigma2, path.regime))
        )
        trailer = [path.overflow_step, "overflow", "", ""] if path.overflowed else None
        _emit_csv(args, ["t", "epsilon", "sigma2", "regime"], rows, trailer)
    if path.overflowed:
        print(
            f"overflow: eps_t^2 exceeded {args.cap:g} at t={path.overflow_step}",
            file=sys.stderr,
        )
        return EXIT_OVERFLOW
    return EXIT_OK


def cmd_deterministic(args):
    params = _params(args)
    report = deterministic.classify(params)
    status = EXIT_OK
    if args.trajectory is not None:
        try:
            traj = deterministic.exact_trajectory(params, args.steps, cap=args.cap)
            overflow = None
        except NumericalOverflowError as exc:
            traj, overflow = exc.partial, str(exc)
            status = EXIT_OVERFLOW
        with open(args.trajectory, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_config_line(args))
            fh.write("t,eps2\n")
            for t, v in enumerate(traj):
                fh.write(f"{t},{_num(v)}\n")
            if overflow is not None:
                fh.write(f"{len(traj)},overflow\n")
                print(overflow, file=sys.stderr)
    _emit_json(args, report.to_dict())
    return status


def cmd_bounds(args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        res = conditions.alpha_max(_model(args), args.p, args.k, args.m_cap)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit_json(args, res.to_dict())
    return EXIT_OK


def cmd_table(args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        rows = conditions.table_rows(_model(args), args.p, args.k_max, args.m_cap)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "json":
        _emit_json(
            args,
            {"rows": [[r.k_lo, r.k_hi, r.m, r.alpha_max] for r in rows]},
            display=False,
        )
    else:
        _emit_csv(
            args,
            ["k_lo", "k_hi", "m", "alpha_max"],
            ((r.k_lo, r.k_hi, r.m, r.alpha_max) for r in rows),
        )
    return EXIT_OK


def cmd_regions(args):
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    ks = np.linspace(args.k_min, args.k_max, args.k_steps)
    rows = conditions.region_grid(_model(args), alphas, ks, args.m_cap)
    header = ["alpha", "k", "strict", "second_moment", "fourth_moment"]
    if args.format == "json":
        _emit_json(
            args,
            {"columns": header,
             "rows": [[r.alpha, r.k, r.strict, r.second_moment, r.fourth_moment]
                      for r in rows]},
            display=False,
        )
    else:
        _emit_csv(
            args,
            header,
            ((r.alpha, r.k, int(r.strict), int(r.second_moment), int(r.fourth_moment))
             for r in rows),
        )
    return EXIT_OK


def cmd_drift(args):
    model = _model(args)
    report = drift.find_r(model, args.alpha, args.k, args.r_floor, args.omega)
    result = report.to_dict()
    if args.grid_csv is not None:
        params = ModelParams(args.omega, args.alpha, args.k)
        points = drift.drift_grid_check(
            model, params, report, drift.log_grid(report, args.grid_side)
        )
        result["grid_points"] = len(points)
        result["grid_passed"] = sum(p.passed for p in points)
        with open(args.grid_csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_config_line(args))
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "in_small_set", "lhs", "rhs", "pass"])
            for p in points:
                w.writerow([_num(p.x1), _num(p.x2), int(p.in_small_set),
                            _num(p.lhs), _num(p.rhs), int(p.passed)])
    _emit_json(args, result)
    return EXIT_OK


def _mc_config(args):
    return montecarlo.McConfig(
        n=args.n, burnin=args.burnin, reps=args.reps, seed=args.seed, cap=args.cap
    )


def cmd_estimate(args):
    report = montecarlo.estimate_moment(
        _model(args), _params(args), args.p, _mc_config(args)
    )
    if args.format == "csv":
        scale = args.omega**args.p
        _emit_csv(
            args,
            ["replicate", "mean", "regime_frac", "overflowed"],
            ((r.index, scale * r.mean, r.regime_frac, int(r.overflowed))
             for r in report.replicates),
        )
    else:
        _emit_json(args, report.to_dict())
    return EXIT_OK


def cmd_probe(args):
    report = montecarlo.explosion_probe(_model(args), _params(args), _mc_config(args))
    _emit_json(args, report.to_dict())
    return EXIT_OK


# parser ---------------------------------------------------------------------


def _add_model(sp, need_alpha=True, omega=True):
    if omega:
        sp.add_argument("--omega", type=positive, default=1.0,
                        help="constant volatility term omega (variance units)")
    sp.add_argument("--alpha", type=nonneg, required=need_alpha,
                    default=None if need_alpha else 0.5,
                    help="ARCH coefficient alpha (dimensionless)")
    sp.add_argument("--k", type=nonneg, required=True,
                    help="threshold on eps_{t-1}^2 / eps_{t-2}^2 (dimensionless)")


def _add_innovation(sp, choices=("gaussian", "laplace", "student_t")):
    sp.add_argument("--innovation", choices=choices, default="gaussian",
                    help="law of eta_t (unit variance)")
    sp.add_argument("--nu", type=_real((lambda v: v > 2, "> 2")), default=None,
                    help="degrees of freedom for student_t")


def _add_output(sp, formats=("csv", "json"), default="json"):
    sp.add_argument("--format", choices=formats, default=default,
                    help="output format")
    sp.add_argument("--output", default=None,
                    help="output file path (default: stdout)")


def _add_mc(sp, n_default=100_000):
    sp.add_argument("--n", type=_int(1), default=n_default,
                    help="post burn-in steps per replicate (count)")
    sp.add_argument("--burnin", type=_int(0), default=10_000,
                    help="discarded initial steps per replicate (count)")
    sp.add_argument("--reps", type=_int(1), default=64,
                    help="independent replicates (count)")
    sp.add_argument("--seed", type=_seed, default=0, help="master seed (64-bit)")
    sp.add_argument("--cap", type=positive, default=DEFAULT_CAP,
                    help="overflow threshold on eps_t^2 (variance units)")


def build_parser():
    fmt = _Formatter
    parser = _Parser(
        prog="tarch",
        description="Threshold ARCH(1) model: simulation, stationarity and "
        "moment conditions, drift certificates.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("simulate", help="simulate one path", formatter_class=fmt)
    _add_model(sp)
    sp.add_argument("--n", type=_int(1), required=True, help="recorded steps (count)")
    sp.add_argument("--burnin", type=_int(0), default=0,
                    help="discarded initial steps (count)")
    sp.add_argument("--seed", type=_seed, default=0, help="seed (64-bit)")
    sp.add_argument("--cap", type=positive, default=DEFAULT_CAP,
                    help="overflow threshold on eps_t^2 (variance units)")
    _add_innovation(sp, ("gaussian", "laplace", "student_t", "point_mass"))
    _add_output(sp, default="csv")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("deterministic", help="skeleton dynamics with eta^2 = 1",
                        formatter_class=fmt)
    _add_model(sp)
    sp.add_argument("--steps", type=_int(1), default=50,
                    help="trajectory length including t = 0 (count)")
    sp.add_argument("--trajectory", default=None,
                    help="write the exact trajectory CSV (t, eps2) here")
    sp.add_argument("--cap", type=positive, default=DEFAULT_CAP,
                    help="overflow threshold on eps_t^2 (variance units)")
    sp.add_argument("--output", default=None, help="report path (default: stdout)")
    sp.set_defaults(func=cmd_deterministic)

    sp = sub.add_parser("bounds", help="sufficient moment bound on alpha",
                        formatter_class=fmt)
    sp.add_argument("--p", type=_int(1), required=True,
                    help="moment order: bound for E eps^(2p)")
    sp.add_argument("--k", type=nonneg, required=True, help="threshold (dimensionless)")
    sp.add_argument("--m-cap", type=_int(1), default=conditions.M_CAP,
                    help="largest m searched in the max over m")
    _add_innovation(sp)
    sp.add_argument("--output", default=None, help="output path (default: stdout)")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("table", help="k-intervals of constant argmax m",
                        formatter_class=fmt)
    sp.add_argument("--p", type=_int(1), required=True, help="moment order")
    sp.add_argument("--k-max", type=positive, required=True,
                    help="upper end of the k scan (dimensionless)")
    sp.add_argument("--m-cap", type=_int(1), default=conditions.M_CAP,
                    help="largest m searched")
    _add_innovation(sp)
    _add_output(sp, default="csv")
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("regions", help="classify an (alpha, k) grid",
                        formatter_class=fmt)
    sp.add_argument("--alpha-min", type=nonneg, default=0.0, help="(dimensionless)")
    sp.add_argument("--alpha-max", type=nonneg, default=10.0, help="(dimensionless)")
    sp.add_argument("--alpha-steps", type=_int(1), default=101, help="grid points")
    sp.add_argument("--k-min", type=nonneg, default=0.0, help="(dimensionless)")
    sp.add_argument("--k-max", type=nonneg, default=50.0, help="(dimensionless)")
    sp.add_argument("--k-steps", type=_int(1), default=101, help="grid points")
    sp.add_argument("--m-cap", type=_int(1), default=conditions.M_CAP,
                    help="largest m searched")
    _add_innovation(sp)
    _add_output(sp, default="csv")
    sp.set_defaults(func=cmd_regions)

    sp = sub.add_parser("drift", help="drift certificate for k > 0",
                        formatter_class=fmt)
    sp.add_argument("--omega", type=positive, default=1.0,
                    help="constant volatility term (variance units)")
    sp.add_argument("--alpha", type=nonneg, required=True,
                    help="ARCH coefficient (dimensionless, > 0)")
    sp.add_argument("--k", type=nonneg, required=True,
                    help="threshold (dimensionless, > 0)")
    sp.add_argument("--r-floor", type=positive, default=drift.R_FLOOR,
                    help="smallest test-function exponent r tried")
    sp.add_argument("--grid-csv", default=None,
                    help="run the grid audit and write diagnostics here")
    sp.add_argument("--grid-side", type=_int(2), default=32,
                    help="grid audit states per axis (count)")
    _add_innovation(sp)
    sp.add_argument("--output", default=None, help="output path (default: stdout)")
    sp.set_defaults(func=cmd_drift)

    sp = sub.add_parser("estimate", help="Monte Carlo estimate of E eps^(2p)",
                        formatter_class=fmt)
    sp.add_argument("--p", type=_int(1), required=True, help="moment order")
    _add_model(sp)
    _add_mc(sp)
    _add_innovation(sp)
    _add_output(sp, default="json")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("probe", help="overflow frequency and log growth rate",
                        formatter_class=fmt)
    _add_model(sp)
    _add_mc(sp)
    _add_innovation(sp)
    sp.add_argument("--output", default=None, help="output path (default: stdout)")
    sp.set_defaults(func=cmd_probe)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None:
        args.format = "json"
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"tarch {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalOverflowError as exc:
        print(f"tarch {args.command}: overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except (QuadratureError, SearchError) as exc:
        print(f"tarch {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
