"""Command-line front end.

Subcommands:

* ``analyze``  -- run the full pipeline on an expression or catalog fixture
                  and emit the JSON report;
* ``trace``    -- sample the curve and write CSV (and optionally an SVG);
* ``verify``   -- trace, then shoot every traced point and report the worst
                  boundary residual and energy drift;
* ``fixtures`` -- list the built-in problem catalog.

Expression grammar: infix over ``u`` with ``+ - * / ^`` (``^`` is right
associative and binds above unary minus), functions ``exp( ) ln( )
sqrt( ) abs( )``, constants ``pi`` and ``e``.  Any other identifier is a
named parameter supplied as ``--param name=value``.

Exit status: 0 for any completed classification (including NotCovered and
CurveDoesNotExist), 2 for errors.
"""

from __future__ import annotations

import argparse
import sys

from .analysis import (DEFAULT_U_MAX, build_nonlinearity, check_conditions,
                       locate_landmarks)
from .backend import backend_name
from .classify import ShapeKind, classify
from .errors import SemibifError
from .expr import parse
from .fixtures import CATALOG, build_fixture
from .report import emit_json, render_report
from .shooting import verify_trace
from .timemap import compute_endpoints
from .tracing import trace, write_csv, write_svg

__all__ = ["main", "build_parser"]

_LIMIT_KEYS = ("f0", "g0", "upg0", "u13f0", "ginf", "fb2", "fb2log")
_LIMIT_CLASSES = ("zero", "finite", "finite-neg", "finite-pos",
                  "pos-inf", "neg-inf", "pos-divergent", "neg-divergent")

_GRAMMAR_EPILOG = """\
expression grammar:
  operators   + - * / ^     (^ is right associative, binds above unary -)
  functions   exp(x) ln(x) sqrt(x) abs(x)
  variables   u             (the unknown)
  constants   pi, e
  parameters  any other identifier, bound with --param name=value
examples:
  semibif analyze "ln(u)"
  semibif analyze "sigma*u - u^(-p)" --param sigma=2 --param p=0.5
  semibif trace --fixture E7 -n 64 -o e7.csv --svg e7.svg
  semibif verify --fixture E2
"""


def _parse_param(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(
            f"expected name=value, got {text!r}")
    name, _, value = text.partition("=")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"parameter value for {name!r} is not a number: {value!r}")


def _parse_assert_limit(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(
            f"expected KEY=CLASS, got {text!r}")
    key, _, cls = text.partition("=")
    key, cls = key.strip(), cls.strip()
    if key not in _LIMIT_KEYS:
        raise argparse.ArgumentTypeError(
            f"unknown limit key {key!r}; valid: {', '.join(_LIMIT_KEYS)}")
    if cls not in _LIMIT_CLASSES:
        raise argparse.ArgumentTypeError(
            f"unknown limit class {cls!r}; valid: {', '.join(_LIMIT_CLASSES)}")
    return key, cls


def _add_problem_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("expression", nargs="?", default=None,
                     help="nonlinearity f(u) as infix text")
    sub.add_argument("--fixture", default=None, choices=sorted(CATALOG),
                     help="use a catalog problem instead of an expression")
    sub.add_argument("--param", action="append", type=_parse_param,
                     default=[], metavar="NAME=VALUE",
                     help="bind a named parameter (repeatable)")
    sub.add_argument("--umax", type=float, default=None, metavar="R",
                     help=f"scan bound (default {DEFAULT_U_MAX:g})")
    sub.add_argument("--tol", type=float, default=1e-10, metavar="R",
                     help="quadrature tolerance (default 1e-10)")
    sub.add_argument("--tau", type=float, default=3.0, metavar="R",
                     help="exponent of the log-weighted endpoint probe "
                          "(default 3)")
    sub.add_argument("--assert-limit", action="append",
                     type=_parse_assert_limit, default=[],
                     metavar="KEY=CLASS",
                     help="override a numeric limit classification; keys: "
                          + ", ".join(_LIMIT_KEYS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semibif",
        description="Bifurcation-curve analysis for semipositone two-point "
                    "boundary value problems (time-map method); kernel "
                    f"backend: {backend_name()}",
        epilog=_GRAMMAR_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    p_an = subs.add_parser("analyze", help="classify the bifurcation curve",
                           epilog=_GRAMMAR_EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_problem_args(p_an)
    p_an.add_argument("--json", default=None, metavar="PATH",
                      help="write the JSON report here (default: stdout)")
    p_an.add_argument("-n", "--points", type=int, default=64, metavar="N",
                      help="trace points when --out/--svg are given")
    p_an.add_argument("-o", "--out", default=None, metavar="PATH",
                      help="also trace the curve to this CSV")
    p_an.add_argument("--svg", default=None, metavar="PATH",
                      help="also plot the traced curve to this SVG")

    p_tr = subs.add_parser("trace", help="sample the curve to CSV/SVG")
    _add_problem_args(p_tr)
    p_tr.add_argument("-n", "--points", type=int, default=64, metavar="N")
    p_tr.add_argument("-o", "--out", default=None, metavar="PATH",
                      help="CSV output path (default: <stem>.csv)")
    p_tr.add_argument("--svg", default=None, metavar="PATH")
    p_tr.add_argument("--json", default=None, metavar="PATH",
                      help="also write the analysis report here")

    p_ve = subs.add_parser("verify",
                           help="cross-check traced points by shooting")
    _add_problem_args(p_ve)
    p_ve.add_argument("-n", "--points", type=int, default=32, metavar="N")
    p_ve.add_argument("--json", default=None, metavar="PATH")

    subs.add_parser("fixtures", help="list the built-in problem catalog")
    return parser


def _build_problem(args):
    params = dict(args.param)
    if args.fixture:
        nl, fx = build_fixture(args.fixture, params or None, args.umax)
        return nl, args.fixture
    if not args.expression:
        raise SemibifError("an expression or --fixture is required")
    nl = build_nonlinearity(parse(args.expression), params,
                            u_max=args.umax if args.umax else DEFAULT_U_MAX)
    return nl, None


def _pipeline(args):
    nl, fixture_name = _build_problem(args)
    overrides = dict(args.assert_limit)
    lm = locate_landmarks(nl)
    cond = check_conditions(nl, lm)
    ep = None
    if lm.curve_exists:
        ep = compute_endpoints(nl, lm, tau=args.tau, overrides=overrides,
                               tol=args.tol)
    summary = classify(nl, lm, cond, ep)
    return nl, fixture_name, lm, cond, ep, summary


def _emit(report: dict, path: str | None) -> None:
    text = emit_json(report) + "\n"
    if path:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    nl, fixture_name, lm, cond, ep, summary = _pipeline(args)
    files = {}
    if (args.out or args.svg) and summary.shape.kind not in (
            ShapeKind.CURVE_DOES_NOT_EXIST,):
        tr = trace(nl, lm, n_points=args.points, tol=args.tol)
        if args.out:
            write_csv(tr, args.out)
            files["csv"] = args.out
        if args.svg:
            write_svg(tr, args.svg)
            files["svg"] = args.svg
    report = render_report(nl, lm, cond, ep, summary,
                           fixture_name=fixture_name, tol=args.tol,
                           files=files)
    _emit(report, args.json)
    if args.json:
        print(f"{summary.shape.kind.value} ({summary.shape.rule_fired}); "
              f"report written to {args.json}")
    return 0


def cmd_trace(args) -> int:
    nl, fixture_name, lm, cond, ep, summary = _pipeline(args)
    if not lm.curve_exists:
        raise SemibifError(
            f"cannot trace {fixture_name or nl.expression!r}: the time map "
            f"is not well-defined at any amplitude ({lm.curve_missing_reason})")
    tr = trace(nl, lm, n_points=args.points, tol=args.tol)
    out = args.out or ((fixture_name or "trace") + ".csv")
    write_csv(tr, out)
    files = {"csv": out}
    if args.svg:
        write_svg(tr, args.svg)
        files["svg"] = args.svg
    if args.json:
        report = render_report(nl, lm, cond, ep, summary,
                               fixture_name=fixture_name, tol=args.tol,
                               files=files)
        _emit(report, args.json)
    emp = tr.empirical.value if tr.empirical else "n/a"
    mintxt = ""
    if tr.min_point:
        mintxt = (f"; minimum at alpha={tr.min_point[0]:.9g}, "
                  f"lambda={tr.min_point[1]:.9g}")
    print(f"{len(tr.points)} points -> {out}"
          + (f" and {args.svg}" if args.svg else "")
          + f"; sampled shape {emp}{mintxt}")
    return 0


def cmd_verify(args) -> int:
    nl, fixture_name, lm, cond, ep, summary = _pipeline(args)
    if not lm.curve_exists:
        raise SemibifError(
            f"cannot verify {fixture_name or nl.expression!r}: "
            f"{lm.curve_missing_reason}")
    tr = trace(nl, lm, n_points=args.points, tol=args.tol)
    shots = verify_trace(nl, tr)
    worst_res = max(abs(s.u_at_1) for s in shots)
    worst_drift = max(s.energy_drift / (1.0 + abs(s.lam * float(nl.F(s.alpha))))
                      for s in shots)
    ok = worst_res <= 1e-5
    verification = {
        "points": len(shots),
        "worst_boundary_residual": worst_res,
        "worst_relative_energy_drift": worst_drift,
        "residual_tolerance": 1e-5,
        "pass": ok,
    }
    if args.json:
        report = render_report(nl, lm, cond, ep, summary,
                               fixture_name=fixture_name, tol=args.tol,
                               verification=verification)
        _emit(report, args.json)
    print(f"{len(shots)} points: worst |u(1)| = {worst_res:.3e}, worst "
          f"relative energy drift = {worst_drift:.3e} -> "
          f"{'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_fixtures(_args) -> int:
    for name, fx in CATALOG.items():
        params = ", ".join(f"{k}={v:g}" for k, v in fx.params.items())
        print(f"{name}: f(u) = {fx.expression}"
              + (f"  [{params}]" if params else ""))
        print(f"  {fx.description}")
        print(f"  expected shape: {fx.expected_shape}")
        for key, value in fx.constants:
            print(f"  {key} = {value}")
        for note in fx.notes:
            print(f"  note: {note}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"analyze": cmd_analyze, "trace": cmd_trace,
                "verify": cmd_verify, "fixtures": cmd_fixtures}
    try:
        return handlers[args.command](args)
    except SemibifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
