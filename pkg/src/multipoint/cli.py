"""Command-line interface: ``multipoint {solve,table,coc,check-conditions,basins}``.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import importlib.util
import sys
from pathlib import Path

from . import analysis
from .basins import BACKENDS, BasinConfig, render_basin, save_basin
from .bigreal import DEFAULT_DIGITS, PrecisionContext, PrecisionError, format_sci
from .problems import builtin_polynomials, builtin_suite, get_problem
from .schemes import check_weight_conditions, get_method, method_labels, proposed_weight_sets, run
from .schemes.weights import CONSTANT_TERMS, WeightSet

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

REAL_PROBLEMS = [p.name for p in builtin_suite()]
POLYNOMIALS = [p.name for p in builtin_polynomials()]


class UsageError(Exception):
    pass


def _param(args, label: str):
    spec = get_method(label)
    if spec.param_name == "A":
        return args.A
    if spec.param_name == "alpha":
        return args.alpha
    return None


def _add_params(p):
    p.add_argument("--A", default=None, help="Neta parameter A (default: 1)")
    p.add_argument("--alpha", default=None,
                   help="Khattri-Steihaug parameter alpha (default: 1)")


def _add_digits(p, default, text=None):
    p.add_argument("--digits", type=int, default=default,
                   help=text or "working precision in significant decimal digits")


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    problem = get_problem(args.problem)
    ctx = PrecisionContext(args.digits)
    trace = run(args.method, problem, x0=args.x0, iterations=args.iters, precision=ctx,
                param=_param(args, args.method))
    mp = ctx.mp
    print(f"method {trace.method}  problem {problem.name}  x* = {problem.root}  "
          f"digits {ctx.decimal_digits}")
    rows = []
    for n, (x, e) in enumerate(zip(trace.iterates, trace.errors)):
        line = f"n={n}  x={mp.nstr(x, 20)}  |x-x*|={format_sci(e)}"
        rows.append((n, mp.nstr(x, 30), format_sci(e)))
        print(line)
    try:
        print(f"coc {analysis.trace_coc(trace).render()}")
    except analysis.UndefinedCocError:
        print(f"coc {analysis.FAILED}")
    print(f"evaluations {trace.eval_count}  termination {trace.termination}")
    if args.csv:
        lines = ["n,x,error"] + [f"{n},{x},{e}" for n, x, e in rows]
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="ascii")
    if trace.failed:
        print(f"error at iteration {trace.error_iteration}: {trace.error_kind}: {trace.message}",
              file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

def cmd_table(args) -> int:
    if args.id and (args.methods or args.problems):
        raise UsageError("use either --id or --methods/--problems")
    if args.check_golden and not args.id:
        raise UsageError("--check-golden needs --id")
    golden = None
    if args.id:
        golden = analysis.load_golden(args.id)
        table = analysis.regenerate(golden, precision=args.digits, workers=args.workers)
    else:
        methods = args.methods.split(",") if args.methods else ["d2"]
        problems = args.problems.split(",") if args.problems else ["f1"]
        for m in methods:
            get_method(m)
        for p in problems:
            if p not in REAL_PROBLEMS:
                raise UsageError(f"unknown real problem {p!r}")
        specs = [analysis.RowSpec(m, p, None, _param(args, m)) for p in problems for m in methods]
        table = analysis.build_table(specs, args.iters, args.digits or DEFAULT_DIGITS,
                                     title="custom", workers=args.workers)
    text = table.to_csv() if args.format == "csv" else table.to_markdown()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    status = EXIT_OK
    if golden is not None and args.check_golden:
        diff = analysis.compare_to_golden(table, golden)
        print("\n".join(diff.lines()))
        if not diff.ok:
            status = EXIT_CHECK
    if any(r.termination == "error" for r in table.rows) and status == EXIT_OK:
        status = EXIT_NUMERIC
    return status


# ---------------------------------------------------------------------------
# coc
# ---------------------------------------------------------------------------

def cmd_coc(args) -> int:
    if args.errors:
        ctx = PrecisionContext(max(args.digits, 50))
        values = [ctx.mpf(e) for e in args.errors]
        if len(values) < 3:
            raise UsageError("--errors needs at least three values")
        print(f"coc {analysis.coc(values[-3:]):.4f}")
        return EXIT_OK
    trace = run(args.method, get_problem(args.problem), iterations=args.iters,
                precision=args.digits, param=_param(args, args.method))
    if trace.failed:
        print(f"error: {trace.error_kind}: {trace.message}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        est = analysis.trace_coc(trace)
    except analysis.UndefinedCocError as exc:
        print(f"coc undefined: {exc}; raise --digits", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"method {trace.method}  problem {trace.problem}  digits {args.digits}  "
          f"window {est.window}  coc {est.render()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check-conditions
# ---------------------------------------------------------------------------

def _load_weights(name: str) -> WeightSet:
    sets = proposed_weight_sets()
    if name in sets:
        return sets[name]
    path, sep, attr = name.rpartition(":")
    if not sep or not Path(path).is_file():
        raise UsageError(f"unknown weight set {name!r}; use W1, W2, W3 or FILE.py:NAME")
    spec = importlib.util.spec_from_file_location("_user_weights", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    obj = getattr(mod, attr, None)
    if not isinstance(obj, WeightSet):
        raise UsageError(f"{attr!r} in {path} is not a WeightSet")
    return obj


def cmd_check_conditions(args) -> int:
    weights = _load_weights(args.weights)
    report = check_weight_conditions(weights, h=args.h, precision=args.digits,
                                     tolerance=args.tolerance)
    print(f"weights {report.weights}  h {report.h}  working digits {report.digits}  "
          f"tolerance {report.tolerance:g}")
    for line in report.lines():
        print(line)
    ok = report.passed_up_to_constants if args.sum_constants else report.passed
    failed = [e.label for e in report.failures]
    if args.sum_constants:
        const = set(CONSTANT_TERMS)
        failed = [e.label for e in report.failures if (e.function, e.index) not in const]
    if failed:
        print("failing: " + ", ".join(failed))
    print("all conditions pass" if ok else "conditions FAIL")
    return EXIT_OK if ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# basins
# ---------------------------------------------------------------------------

def _pair(text: str, sep: str, kind=int, count=2):
    parts = text.lower().split(sep)
    if len(parts) != count:
        raise UsageError(f"expected {count} values separated by {sep!r}, got {text!r}")
    try:
        return tuple(kind(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot parse {text!r}") from None


def cmd_basins(args) -> int:
    resolution = _pair(args.resolution, "x")
    bounds = _pair(args.bounds, ",", float, 4)
    param = _param(args, args.method)
    try:
        config = BasinConfig(args.problem, args.method, bounds=bounds, resolution=resolution,
                             max_iterations=args.max_iter, tolerance=args.tol,
                             param=None if param is None else float(param),
                             precision=args.digits, shade=args.shade)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    backend = None if args.backend == "auto" else args.backend
    image = render_basin(config, backend=backend)
    stem = Path(args.output_dir) / (args.stem or f"basin_{config.spec.label}_{config.problem.name}")
    paths = save_basin(image, stem)
    total = image.width * image.height
    counts = image.counts()
    print(f"method {config.spec.label}  problem {config.problem.name}  "
          f"{image.width}x{image.height}  backend {image.backend}")
    for k, root in enumerate(config.problem.roots):
        print(f"root {k} {root:.7f}: {counts[k] / total:.6f}")
    print(f"none: {counts[-1] / total:.6f}")
    for kind, path in paths.items():
        print(f"wrote {kind} {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # options whose default is not a plain value describe it in their help text
    def _get_help_string(self, action):
        if "default" in (action.help or ""):
            return action.help
        return super()._get_help_string(action)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        kw.setdefault("formatter_class", _HelpFormatter)
        super().__init__(*a, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="multipoint", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    methods = method_labels()

    p = sub.add_parser("solve", help="iterate one method on one test problem",
                       description="Iterate a method and print iterates and errors.")
    p.add_argument("--method", choices=methods, default="d2", help="method label")
    p.add_argument("--problem", choices=REAL_PROBLEMS, default="f1", help="test problem")
    _add_digits(p, DEFAULT_DIGITS)
    p.add_argument("--iters", type=int, default=3, help="number of iterations")
    p.add_argument("--x0", default=None, help="starting point (default: the problem's start point)")
    _add_params(p)
    p.add_argument("--csv", default=None, help="also write the trace to this CSV file (default: none)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="regenerate an error table",
                       description="Regenerate a reference table or a custom method x problem table.")
    p.add_argument("--id", choices=analysis.golden_ids(), default=None,
                   help="reference table to regenerate (default: none, build a custom table)")
    p.add_argument("--methods", default=None, help="comma-separated method labels (default: d2)")
    p.add_argument("--problems", default=None, help="comma-separated problems (default: f1)")
    _add_digits(p, None, "working digits (default: the table's reference precision with "
                         f"--id, else {DEFAULT_DIGITS})")
    p.add_argument("--iters", type=int, default=3, help="iterations per row (custom tables)")
    _add_params(p)
    p.add_argument("--format", choices=("markdown", "csv"), default="markdown",
                   help="output format")
    p.add_argument("--output", default=None, help="write the table to this file (default: stdout)")
    p.add_argument("--check-golden", action="store_true",
                   help="compare with the stored reference values; exit 1 on mismatch")
    p.add_argument("--workers", type=int, default=1, help="processes used for rows")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("coc", help="computational order of convergence",
                       description="coc of a method run, or of three given errors.")
    p.add_argument("--method", choices=methods, default="d2", help="method label")
    p.add_argument("--problem", choices=REAL_PROBLEMS, default="f4", help="test problem")
    _add_digits(p, 7000, "working digits (the third error of an order-16 method needs thousands)")
    p.add_argument("--iters", type=int, default=3, help="number of iterations")
    _add_params(p)
    p.add_argument("--errors", nargs="+", default=None,
                   help="explicit consecutive errors, the last three are used (default: none, run the method)")
    p.set_defaults(func=cmd_coc)

    p = sub.add_parser("check-conditions", help="check weight-function order conditions",
                       description="Finite-difference check of the order conditions of a weight set.")
    p.add_argument("--weights", default="W1", help="W1, W2, W3 or FILE.py:NAME")
    p.add_argument("--h", default="1e-20", help="finite-difference step")
    _add_digits(p, 100, "minimum working digits (raised automatically for small h)")
    p.add_argument("--tolerance", type=float, default=1e-8, help="pass tolerance")
    p.add_argument("--sum-constants", action="store_true",
                   help="judge the constant terms of I..N by their sum instead of one by one")
    p.set_defaults(func=cmd_check_conditions)

    p = sub.add_parser("basins", help="render basins of attraction",
                       description="Render basins of attraction to PPM, CSV and a text sidecar.")
    p.add_argument("--method", choices=methods, default="d4", help="method label")
    p.add_argument("--problem", choices=POLYNOMIALS, default="p1", help="polynomial")
    p.add_argument("--resolution", default="256x256", help="WIDTHxHEIGHT")
    p.add_argument("--bounds", default="-3,3,-3,3", help="re_min,re_max,im_min,im_max")
    p.add_argument("--max-iter", type=int, default=100, help="iteration budget per pixel")
    p.add_argument("--tol", type=float, default=1e-3, help="distance to a root counted as converged")
    p.add_argument("--backend", choices=("auto",) + BACKENDS, default="auto",
                   help="kernel backend (auto: numba unless disabled)")
    _add_digits(p, None, "use mpmath complex with this many digits (default: machine precision)")
    p.add_argument("--shade", action="store_true", help="darken colours by iteration count")
    _add_params(p)
    p.add_argument("--output-dir", default=".", help="directory for the output files")
    p.add_argument("--stem", default=None, help="file stem (default: basin_<method>_<problem>)")
    p.set_defaults(func=cmd_basins)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, PrecisionError, KeyError) as exc:
        parser.error(str(exc))  # exits with status 2
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
