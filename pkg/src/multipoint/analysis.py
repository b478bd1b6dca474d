"""Convergence measurement, error tables and golden-table comparison."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

import mpmath

from .bigreal import PrecisionContext, format_sci, parse_sci
from .problems import get_problem
from .schemes.methods import Trace, get_method, run

__all__ = [
    "Trace", "CocEstimate", "UndefinedCocError", "coc", "trace_coc",
    "RowSpec", "TableRow", "ErrorTable", "error_table", "build_table",
    "GoldenRow", "GoldenTable", "load_golden", "golden_ids", "regenerate",
    "CellMismatch", "GoldenDiff", "compare_to_golden", "cells_agree",
    "ShapeMismatchError", "FAILED",
]

FAILED = "—"  # marks a failed cell in rendered tables

# 50 digits are plenty for the log-ratio of exactly formed error ratios.
_COC_CTX = PrecisionContext(50)


class UndefinedCocError(ArithmeticError):
    pass


class ShapeMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class CocEstimate:
    value: float
    window: tuple[int, int, int]

    def render(self) -> str:
        return f"{self.value:.4f}"


def _exact(e) -> Fraction:
    if hasattr(e, "_mpf_"):
        man, exp = mpmath.mpf(e).man_exp
        return Fraction(man) * Fraction(2) ** exp
    return Fraction(e)


def _log_ratio(a: Fraction, b: Fraction):
    mp = _COC_CTX.mp
    r = a / b
    return mp.log(mp.mpf(r.numerator) / mp.mpf(r.denominator))


def coc(errors: Sequence) -> float:
    """``ln(e3/e2) / ln(e2/e1)`` for three consecutive positive errors.

    The ratios are formed exactly (errors are binary fractions), so scaling
    all three errors by the same factor leaves the result bit-identical.
    """
    if len(errors) != 3:
        raise UndefinedCocError("coc needs exactly three errors")
    e1, e2, e3 = (_exact(e) for e in errors)
    if min(e1, e2, e3) <= 0:
        raise UndefinedCocError("coc needs three positive errors")
    if e1 == e2 or e2 == e3:
        raise UndefinedCocError("consecutive errors are equal")
    return float(_log_ratio(e3, e2) / _log_ratio(e2, e1))


def trace_coc(trace: Trace) -> CocEstimate:
    """coc over the last three errors of a trace."""
    errs = trace.errors or []
    if len(errs) < 3:
        raise UndefinedCocError("fewer than three errors recorded")
    n = len(errs) - 1
    return CocEstimate(coc(errs[-3:]), (n - 2, n - 1, n))


# ---------------------------------------------------------------------------
# error tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RowSpec:
    method: str
    problem: str
    x0: str | None = None
    param: str | None = None


@dataclass
class TableRow:
    spec: RowSpec
    cells: list[str]
    coc: CocEstimate | None
    termination: str
    message: str = ""
    trace: Trace | None = field(default=None, repr=False)

    @property
    def coc_text(self) -> str:
        return self.coc.render() if self.coc is not None else FAILED


@dataclass
class ErrorTable:
    title: str
    iterations: int
    digits: int
    rows: list[TableRow]

    def header(self) -> list[str]:
        return (["method", "problem", "x0"]
                + [f"|x{n}-x*|" for n in range(1, self.iterations + 1)] + ["coc"])

    def records(self) -> list[list[str]]:
        return [[r.spec.method, r.spec.problem, r.spec.x0 or ""] + r.cells + [r.coc_text]
                for r in self.rows]

    def to_markdown(self) -> str:
        head = self.header()
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        lines += ["| " + " | ".join(rec) + " |" for rec in self.records()]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        w.writerows(self.records())
        return buf.getvalue()


def _row(spec: RowSpec, iterations: int, ctx: PrecisionContext, keep_trace: bool) -> TableRow:
    problem = get_problem(spec.problem)
    trace = run(spec.method, problem, x0=spec.x0, iterations=iterations,
                precision=ctx, param=spec.param)
    errs = trace.errors[1:]
    cells = [format_sci(e) for e in errs]
    if trace.failed:
        cells += [FAILED] * (iterations - len(cells))
    elif trace.termination == "stalled":
        # converged to working precision: later iterates stay put
        cells += cells[-1:] * (iterations - len(cells))
    else:
        # early exit: the root was hit exactly, later errors stay zero
        cells += ["0"] * (iterations - len(cells))
    try:
        est = trace_coc(trace) if len(errs) == iterations and not trace.failed else None
    except UndefinedCocError:
        est = None
    x0 = spec.x0 if spec.x0 is not None else problem.x0
    return TableRow(RowSpec(spec.method, spec.problem, x0, spec.param), cells, est,
                    trace.termination, trace.message, trace if keep_trace else None)


def _row_job(args):
    spec, iterations, digits = args
    return _row(spec, iterations, PrecisionContext(digits), keep_trace=False)


def build_table(rows: Sequence[RowSpec], iterations: int = 3,
                precision: PrecisionContext | int | None = None, title: str = "",
                workers: int = 1, keep_traces: bool = False) -> ErrorTable:
    """Run each row spec and collect rendered cells in row order.

    With ``workers > 1`` rows run in separate processes; results are
    gathered in the original order, so output does not depend on scheduling.
    """
    if isinstance(precision, int):
        precision = PrecisionContext(precision)
    ctx = precision or PrecisionContext()
    if workers > 1 and len(rows) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_row_job, [(r, iterations, ctx.decimal_digits) for r in rows]))
    else:
        out = [_row(r, iterations, ctx, keep_traces) for r in rows]
    return ErrorTable(title, iterations, ctx.decimal_digits, out)


def error_table(methods: Sequence[str], problem: str, iterations: int = 3,
                precision: PrecisionContext | int | None = None, x0: str | None = None,
                params: dict | None = None, workers: int = 1) -> ErrorTable:
    """One row per method on a single problem (comparison-table layout)."""
    params = params or {}
    specs = [RowSpec(m, problem, x0, params.get(m)) for m in methods]
    return build_table(specs, iterations, precision, title=problem, workers=workers)


# ---------------------------------------------------------------------------
# golden tables
# ---------------------------------------------------------------------------

# check modes of a golden row:
#   full     error cells by the 2-digit rule, coc within 0.05 of the stored coc
#   order    coc within 0.5 of the declared order only
#   coc_min  coc >= declared order - 0.5 only
CHECK_MODES = ("full", "order", "coc_min")


@dataclass(frozen=True)
class GoldenRow:
    spec: RowSpec
    cells: tuple[str, ...]
    coc: str
    check: str


@dataclass(frozen=True)
class GoldenTable:
    table_id: str
    title: str
    digits: int
    iterations: int
    rows: tuple[GoldenRow, ...]
    notes: tuple[str, ...] = ()

    def row_specs(self) -> list[RowSpec]:
        return [r.spec for r in self.rows]


def golden_ids() -> list[str]:
    return [f"table{n}" for n in range(2, 8)]


def load_golden(source: str | Path) -> GoldenTable:
    """Read a golden CSV; ``source`` is a table id or a file path.

    Leading ``#`` lines carry ``key: value`` metadata (``title``, ``digits``)
    and free-form notes.
    """
    if isinstance(source, str) and source in golden_ids():
        text = resources.files("multipoint.golden").joinpath(f"{source}.csv").read_text()
        table_id = source
    else:
        path = Path(source)
        text = path.read_text()
        table_id = path.stem
    meta, notes, body = {}, [], []
    for line in text.splitlines():
        if line.startswith("#"):
            content = line[1:].strip()
            key, sep, value = content.partition(":")
            if sep and key.strip() in ("title", "digits", "iterations"):
                meta[key.strip()] = value.strip()
            elif content:
                notes.append(content)
        elif line.strip():
            body.append(line)
    reader = csv.DictReader(body)
    rows = []
    for rec in reader:
        cells = tuple(rec[k] for k in reader.fieldnames if k.startswith("e"))
        if rec["check"] not in CHECK_MODES:
            raise ValueError(f"unknown check mode {rec['check']!r}")
        spec = RowSpec(rec["method"], rec["problem"], rec["x0"] or None, rec["param"] or None)
        rows.append(GoldenRow(spec, cells, rec["coc"], rec["check"]))
    return GoldenTable(table_id, meta.get("title", table_id), int(meta.get("digits", 7000)),
                       int(meta.get("iterations", len(rows[0].cells) if rows else 3)),
                       tuple(rows), tuple(notes))


def regenerate(golden: GoldenTable | str, precision: int | None = None,
               workers: int = 1) -> ErrorTable:
    """Recompute a golden table's rows (at its stored precision by default)."""
    if isinstance(golden, str):
        golden = load_golden(golden)
    return build_table(golden.row_specs(), golden.iterations, precision or golden.digits,
                       title=golden.title, workers=workers)


def cells_agree(golden: str, computed: str, digits: int = 2) -> bool:
    """Same decimal exponent and the same first ``digits`` mantissa digits."""
    if golden == computed:
        return True
    try:
        gs, gm, ge = parse_sci(golden)
        cs, cm, ce = parse_sci(computed)
    except ValueError:
        return False
    return gs == cs and ge == ce and gm[:digits] == cm[:digits]


@dataclass(frozen=True)
class CellMismatch:
    row: int
    method: str
    problem: str
    column: str
    expected: str
    computed: str
    rule: str


@dataclass
class GoldenDiff:
    table_id: str
    checked: int
    mismatches: list[CellMismatch]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def lines(self) -> list[str]:
        out = [f"{self.table_id}: {self.checked} cells checked, {len(self.mismatches)} mismatches"]
        out += [f"  row {m.row} {m.method}/{m.problem} {m.column}: expected {m.expected}, "
                f"got {m.computed} ({m.rule})" for m in self.mismatches]
        return out


def _coc_value(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def compare_to_golden(table: ErrorTable, golden: GoldenTable) -> GoldenDiff:
    """Cell-by-cell comparison under each golden row's check mode."""
    if len(table.rows) != len(golden.rows) or table.iterations != len(golden.rows[0].cells):
        raise ShapeMismatchError(
            f"table has {len(table.rows)}x{table.iterations} cells, "
            f"golden has {len(golden.rows)}x{len(golden.rows[0].cells) if golden.rows else 0}")
    mismatches, checked = [], 0
    for i, (row, gold) in enumerate(zip(table.rows, golden.rows)):
        if (row.spec.method, row.spec.problem) != (gold.spec.method, gold.spec.problem):
            raise ShapeMismatchError(f"row {i}: {row.spec} does not match {gold.spec}")
        order = get_method(gold.spec.method).order
        measured = row.coc.value if row.coc is not None else None

        def miss(column, expected, computed, rule):
            mismatches.append(CellMismatch(i, gold.spec.method, gold.spec.problem,
                                           column, expected, computed, rule))

        if gold.check == "full":
            for n, (g, c) in enumerate(zip(gold.cells, row.cells), start=1):
                checked += 1
                if not cells_agree(g, c):
                    miss(f"e{n}", g, c, "exponent + 2 digits")
        checked += 1
        if gold.check == "full":
            target, tol = _coc_value(gold.coc), 0.05
        elif gold.check == "order":
            target, tol = float(order), 0.5
        else:
            target, tol = None, None
        if gold.check == "coc_min":
            if measured is None or measured < order - 0.5:
                miss("coc", f">= {order - 0.5}", row.coc_text, "coc lower bound")
        elif measured is None or target is None or abs(measured - target) > tol:
            miss("coc", f"{target} +- {tol}", row.coc_text, "coc window")
    return GoldenDiff(golden.table_id, checked, mismatches)
