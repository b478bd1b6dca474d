"""Method registry, single-step drivers and the iteration loop."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Any, Callable

from ..bigreal import PrecisionContext
from ..problems import ComplexProblem, DomainError, Problem
from . import formulas
from .weights import WeightSet


class SchemeError(ArithmeticError):
    """Base class for failures inside one iteration step."""

    kind = "error"


class ZeroDerivativeError(SchemeError):
    kind = "zero_derivative"


class DegenerateGeometryError(SchemeError):
    """A divided-difference or weight denominator vanished."""

    kind = "degenerate"


class MethodParameterError(ValueError):
    pass


class UnknownMethodError(KeyError):
    pass


@dataclass(frozen=True)
class MethodSpec:
    label: str
    name: str
    order: int
    budget: int
    stages: tuple
    param_name: str | None = None
    param_default: float = 0.0
    complex_capable: bool = True


_LABEL_ALIASES = {
    "three_point_W1": "dd2",
    "kung_traub8": "KT0",
    "neta8": "NNN",
    "khattri": "kh1",
    "four_point_W1": "d2",
    "four_point_W2": "d4",
    "four_point_W3": "d6",
    "kung_traub16": "KT",
    "neta16": "NNNN",
    "geum_kim1": "d7",
    "geum_kim2": "d9",
}

_DESCRIPTIONS = {
    "newton": ("Newton", 2, 2, None, 0.0),
    "two_point": ("two-point weighted (G of W1)", 4, 3, None, 0.0),
    "dd2": ("three-point weighted, W1", 8, 4, None, 0.0),
    "KT0": ("Kung-Traub order 8", 8, 4, None, 0.0),
    "NNN": ("Neta order 8", 8, 4, "A", 1.0),
    # f at x, x + alpha f(x), y, z plus f'(x)
    "kh1": ("Khattri-Steihaug order 8", 8, 5, "alpha", 1.0),
    "d2": ("four-point weighted, W1", 16, 5, None, 0.0),
    "d4": ("four-point weighted, W2", 16, 5, None, 0.0),
    "d6": ("four-point weighted, W3", 16, 5, None, 0.0),
    "KT": ("Kung-Traub order 16", 16, 5, None, 0.0),
    "NNNN": ("Neta order 16", 16, 5, "A", 1.0),
    "d7": ("Geum-Kim order 16, first member", 16, 5, None, 0.0),
    "d9": ("Geum-Kim order 16, second member", 16, 5, None, 0.0),
}


def _build_registry() -> dict[str, MethodSpec]:
    stages = formulas.method_stages()
    return {
        label: MethodSpec(label, name, order, budget, stages[label], pname, pdefault)
        for label, (name, order, budget, pname, pdefault) in _DESCRIPTIONS.items()
    }


METHODS: dict[str, MethodSpec] = _build_registry()


def method_labels() -> list[str]:
    return list(METHODS)


def get_method(label: str) -> MethodSpec:
    label = _LABEL_ALIASES.get(label, label)
    try:
        return METHODS[label]
    except KeyError:
        raise UnknownMethodError(label) from None


def weighted_method(weights: WeightSet, points: int = 4, label: str | None = None) -> MethodSpec:
    """Build a method from an arbitrary weight set (two-, three- or four-point)."""
    if points == 2:
        stages, order, budget = formulas.weighted_stages(weights.G), 4, 3
    elif points == 3:
        stages, order, budget = formulas.weighted_stages(weights.G, weights.H), 8, 4
    elif points == 4:
        stages, order, budget = formulas.weighted_stages(*weights.functions()), 16, 5
    else:
        raise ValueError("points must be 2, 3 or 4")
    label = label or f"{points}pt[{weights.name}]"
    return MethodSpec(label, f"{points}-point weighted, {weights.name}", order, budget, stages)


# ---------------------------------------------------------------------------
# single step
# ---------------------------------------------------------------------------

@dataclass
class StepOutcome:
    next_iterate: Any
    points: tuple = ()
    values: tuple = ()
    early_exit: Any = None
    evaluations: int = 0
    stalled: bool = False

    @property
    def ratios(self) -> dict[str, Any]:
        """Ratios of successive f-values (``t, s, u, p, q, r`` where defined)."""
        fx = self.values[0] if self.values else None
        out = {}
        names = {(1, 0): "t", (2, 1): "s", (2, 0): "u", (3, 0): "p", (3, 1): "q", (3, 2): "r"}
        for (i, j), name in names.items():
            if i < len(self.values) and fx is not None and self.values[j] != 0:
                out[name] = self.values[i] / self.values[j]
        return out


class _Counter:
    __slots__ = ("f", "df", "count")

    def __init__(self, f, df):
        self.f, self.df, self.count = f, df, 0

    def value(self, x):
        self.count += 1
        return self.f(x)

    def derivative(self, x):
        self.count += 1
        return self.df(x)


def _evaluators(problem, ctx: PrecisionContext | None):
    if isinstance(problem, ComplexProblem):
        return problem.bind(ctx)
    if isinstance(problem, Problem):
        if ctx is None:
            raise ValueError("real problems need a PrecisionContext")
        return problem.bind(ctx)
    f, df = problem
    return f, df


# A stage that moves the point by at most this many units of roundoff has
# converged to working precision; later stages would only divide rounding noise.
STALL_ULPS = 64


def _unit_roundoff(value) -> float:
    ctx = getattr(value, "context", None)
    return ctx.eps if ctx is not None else sys.float_info.epsilon


def _stalled(new, prev) -> bool:
    return abs(new - prev) <= STALL_ULPS * _unit_roundoff(new) * abs(new)


def step(method: MethodSpec | str, f: Callable, df: Callable, x, param=None) -> StepOutcome:
    """One iteration of ``method`` from ``x`` given callables ``f`` and ``f'``.

    Any exact-zero f-value ends the step early and returns that point, and so
    does an intermediate stage that moves by no more than ``STALL_ULPS`` units
    of roundoff.  Division by an exact zero in a formula raises
    :class:`DegenerateGeometryError`.
    """
    spec = get_method(method) if isinstance(method, str) else method
    if param is None:
        param = spec.param_default
    if spec.param_name == "alpha" and param == 0:
        raise MethodParameterError("alpha must be nonzero")
    ev = _Counter(f, df)
    fx = ev.value(x)
    if fx == 0:
        return StepOutcome(x, (x,), (fx,), early_exit=x, evaluations=ev.count)
    dfx = ev.derivative(x)
    if dfx == 0:
        raise ZeroDerivativeError(f"f'(x) = 0 at x = {x}")
    zero = 0 * fx
    slots = [zero] * 6  # y, fy, z, fz, w, fw
    points, values = [x], [fx]
    for k, stage in enumerate(spec.stages):
        try:
            new = stage(x, fx, dfx, *slots, param)
        except ZeroDivisionError as exc:
            raise DegenerateGeometryError(f"stage {k + 1} of {spec.label}: {exc}") from None
        points.append(new)
        if k == len(spec.stages) - 1:
            break
        if _stalled(new, points[-2]):
            return StepOutcome(new, tuple(points), tuple(values), evaluations=ev.count,
                               stalled=True)
        fnew = ev.value(new)
        values.append(fnew)
        if fnew == 0:
            return StepOutcome(new, tuple(points), tuple(values), early_exit=new,
                               evaluations=ev.count)
        slots[2 * k] = new
        slots[2 * k + 1] = fnew
    return StepOutcome(points[-1], tuple(points), tuple(values), evaluations=ev.count)


def newton_step(f, df, x) -> StepOutcome:
    return step("newton", f, df, x)


def two_point_step(f, df, x, weights: WeightSet) -> StepOutcome:
    return step(weighted_method(weights, 2), f, df, x)


def three_point_step(f, df, x, weights: WeightSet) -> StepOutcome:
    return step(weighted_method(weights, 3), f, df, x)


def four_point_step(f, df, x, weights: WeightSet) -> StepOutcome:
    return step(weighted_method(weights, 4), f, df, x)


def kung_traub8_step(f, df, x) -> StepOutcome:
    return step("KT0", f, df, x)


def kung_traub16_step(f, df, x) -> StepOutcome:
    return step("KT", f, df, x)


def neta8_step(f, df, x, A=1.0) -> StepOutcome:
    return step("NNN", f, df, x, A)


def neta16_step(f, df, x, A=1.0) -> StepOutcome:
    return step("NNNN", f, df, x, A)


def khattri_steihaug_step(f, df, x, alpha=1.0) -> StepOutcome:
    return step("kh1", f, df, x, alpha)


def geum_kim1_step(f, df, x) -> StepOutcome:
    return step("d7", f, df, x)


def geum_kim2_step(f, df, x) -> StepOutcome:
    return step("d9", f, df, x)


# ---------------------------------------------------------------------------
# iteration
# ---------------------------------------------------------------------------

@dataclass
class Trace:
    method: str
    problem: str
    iterates: list = field(default_factory=list)
    errors: list | None = None
    eval_count: int = 0
    precision_used: int | None = None
    termination: str = "completed"
    error_kind: str | None = None
    error_iteration: int | None = None
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.termination == "error"


def run(
    method: MethodSpec | str,
    problem: Problem | ComplexProblem | tuple,
    x0=None,
    iterations: int = 3,
    precision: PrecisionContext | int | None = None,
    param=None,
    root=None,
) -> Trace:
    """Iterate ``method`` on ``problem`` and record iterates and errors.

    ``precision`` may be a context or a digit count; real problems default to
    the package default precision.  Errors ``|x_n - x*|`` are recorded when
    the root is known (always for built-in real problems, or pass ``root``).
    Step failures end the run with ``termination == "error"``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    spec = get_method(method) if isinstance(method, str) else method
    if isinstance(precision, int):
        precision = PrecisionContext(precision)
    if precision is None and isinstance(problem, Problem):
        precision = PrecisionContext()
    f, df = _evaluators(problem, precision)
    if param is not None and precision is not None:
        param = precision.mpf(param)

    if isinstance(problem, Problem):
        x = problem.x0_value(precision) if x0 is None else precision.mpf(x0)
        if root is None:
            root = problem.root_value(precision)
        name = problem.name
    else:
        x = x0
        name = getattr(problem, "name", "custom")

    trace = Trace(spec.label, name, [x], [] if root is not None else None,
                  precision_used=precision.decimal_digits if precision else None)
    if root is not None:
        trace.errors.append(abs(x - root))
    for n in range(1, iterations + 1):
        try:
            out = step(spec, f, df, x, param)
        except (SchemeError, DomainError, ZeroDivisionError) as exc:
            trace.termination = "error"
            trace.error_kind = getattr(exc, "kind", "domain" if isinstance(exc, DomainError) else "degenerate")
            trace.error_iteration = n
            trace.message = str(exc)
            break
        trace.eval_count += out.evaluations
        x = out.next_iterate
        trace.iterates.append(x)
        if root is not None:
            trace.errors.append(abs(x - root))
        if out.early_exit is not None:
            trace.termination = "early_exit"
            break
        if out.stalled:
            trace.termination = "stalled"
            break
    return trace


def declared_orders() -> dict[str, int]:
    return {label: spec.order for label, spec in METHODS.items()}
