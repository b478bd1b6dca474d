"""Weight-function sets and a finite-difference check of their order conditions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

from ..bigreal import PrecisionContext
from . import formulas


@dataclass(frozen=True)
class WeightSet:
    """Weight functions of the weighted two-, three- and four-point schemes.

    ``G(t)``, ``H(t, s, u)``, ``I(t)``, ``J(s)``, ``K(u)``, ``L(t, u)``,
    ``M(p, q, r)`` and ``N(t, s, u, r)``.  A three-point set leaves ``I`` ...
    ``N`` as ``None``.
    """

    name: str
    G: Callable
    H: Callable | None = None
    I: Callable | None = None
    J: Callable | None = None
    K: Callable | None = None
    L: Callable | None = None
    M: Callable | None = None
    N: Callable | None = None
    claimed_optimal: bool = False

    @property
    def points(self) -> int:
        if self.H is None:
            return 2
        return 3 if self.I is None else 4

    def functions(self) -> tuple:
        return (self.G, self.H, self.I, self.J, self.K, self.L, self.M, self.N)

    def correction(self, t, s, u, p, q, r):
        """The last-step factor ``I + J + K + L + M + N``."""
        return (self.I(t) + self.J(s) + self.K(u) + self.L(t, u)
                + self.M(p, q, r) + self.N(t, s, u, r))


def proposed_weight_sets() -> dict[str, WeightSet]:
    f = formulas
    return {
        "W1": WeightSet("W1", f.w1_g, f.w1_h, f.w1_i, f.w1_j, f.w1_k, f.w1_l, f.w1_m, f.w1_n, True),
        "W2": WeightSet("W2", f.w2_g, f.w2_h, f.w2_i, f.w2_j, f.w2_k, f.w2_l, f.w2_m, f.w2_n, True),
        "W3": WeightSet("W3", f.w3_g, f.w3_h, f.w3_i, f.w3_j, f.w3_k, f.w3_l, f.w3_m, f.w3_n, True),
    }


def three_point_weight_set() -> WeightSet:
    """The ``G``, ``H`` pair of the order-8 method (same as W1's)."""
    return WeightSet("W1-3pt", formulas.w1_g, formulas.w1_h, claimed_optimal=True)


# ---------------------------------------------------------------------------
# order conditions
# ---------------------------------------------------------------------------

# (function, multi-index, required value, stage); required None means "finite".
_N_ZERO = (
    (0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (2, 0, 0, 0),
    (1, 1, 0, 0), (0, 2, 0, 0), (1, 0, 1, 0), (2, 1, 0, 0), (3, 1, 0, 0), (2, 2, 0, 0),
    (0, 1, 0, 1), (3, 0, 0, 0), (4, 0, 0, 0), (3, 0, 1, 0), (1, 1, 0, 1), (2, 1, 1, 0),
    (3, 0, 0, 1), (0, 0, 1, 1), (3, 2, 0, 0), (4, 1, 0, 0), (1, 2, 0, 0), (2, 0, 1, 0),
    (1, 1, 1, 0),
)

CONDITIONS: tuple[tuple[str, tuple, float | None, int], ...] = (
    ("G", (0,), 1, 2), ("G", (1,), 2, 2), ("G", (2,), None, 2),
    ("G", (2,), 10, 3), ("G", (3,), -36, 3),
    ("H", (0, 0, 0), 1, 3), ("H", (1, 0, 0), 2, 3), ("H", (0, 1, 0), 1, 3),
    ("H", (2, 0, 0), 12, 3), ("H", (0, 0, 1), 4, 3), ("H", (1, 1, 0), 0, 3),
    ("I", (0,), 0, 4), ("I", (1,), 2, 4), ("I", (2,), 12, 4),
    ("J", (0,), 0, 4), ("J", (1,), 1, 4), ("J", (2,), 0, 4), ("J", (3,), -6, 4),
    ("K", (0,), 1, 4), ("K", (1,), 4, 4), ("K", (2,), -8, 4),
    ("L", (0, 0), 0, 4), ("L", (1, 0), 0, 4), ("L", (1, 1), 1, 4), ("L", (2, 0), 0, 4),
    ("L", (0, 1), 0, 4), ("L", (3, 0), 0, 4), ("L", (2, 1), 12, 4), ("L", (3, 1), 12, 4),
    ("L", (0, 2), 0, 4), ("L", (1, 2), -20, 4),
    ("H", (0, 1, 1), 0, 4), ("H", (1, 1, 1), 0, 4),
    ("M", (0, 0, 0), 0, 4), ("M", (1, 0, 0), 8, 4), ("M", (0, 1, 0), 2, 4), ("M", (0, 0, 1), 1, 4),
) + tuple(("N", idx, 0, 4) for idx in _N_ZERO) + (
    ("N", (1, 0, 0, 1), 2, 4), ("N", (2, 0, 0, 1), 12, 4), ("N", (0, 2, 1, 0), -8, 4),
    ("N", (4, 0, 1, 0), 576, 4), ("N", (0, 1, 1, 0), 2, 4),
)

# The constant terms of I, J, K, L, M, N enter the last step only through
# their sum, so the split between them is immaterial for the order.
CONSTANT_TERMS = (("I", (0,)), ("J", (0,)), ("K", (0,)), ("L", (0, 0)),
                  ("M", (0, 0, 0)), ("N", (0, 0, 0, 0)))
CONSTANT_SUM = 1


@dataclass(frozen=True)
class ConditionResult:
    function: str
    index: tuple
    required: float | None
    estimate: float
    passed: bool
    points: int

    @property
    def label(self) -> str:
        return self.function + ",".join(str(i) for i in self.index)

    def describe(self) -> str:
        req = "finite" if self.required is None else f"{self.required:g}"
        verdict = "pass" if self.passed else "FAIL"
        return f"{self.label:<10} estimate {self.estimate:+.10g}  required {req:<7} {verdict}"


@dataclass(frozen=True)
class ConditionReport:
    weights: str
    entries: tuple[ConditionResult, ...]
    constant_sum: float | None
    digits: int
    h: str
    tolerance: float

    @property
    def passed(self) -> bool:
        """Every listed condition holds literally."""
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[ConditionResult]:
        return [e for e in self.entries if not e.passed]

    @property
    def constant_sum_passed(self) -> bool | None:
        if self.constant_sum is None:
            return None
        return abs(self.constant_sum - CONSTANT_SUM) <= self.tolerance

    @property
    def passed_up_to_constants(self) -> bool:
        """All conditions hold once the six constant terms are judged by their sum."""
        if self.constant_sum is None:
            return self.passed
        const = {(f, i) for f, i in CONSTANT_TERMS}
        rest = all(e.passed for e in self.entries if (e.function, e.index) not in const)
        return rest and bool(self.constant_sum_passed)

    def lines(self) -> list[str]:
        out = [e.describe() for e in self.entries]
        if self.constant_sum is not None:
            ok = "pass" if self.constant_sum_passed else "FAIL"
            out.append(f"{'I0+J0+K0+L0,0+M0,0,0+N0,0,0,0':<10} estimate {self.constant_sum:+.10g}"
                       f"  required {CONSTANT_SUM:<7} {ok}")
        return out


def _stencil(order: int):
    # Central difference of the given order with O(h^2) error:
    # sum_i (-1)^i C(k, i) f((k/2 - i) h) / h^k.
    return [((order / 2 - i), (-1) ** i * math.comb(order, i)) for i in range(order + 1)]


def partial_derivative(fn: Callable, index: tuple, h, mp):
    """Mixed partial ``d^|index| fn`` at the origin by tensor-product central differences."""
    zero = mp.mpf(0)
    total = zero
    stencils = [_stencil(k) for k in index]
    for combo in itertools.product(*stencils):
        args = [mp.mpf(offset) * h for offset, _ in combo]
        weight = 1
        for _, c in combo:
            weight *= c
        total += weight * fn(*args)
    return total / h ** sum(index)


def check_weight_conditions(
    weights: WeightSet,
    h: str | float = "1e-20",
    precision: PrecisionContext | int = 100,
    tolerance: float = 1e-8,
) -> ConditionReport:
    """Estimate every derivative appearing in the order conditions and compare.

    Derivatives are central finite differences at the origin with step ``h``.
    The working precision is raised above ``precision`` when needed so that
    cancellation in the highest-order stencil cannot reach ``tolerance``.
    Conditions on functions the set does not define (a three-point set has no
    ``I`` ... ``N``) are skipped.  Failures are report entries, not errors.
    """
    digits = precision.decimal_digits if isinstance(precision, PrecisionContext) else int(precision)
    step_digits = max(0, -math.floor(math.log10(float(h))))
    applicable = [c for c in CONDITIONS if getattr(weights, c[0]) is not None]
    max_order = max(sum(c[1]) for c in applicable)
    work = PrecisionContext(max(digits, step_digits * max_order + 30))
    mp = work.mp
    step = mp.mpf(h)

    cache: dict[tuple, object] = {}
    entries = []
    for name, index, required, _stage in applicable:
        key = (name, index)
        if key not in cache:
            cache[key] = partial_derivative(getattr(weights, name), index, step, mp)
        est = cache[key]
        if required is None:
            ok = bool(mp.isfinite(est))
        else:
            ok = abs(est - required) <= tolerance * max(1, abs(required))
        entries.append(ConditionResult(name, index, required, float(est), ok, weights.points))

    const_sum = None
    if weights.points == 4:
        const_sum = float(sum(cache[key] for key in CONSTANT_TERMS))
    return ConditionReport(weights.name, tuple(entries), const_sum, work.decimal_digits,
                           str(h), tolerance)
