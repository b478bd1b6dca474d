"""Built-in test problems.

Real problems carry hand-coded derivatives and evaluate under a
:class:`~multipoint.bigreal.PrecisionContext`; complex problems are
real-coefficient polynomials evaluated by Horner's rule in whatever field
the argument lives in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .bigreal import PrecisionContext


class DomainError(ArithmeticError):
    """Argument outside the real domain of a test function."""


class UnknownProblemError(KeyError):
    pass


def _log(mp, a):
    if a <= 0:
        raise DomainError(f"log of nonpositive argument {mp.nstr(a, 8)}")
    return mp.log(a)


def _log1p(mp, a):
    # ln(1 + a) without cancellation when a is tiny
    if a <= -1:
        raise DomainError(f"log of nonpositive argument 1 + {mp.nstr(a, 8)}")
    return mp.log1p(a)


def _sqrt(mp, a):
    if a < 0:
        raise DomainError(f"sqrt of negative argument {mp.nstr(a, 8)}")
    return mp.sqrt(a)


def _div(mp, a, b):
    if b == 0:
        raise DomainError("pole of the test function")
    return a / b


@dataclass(frozen=True)
class Problem:
    """A real test equation ``f(x) = 0`` with a known simple root.

    ``f`` and ``fprime`` take ``(mp, x)`` where ``mp`` is an mpmath context.
    ``root`` and ``x0`` are decimal literals or the symbolic names understood
    by :meth:`root_value` (``sqrt(pi)``, ``1/3``).
    """

    name: str
    f: Callable
    fprime: Callable
    root: str
    x0: str
    source: str
    formula: str = ""

    def root_value(self, ctx: PrecisionContext):
        return _literal(ctx, self.root)

    def x0_value(self, ctx: PrecisionContext):
        return _literal(ctx, self.x0)

    def eval(self, x, ctx: PrecisionContext):
        """Return ``(f(x), f'(x))`` at the context's precision."""
        x = ctx.mpf(x)
        return self.f(ctx.mp, x), self.fprime(ctx.mp, x)

    def bind(self, ctx: PrecisionContext):
        """Return single-argument callables ``(f, f')`` at this precision."""
        mp = ctx.mp
        return (lambda x: self.f(mp, x)), (lambda x: self.fprime(mp, x))


def _literal(ctx: PrecisionContext, text: str):
    mp = ctx.mp
    if text == "sqrt(pi)":
        return mp.sqrt(mp.pi)
    if "/" in text:
        num, den = text.split("/")
        return ctx.mpf(num) / ctx.mpf(den)
    return ctx.mpf(text)


# --- real test functions ------------------------------------------------------

def _f1(mp, x):
    return _log1p(mp, x * x) + mp.exp(x) * mp.sin(x)


def _df1(mp, x):
    return 2 * x / (1 + x * x) + mp.exp(x) * (mp.sin(x) + mp.cos(x))


def _f2(mp, x):
    return -x / 100 + mp.sin(x)


def _df2(mp, x):
    return mp.mpf(-1) / 100 + mp.cos(x)


def _f3_exponent(mp, x):
    return -1 + x * x + x * mp.cos(x)


def _f3(mp, x):
    return x * _log1p(mp, x * mp.sin(x)) + mp.exp(_f3_exponent(mp, x)) * mp.sinpi(x)


def _df3(mp, x):
    sx, cx = mp.sin(x), mp.cos(x)
    inner = x * sx
    dinner = sx + x * cx
    g = _f3_exponent(mp, x)
    dg = 2 * x + cx - x * sx
    return (_log1p(mp, inner) + x * dinner / (1 + inner)
            + mp.exp(g) * (dg * mp.sinpi(x) + mp.pi * mp.cospi(x)))


def _f4(mp, x):
    return 1 + mp.exp(2 + x - x * x) + x ** 3 - mp.cos(1 + x)


def _df4(mp, x):
    return (1 - 2 * x) * mp.exp(2 + x - x * x) + 3 * x * x + mp.sin(1 + x)


def _f5(mp, x):
    x2 = x * x
    frac = _div(mp, x2 + 1, x2 * x + 1)
    const = (1 + mp.pi) / (1 + mp.sqrt(mp.pi ** 3))
    return (1 - mp.sin(x2)) * frac + x * _log(mp, x2 - mp.pi + 1) - const


def _df5(mp, x):
    x2 = x * x
    den = x2 * x + 1
    if den == 0:
        raise DomainError("pole of the test function")
    frac = (x2 + 1) / den
    dfrac = (2 * x * den - 3 * x2 * (x2 + 1)) / (den * den)
    arg = x2 - mp.pi + 1
    return (-2 * x * mp.cos(x2) * frac + (1 - mp.sin(x2)) * dfrac
            + _log(mp, arg) + 2 * x2 / arg)


def _f6(mp, x):
    x2 = x * x
    return (1 + x2) * mp.cospi(x / 2) + _log(mp, x2 + 2 * x + 2) / (1 + x2)


def _df6(mp, x):
    x2 = x * x
    q = x2 + 2 * x + 2
    ln_q = _log(mp, q)
    return (2 * x * mp.cospi(x / 2) - (1 + x2) * mp.pi / 2 * mp.sinpi(x / 2)
            + ((2 * x + 2) / q * (1 + x2) - 2 * x * ln_q) / ((1 + x2) ** 2))


# --- comparison functions (Tables 5-7) -------------------------------------

def _g5(mp, x):
    return _log(mp, 1 - x + x * x) + 4 * mp.sin(1 - x)


def _dg5(mp, x):
    return (2 * x - 1) / (1 - x + x * x) - 4 * mp.cos(1 - x)


def _g7_const(mp):
    return -mp.mpf(2) / 27 * (9 * mp.sqrt(2) + 7 * mp.sqrt(3))


def _g7(mp, x):
    return _g7_const(mp) + _sqrt(mp, 1 - x * x) + (1 + x ** 3) * mp.cospi(x / 2)


def _dg7(mp, x):
    root = _sqrt(mp, 1 - x * x)
    if root == 0:
        raise DomainError("derivative undefined at |x| = 1")
    return (-x / root + 3 * x * x * mp.cospi(x / 2)
            - (1 + x ** 3) * mp.pi / 2 * mp.sinpi(x / 2))


_REAL_SUITE = (
    Problem("f1", _f1, _df1, "0", "0.03", "real suite",
            "ln(1+x^2) + e^x sin x"),
    Problem("f2", _f2, _df2, "0", "0.5", "real suite", "-x/100 + sin x"),
    Problem("f3", _f3, _df3, "0", "0.01", "real suite",
            "x ln(1 + x sin x) + e^(-1 + x^2 + x cos x) sin(pi x)"),
    Problem("f4", _f4, _df4, "-1", "-0.3", "real suite",
            "1 + e^(2 + x - x^2) + x^3 - cos(1 + x)"),
    Problem("f5", _f5, _df5, "sqrt(pi)", "1.7", "real suite",
            "(1 - sin x^2)(x^2 + 1)/(x^3 + 1) + x ln(x^2 - pi + 1) - (1 + pi)/(1 + sqrt(pi^3))"),
    Problem("f6", _f6, _df6, "-1", "-1.1", "real suite",
            "(1 + x^2) cos(pi x / 2) + ln(x^2 + 2x + 2)/(1 + x^2)"),
    Problem("table5", _g5, _dg5, "1", "1.1", "comparison",
            "ln(1 - x + x^2) + 4 sin(1 - x)"),
    Problem("table6", _f1, _df1, "0", "0.1", "comparison",
            "ln(1+x^2) + e^x sin x"),
    Problem("table7", _g7, _dg7, "1/3", "0.35", "comparison",
            "-(2/27)(9 sqrt 2 + 7 sqrt 3) + sqrt(1 - x^2) + (1 + x^3) cos(pi x / 2)"),
)


def builtin_suite() -> list[Problem]:
    return list(_REAL_SUITE)


# --- polynomials ------------------------------------------------------------

def horner(coefficients: Sequence, z):
    """Evaluate ``p(z)`` and ``p'(z)``; coefficients in ascending degree."""
    value = 0 * z
    deriv = 0 * z
    for c in reversed(coefficients):
        deriv = deriv * z + value
        value = value * z + c
    return value, deriv


@dataclass(frozen=True)
class ComplexProblem:
    """Real-coefficient polynomial with its roots (for basin plots)."""

    name: str
    coefficients: tuple[float, ...]
    roots: tuple[complex, ...]
    source: str = "basin suite"
    formula: str = ""

    def __post_init__(self):
        if any(isinstance(c, complex) for c in self.coefficients):
            raise ValueError("coefficients must be real")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def value(self, z):
        return horner(self.coefficients, z)[0]

    def derivative(self, z):
        return horner(self.coefficients, z)[1]

    def bind(self, ctx: PrecisionContext | None = None):
        """``(f, f')`` callables; with ``ctx`` the coefficients become mp reals."""
        coeffs = self.coefficients
        if ctx is not None:
            coeffs = tuple(ctx.mpf(c) for c in coeffs)
        return (lambda z: horner(coeffs, z)[0]), (lambda z: horner(coeffs, z)[1])

    def conjugate_index(self, k: int) -> int:
        """Index of the root closest to ``conj(roots[k])``."""
        target = self.roots[k].conjugate()
        return min(range(len(self.roots)), key=lambda j: abs(self.roots[j] - target))


def _cubic_roots_p3() -> tuple[complex, ...]:
    # Roots of z^3 + z^2 - 1, refined to double precision.
    import numpy as np

    r = np.roots([1.0, 1.0, 0.0, -1.0])
    real = [complex(x.real, 0.0) for x in r if abs(x.imag) < 1e-12]
    cplx = sorted((complex(x) for x in r if abs(x.imag) >= 1e-12), key=lambda z: -z.imag)
    return (cplx[0], cplx[0].conjugate(), real[0])


_POLYNOMIALS = (
    ComplexProblem("p1", (1.0, 0.0, 1.0), (1j, -1j), formula="z^2 + 1"),
    ComplexProblem("p2", (0.0, 1.0, 0.0, 1.0), (0j, 1j, -1j), formula="z^3 + z"),
    ComplexProblem("p3", (-1.0, 0.0, 1.0, 1.0), _cubic_roots_p3(), formula="z^3 + z^2 - 1"),
)


def builtin_polynomials() -> list[ComplexProblem]:
    return list(_POLYNOMIALS)


def get_problem(name: str) -> Problem | ComplexProblem:
    """Look a problem up by CLI name (``f1`` ... ``f6``, ``table5``-``table7``, ``p1``-``p3``)."""
    for p in _REAL_SUITE + _POLYNOMIALS:
        if p.name == name:
            return p
    raise UnknownProblemError(name)


def problem_names() -> list[str]:
    return [p.name for p in _REAL_SUITE + _POLYNOMIALS]


def linear_problem(a, b, x0="1", name="linear") -> Problem:
    """``f(x) = a x + b`` with decimal-string coefficients."""
    a, b = str(a), str(b)

    def f(mp, x):
        return mp.mpf(a) * x + mp.mpf(b)

    def fprime(mp, x):
        return mp.mpf(a)

    neg_b = b[1:] if b.startswith("-") else "-" + b
    return Problem(name, f, fprime, f"{neg_b}/{a}", str(x0), "synthetic", f"{a} x + {b}")
