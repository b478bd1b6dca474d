"""Working-precision contexts and scalar helpers.

Every real-field computation in the package runs against a
:class:`PrecisionContext`, which owns a private :class:`mpmath.MPContext`.
Keeping one mpmath context per precision (instead of mutating the global
``mpmath.mp``) means contexts are immutable and can be used from several
threads at once.

Complex arithmetic for basin plots uses Python/numpy ``complex`` by default;
``PrecisionContext.mpc`` gives the high-precision variant.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, TypeVar

import mpmath
from mpmath import libmp

MIN_DIGITS = 16
#: Digits used for the reference tables.
REFERENCE_DIGITS = 7000
#: Digits used by default in tests and CLI runs.
DEFAULT_DIGITS = int(os.environ.get("MULTIPOINT_DIGITS", "300"))

T = TypeVar("T")


class PrecisionError(ValueError):
    """Requested precision is below the supported minimum."""


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable decimal working precision.

    Parameters
    ----------
    decimal_digits : int
        Significant decimal digits of the working mantissa (>= 16).
    """

    decimal_digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        if int(self.decimal_digits) != self.decimal_digits or self.decimal_digits < MIN_DIGITS:
            raise PrecisionError(
                f"decimal_digits must be an integer >= {MIN_DIGITS}, got {self.decimal_digits!r}"
            )

    @cached_property
    def mp(self) -> mpmath.MPContext:
        ctx = mpmath.MPContext()
        ctx.dps = self.decimal_digits
        return ctx

    def mpf(self, value: Any):
        """Convert ``value`` (str, int, float, mpf) to a real at this precision.

        Strings are parsed at full precision, so ``"0.03"`` is the nearest
        representable value to 3/100 rather than the nearest double.
        """
        return self.mp.mpf(value)

    def mpc(self, value: Any):
        return self.mp.mpc(value)

    @property
    def eps(self):
        return self.mp.eps

    def __repr__(self):
        return f"PrecisionContext({self.decimal_digits})"


def with_precision(digits: int, computation: Callable[[PrecisionContext], T]) -> T:
    """Run ``computation(ctx)`` under a fresh ``digits``-digit context."""
    return computation(PrecisionContext(digits))


def decompose(x, digits: int) -> tuple[int, str, int]:
    """Split ``x`` into ``(sign, digit_string, exponent)`` with ``digits`` digits.

    The value is ``sign * 0.<digit_string> * 10**exponent`` (reference-table style,
    mantissa in [0.1, 1)). ``x`` must be nonzero and finite.
    """
    mpf_value = mpmath.mpf(x)._mpf_ if not hasattr(x, "_mpf_") else x._mpf_
    text = libmp.to_str(mpf_value, digits, strip_zeros=False, min_fixed=0, max_fixed=0)
    sign = -1 if text.startswith("-") else 1
    text = text.lstrip("-")
    if "e" in text:
        mant, exp = text.split("e")
        exp = int(exp)
    else:
        mant, exp = text, 0
    whole, _, frac = mant.partition(".")
    return sign, (whole + frac)[:digits], exp + len(whole)


def format_sci(x, digits: int = 3, truncate: bool = True) -> str:
    """Render ``x`` as ``0.ddde-ee`` (lowercase ``e``, mantissa in [0.1, 1)).

    The mantissa is cut after ``digits`` digits, which is how the reference
    tables are printed; pass ``truncate=False`` for round-to-nearest.

    >>> format_sci(mpmath.mpf("3.8049e-21"))
    '0.380e-20'
    """
    if x == 0:
        return "0"
    if truncate:
        # 20 guard digits; a carry into the kept digits would need twenty 9s
        sign, mant, exp = decompose(x, digits + 20)
        mant = mant[:digits]
    else:
        sign, mant, exp = decompose(x, digits)
    return f"{'-' if sign < 0 else ''}0.{mant}e{exp:+d}".replace("e+", "e")


_SCI_RE = re.compile(r"^(-?)0\.(\d+)e([+-]?\d+)$")


def parse_sci(cell: str) -> tuple[int, str, int]:
    """Inverse of :func:`format_sci`: ``'0.380e-20'`` -> ``(1, '380', -20)``."""
    m = _SCI_RE.match(cell.strip())
    if not m:
        raise ValueError(f"not a reference-style number: {cell!r}")
    return (-1 if m.group(1) else 1), m.group(2), int(m.group(3))


def sig_digit_agreement(a, b, ctx: PrecisionContext | None = None) -> int:
    """Number of leading significant decimal digits shared by ``a`` and ``b``.

    Returns 0 when signs or decimal exponents differ, and the context's full
    ``decimal_digits`` when the two values are identical.
    """
    ctx = ctx or PrecisionContext()
    n = ctx.decimal_digits
    a, b = ctx.mpf(a), ctx.mpf(b)
    if a == b:
        return n
    if a == 0 or b == 0:
        return 0
    sa, da, ea = decompose(a, n)
    sb, db, eb = decompose(b, n)
    if sa != sb or ea != eb:
        return 0
    count = 0
    for ca, cb in zip(da, db):
        if ca != cb:
            break
        count += 1
    return count
