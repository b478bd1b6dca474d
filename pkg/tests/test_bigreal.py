import mpmath
import pytest
from hypothesis import given, strategies as st

from multipoint.bigreal import (
    MIN_DIGITS, PrecisionContext, PrecisionError, decompose, format_sci, parse_sci,
    sig_digit_agreement, with_precision,
)


def test_minimum_precision_enforced():
    with pytest.raises(PrecisionError):
        PrecisionContext(MIN_DIGITS - 1)
    with pytest.raises(PrecisionError):
        PrecisionContext(20.5)
    assert PrecisionContext(MIN_DIGITS).decimal_digits == MIN_DIGITS


def test_contexts_are_independent():
    lo, hi = PrecisionContext(20), PrecisionContext(200)
    third_lo = lo.mpf(1) / 3
    third_hi = hi.mpf(1) / 3
    assert sig_digit_agreement(third_hi, hi.mpf(1) / 3, hi) == 200
    # the 20-digit value agrees with the 200-digit one only to ~20 digits
    assert 19 <= sig_digit_agreement(third_lo, third_hi, hi) <= 22
    assert mpmath.mp.dps == 15  # the global context is never touched


def test_string_literals_parse_at_full_precision():
    ctx = PrecisionContext(100)
    assert ctx.mpf("0.03") * 100 - 3 == 0 or abs(ctx.mpf("0.03") * 100 - 3) < ctx.mpf("1e-98")
    assert abs(ctx.mpf(0.03) - ctx.mpf("0.03")) > ctx.mpf("1e-20")  # double vs decimal


def test_with_precision_newton_step_on_f1():
    from multipoint.problems import get_problem
    from multipoint.schemes import run

    def newton(ctx):
        return run("newton", get_problem("f1"), iterations=1, precision=ctx).errors[1]

    e = with_precision(7000, newton)
    mp = mpmath.MPContext()
    mp.dps = 7000
    x = mp.mpf("0.03")
    f = mp.log(1 + x * x) + mp.exp(x) * mp.sin(x)
    df = 2 * x / (1 + x * x) + mp.exp(x) * (mp.sin(x) + mp.cos(x))
    assert abs(e - abs(x - f / df)) < mp.mpf("1e-6990") * e


@pytest.mark.parametrize("value, text", [
    ("3.8049e-21", "0.380e-20"),
    ("1.26e-320", "0.126e-319"),
    ("0.5", "0.500e0"),
    ("-0.0123456", "-0.123e-1"),
    ("0.99999", "0.999e0"),  # truncated, not rounded to 0.100e1
])
def test_format_sci_examples(value, text):
    ctx = PrecisionContext(50)
    assert format_sci(ctx.mpf(value)) == text


def test_format_sci_rounding_mode():
    ctx = PrecisionContext(50)
    assert format_sci(ctx.mpf("0.99999"), truncate=False) == "0.100e1"
    assert format_sci(ctx.mpf("0.6596"), truncate=False) == "0.660e0"
    assert format_sci(ctx.mpf("0.6596")) == "0.659e0"
    assert format_sci(0) == "0"


def test_format_sci_huge_exponents():
    ctx = PrecisionContext(7000)
    assert format_sci(ctx.mpf("2.76e-5112")) == "0.276e-5111"


@given(st.integers(1, 9), st.integers(0, 999), st.integers(-9000, 9000), st.booleans())
def test_format_parse_round_trip(lead, rest, exp, neg):
    digits = f"{lead}{rest:03d}"[:3]
    ctx = PrecisionContext(30)
    x = ctx.mpf(f"{'-' if neg else ''}0.{digits}5e{exp}")
    sign, mant, e = parse_sci(format_sci(x))
    assert (sign, mant, e) == ((-1 if neg else 1), digits, exp)


def test_parse_rejects_garbage():
    for bad in ("1.5e3", "abc", "0.12x"):
        with pytest.raises(ValueError):
            parse_sci(bad)


def test_decompose():
    assert decompose(mpmath.mpf("123.45"), 5) == (1, "12345", 3)
    assert decompose(mpmath.mpf("-0.00123"), 3) == (-1, "123", -2)


def test_sig_digit_agreement():
    ctx = PrecisionContext(30)
    assert sig_digit_agreement("1.2345", "1.2399", ctx) == 3
    assert sig_digit_agreement("1.2345", "-1.2345", ctx) == 0
    assert sig_digit_agreement("1.0", "10.0", ctx) == 0
    assert sig_digit_agreement("0", "1", ctx) == 0
