"""Exactness of the Q(sqrt(2)) scalar field."""

from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jameslab.scalars import (
    SQRT2_LOWER,
    SQRT2_UPPER,
    Root2Scalar,
    ceil_inverse,
    ceil_rational,
    ceil_sqrt_rational,
    fmt_rational,
    parse_rational,
)

getcontext().prec = 80
_DEC_SQRT2 = Decimal(2).sqrt()

rationals = st.fractions(
    min_value=Fraction(-10), max_value=Fraction(10), max_denominator=40
)


def _decimal_value(x: Root2Scalar) -> Decimal:
    return (
        Decimal(x.a.numerator) / Decimal(x.a.denominator)
        + Decimal(x.b.numerator) / Decimal(x.b.denominator) * _DEC_SQRT2
    )


def test_sqrt2_bounds_bracket():
    assert SQRT2_LOWER * SQRT2_LOWER < 2 < SQRT2_UPPER * SQRT2_UPPER
    assert SQRT2_UPPER - SQRT2_LOWER == Fraction(1, 10**40)


def test_known_products():
    one_plus = Root2Scalar(1, 1)
    one_minus = Root2Scalar(1, -1)
    assert one_plus * one_minus == Root2Scalar(-1, 0)
    assert Root2Scalar(0, 1) * Root2Scalar(0, 1) == Root2Scalar(2, 0)


def test_sign_examples():
    assert Root2Scalar(0, 0).sign() == 0
    assert Root2Scalar(3, -2).sign() == 1  # 2*sqrt(2) < 3
    assert Root2Scalar(-3, 2).sign() == -1
    assert Root2Scalar(Fraction(7, 5), -1).sign() == -1  # 7/5 < sqrt(2)
    assert Root2Scalar(Fraction(3, 2), -1).sign() == 1  # 3/2 > sqrt(2)
    assert Root2Scalar(Fraction(-17, 12), 1).sign() == -1  # 17/12 > sqrt(2)


@given(rationals, rationals)
def test_sign_matches_decimal(a, b):
    # with denominators <= 40 the value is either 0 or far above Decimal noise
    x = Root2Scalar(a, b)
    dec = _decimal_value(x)
    if a == 0 and b == 0:
        assert x.sign() == 0
    else:
        assert x.sign() == (1 if dec > 0 else -1)


@given(rationals, rationals, rationals, rationals)
def test_field_arithmetic_matches_decimal(a, b, c, d):
    x = Root2Scalar(a, b)
    y = Root2Scalar(c, d)
    for op in ("add", "sub", "mul"):
        z = {"add": x + y, "sub": x - y, "mul": x * y}[op]
        expect = {
            "add": _decimal_value(x) + _decimal_value(y),
            "sub": _decimal_value(x) - _decimal_value(y),
            "mul": _decimal_value(x) * _decimal_value(y),
        }[op]
        assert abs(_decimal_value(z) - expect) < Decimal("1e-60")


@given(rationals, rationals, rationals, rationals)
def test_comparison_total_order(a, b, c, d):
    x = Root2Scalar(a, b)
    y = Root2Scalar(c, d)
    assert (x < y) + (x == y) + (y < x) == 1


def test_abs_and_square():
    x = Root2Scalar(1, -1)  # negative value
    assert x.sign() == -1
    assert abs(x) == Root2Scalar(-1, 1)
    assert x.square() == Root2Scalar(3, -2)


def test_rational_accessors():
    assert Root2Scalar(Fraction(3, 4), 0).rational() == Fraction(3, 4)
    with pytest.raises(ValueError):
        Root2Scalar(1, 1).rational()


@given(rationals, rationals)
def test_rational_bounds_bracket_value(a, b):
    x = Root2Scalar(a, b)
    lo = x.rational_lower_bound()
    hi = x.rational_upper_bound()
    assert lo <= hi
    dec = _decimal_value(x)
    assert Decimal(lo.numerator) / Decimal(lo.denominator) <= dec + Decimal("1e-39")
    assert dec - Decimal("1e-39") <= Decimal(hi.numerator) / Decimal(hi.denominator)
    if b == 0:
        assert lo == hi == a


def test_scalar_coercion():
    assert Root2Scalar(1, 1) + 1 == Root2Scalar(2, 1)
    assert Fraction(1, 2) * Root2Scalar(2, 4) == Root2Scalar(1, 2)
    assert 3 - Root2Scalar(1, 0) == Root2Scalar(2, 0)


def test_serialization_roundtrip():
    x = Root2Scalar(Fraction(-3, 7), Fraction(5, 2))
    assert Root2Scalar.from_pair(x.to_pair()) == x
    assert x.to_pair() == ["-3/7", "5/2"]


def test_rational_helpers():
    assert fmt_rational(Fraction(3, 4)) == "3/4"
    assert parse_rational("3/4") == Fraction(3, 4)
    assert ceil_rational(Fraction(7, 2)) == 4
    assert ceil_rational(Fraction(-7, 2)) == -3
    assert ceil_rational(Fraction(4)) == 4
    assert ceil_inverse(Fraction(1, 10)) == 10
    assert ceil_inverse(Fraction(3, 10)) == 4
    assert ceil_sqrt_rational(Fraction(9)) == 3
    assert ceil_sqrt_rational(Fraction(10)) == 4
    assert ceil_sqrt_rational(Fraction(1, 2)) == 1
    assert ceil_sqrt_rational(Fraction(0)) == 0


@given(st.fractions(min_value=Fraction(0), max_value=Fraction(10**6), max_denominator=1000))
def test_ceil_sqrt_is_least(x):
    t = ceil_sqrt_rational(x)
    assert t * t >= x
    if t > 0:
        assert (t - 1) * (t - 1) < x
