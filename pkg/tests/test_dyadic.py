from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from discrepancy_lab.dyadic import (DigitString, Dyadic, digit, digital_shift, phi,
                                    reverse_bits, reverse_digits)
from discrepancy_lab.errors import DomainError, ParseError


def D(text: str) -> Dyadic:
    return Dyadic.coerce(Fraction(text))


def n_digit(n: int):
    return st.integers(0, (1 << n) - 1).map(lambda a: Dyadic(a, n))


def test_digits_of_five_eighths():
    assert [digit(D("5/8"), i) for i in (1, 2, 3)] == [1, 0, 1]
    assert all(digit(Dyadic(0), i) == 0 for i in range(1, 10))
    assert digit(D("1/2"), 1) == 1
    assert all(digit(D("1/2"), k) == 0 for k in range(2, 8))


def test_reverse_digits_examples():
    assert reverse_digits(D("6/8"), 3) == D("3/8")
    assert reverse_digits(D("5/8"), 3) == D("5/8")


def test_digital_shift_examples():
    assert digital_shift(D("5/8"), DigitString.from_str("011")) == D("6/8")
    assert digital_shift(D("5/8"), DigitString.zeros(3)) == D("5/8")


def test_phi_values():
    assert phi(D("1/4")) == D("1/4")
    assert phi(D("3/4")) == D("1/4")
    assert phi(Dyadic(0)) == 0
    assert phi(D("1/2")) == D("1/2")
    assert phi(D("3/16")) + phi(D("11/16")) == D("1/2")


def test_canonical_form_and_parse():
    assert Dyadic(6, 3) == D("3/4")
    assert str(Dyadic(6, 3)) == "3/2^2"
    assert Dyadic.parse("3/2^2") == D("3/4")
    with pytest.raises(ParseError):
        Dyadic.parse("6/2^3")
    with pytest.raises(ParseError):
        Dyadic.parse("three quarters")


def test_non_dyadic_rejected():
    with pytest.raises(DomainError):
        Dyadic.coerce(Fraction(1, 3))


def test_digit_string_constructors():
    assert str(DigitString.balanced(5)).count("1") == 2
    assert DigitString.random(8, 3) == DigitString.random(8, 3)
    with pytest.raises(DomainError):
        DigitString.zeros(0)


@given(st.integers(-10**6, 10**6), st.integers(0, 30), st.integers(-10**6, 10**6), st.integers(0, 30))
def test_arithmetic_matches_fractions(a, e, b, f):
    x, y = Dyadic(a, e), Dyadic(b, f)
    fx, fy = Fraction(a, 1 << e), Fraction(b, 1 << f)
    assert (x + y).as_fraction() == fx + fy
    assert (x - y).as_fraction() == fx - fy
    assert (x * y).as_fraction() == fx * fy
    assert (x < y) == (fx < fy)
    assert Dyadic.parse(str(x)) == x


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), n_digit(n), st.integers(0, (1 << n) - 1))))
def test_shift_and_reverse_are_involutions(case):
    n, x, s = case
    sigma = DigitString.from_int(s, n)
    assert reverse_digits(reverse_digits(x, n), n) == x
    assert digital_shift(digital_shift(x, sigma), sigma) == x
    shifted = digital_shift(x, sigma)
    for i in range(1, n + 1):
        assert digit(shifted, i) == digit(x, i) ^ int(str(sigma)[i - 1])


@given(st.integers(1, 20).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1))))
def test_reverse_bits_involution(case):
    n, v = case
    assert reverse_bits(reverse_bits(v, n), n) == v


@given(n_digit(10))
def test_phi_plus_half_identity(x):
    other = x + D("1/2") if x < D("1/2") else x - D("1/2")
    assert phi(x) + phi(other) == D("1/2")
