from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockforge.scalars import EXACT, FLOAT, GaussianRational, ScalarModeError, exact, mode_of, parse_pair, to_mode

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100)
gaussians = st.builds(exact, rationals, rationals)


def test_decimal_and_fraction_strings_parse_exactly():
    assert parse_pair(["0.1", "-3/4"]) == exact(Fraction(1, 10), Fraction(-3, 4))
    assert parse_pair(["2", "0"]) == 2


def test_float_entries_are_rejected():
    with pytest.raises(ScalarModeError):
        parse_pair([0.5, "0"])
    with pytest.raises(ScalarModeError):
        exact(1) + 0.5


def test_string_form():
    assert str(exact(Fraction(9, 16))) == "9/16"
    assert str(exact(1, -2)) == "1-2i"
    assert str(exact(0, 1)) == "1i"


def test_modes():
    assert mode_of(exact(1)) == EXACT
    assert mode_of(1.0) == FLOAT
    assert to_mode(exact(1, 1), FLOAT) == 1 + 1j
    assert exact(3) != 3.0


def test_division_by_exact_zero():
    with pytest.raises(ZeroDivisionError):
        exact(1) / exact(0)


@given(gaussians, gaussians, gaussians)
def test_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if b:
        assert (a / b) * b == a


@given(gaussians)
def test_abs2_is_product_with_conjugate(a):
    assert a * a.conjugate() == exact(a.abs2())
    assert isinstance(a.real, Fraction) and isinstance(a.imag, Fraction)
    assert GaussianRational(a.real, a.imag) == a
