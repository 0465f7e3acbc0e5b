from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rigidmetric.rational import common_denominator, parse_grid, parse_rat, render_rat


@pytest.mark.parametrize(
    "text, value",
    [("1/2", Fraction(1, 2)), ("3", Fraction(3)), ("0", Fraction(0)), ("7/1", Fraction(7)), (" 2/3 ", Fraction(2, 3))],
)
def test_parse(text, value):
    assert parse_rat(text) == value


@pytest.mark.parametrize("text", ["4/2", "-1/2", "1/0", "a", "1.5", "", "1/2/3", "+1"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_rat(text)


def test_parse_rejects_bool():
    with pytest.raises(ValueError):
        parse_rat(True)


@given(st.fractions(min_value=0, max_denominator=10**6))
def test_round_trip(r):
    assert parse_rat(render_rat(r)) == r


def test_grid():
    assert parse_grid("1, 1/2,1") == (Fraction(1, 2), Fraction(1))
    with pytest.raises(ValueError):
        parse_grid("")
    with pytest.raises(ValueError):
        parse_grid("0,1")


def test_common_denominator():
    assert common_denominator([Fraction(1, 2), Fraction(1, 3), Fraction(2)]) == 6
    assert common_denominator([]) == 1
