from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cosmashkit.eqsys import certificate_strings
from cosmashkit.exactarith import (GF, QQ, ZZ, ParseError, field_invert, format_decimal, gcd, is_prime, lcm,
                                   parse_decimal, parse_field, parse_rational)


def test_gcd_small_cases():
    assert gcd(12, 8) == 4
    assert gcd(0, 5) == 5
    assert gcd(0, 0) == 0


def test_gcd_of_published_integers():
    m, mp = (parse_decimal(s) for s in certificate_strings())
    assert gcd(m, mp) == 2


@pytest.mark.parametrize("text,value", [("0", 0), ("-17", -17), ("007", 7)])
def test_parse_decimal(text, value):
    assert parse_decimal(text) == value


@pytest.mark.parametrize("bad", ["", "-", "+5", "1.5", "12a", " "])
def test_parse_decimal_rejects(bad):
    with pytest.raises(ParseError):
        parse_decimal(bad)


def test_long_decimal_round_trip():
    for s in certificate_strings():
        assert format_decimal(parse_decimal(s)) == s
        assert int(s) == parse_decimal(s)


def test_field_invert_examples():
    assert field_invert(GF(5).element(2)).residue == 3
    assert field_invert(GF(7).element(1)).residue == 1
    # oracle: exhaustive search
    assert [x for x in range(7) if 3 * x % 7 == 1] == [field_invert(GF(7).element(3)).residue]


def test_field_invert_zero_fails():
    with pytest.raises(ZeroDivisionError):
        field_invert(GF(5).element(0))


def test_parse_field_and_primality():
    assert parse_field("q") == QQ
    assert parse_field("z") == ZZ
    assert parse_field("fp:7") == GF(7)
    with pytest.raises((ParseError, ValueError)):
        parse_field("fp:8")
    assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]


def test_rationals_are_reduced():
    assert parse_rational("6/4") == Fraction(3, 2)
    assert QQ(Fraction(4, 2)) == 2 and isinstance(QQ(Fraction(4, 2)), int)


ints = st.integers(min_value=-10**30, max_value=10**30)
rats = st.fractions(max_denominator=10**6)


@given(ints, ints)
def test_gcd_lcm_laws(a, b):
    g = gcd(a, b)
    if g:
        assert a % g == 0 and b % g == 0
    assert g * lcm(a, b) == abs(a * b)


@given(rats, rats, rats)
def test_rational_ring_axioms(a, b, c):
    F = QQ
    assert F.mul(F.add(a, b), c) == F.add(F.mul(a, c), F.mul(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@given(st.sampled_from([2, 3, 5, 7, 101]), st.integers())
def test_double_inverse(p, x):
    F = GF(p)
    if F(x) == 0:
        return
    e = F.element(x)
    assert field_invert(field_invert(e)) == e
    assert F.mul(F(x), F.inv(F(x))) == 1
