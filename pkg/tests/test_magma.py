from math import comb

import pytest
from hypothesis import given, strategies as st

from cosmashkit.exactarith import GF, QQ
from cosmashkit.magma import (Leaf, NAPolynomial, Node, compare_monomials, is_multilinear, multidegree,
                              parse_expression, parse_monomial, print_expression, words)


def catalan(n):
    return comb(2 * n, n) // (n + 1)


@pytest.mark.parametrize("n", range(1, 6))
def test_word_counts_are_catalan_times_letters(n):
    # binary bracketings of n leaves, each leaf one of 2 letters
    assert len(words(["a", "b"], n)[n]) == catalan(n - 1) * 2 ** n


def test_weighted_words():
    w = words({"a": 1, "k": 2}, 3)
    assert [str(m) for m in w[2]] == ["k", "aa"]
    assert {str(m) for m in w[3]} == {"ak", "ka", "a(aa)", "(aa)a"}


def test_weight_must_be_positive():
    with pytest.raises(ValueError):
        words({"a": 0}, 2)


@pytest.mark.parametrize("text", ["a", "ab", "(ab)c", "a(bc)", "((ab)c)d", "(ab)(cd)", "x1(x2x3)"])
def test_monomial_round_trip(text):
    assert str(parse_monomial(text)) == text


def test_parse_structure():
    m = parse_monomial("(ab)c")
    assert m == Node(Node(Leaf("a"), Leaf("b")), Leaf("c"))
    assert multidegree(parse_monomial("(ab)a")) == {"a": 2, "b": 1}


def test_expression_parse_and_print():
    p = parse_expression("2(ab)c - a(bc) + 1/2 x(yz)")
    assert print_expression(p) == "2*(ab)c + 1/2*x(yz) - a(bc)"
    assert print_expression(parse_expression("0")) == "0"
    assert print_expression(parse_expression("ab - ab")) == "0"


def test_expression_over_finite_field():
    p = parse_expression("3ab + 2ab", GF(5))
    assert not p


def test_multilinear():
    assert is_multilinear(parse_expression("(ab)c - (ba)c"))
    assert not is_multilinear(parse_expression("(aa)b"))


def test_substitute():
    p = parse_expression("xy")
    q = p.substitute({"x": parse_expression("a + b"), "y": parse_expression("c")})
    assert q == parse_expression("ac + bc")


def test_homogeneous_components():
    p = parse_expression("(ab)c - a(bc) + xy")
    comps = p.homogeneous_components()
    assert len(comps) == 2
    assert not p.is_homogeneous()


def test_ordering_is_total_and_degree_first():
    ms = words(["a", "b"], 3)
    flat = [m for w in (1, 2, 3) for m in ms[w]]
    for x, y in zip(flat, flat[1:]):
        assert compare_monomials(x, y) == -1
        assert x.degree <= y.degree


monos = st.sampled_from([m for ms in words(["a", "b", "c"], 3).values() for m in ms])
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
polys = st.lists(st.tuples(monos, coeffs), max_size=5).map(
    lambda ts: sum((NAPolynomial.monomial(m, c, QQ) for m, c in ts), NAPolynomial.zero(QQ)))


@given(polys, polys)
def test_addition_commutes(p, q):
    assert p + q == q + p


@given(polys)
def test_print_parse_round_trip(p):
    assert parse_expression(print_expression(p)) == p
