import pytest

from cosmashkit.commpoly import parse_poly
from cosmashkit.exactarith import QQ
from cosmashkit.hrewrite import AtRoot, NotPresent, RuleTable, SymbolicNAPolynomial, h_compose, h_step, locate
from cosmashkit.magma import parse_monomial


def sym(pairs):
    return SymbolicNAPolynomial({parse_monomial(m): parse_poly(c) for c, m in pairs})


def test_pull_out_from_left_product():
    assert h_step("(ab)c", "b") == sym([("b1", "b(ac)"), ("b2", "b(ca)"), ("b3", "(ac)b"), ("b4", "(ca)b")])


def test_pull_out_inside_context():
    assert h_step("d(a(bc))", "b") == sym(
        [("c1", "d(b(ca))"), ("c2", "d(b(ac))"), ("c3", "d((ca)b)"), ("c4", "d((ac)b)")])


def test_already_outside_is_fixed():
    assert h_step("b(a(dc))", "b") == SymbolicNAPolynomial.monomial("b(a(dc))")
    assert locate(parse_monomial("b(a(dc))"), parse_monomial("b")) is AtRoot


def test_absent_is_fixed():
    assert locate(parse_monomial("ab"), parse_monomial("c")) is NotPresent
    assert h_step("ab", "c") == SymbolicNAPolynomial.monomial("ab")


def test_two_step_composition():
    assert h_compose("(ab)c", ["a", "b"]) == sym([
        ("a2*a3 + a4*b2 + a1*c2 + a2*d2", "b(ac)"),
        ("a1*a3 + a4*b1 + a1*c1 + a2*d1", "b(ca)"),
        ("a3*a4 + a4*b4 + a1*c4 + a2*d4", "(ac)b"),
        ("a3^2 + a4*b3 + a1*c3 + a2*d3", "(ca)b"),
    ])


def test_composite_submonomial():
    out = h_step("((ab)c)d", "ab")
    assert out == sym([("a1", "(ab)(cd)"), ("a2", "(ab)(dc)"), ("a3", "(cd)(ab)"), ("a4", "(dc)(ab)")])


def test_swap_delta_rule_table():
    plain = h_step("c(ab)", "b")
    swapped = h_step("c(ab)", "b", RuleTable(swap_delta=True))
    assert {str(c) for c in plain.terms.values()} == {"d1", "d2", "d3", "d4"}
    assert plain.coefficient("(ca)b") == swapped.coefficient("(ac)b")
    assert plain.coefficient("(ac)b") == swapped.coefficient("(ca)b")


def test_non_multilinear_rejected():
    with pytest.raises(ValueError):
        h_step("(aa)b", "a")


def test_specialize():
    p = h_step("(ab)c", "a").specialize({"a1": 1, "a2": 0, "a3": 0, "a4": 0}, QQ)
    assert str(p.monomials()[0]) == "a(bc)"
