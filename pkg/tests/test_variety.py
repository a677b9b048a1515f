from math import comb

import pytest

from cosmashkit.exactarith import GF, QQ
from cosmashkit.magma import parse_expression
from cosmashkit.variety import (BUILTIN_NAMES, Degree2Class, Empty, EnumerationLimit, VarietyPresentation,
                                builtin_variety, classify_degree2, is_identity, lambda_rules, load_variety,
                                multilinearise, parse_variety, solve_lambda_rules, t_ideal_component,
                                truncated_free_algebra)


def dims(V, gens, d):
    A = truncated_free_algebra(V, gens, d)
    return {w: len(ms) for w, ms in A.basis_by_weight().items()}


def catalan(n):
    return comb(2 * n, n) // (n + 1)


def witt(n, d):
    # dimension of the degree-d part of the free Lie algebra on n generators
    def mobius(k):
        res, p = 1, 2
        while p * p <= k:
            if k % p == 0:
                k //= p
                if k % p == 0:
                    return 0
                res = -res
            p += 1
        return -res if k > 1 else res
    return sum(mobius(d // k) * n ** k for k in range(1, d + 1) if d % k == 0) // d


def test_free_magma_dimensions():
    got = dims(builtin_variety("Mag"), ["a", "b"], 4)
    assert got == {d: catalan(d - 1) * 2 ** d for d in range(1, 5)}


def test_free_associative_dimensions():
    got = dims(builtin_variety("Assoc"), ["a", "b"], 4)
    assert got == {d: 2 ** d for d in range(1, 5)}


def test_free_ca_dimensions():
    got = dims(builtin_variety("CA"), ["a", "b", "c"], 4)
    assert got == {d: comb(d + 2, 2) for d in range(1, 5)}


def test_free_lie_dimensions():
    got = dims(builtin_variety("Lie"), ["a", "b"], 5)
    assert {d: got.get(d, 0) for d in range(1, 6)} == {d: witt(2, d) for d in range(1, 6)}


def test_one_generator_bases():
    assert [str(m) for ms in truncated_free_algebra(builtin_variety("Mag"), ["a"], 3).basis_by_weight().values()
            for m in ms] == ["a", "aa", "a(aa)", "(aa)a"]
    assert truncated_free_algebra(builtin_variety("CA"), ["a"], 3).dimension == 3
    assert truncated_free_algebra(builtin_variety("Ab"), ["a", "b"], 3).dimension == 2


def test_nil2_truncation():
    assert dims(builtin_variety("Nil2"), ["a", "b"], 4).get(3, 0) == 0


def test_multilinearise_square():
    out = multilinearise("xx")
    assert len(out) == 1
    assert out[0] == parse_expression("yz + zy")


def test_multilinearise_keeps_linear_input():
    assert multilinearise("(xy)z - x(yz)")[0] == parse_expression("(xy)z - x(yz)")


def test_multilinearise_cube_has_six_terms():
    (p,) = multilinearise("x(xx)")
    assert len(p.terms) == 6


def test_multilinearise_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        multilinearise("xx + x")


def test_is_identity_examples():
    assert is_identity(builtin_variety("CA"), "(xy)z - (zx)y")
    assert not is_identity(builtin_variety("Mag"), "xy - yx")
    assert is_identity(builtin_variety("Anti"), "(xy)(zt)")
    assert not is_identity(builtin_variety("Assoc"), "xy - yx")
    assert is_identity(builtin_variety("Lie"), "xy + yx")


def test_anti_degree_three_survives():
    assert not is_identity(builtin_variety("Anti"), "x(yz)")


def test_t_ideal_component_codimension():
    V = builtin_variety("CA")
    rows = t_ideal_component(V, ["a", "b", "c"], multidegree={"a": 1, "b": 1, "c": 1})
    from cosmashkit.linalg import SparseEchelon
    E = SparseEchelon(QQ)
    E.extend(dict(r.terms) for r in rows)
    # 12 multilinear degree-3 monomials, one survives
    assert 12 - len(E) == 1


@pytest.mark.parametrize("name, expected", [
    ("CA", Degree2Class.COMMUTATIVE), ("Mag", Degree2Class.NONE), ("Ab", Degree2Class.ABELIAN),
    ("Anti", Degree2Class.ANTICOMMUTATIVE), ("Lie", Degree2Class.ANTICOMMUTATIVE),
    ("Triv", Degree2Class.TRIVIAL), ("Assoc", Degree2Class.NONE), ("Perm", Degree2Class.NONE),
])
def test_classify_degree2(name, expected):
    assert classify_degree2(builtin_variety(name)) is expected


def test_idempotent_variety_collapses_over_q():
    # x = xx gives 2x = 4x, hence x = 0 in characteristic 0
    assert classify_degree2(builtin_variety("Bool")) is Degree2Class.TRIVIAL
    assert classify_degree2(builtin_variety("Bool", GF(2))) is Degree2Class.COMMUTATIVE


def test_classify_in_characteristic_two():
    # anticommutative and commutative coincide
    assert classify_degree2(builtin_variety("Anti", GF(2))) is Degree2Class.COMMUTATIVE


@pytest.mark.parametrize("name, assignment", [
    ("CA", {"a1": 1, "b1": 1, "c1": 1, "d1": 1}),
    ("Perm", {"a1": 1, "b3": 1, "c4": 1, "d4": 1}),
    ("Cyclic", {"c1": 1, "d2": 1, "a3": 1, "b4": 1}),
])
def test_lambda_rules_solvable(name, assignment):
    V = builtin_variety(name)
    sol = solve_lambda_rules(V)
    assert sol is not Empty and sol.contains(assignment)
    # independent check: the rules themselves are identities of V
    for rule in lambda_rules(assignment):
        assert is_identity(V, rule)


@pytest.mark.parametrize("name", ["Lie", "Assoc"])
def test_lambda_rules_unsolvable(name):
    assert solve_lambda_rules(builtin_variety(name)) is Empty


def test_lambda_solution_rejects_wrong_assignment():
    sol = solve_lambda_rules(builtin_variety("Cyclic"))
    assert not sol.contains({"a1": 1, "b1": 1, "c1": 1, "d1": 1})


def test_parse_and_load(tmp_path):
    text = "variety Mine over fp:3\n# comment\nxy - yx\n(xy)z\n"
    V = parse_variety(text)
    assert V.name == "Mine" and V.field == GF(3) and len(V.identities) == 2
    f = tmp_path / "v.txt"
    f.write_text(V.to_text())
    W = load_variety(str(f))
    assert W.identities == V.identities


def test_builtins_load():
    for name in BUILTIN_NAMES:
        V = builtin_variety(name, GF(3))
        assert isinstance(V, VarietyPresentation)
    with pytest.raises(KeyError):
        builtin_variety("NoSuch")


def test_cap_exponent():
    V = builtin_variety("CAp", GF(3))
    assert is_identity(V, "x(xx)")
    assert not is_identity(V, "xx")


def test_enumeration_limit():
    with pytest.raises(EnumerationLimit):
        truncated_free_algebra(builtin_variety("CA"), ["a", "b", "c", "d"], 6, limit=50)
