import itertools
import random
from math import comb

import pytest

from cosmashkit.cosmash import (FDAlgebra, FreeFactor, ca_coproduct, ca_cosmash_tensor_check,
                                ca_ternary_kernel_dimension, closure_check, comparison_phi, comparison_psi,
                                cosmash, cross_effect_kernel, higgins_commutator,
                                independence_check, random_ca_algebra, random_instance)
from cosmashkit.exactarith import GF, QQ
from cosmashkit.magma import parse_expression
from cosmashkit.variety import builtin_variety, is_identity


def catalan(n):
    return comb(2 * n, n) // (n + 1)


MAG = builtin_variety("Mag")
CA = builtin_variety("CA")


def test_mag_binary_cosmash_degree_two():
    r = cosmash(MAG, ["a", "b"], 2)
    assert {str(m) for v in r.basis for m in v} == {"ab", "ba"}
    assert r.dimension_by_weight().get(2) == 2


@pytest.mark.parametrize("k", [2, 3])
def test_mag_cosmash_dimensions_inclusion_exclusion(k):
    # words using every one of k letters, counted by inclusion-exclusion
    r = cosmash(MAG, [chr(97 + i) for i in range(k)], 4)
    got = r.dimension_by_weight()
    for d in range(1, 5):
        surj = sum((-1) ** j * comb(k, j) * (k - j) ** d for j in range(k + 1))
        assert got.get(d, 0) == catalan(d - 1) * surj


def test_ca_binary_cosmash_dimensions():
    got = cosmash(CA, ["a", "b"], 5).dimension_by_weight()
    assert {d: got.get(d, 0) for d in range(1, 6)} == {d: max(d - 1, 0) for d in range(1, 6)}


def test_nil2_ternary_cosmash_vanishes():
    r = cosmash(builtin_variety("Nil2"), ["a", "b", "c"], 4)
    assert r.dimension == 0


def test_cosmash_elements_verify():
    r = cosmash(MAG, ["a", "b", "c"], 3)
    assert r.verify()
    assert r.contains(parse_expression("(ab)c - (ba)c"))
    assert not r.contains(parse_expression("(ab)a"))


@pytest.mark.parametrize("name", ["Mag", "CA", "Anti", "Perm", "Nil2"])
def test_ternary_cosmash_equals_cross_effect(name):
    V = builtin_variety(name)
    ce = cross_effect_kernel(V, ["a"], ["b"], ["c"], 4)
    got = cosmash(V, ["a", "b", "c"], 4).dimension_by_weight()
    assert {w: ce.get(w, 0) for w in range(1, 5)} == {w: got.get(w, 0) for w in range(1, 5)}


@pytest.mark.parametrize("name", ["Mag", "CA", "Perm"])
def test_factor_permutation_symmetry(name):
    V = builtin_variety(name)
    factors = [FreeFactor(("a",)), FreeFactor(("b1", "b2")), FreeFactor(("c",))]
    base = cosmash(V, factors, 4).dimension_by_weight()
    for perm in itertools.permutations(factors):
        assert cosmash(V, list(perm), 4).dimension_by_weight() == base


def test_independence_mag():
    assert independence_check(MAG, ["(ab)c", "(ba)c", "c(ab)", "c(ba)"], ["a", "b", "c"]).independent
    pairs = ["(ab)(cd)", "(ba)(cd)", "(ab)(dc)", "(ba)(dc)", "(cd)(ab)", "(cd)(ba)", "(dc)(ab)", "(dc)(ba)"]
    assert independence_check(MAG, pairs, ["a", "b", "c", "d"]).independent


def test_dependence_witness_in_ca():
    res = independence_check(CA, ["(ab)c", "(ba)c"], ["a", "b", "c"])
    assert not res.independent and res.witness


def test_phi_in_mag():
    rep = comparison_phi(MAG, ["a"], ["b"], ["c"], 3)
    assert rep.injective(3) and not rep.surjective(3)
    assert not rep.in_image("(ab)c") and rep.in_image("a(bc)")


def test_phi_non_injective_single_identity():
    V = builtin_variety("Mag").extend("x(yz) - x(zy)", name="V")
    rep = comparison_phi(V, ["a"], ["b"], ["c"], 3)
    assert not rep.injective(3)
    (src, expanded), *_ = rep.kernel_witnesses[3]
    assert expanded == parse_expression("a(bc) - a(cb)") or expanded == -parse_expression("a(bc) - a(cb)")
    # the witness is a consequence of the identity but not zero in Mag
    assert is_identity(V, expanded) and not is_identity(MAG, expanded)


def test_psi_nil2_not_injective():
    rep = comparison_psi(builtin_variety("Nil2"), ["a"], ["b"], ["c"], 3)
    assert not rep.injective(3)


@pytest.mark.parametrize("d", [3, 4])
def test_ca_comparisons_bijective(d):
    assert comparison_phi(CA, ["a"], ["b"], ["c"], d).bijective(d)
    assert comparison_psi(CA, ["a"], ["b"], ["c"], d).bijective(d)


def test_fd_algebra_json_round_trip():
    A = random_ca_algebra(3, GF(3), random.Random(1))
    assert FDAlgebra.from_json(A.to_json()).to_json() == A.to_json()
    assert A.is_commutative() and A.is_associative() and A.is_ca()


def test_ca_tensor_check_random():
    rng = random.Random(5)
    for _ in range(5):
        A = random_ca_algebra(rng.randint(1, 3), QQ, rng, "e")
        B = random_ca_algebra(rng.randint(1, 3), QQ, rng, "f")
        assert ca_cosmash_tensor_check(A, B)


def test_ca_coproduct_dimension():
    rng = random.Random(2)
    A, B = random_ca_algebra(2, QQ, rng, "e"), random_ca_algebra(3, QQ, rng, "f")
    C = ca_coproduct(A, B)
    assert len(C.labels) == 2 + 3 + 6
    assert C.is_ca()


def test_ca_ternary_kernel():
    rng = random.Random(9)
    A, B, C = (random_ca_algebra(2, QQ, rng, p) for p in "efg")
    assert ca_ternary_kernel_dimension(A, B, C) == (8, 8)


@pytest.mark.parametrize("phi, kind, p", [("xx", "square_zero", 2), ("x(xx)", "nil", 3),
                                          ("xx", "nil", 2), ("x - xx", "bool", 2)])
def test_closure_checks(phi, kind, p):
    rng = random.Random(p)
    F = GF(p)
    for _ in range(3):
        A = random_instance(kind, rng.randint(1, 3), F, rng, "e")
        B = random_instance(kind, rng.randint(1, 3), F, rng, "f")
        assert closure_check(phi, A, B, F)


def test_closure_check_can_fail():
    # x^2 = 0 is not preserved over Q: (a, b) squares to 2ab in the coproduct
    F = QQ
    zero_sq = FDAlgebra(["e"], {}, F)
    assert not closure_check("xx", zero_sq, FDAlgebra(["f"], {}, F), F)


def test_higgins_commutator():
    # e1 e2 = e3, all other products zero
    A = FDAlgebra(["e1", "e2", "e3"], {(0, 1): {2: 1}, (1, 0): {2: 1}}, QQ)
    res = higgins_commutator(A, [[1, 0, 0]], [[0, 1, 0]])
    assert res.exact
    assert res.basis == [[0, 0, 1]]
    zero = higgins_commutator(A, [[1, 0, 0]], [[0, 0, 1]])
    assert zero.basis == []


def test_higgins_rejects_non_subalgebra():
    A = FDAlgebra(["e1", "e2"], {(0, 0): {1: 1}}, QQ)
    with pytest.raises(ValueError):
        higgins_commutator(A, [[1, 0]], [[0, 1]])


def test_ca_coproduct_of_unital_lines():
    line = FDAlgebra(["e"], {(0, 0): {0: 1}}, QQ)
    C = ca_coproduct(line, FDAlgebra(["f"], {(0, 0): {0: 1}}, QQ))
    assert len(C.labels) == 3 and C.is_ca()
    # e e = e, f f = f, and every other product of basis elements is e*f
    table = {(i, j): C.multiply(C.basis_vector(i), C.basis_vector(j)) for i in range(3) for j in range(3)}
    assert table.pop((0, 0)) == [1, 0, 0] and table.pop((2, 2)) == [0, 0, 1]
    assert all(v == [0, 1, 0] for v in table.values())


def test_quaternary_mag_injective_and_anti_witness():
    from cosmashkit.cosmash import comparison_quaternary
    rep = comparison_quaternary(MAG, ["a"], ["b"], ["c"], ["d"], 4)
    assert rep.injective(4)
    anti = comparison_quaternary(builtin_variety("Anti"), ["a"], ["b"], ["c"], ["d"], 4)
    assert not anti.injective(4)
    assert any(e == parse_expression("(ab)(cd)") for _, e in anti.kernel_witnesses[4])
