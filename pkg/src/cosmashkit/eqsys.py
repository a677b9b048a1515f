"""The 96-equation system in the rule coefficients.

Each recipe fixes a monomial p and two chains of pull-out operators; the
difference of the two results must vanish, and since its support lies in an
independent family of monomials every coefficient gives one equation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from .commpoly import (CommPolynomial, DEGREVLEX, RULE_VARIABLES, Indeterminate, delta,
                       parse_poly, var)
from .exactarith import QQ, ZZ, Ring, parse_decimal
from .hrewrite import RuleTable, SymbolicNAPolynomial, h_compose
from .magma import Leaf, Monomial, Node, parse_monomial

__all__ = [
    "Recipe",
    "EquationSystem",
    "FixtureReport",
    "load_recipes",
    "support_family",
    "generate_block",
    "generate_system",
    "appendix_system",
    "check_against_fixture",
    "evaluate_assignment",
    "swap_delta",
    "verify_certificate",
    "coherence_coefficients",
    "certificate_integers",
    "named_assignment",
    "ASSIGNMENTS",
    "toy_certificates",
    "certificate_strings",
]


@dataclass(frozen=True)
class Recipe:
    label: str
    p: Monomial
    lhs: tuple[Monomial, ...]
    rhs: tuple[Monomial, ...]  # empty: subtract p itself
    first: int = 0

    @property
    def variables(self) -> list[str]:
        return sorted(set(self.p.leaves()))

    @property
    def degree(self) -> int:
        return self.p.degree

    def describe(self) -> str:
        def chain(xs):
            s = "p"
            for x in xs:
                s = f"H^{x}({s})"
            return s
        return f"p = {self.p}: {chain(self.lhs)} - {chain(self.rhs)}"


def _data(name: str):
    return json.loads(resources.files("cosmashkit.data").joinpath(name).read_text())


@lru_cache(maxsize=None)
def load_recipes() -> tuple[Recipe, ...]:
    out = []
    for r in _data("recipes.json")["recipes"]:
        out.append(Recipe(r["label"], parse_monomial(r["p"]),
                          tuple(parse_monomial(x) for x in r["lhs"]),
                          tuple(parse_monomial(x) for x in r["rhs"]), r["first"]))
    return tuple(out)


def support_family(recipe: Recipe) -> list[Monomial]:
    """The independent monomials the recipe's output must be supported on."""
    names = recipe.variables
    if recipe.degree == 3:
        X = recipe.lhs[-1]
        y, z = [Leaf(n) for n in names if n not in set(X.leaves())]
        return [Node(X, Node(y, z)), Node(X, Node(z, y)), Node(Node(y, z), X), Node(Node(z, y), X)]
    if recipe.degree == 4:
        pairs = []
        for X in (recipe.lhs[-1], recipe.rhs[-1] if recipe.rhs else None):
            if X is None or X.degree != 2:
                raise ValueError(f"recipe {recipe.label}: final superscripts must be pairs")
            pairs.append(sorted(X.leaves()))
        if sorted(pairs[0] + pairs[1]) != names:
            raise ValueError(f"recipe {recipe.label}: superscript pairs do not partition the variables")
        fam = []
        for P, Q in (pairs, pairs[::-1]):
            for u, v in (P, P[::-1]):
                for w, t in (Q, Q[::-1]):
                    fam.append(Node(Node(Leaf(u), Leaf(v)), Node(Leaf(w), Leaf(t))))
        return fam
    raise ValueError(f"unsupported recipe degree {recipe.degree}")


def block_polynomial(recipe: Recipe, rules: RuleTable | None = None) -> SymbolicNAPolynomial:
    rules = rules or RuleTable()
    left = h_compose(recipe.p, recipe.lhs, rules)
    right = h_compose(recipe.p, recipe.rhs, rules)
    return left - right


def generate_block(recipe: Recipe, rules: RuleTable | None = None) -> list[CommPolynomial]:
    q = block_polynomial(recipe, rules)
    fam = support_family(recipe)
    stray = q.support() - set(fam)
    if stray:
        raise AssertionError(
            f"recipe {recipe.label}: monomials outside the independent family: "
            + ", ".join(sorted(str(m) for m in stray)))
    return [q.coefficient(m) for m in fam]


@dataclass
class EquationSystem:
    equations: list[CommPolynomial]
    blocks: list[tuple[str, int, int]] = field(default_factory=list)  # label, start, stop (0-based)

    def __len__(self):
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)

    def __getitem__(self, i):
        return self.equations[i]

    def __eq__(self, other):
        return isinstance(other, EquationSystem) and self.equations == other.equations

    @property
    def indeterminates(self) -> list[Indeterminate]:
        return sorted({v for f in self.equations for v in f.indeterminates()}, key=lambda v: v.key)

    def change_ring(self, ring: Ring) -> "EquationSystem":
        return EquationSystem([f.change_ring(ring) for f in self.equations], list(self.blocks))

    def to_json(self) -> dict:
        return {
            "indeterminates": [v.name for v in RULE_VARIABLES],
            "equations": [f.to_json() for f in self.equations],
            "blocks": [{"label": b, "start": s, "stop": e} for b, s, e in self.blocks],
        }

    @classmethod
    def from_json(cls, data: Mapping, ring: Ring = ZZ) -> "EquationSystem":
        eqs = [CommPolynomial.from_json(rec, ring) for rec in data["equations"]]
        blocks = [(b["label"], b["start"], b["stop"]) for b in data.get("blocks", [])]
        return cls(eqs, blocks)


def generate_system(rules: RuleTable | None = None) -> EquationSystem:
    eqs: list[CommPolynomial] = []
    blocks = []
    for r in load_recipes():
        start = len(eqs)
        eqs.extend(generate_block(r, rules))
        blocks.append((r.label, start, len(eqs)))
    return EquationSystem(eqs, blocks)


@lru_cache(maxsize=None)
def _appendix() -> tuple[CommPolynomial, ...]:
    rows = _data("appendix_equations.json")["equations"]
    return tuple(parse_poly(r["text"], ZZ) for r in sorted(rows, key=lambda r: r["index"]))


def appendix_system() -> EquationSystem:
    """The published equations f_1 .. f_96 with their block layout."""
    blocks = [(r.label, r.first - 1, r.first - 1 + (4 if r.degree == 3 else 8)) for r in load_recipes()]
    return EquationSystem(list(_appendix()), blocks)


def _canon(f: CommPolynomial) -> str:
    # leading coefficient positive, content kept
    return f.normalize_sign(DEGREVLEX).to_text()


@dataclass
class FixtureReport:
    matched: int
    missing: list[int]        # fixture indices (1-based) without a partner
    extra: list[int]          # generated indices (1-based) without a partner
    alignment: dict[int, int]  # generated index -> fixture index (1-based)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra

    def summary(self) -> str:
        return f"{self.matched} matched, {len(self.missing)} missing, {len(self.extra)} extra"


def check_against_fixture(system: EquationSystem, fixture: EquationSystem | None = None) -> FixtureReport:
    """Multiset comparison after sign normalization, with an index alignment."""
    fixture = fixture or appendix_system()
    pool: dict[str, list[int]] = {}
    for i, f in enumerate(fixture.equations):
        pool.setdefault(_canon(f), []).append(i)
    # prefer partners inside the block with the same position range
    fixture_block = {}
    for label, s, e in fixture.blocks:
        for i in range(s, e):
            fixture_block[i] = label
    gen_block = {}
    for label, s, e in system.blocks:
        for i in range(s, e):
            gen_block[i] = label
    alignment = {}
    extra = []
    for i, f in enumerate(system.equations):
        cands = pool.get(_canon(f), [])
        if not cands:
            extra.append(i + 1)
            continue
        same = [j for j in cands if fixture_block.get(j) == gen_block.get(i)]
        j = (same or cands)[0]
        cands.remove(j)
        alignment[i + 1] = j + 1
    missing = sorted(j + 1 for js in pool.values() for j in js)
    return FixtureReport(len(alignment), missing, extra, alignment)


def _assignment_values(assignment: Mapping, ring: Ring) -> dict[Indeterminate, object]:
    vals = {}
    for k, v in assignment.items():
        vals[var(k) if isinstance(k, str) else k] = ring(v)
    return vals


def evaluate_assignment(system: EquationSystem, assignment: Mapping, ring: Ring = QQ) -> list[tuple[int, object]]:
    """1-based indices of the equations not satisfied, with their values."""
    vals = _assignment_values(assignment, ring)
    used = set().union(*(f.indeterminates() for f in system.equations)) if system.equations else set()
    absent = [v.name for v in sorted(used, key=lambda v: v.key) if v not in vals]
    if absent:
        raise KeyError(f"assignment misses indeterminates: {', '.join(absent)}")
    out = []
    for i, f in enumerate(system.equations):
        val = f.evaluate(vals, ring)
        if not ring.is_zero(val):
            out.append((i + 1, val))
    return out


_SWAP = {delta(3): delta(4), delta(4): delta(3)}


def swap_delta(system: EquationSystem) -> EquationSystem:
    return EquationSystem([f.rename(_SWAP) for f in system.equations], list(system.blocks))


def verify_certificate(system: EquationSystem | Sequence[CommPolynomial], mu: Sequence[CommPolynomial],
                       expected: int) -> bool:
    """True iff sum mu_i f_i is exactly the constant ``expected``."""
    eqs = system.equations if isinstance(system, EquationSystem) else list(system)
    if len(mu) != len(eqs):
        raise ValueError(f"{len(mu)} cofactors for {len(eqs)} equations")
    ring = eqs[0].ring if eqs else ZZ
    total = CommPolynomial.zero(ring)
    for m, f in zip(mu, eqs):
        if m:
            total = total + m * f
    return total == CommPolynomial.constant(expected, ring) if expected else not total


def coherence_coefficients(assignment: Mapping, ring: Ring = QQ) -> list:
    """lambda_1 .. lambda_16 with lambda_{2k} = gamma_k, lambda_{2k+8} = alpha_k."""
    vals = _assignment_values(assignment, ring)
    lam = [ring.zero] * 16
    for k in range(1, 5):
        lam[2 * k - 1] = vals.get(var(f"c{k}"), ring.zero)
        lam[2 * k + 7] = vals.get(var(f"a{k}"), ring.zero)
    return lam


def certificate_integers() -> tuple[int, int]:
    """The two published certificate integers (m, m')."""
    d = _data("certificate_integers.json")
    return parse_decimal(d["m"]), parse_decimal(d["m_prime"])


def certificate_strings() -> tuple[str, str]:
    d = _data("certificate_integers.json")
    return d["m"], d["m_prime"]


def _assign(**ones) -> dict[str, int]:
    out = {v.name: 0 for v in RULE_VARIABLES}
    out.update(ones)
    return out


ASSIGNMENTS: dict[str, dict[str, int]] = {
    "ca": _assign(a1=1, b1=1, c1=1, d1=1),
    "anti": _assign(a1=-1, b1=1, c1=1, d1=-1),
    "perm": _assign(a1=1, b3=1, c4=1, d4=1),
    "cyclic": _assign(c1=1, d2=1, a3=1, b4=1),
    "zero": _assign(),
}


def named_assignment(name: str) -> dict[str, int]:
    try:
        return dict(ASSIGNMENTS[name.lower()])
    except KeyError:
        raise KeyError(f"unknown assignment {name!r}; known: {', '.join(ASSIGNMENTS)}") from None


# Small inconsistent systems with hand-made certificates (sum mu_i f_i = n).
_TOYS = [
    ("linear", ["x", "x - 1"], ["1", "-1"], 1),
    ("unit-product", ["x*y - 1", "x"], ["-1", "y"], 1),
    ("scaled", ["2*x - 1", "3*x"], ["3", "-2"], -3),
    ("square", ["x^2 + 1", "x"], ["1", "-x"], 1),
    ("rule-vars", ["a1*a1 - 1", "a1 - 2"], ["1", "-a1 - 2"], 3),
]


def toy_certificates() -> list[tuple[str, list[CommPolynomial], list[CommPolynomial], int]]:
    """(name, equations, cofactors, n) for a few inconsistent toy systems."""
    return [(name, [parse_poly(f, ZZ) for f in fs], [parse_poly(m, ZZ) for m in mu], n)
            for name, fs, mu, n in _TOYS]
