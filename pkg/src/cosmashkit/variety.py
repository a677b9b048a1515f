"""Varieties of non-associative algebras given by identities.

The identity oracle works degree by degree.  For a set of generators with
positive weights and a bound d, we span the consequences of the identities
inside the free algebra: every substitution instance of an identity (words
substituted for its variables), closed under multiplication by words on
either side.  Row reduction of that span gives normal forms, a truncated free
algebra, and membership tests.

Over GF(q) a substitution x -> t1 u1 + ... + tr ur only yields the sums of
components whose exponent vectors agree as functions on GF(q), i.e. modulo
t^q = t.  Grouping by that class keeps the spanning set exact for finite
fields as well.
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .exactarith import QQ, ParseError, Ring, parse_field
from .linalg import Matrix, NoSolution, SparseEchelon, solve_affine
from .magma import Leaf, Monomial, NAPolynomial, Node, parse_expression, parse_monomial, print_expression

__all__ = [
    "VarietyPresentation",
    "EnumerationLimit",
    "Degree2Class",
    "TruncatedFreeAlgebra",
    "LambdaSolution",
    "Empty",
    "builtin_variety",
    "BUILTIN_NAMES",
    "load_variety",
    "parse_variety",
    "multilinearise",
    "t_ideal_component",
    "is_identity",
    "classify_degree2",
    "truncated_free_algebra",
    "lambda_rules",
    "solve_lambda_rules",
    "DEFAULT_LIMIT",
]

DEFAULT_LIMIT = 20000


class EnumerationLimit(RuntimeError):
    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass
class VarietyPresentation:
    name: str
    identities: list[NAPolynomial]
    field: Ring = QQ

    def __post_init__(self):
        self.identities = [p.change_field(self.field) if p.field != self.field else p
                           for p in self.identities]
        self.identities = [p for p in self.identities if p]

    def with_field(self, field: Ring) -> "VarietyPresentation":
        return VarietyPresentation(self.name, [p.change_field(field) for p in self.identities], field)

    def extend(self, *extra: NAPolynomial | str, name: str | None = None) -> "VarietyPresentation":
        more = [parse_expression(e, self.field) if isinstance(e, str) else e for e in extra]
        return VarietyPresentation(name or self.name, self.identities + more, self.field)

    def to_text(self) -> str:
        lines = [f"variety {self.name} over {self.field.spec}"]
        lines += [print_expression(p) for p in self.identities]
        return "\n".join(lines) + "\n"

    def __str__(self):
        return self.to_text()


def parse_variety(text: str) -> VarietyPresentation:
    """Read the text format: a ``variety <name> over <field>`` line, then identities."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ParseError("empty variety description")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "variety" or head[2] != "over":
        raise ParseError("first line must read 'variety <name> over <field>'")
    F = parse_field(head[3])
    return VarietyPresentation(head[1], [parse_expression(ln, F) for ln in lines[1:]], F)


def load_variety(path: str) -> VarietyPresentation:
    with open(path) as fh:
        return parse_variety(fh.read())


def _power(var: str, k: int) -> str:
    s = var
    for _ in range(k - 1):
        s = f"{var}({s})" if len(s) > 1 else f"{var}{s}"
    return s


_BUILTINS = {
    "mag": [],
    "ca": ["xy - yx", "(xy)z - x(yz)"],
    "anti": ["xy + yx", "(xy)z + x(yz)"],
    "lie": ["xx", "x(yz) + y(zx) + z(xy)"],
    "assoc": ["(xy)z - x(yz)"],
    "perm": ["(xy)z - x(yz)", "x(yz) - x(zy)"],
    "nil2": ["(xy)z", "x(yz)"],
    "cyclic": ["(xy)z - (yz)x", "(yz)x - (zx)y", "x(yz) - y(zx)", "y(zx) - z(xy)"],
    "ab": ["xy"],
    "triv": ["x"],
    "alt": ["xx", "(xy)z + x(yz)"],
    "bool": ["xy - yx", "(xy)z - x(yz)", "x - xx"],
}
BUILTIN_NAMES = ("Mag", "CA", "Anti", "Lie", "Assoc", "Perm", "Nil2", "Cyclic", "Ab", "Triv", "Alt",
                 "CAp", "Bool")


def builtin_variety(name: str, field: Ring | str = QQ) -> VarietyPresentation:
    """Built-in presentation by name (case-insensitive).

    ``CAp`` is commutative associative with x^p = 0, p the field
    characteristic; ``CAp:<k>`` picks the exponent explicitly.
    """
    F = parse_field(field) if isinstance(field, str) else field
    key = name.lower().replace("_", "").replace("₂", "2").replace("^", "")
    label = next((n for n in BUILTIN_NAMES if n.lower() == key.split(":")[0]), name)
    if key.startswith("cap"):
        k = int(key.split(":")[1]) if ":" in key else F.characteristic
        if k < 2:
            raise ValueError("CAp needs a prime field or an explicit exponent, e.g. CAp:3")
        ids = _BUILTINS["ca"] + [_power("x", k)]
        return VarietyPresentation(f"CAp:{k}", [parse_expression(s, F) for s in ids], F)
    if key not in _BUILTINS:
        raise KeyError(f"unknown variety {name!r}; built-ins: {', '.join(BUILTIN_NAMES)}")
    return VarietyPresentation(label, [parse_expression(s, F) for s in _BUILTINS[key]], F)


# -- multilinearisation --------------------------------------------------------

_FRESH = ["y", "z", "w", "t", "u", "v", "s", "r", "q", "p", "o", "n", "m"]


def _var_degrees(p: NAPolynomial) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    names = p.variables()
    for m in p.terms:
        c = Counter(m.leaves())
        for n in names:
            out.setdefault(n, set()).add(c.get(n, 0))
    return out


def _replace_leaves(m: Monomial, choice: Iterable[Monomial]) -> Monomial:
    it = iter(choice)

    def go(t):
        if isinstance(t, Leaf):
            return next(it)
        return Node(go(t.left), go(t.right))
    return go(m)


def multilinearise(phi: NAPolynomial | str, field: Ring | None = None) -> list[NAPolynomial]:
    """Full polarization: each variable of degree k becomes k fresh variables."""
    if isinstance(phi, str):
        phi = parse_expression(phi, field or QQ)
    degs = _var_degrees(phi)
    for n, ds in degs.items():
        if len(ds) != 1:
            raise ValueError(f"{print_expression(phi)} is not homogeneous in {n}")
    keep = {n for n, ds in degs.items() if ds == {1}}
    pool = (n for n in _FRESH + [f"x{i}" for i in range(1, 100)] if n not in keep)
    fresh = {n: [next(pool) for _ in range(next(iter(ds)))]
             for n, ds in sorted(degs.items()) if next(iter(ds)) > 1}
    F = phi.field
    out: dict = {}
    for m, c in phi.terms.items():
        leaves = list(m.leaves())
        # each variable's occurrences get its fresh names in every order
        per_var = {n: list(itertools.permutations(fresh[n])) for n in fresh}
        names = sorted(per_var)
        for combo in itertools.product(*(per_var[n] for n in names)):
            iters = {n: iter(perm) for n, perm in zip(names, combo)}
            new_leaves = [Leaf(next(iters[x])) if x in iters else Leaf(x) for x in leaves]
            key = _replace_leaves(m, new_leaves)
            v = F.add(out.get(key, F.zero), c)
            if F.is_zero(v):
                out.pop(key, None)
            else:
                out[key] = v
    result = NAPolynomial(out, F)
    return [result] if result else []


# -- substitution instances ------------------------------------------------------

def _reduced_class(e: int, q: int) -> int:
    if e == 0 or q == 0:
        return e
    return (e - 1) % (q - 1) + 1


def _pieces(phi: NAPolynomial, q: int) -> list[tuple[list[str], dict]]:
    """Split an identity into parts whose per-variable degree classes agree."""
    names = sorted(phi.variables())
    groups: dict[tuple, dict] = {}
    for m, c in phi.terms.items():
        cnt = Counter(m.leaves())
        key = tuple(_reduced_class(cnt.get(n, 0), q) for n in names)
        groups.setdefault(key, {})[m] = c
    return [(names, terms) for terms in groups.values()]


class _Weights:
    def __init__(self, weights: Mapping[str, int]):
        self.w = dict(weights)
        self.cache: dict[Monomial, int] = {}

    def __call__(self, m: Monomial) -> int:
        v = self.cache.get(m)
        if v is None:
            if isinstance(m, Leaf):
                v = self.w[m.name]
            else:
                v = self(m.left) + self(m.right)
            self.cache[m] = v
        return v


def _words_by_weight(weights: Mapping[str, int], bound: int, cap: Counter | None) -> dict[int, list[Monomial]]:
    """Words of weight 1..bound; with ``cap`` only those whose multidegree fits under it."""
    gens = sorted(weights)
    by_w: dict[int, list[Monomial]] = {w: [] for w in range(1, bound + 1)}
    mdeg: dict[Monomial, Counter] = {}
    for g in gens:
        if weights[g] <= bound and (cap is None or cap.get(g, 0) >= 1):
            leaf = Leaf(g)
            by_w[weights[g]].append(leaf)
            mdeg[leaf] = Counter({g: 1})
    for w in range(1, bound + 1):
        for w1 in range(1, w):
            for a in by_w[w1]:
                for b in by_w[w - w1]:
                    md = mdeg[a] + mdeg[b]
                    if cap is not None and any(md[k] > cap.get(k, 0) for k in md):
                        continue
                    m = Node(a, b)
                    mdeg[m] = md
                    by_w[w].append(m)
    for w in by_w:
        by_w[w].sort(key=lambda m: m.key)
    return by_w


@dataclass
class _Config:
    field: Ring
    weights: Mapping[str, int]
    bound: int
    quotient: bool  # truncate rows (quotient by degree > d) or keep only rows inside the bound
    cap: Counter | None
    limit: int
    grades: Mapping[str, Counter] | None = None


class _Span:
    """Consequence span of identities plus extra relations, up to a weight bound."""

    def __init__(self, identities: Sequence[NAPolynomial], relations: Sequence[NAPolynomial], cfg: _Config):
        self.cfg = cfg
        self.F = cfg.field
        self.q = cfg.field.characteristic
        self.weight = _Weights(cfg.weights)
        self._grades = cfg.grades or {}
        self._grade_cache: dict[Monomial, tuple] = {}
        self.words = _words_by_weight(cfg.weights, cfg.bound, cfg.cap)
        self.all_words = [m for w in sorted(self.words) for m in self.words[w]]
        self.echelon = SparseEchelon(cfg.field, key=lambda m: (self.weight(m), m.key))
        self.rows_generated = 0
        self.graded = True
        self.spanning: list[dict] = []
        self._queue: list[dict] = []
        for phi in identities:
            for names, terms in _pieces(phi, self.q):
                self._instances(names, terms)
        for rel in relations:
            self._offer(self._fit(dict(rel.terms)))
        self._close()

    def grade(self, m: Monomial) -> tuple:
        """Multidegree, with generators carrying their declared grade vectors."""
        g = self._grade_cache.get(m)
        if g is None:
            total = Counter()
            for x in m.leaves():
                total.update(self._grades.get(x, {x: 1}))
            g = tuple(sorted((k, v) for k, v in total.items() if v))
            self._grade_cache[m] = g
        return g

    # rows --------------------------------------------------------------------
    def _fit(self, row: dict) -> dict:
        if self.cfg.quotient:
            return {m: c for m, c in row.items() if self.weight(m) <= self.cfg.bound}
        if any(self.weight(m) > self.cfg.bound for m in row):
            return {}
        return row

    def _inside_cap(self, row: dict) -> bool:
        cap = self.cfg.cap
        if cap is None:
            return True
        for m in row:
            md = Counter(m.leaves())
            if any(md[k] > cap.get(k, 0) for k in md):
                return False
        return True

    def _offer(self, row: dict) -> None:
        row = {m: c for m, c in row.items() if not self.F.is_zero(c)}
        if not row:
            return
        self.rows_generated += 1
        if self.rows_generated > self.cfg.limit:
            raise EnumerationLimit(
                f"more than {self.cfg.limit} spanning rows needed (raise the limit to continue)",
                self._estimate())
        if self.graded:
            if len({self.grade(m) for m in row}) > 1:
                self.graded = False
        self.spanning.append(row)
        if self.echelon.add(row):
            self._queue.append(row)

    def _estimate(self) -> int:
        return self.rows_generated * 4

    # substitution instances ----------------------------------------------------
    def _instances(self, names: list[str], terms: dict) -> None:
        F, q = self.F, self.q
        mult = {n: max(Counter(m.leaves()).get(n, 0) for m in terms) for n in names}
        if all(k <= 1 for k in mult.values()):
            self._multilinear_instances(names, terms)
            return
        # choose, per variable, r distinct words (1 <= r <= multiplicity)
        min_deg = {n: min(Counter(m.leaves()).get(n, 0) for m in terms) for n in names}
        bound = self.cfg.bound

        def choices(i: int, budget: int):
            if i == len(names):
                yield []
                return
            n = names[i]
            for r in range(1, mult[n] + 1):
                for combo in itertools.combinations(self._words_up_to(budget), r):
                    ws = [self.weight(u) for u in combo]
                    # cheapest use: every word once, extra occurrences on the lightest
                    need = sum(ws) + max(min_deg[n] - r, 0) * min(ws)
                    if need > budget:
                        continue
                    for rest in choices(i + 1, budget - need):
                        yield [combo] + rest

        for assignment in choices(0, bound):
            buckets: dict[tuple, dict] = {}
            for m, c in terms.items():
                leaves = list(m.leaves())
                slots = [assignment[names.index(x)] for x in leaves]
                for pick in itertools.product(*(range(len(s)) for s in slots)):
                    exps: dict[tuple[int, int], int] = {}
                    for x, j in zip(leaves, pick):
                        key = (names.index(x), j)
                        exps[key] = exps.get(key, 0) + 1
                    cls = []
                    ok = True
                    for i, combo in enumerate(assignment):
                        for j in range(len(combo)):
                            e = _reduced_class(exps.get((i, j), 0), q)
                            if e == 0:
                                ok = False
                            cls.append(e)
                    if not ok:
                        continue
                    word = _replace_leaves(m, [s[j] for s, j in zip(slots, pick)])
                    b = buckets.setdefault(tuple(cls), {})
                    v = F.add(b.get(word, F.zero), c)
                    if F.is_zero(v):
                        b.pop(word, None)
                    else:
                        b[word] = v
            for row in buckets.values():
                row = self._fit(row)
                if row and self._inside_cap(row):
                    self._offer(row)

    def _words_up_to(self, budget: int) -> list[Monomial]:
        return [m for w in range(1, budget + 1) for m in self.words.get(w, [])]

    def _multilinear_instances(self, names: list[str], terms: dict) -> None:
        bound = self.cfg.bound
        F = self.F
        order = sorted(names)

        def go(i: int, budget: int, sub: dict):
            if i == len(order):
                yield dict(sub)
                return
            n = order[i]
            rest_min = len(order) - i - 1  # every weight is at least 1
            for u in self._words_up_to(budget - rest_min):
                sub[n] = u
                yield from go(i + 1, budget - self.weight(u), sub)
            sub.pop(n, None)

        for sub in go(0, bound, {}):
            row: dict = {}
            for m, c in terms.items():
                word = _replace_leaves(m, [sub[x] for x in m.leaves()])
                v = F.add(row.get(word, F.zero), c)
                if F.is_zero(v):
                    row.pop(word, None)
                else:
                    row[word] = v
            row = self._fit(row)
            if row and self._inside_cap(row):
                self._offer(row)

    # closure under multiplication ----------------------------------------------
    def _close(self) -> None:
        bound = self.cfg.bound
        while self._queue:
            row = self._queue.pop()
            weights = [self.weight(m) for m in row]
            slack = bound - (min(weights) if self.cfg.quotient else max(weights))
            if slack < 1:
                continue
            for u in self._words_up_to(slack):
                for side in (0, 1):
                    prod = {(Node(m, u) if side == 0 else Node(u, m)): c for m, c in row.items()}
                    prod = self._fit(prod)
                    if prod and self._inside_cap(prod):
                        self._offer(prod)


# -- public operations ------------------------------------------------------------

def _weights_of(generators) -> dict[str, int]:
    if isinstance(generators, Mapping):
        return {str(k): int(v) for k, v in generators.items()}
    return {str(g): 1 for g in generators}


def t_ideal_component(V: VarietyPresentation, generators, multidegree: Mapping[str, int] | None = None,
                      degree: int | None = None, limit: int = DEFAULT_LIMIT) -> list[NAPolynomial]:
    """Spanning set of the consequences of V in one multidegree (or up to a degree).

    Returned rows are the generated instances restricted to the requested
    multidegree; their span is the requested component.
    """
    weights = _weights_of(generators)
    if multidegree is not None:
        cap = Counter({k: v for k, v in multidegree.items() if v})
        bound = sum(weights[k] * v for k, v in cap.items())
    elif degree is not None:
        cap, bound = None, degree
    else:
        raise ValueError("give a multidegree or a degree bound")
    span = _Span(V.identities, [], _Config(V.field, weights, bound, False, cap, limit))
    out = []
    for row in span.spanning:
        if multidegree is not None:
            row = {m: c for m, c in row.items() if Counter(m.leaves()) == cap}
        if row:
            out.append(NAPolynomial(row, V.field))
    return out


def is_identity(V: VarietyPresentation, phi: NAPolynomial | str, field: Ring | None = None,
                limit: int = DEFAULT_LIMIT) -> bool:
    """Whether phi is a consequence of V's identities within its own degree.

    Sound in general; complete for graded cases (homogeneous identities and no
    exponent-class merging over a finite field).
    """
    F = field or V.field
    if F != V.field:
        V = V.with_field(F)
    if isinstance(phi, str):
        phi = parse_expression(phi, F)
    elif phi.field != F:
        phi = phi.change_field(F)
    if not phi:
        return True
    names = sorted(phi.variables())
    weights = {n: 1 for n in names}
    bound = phi.degree()
    cap = Counter()
    for m in phi.terms:
        for k, v in Counter(m.leaves()).items():
            cap[k] = max(cap[k], v)
    span = _Span(V.identities, [], _Config(F, weights, bound, False, cap, limit))
    if not span.graded:
        span = _Span(V.identities, [], _Config(F, weights, bound, False, None, limit))
    return span.echelon.contains(dict(phi.terms))


class Degree2Class(enum.Enum):
    NONE = "none"
    COMMUTATIVE = "commutative"
    ANTICOMMUTATIVE = "anticommutative"
    ABELIAN = "abelian"
    TRIVIAL = "trivial"


def classify_degree2(V: VarietyPresentation, field: Ring | None = None) -> Degree2Class:
    F = field or V.field
    if is_identity(V, "x", F):
        return Degree2Class.TRIVIAL
    if is_identity(V, "xy", F):
        return Degree2Class.ABELIAN
    if is_identity(V, "xy - yx", F):
        return Degree2Class.COMMUTATIVE
    if is_identity(V, "xy + yx", F):
        return Degree2Class.ANTICOMMUTATIVE
    return Degree2Class.NONE


class TruncatedFreeAlgebra:
    """Free algebra of V on weighted generators modulo extra relations, cut at weight d.

    Elements are dicts from basis monomial to scalar.  Products whose weight
    exceeds ``bound`` are dropped; ``truncated_product`` reports whether a
    product lost terms that way.
    """

    def __init__(self, V: VarietyPresentation, generators, bound: int,
                 relations: Sequence[NAPolynomial] = (), limit: int = DEFAULT_LIMIT,
                 grades: Mapping[str, Mapping[str, int]] | None = None):
        self.presentation = V
        self.field = V.field
        self.weights = _weights_of(generators)
        self.generators = sorted(self.weights, key=lambda g: Leaf(g).key)
        self.bound = bound
        self.relations = [r if r.field == self.field else r.change_field(self.field) for r in relations]
        self.grades = {g: Counter(v) for g, v in (grades or {}).items()}
        self._span = _Span(V.identities, self.relations,
                           _Config(self.field, self.weights, bound, True, None, limit, self.grades))
        self.weight = self._span.weight
        self.grade = self._span.grade
        self.graded = self._span.graded
        pivots = self._span.echelon.pivots()
        self.basis: list[Monomial] = [m for m in self._span.all_words if m not in pivots]
        self.basis.sort(key=lambda m: (self.weight(m), m.key))
        self.index = {m: i for i, m in enumerate(self.basis)}

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def rows_generated(self) -> int:
        return self._span.rows_generated

    def basis_by_weight(self) -> dict[int, list[Monomial]]:
        out: dict[int, list[Monomial]] = {}
        for m in self.basis:
            out.setdefault(self.weight(m), []).append(m)
        return out

    def project(self, p: NAPolynomial | Mapping[Monomial, object] | Monomial | str) -> dict:
        """Normal form: coordinates on the basis monomials."""
        if isinstance(p, str):
            p = parse_expression(p, self.field)
        if isinstance(p, (Leaf, Node)):
            p = {p: self.field.one}
        terms = p.terms if isinstance(p, NAPolynomial) else p
        row = {}
        for m, c in terms.items():
            if self.weight(m) <= self.bound and not self.field.is_zero(c):
                row[m] = self.field.add(row.get(m, self.field.zero), self.field(c))
        return {m: c for m, c in self._span.echelon.reduce(row).items() if not self.field.is_zero(c)}

    def vector(self, element: Mapping[Monomial, object]) -> list:
        v = [self.field.zero] * len(self.basis)
        for m, c in element.items():
            v[self.index[m]] = c
        return v

    def from_vector(self, v: Sequence) -> dict:
        return {self.basis[i]: c for i, c in enumerate(v) if not self.field.is_zero(c)}

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        F = self.field
        raw: dict = {}
        for m1, c1 in x.items():
            for m2, c2 in y.items():
                if self.weight(m1) + self.weight(m2) > self.bound:
                    continue
                m = Node(m1, m2)
                raw[m] = F.add(raw.get(m, F.zero), F.mul(c1, c2))
        return self.project(raw)

    def truncated_product(self, m1: Monomial, m2: Monomial) -> bool:
        return self.weight(m1) + self.weight(m2) > self.bound

    def structure_constants(self) -> dict[tuple[int, int], dict[int, object]]:
        table = {}
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                if self.weight(a) + self.weight(b) > self.bound:
                    continue
                prod = self.project({Node(a, b): self.field.one})
                if prod:
                    table[(i, j)] = {self.index[m]: c for m, c in prod.items()}
        return table

    def element_to_polynomial(self, element: Mapping) -> NAPolynomial:
        return NAPolynomial(dict(element), self.field)

    def __repr__(self):
        return (f"TruncatedFreeAlgebra({self.presentation.name}, gens={self.weights}, "
                f"bound={self.bound}, dim={self.dimension})")


def truncated_free_algebra(V: VarietyPresentation, generators, bound: int,
                           relations: Sequence[NAPolynomial] = (), limit: int = DEFAULT_LIMIT,
                           grades=None) -> TruncatedFreeAlgebra:
    return TruncatedFreeAlgebra(V, generators, bound, relations, limit, grades)


# -- the four pull-out rules --------------------------------------------------------

_RULE_LHS = {"alpha": "(xy)z", "beta": "(yx)z", "gamma": "z(xy)", "delta": "z(yx)"}
_RULE_RHS = ["x(yz)", "x(zy)", "(yz)x", "(zy)x"]
_FAMILY_LETTER = {"alpha": "a", "beta": "b", "gamma": "c", "delta": "d"}


def lambda_rules(assignment: Mapping[str, object], field: Ring = QQ) -> list[NAPolynomial]:
    """The four rules as polynomials LHS - sum k_i RHS_i for a given assignment."""
    out = []
    for fam, lhs in _RULE_LHS.items():
        p = parse_expression(lhs, field)
        for i, rhs in enumerate(_RULE_RHS, start=1):
            k = field(assignment.get(f"{_FAMILY_LETTER[fam]}{i}", 0))
            if not field.is_zero(k):
                p = p - NAPolynomial.monomial(parse_monomial(rhs), k, field)
        out.append(p)
    return out


@dataclass(frozen=True)
class _EmptyType:
    def __bool__(self):
        return False

    def __repr__(self):
        return "Empty"


Empty = _EmptyType()

_COEFF_NAMES = [f"{l}{i}" for l in "abcd" for i in range(1, 5)]


@dataclass
class LambdaSolution:
    """Affine family particular + span(kernel) of rule coefficients a1..d4."""

    particular: dict[str, object]
    kernel: list[dict[str, object]]
    field: Ring

    def contains(self, assignment: Mapping[str, object]) -> bool:
        F = self.field
        diff = [F.sub(F(assignment.get(n, 0)), F(self.particular.get(n, 0))) for n in _COEFF_NAMES]
        if all(F.is_zero(x) for x in diff):
            return True
        if not self.kernel:
            return False
        A = Matrix([[F(k.get(n, 0)) for k in self.kernel] for n in _COEFF_NAMES], F, len(self.kernel))
        return not isinstance(solve_affine(A, diff), NoSolution)

    @property
    def dimension(self) -> int:
        return len(self.kernel)

    def __bool__(self):
        return True


def solve_lambda_rules(V: VarietyPresentation, field: Ring | None = None, limit: int = DEFAULT_LIMIT):
    """All coefficient assignments making the four rules identities of V, or Empty."""
    F = field or V.field
    if F != V.field:
        V = V.with_field(F)
    cap = Counter({"x": 1, "y": 1, "z": 1})
    span = _Span(V.identities, [], _Config(F, {"x": 1, "y": 1, "z": 1}, 3, False, cap, limit))
    if not span.graded:
        span = _Span(V.identities, [], _Config(F, {"x": 1, "y": 1, "z": 1}, 3, False, None, limit))
    ech = span.echelon

    def nf(text: str) -> dict:
        return ech.reduce({parse_monomial(text): F.one})

    particular: dict[str, object] = {}
    kernel: list[dict[str, object]] = []
    for fam, lhs in _RULE_LHS.items():
        target = nf(lhs)
        images = [nf(r) for r in _RULE_RHS]
        cols = sorted(set(target).union(*images), key=lambda m: m.key)
        A = Matrix([[img.get(c, F.zero) for img in images] for c in cols], F, 4)
        sol = solve_affine(A, [target.get(c, F.zero) for c in cols])
        if isinstance(sol, NoSolution):
            return Empty
        x, ker = sol
        letter = _FAMILY_LETTER[fam]
        for i in range(4):
            particular[f"{letter}{i + 1}"] = x[i]
        for kv in ker:
            kernel.append({f"{letter}{i + 1}": kv[i] for i in range(4) if not F.is_zero(kv[i])})
    return LambdaSolution(particular, kernel, F)
