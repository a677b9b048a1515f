"""Free magma monomials (binary trees) and non-associative polynomials."""

from __future__ import annotations

import re
from collections import Counter
from typing import Callable, Iterable, Iterator, Mapping

from .exactarith import QQ, ParseError, Ring

__all__ = [
    "Leaf",
    "Node",
    "Monomial",
    "NAPolynomial",
    "generator_key",
    "multidegree",
    "compare_monomials",
    "is_multilinear",
    "parse_monomial",
    "parse_expression",
    "print_expression",
    "words",
]

_VAR_RE = re.compile(r"([A-Za-z])([0-9]*)")


def generator_key(name: str) -> tuple[str, int]:
    """Order generators by letter, then by numeric index (unindexed first)."""
    m = _VAR_RE.fullmatch(name)
    if m is None:
        return (name, -1)
    letter, digits = m.groups()
    return (letter, int(digits) if digits else -1)


class Leaf:
    __slots__ = ("name", "degree", "key", "_hash")

    def __init__(self, name: str):
        self.name = name
        self.degree = 1
        self.key = (1, 0, generator_key(name))
        self._hash = hash(("L", name))

    def __eq__(self, other):
        return isinstance(other, Leaf) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Leaf({self.name!r})"

    def __str__(self):
        return self.name

    def leaves(self) -> Iterator[str]:
        yield self.name


class Node:
    __slots__ = ("left", "right", "degree", "key", "_hash")

    def __init__(self, left: "Monomial", right: "Monomial"):
        self.left = left
        self.right = right
        self.degree = left.degree + right.degree
        self.key = (self.degree, 1, left.key, right.key)
        self._hash = hash((left._hash, right._hash))

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Node) and other._hash == self._hash
                and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Node({self.left!r}, {self.right!r})"

    def __str__(self):
        return _wrap(self.left) + _wrap(self.right)

    def leaves(self) -> Iterator[str]:
        yield from self.left.leaves()
        yield from self.right.leaves()


Monomial = Leaf | Node


def _wrap(m: Monomial) -> str:
    return str(m) if isinstance(m, Leaf) else f"({m})"


def multidegree(m: Monomial) -> Counter:
    return Counter(m.leaves())


def compare_monomials(m1: Monomial, m2: Monomial) -> int:
    """-1, 0 or 1: degree, then Leaf < Node, then generators, then (left, right)."""
    return (m1.key > m2.key) - (m1.key < m2.key)


def words(generators: Mapping[str, int] | Iterable[str], max_weight: int) -> dict[int, list[Monomial]]:
    """All monomials of weighted degree 1..max_weight, grouped by weight.

    ``generators`` is either a name->weight mapping or an iterable of names
    (all of weight 1).
    """
    if not isinstance(generators, Mapping):
        generators = {g: 1 for g in generators}
    by_weight: dict[int, list[Monomial]] = {w: [] for w in range(1, max_weight + 1)}
    for g, w in generators.items():
        if w < 1:
            raise ValueError("generator weights must be positive")
        if w <= max_weight:
            by_weight[w].append(Leaf(g))
    for w in range(2, max_weight + 1):
        for wl in range(1, w):
            for left in by_weight[wl]:
                for right in by_weight[w - wl]:
                    by_weight[w].append(Node(left, right))
    for w in by_weight:
        by_weight[w].sort(key=lambda m: m.key)
    return by_weight


class NAPolynomial:
    """Finite scalar-weighted sum of magma monomials over a fixed field."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, field: Ring = QQ):
        self.field = field
        clean = {}
        if terms:
            for m, c in terms.items():
                c = field(c)
                if not field.is_zero(c):
                    clean[m] = c
        self.terms: dict[Monomial, object] = clean

    @classmethod
    def _raw(cls, terms: dict, field: Ring) -> "NAPolynomial":
        p = cls.__new__(cls)
        p.field = field
        p.terms = terms
        return p

    @classmethod
    def monomial(cls, m: Monomial | str, coeff=1, field: Ring = QQ) -> "NAPolynomial":
        if isinstance(m, str):
            m = parse_monomial(m)
        return cls({m: coeff}, field)

    @classmethod
    def zero(cls, field: Ring = QQ) -> "NAPolynomial":
        return cls._raw({}, field)

    def _check(self, other: "NAPolynomial"):
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field.spec} vs {other.field.spec}")

    def __add__(self, other):
        if not isinstance(other, NAPolynomial):
            return NotImplemented
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = F.add(out.get(m, F.zero), c)
            if F.is_zero(v):
                out.pop(m, None)
            else:
                out[m] = v
        return NAPolynomial._raw(out, F)

    def __neg__(self):
        F = self.field
        return NAPolynomial._raw({m: F.neg(c) for m, c in self.terms.items()}, F)

    def __sub__(self, other):
        if not isinstance(other, NAPolynomial):
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "NAPolynomial":
        F = self.field
        s = F(s)
        if F.is_zero(s):
            return NAPolynomial.zero(F)
        return NAPolynomial._raw({m: F.mul(s, c) for m, c in self.terms.items()}, F)

    def __mul__(self, other):
        if not isinstance(other, NAPolynomial):
            return self.scale(other)
        self._check(other)
        F = self.field
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = Node(m1, m2)
                v = F.add(out.get(m, F.zero), F.mul(c1, c2))
                if F.is_zero(v):
                    out.pop(m, None)
                else:
                    out[m] = v
        return NAPolynomial._raw(out, F)

    def __rmul__(self, s):
        return self.scale(s)

    def __eq__(self, other):
        if isinstance(other, NAPolynomial):
            return self.field == other.field and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def __repr__(self):
        return f"NAPolynomial({print_expression(self)!r}, {self.field.spec})"

    def __str__(self):
        return print_expression(self)

    def coefficient(self, m: Monomial):
        return self.terms.get(m, self.field.zero)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=lambda m: m.key, reverse=True)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m in self.terms:
            out.update(m.leaves())
        return out

    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def homogeneous_components(self) -> dict[tuple, "NAPolynomial"]:
        """Split by type (multidegree); keys are sorted (name, count) tuples."""
        parts: dict[tuple, dict] = {}
        for m, c in self.terms.items():
            key = tuple(sorted(multidegree(m).items(), key=lambda kv: generator_key(kv[0])))
            parts.setdefault(key, {})[m] = c
        return {k: NAPolynomial._raw(v, self.field) for k, v in parts.items()}

    def is_homogeneous(self) -> bool:
        return len(self.homogeneous_components()) <= 1

    def substitute(self, sigma: Mapping[str, "NAPolynomial"]) -> "NAPolynomial":
        return substitute(self, sigma)

    def map_monomials(self, fn: Callable[[Monomial], "NAPolynomial"]) -> "NAPolynomial":
        F = self.field
        out: dict = {}
        for m, c in self.terms.items():
            for m2, c2 in fn(m).terms.items():
                v = F.add(out.get(m2, F.zero), F.mul(c, c2))
                if F.is_zero(v):
                    out.pop(m2, None)
                else:
                    out[m2] = v
        return NAPolynomial._raw(out, F)

    def change_field(self, field: Ring) -> "NAPolynomial":
        return NAPolynomial({m: field(c) for m, c in self.terms.items()}, field)


def multiply(p: NAPolynomial, q: NAPolynomial) -> NAPolynomial:
    return p * q


def is_multilinear(p: NAPolynomial) -> bool:
    support = None
    for m in p.terms:
        md = multidegree(m)
        if any(v != 1 for v in md.values()):
            return False
        names = frozenset(md)
        if support is None:
            support = names
        elif names != support:
            return False
    return True


def substitute(p: NAPolynomial, sigma: Mapping[str, NAPolynomial]) -> NAPolynomial:
    """Replace every leaf by its image and expand bilinearly."""
    F = p.field
    cache: dict[Monomial, NAPolynomial] = {}

    def image(m: Monomial) -> NAPolynomial:
        hit = cache.get(m)
        if hit is not None:
            return hit
        if isinstance(m, Leaf):
            if m.name not in sigma:
                raise KeyError(f"no image given for generator {m.name!r}")
            val = sigma[m.name]
            if val.field != F:
                raise ValueError(f"field mismatch for image of {m.name!r}")
        else:
            val = image(m.left) * image(m.right)
        cache[m] = val
        return val

    return p.map_monomials(image)


# -- text form ---------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, field: Ring):
        self.s = text
        self.i = 0
        self.field = field

    def error(self, msg: str):
        raise ParseError(f"{msg} at position {self.i} in {self.s!r}")

    def skip(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.s[self.i] if self.i < len(self.s) else ""

    def polynomial(self) -> NAPolynomial:
        F = self.field
        out = NAPolynomial.zero(F)
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.s[self.i] == "-" else 1
            self.i += 1
        while True:
            coef, mono = self.term()
            c = F(coef * sign)
            if mono is None:
                if coef != 0:
                    self.error("constant terms are not polynomials in a magma")
            else:
                out = out + NAPolynomial._raw({mono: c} if not F.is_zero(c) else {}, F)
            ch = self.peek()
            if ch == "":
                return out
            if ch not in "+-":
                self.error(f"unexpected {ch!r}")
            sign = -1 if ch == "-" else 1
            self.i += 1

    def number(self):
        self.skip()
        start = self.i
        while self.i < len(self.s) and self.s[self.i].isdigit():
            self.i += 1
        if start == self.i:
            return None
        num = int(self.s[start:self.i])
        if self.peek() == "/":
            self.i += 1
            self.skip()
            st = self.i
            while self.i < len(self.s) and self.s[self.i].isdigit():
                self.i += 1
            if st == self.i:
                self.error("expected denominator")
            from fractions import Fraction
            return Fraction(num, int(self.s[st:self.i]))
        return num

    def term(self):
        coef = self.number()
        if coef is None:
            coef = 1
            has_coef = False
        else:
            has_coef = True
            if self.peek() == "*":
                self.i += 1
        ch = self.peek()
        if ch == "" or ch in "+-":
            if has_coef:
                return coef, None
            self.error("expected a monomial")
        return coef, self.monomial()

    def factor(self) -> Monomial:
        ch = self.peek()
        if ch == "(":
            self.i += 1
            m = self.monomial(closing=True)
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return m
        if ch.isalpha():
            m = _VAR_RE.match(self.s, self.i)
            self.i = m.end()
            return Leaf(m.group(0))
        self.error(f"unexpected {ch!r}")

    def monomial(self, closing: bool = False) -> Monomial:
        left = self.factor()
        ch = self.peek()
        if ch == "(" or ch.isalpha():
            right = self.factor()
            ch = self.peek()
            if ch == "(" or ch.isalpha():
                self.error("non-associative product requires parentheses")
            return Node(left, right)
        return left


def parse_monomial(text: str) -> Monomial:
    p = _Parser(text, QQ)
    m = p.monomial()
    if p.peek() != "":
        p.error("trailing input")
    return m


def parse_expression(text: str, field: Ring = QQ) -> NAPolynomial:
    """Parse e.g. ``"(ab)c - a(bc)"``; ``"0"`` is the zero polynomial."""
    if text.strip() == "0":
        return NAPolynomial.zero(field)
    return _Parser(text, field).polynomial()


def _format_coef(F: Ring, c) -> tuple[int, str]:
    if F.characteristic:
        return 1, str(c)
    if c < 0:
        return -1, str(-c)
    return 1, str(c)


def print_expression(p: NAPolynomial) -> str:
    if not p.terms:
        return "0"
    parts = []
    for i, m in enumerate(p.monomials()):
        sign, mag = _format_coef(p.field, p.terms[m])
        body = str(m) if mag == "1" else f"{mag}*{m}"
        if i == 0:
            parts.append(("-" if sign < 0 else "") + body)
        else:
            parts.append(("- " if sign < 0 else "+ ") + body)
    return " ".join(parts)
