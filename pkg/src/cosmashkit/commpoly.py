"""Sparse commutative polynomials over ZZ, QQ and GF(p).

The coefficient ring of the rewriting rules is ZZ[alpha_i, beta_i, gamma_i,
delta_i] (i = 1..4).  In text these are written ``a1 .. a4``, ``b1 .. b4``,
``c1 .. c4`` and ``d1 .. d4``; ``l<k>`` denotes lambda_k and any other name is
a user indeterminate ordered after the Greek families.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .exactarith import QQ, ZZ, ParseError, PrimeField, Ring, parse_rational

__all__ = [
    "Indeterminate",
    "PowerProduct",
    "CommPolynomial",
    "MonomialOrder",
    "LEX",
    "DEGREVLEX",
    "var",
    "alpha",
    "beta",
    "gamma",
    "delta",
    "lam",
    "RULE_VARIABLES",
    "parse_poly",
    "pp_mul",
    "pp_divides",
    "pp_div",
    "pp_lcm",
    "pp_degree",
]

FAMILIES = ("alpha", "beta", "gamma", "delta", "lambda", "user")
_LETTER = {"alpha": "a", "beta": "b", "gamma": "c", "delta": "d", "lambda": "l"}
_FROM_LETTER = {v: k for k, v in _LETTER.items()}
_GREEK_RE = re.compile(r"([abcdl])([0-9]+)")


@dataclass(frozen=True)
class Indeterminate:
    family: str
    index: int
    name: str

    @property
    def key(self):
        return (FAMILIES.index(self.family), self.index, self.name)

    def __lt__(self, other: "Indeterminate"):
        return self.key < other.key

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"var({self.name!r})"


@functools.lru_cache(maxsize=None)
def var(name: str) -> Indeterminate:
    """Indeterminate from its text name (``a3`` is alpha_3, ``x`` a user variable)."""
    m = _GREEK_RE.fullmatch(name)
    if m:
        return Indeterminate(_FROM_LETTER[m.group(1)], int(m.group(2)), name)
    if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
        raise ParseError(f"bad indeterminate name {name!r}")
    digits = re.search(r"([0-9]+)$", name)
    return Indeterminate("user", int(digits.group(1)) if digits else 0, name)


def alpha(i: int) -> Indeterminate:
    return var(f"a{i}")


def beta(i: int) -> Indeterminate:
    return var(f"b{i}")


def gamma(i: int) -> Indeterminate:
    return var(f"c{i}")


def delta(i: int) -> Indeterminate:
    return var(f"d{i}")


def lam(i: int) -> Indeterminate:
    return var(f"l{i}")


RULE_VARIABLES: tuple[Indeterminate, ...] = tuple(
    f(i) for f in (alpha, beta, gamma, delta) for i in range(1, 5))


# A power product is a tuple of (Indeterminate, exponent) pairs sorted by the
# canonical indeterminate order, with every exponent positive.
PowerProduct = tuple


def pp_mul(a: PowerProduct, b: PowerProduct) -> PowerProduct:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda kv: kv[0].key))


def pp_degree(a: PowerProduct) -> int:
    return sum(e for _, e in a)


def pp_divides(a: PowerProduct, b: PowerProduct) -> bool:
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


def pp_div(b: PowerProduct, a: PowerProduct) -> PowerProduct:
    d = dict(b)
    for v, e in a:
        r = d.get(v, 0) - e
        if r < 0:
            raise ArithmeticError("power product does not divide")
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items(), key=lambda kv: kv[0].key))


def pp_lcm(a: PowerProduct, b: PowerProduct) -> PowerProduct:
    d = dict(a)
    for v, e in b:
        d[v] = max(d.get(v, 0), e)
    return tuple(sorted(d.items(), key=lambda kv: kv[0].key))


def _cmp_lex(a: PowerProduct, b: PowerProduct) -> int:
    i = 0
    while i < len(a) and i < len(b):
        (va, ea), (vb, eb) = a[i], b[i]
        if va != vb:
            return 1 if va.key < vb.key else -1
        if ea != eb:
            return 1 if ea > eb else -1
        i += 1
    return (len(a) > len(b)) - (len(a) < len(b))


def _cmp_degrevlex(a: PowerProduct, b: PowerProduct) -> int:
    da, db = pp_degree(a), pp_degree(b)
    if da != db:
        return 1 if da > db else -1
    i, j = len(a) - 1, len(b) - 1
    while i >= 0 and j >= 0:
        (va, ea), (vb, eb) = a[i], b[j]
        if va != vb:
            # the later variable occurs only on one side: that side is smaller
            return -1 if vb.key < va.key else 1
        if ea != eb:
            return 1 if ea < eb else -1
        i -= 1
        j -= 1
    if i >= 0:
        return -1
    if j >= 0:
        return 1
    return 0


class MonomialOrder:
    def __init__(self, kind: str):
        if kind not in ("lex", "degrevlex"):
            raise ValueError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.compare = _cmp_lex if kind == "lex" else _cmp_degrevlex
        self.key = functools.cmp_to_key(self.compare)

    def __repr__(self):
        return f"MonomialOrder({self.kind!r})"

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and other.kind == self.kind

    def __hash__(self):
        return hash(self.kind)

    def __reduce__(self):
        # the cmp_to_key wrapper does not pickle; rebuild from the kind
        return (MonomialOrder, (self.kind,))


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def _order(order: MonomialOrder | str) -> MonomialOrder:
    if isinstance(order, MonomialOrder):
        return order
    return LEX if order == "lex" else MonomialOrder(order)


class CommPolynomial:
    __slots__ = ("terms", "ring")

    def __init__(self, terms: Mapping[PowerProduct, object] | None = None, ring: Ring = ZZ):
        self.ring = ring
        clean = {}
        if terms:
            for pp, c in terms.items():
                c = ring(c)
                if not ring.is_zero(c):
                    clean[pp] = ring.add(clean.get(pp, ring.zero), c)
        self.terms: dict[PowerProduct, object] = {k: v for k, v in clean.items() if not ring.is_zero(v)}

    @classmethod
    def _raw(cls, terms: dict, ring: Ring) -> "CommPolynomial":
        p = cls.__new__(cls)
        p.terms = terms
        p.ring = ring
        return p

    @classmethod
    def constant(cls, c, ring: Ring = ZZ) -> "CommPolynomial":
        return cls({(): c}, ring)

    @classmethod
    def variable(cls, v: Indeterminate | str, ring: Ring = ZZ) -> "CommPolynomial":
        if isinstance(v, str):
            v = var(v)
        return cls._raw({((v, 1),): ring.one}, ring)

    @classmethod
    def zero(cls, ring: Ring = ZZ) -> "CommPolynomial":
        return cls._raw({}, ring)

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "CommPolynomial":
        if isinstance(other, CommPolynomial):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring.spec} vs {other.ring.spec}")
            return other
        if isinstance(other, (int, Fraction)):
            return CommPolynomial.constant(other, self.ring)
        raise TypeError(f"cannot combine CommPolynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        R = self.ring
        out = dict(self.terms)
        for pp, c in other.terms.items():
            v = R.add(out.get(pp, R.zero), c)
            if R.is_zero(v):
                out.pop(pp, None)
            else:
                out[pp] = v
        return CommPolynomial._raw(out, R)

    __radd__ = __add__

    def __neg__(self):
        R = self.ring
        return CommPolynomial._raw({pp: R.neg(c) for pp, c in self.terms.items()}, R)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, s) -> "CommPolynomial":
        R = self.ring
        s = R(s)
        if R.is_zero(s):
            return CommPolynomial.zero(R)
        return CommPolynomial._raw({pp: R.mul(s, c) for pp, c in self.terms.items()}, R)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        R = self.ring
        out: dict = {}
        for p1, c1 in self.terms.items():
            for p2, c2 in other.terms.items():
                pp = pp_mul(p1, p2)
                v = R.add(out.get(pp, R.zero), R.mul(c1, c2))
                if R.is_zero(v):
                    out.pop(pp, None)
                else:
                    out[pp] = v
        return CommPolynomial._raw(out, R)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = CommPolynomial.constant(1, self.ring)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_term(self, pp: PowerProduct, c) -> "CommPolynomial":
        R = self.ring
        out = {}
        for p, d in self.terms.items():
            v = R.mul(c, d)
            if not R.is_zero(v):
                out[pp_mul(p, pp)] = v
        return CommPolynomial._raw(out, R)

    def __eq__(self, other):
        if isinstance(other, CommPolynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(): self.ring(other)}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"CommPolynomial({self.to_text()!r}, {self.ring.spec})"

    def __str__(self):
        return self.to_text()

    # -- queries --------------------------------------------------------------

    def is_constant(self) -> bool:
        return not self.terms or list(self.terms) == [()]

    def constant_term(self):
        return self.terms.get((), self.ring.zero)

    def total_degree(self) -> int:
        return max((pp_degree(pp) for pp in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({pp_degree(pp) for pp in self.terms}) <= 1

    def indeterminates(self) -> set[Indeterminate]:
        return {v for pp in self.terms for v, _ in pp}

    def sorted_terms(self, order: MonomialOrder | str = DEGREVLEX) -> list:
        o = _order(order)
        return sorted(self.terms.items(), key=lambda kv: o.key(kv[0]), reverse=True)

    def leading_term(self, order: MonomialOrder | str = DEGREVLEX):
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        o = _order(order)
        best = None
        for pp in self.terms:
            if best is None or o.compare(pp, best) > 0:
                best = pp
        return best, self.terms[best]

    def evaluate(self, assignment: Mapping, ring: Ring | None = None):
        """Exact value at ``assignment`` (keys: Indeterminate or its name)."""
        R = ring or self.ring
        values = {}
        for k, v in assignment.items():
            values[var(k) if isinstance(k, str) else k] = R(v)
        total = R.zero
        for pp, c in self.terms.items():
            t = R(c)
            for v, e in pp:
                if v not in values:
                    raise KeyError(f"no value assigned to indeterminate {v.name}")
                t = R.mul(t, R.pow(values[v], e))
            total = R.add(total, t)
        return total

    def substitute(self, mapping: Mapping) -> "CommPolynomial":
        """Replace indeterminates by polynomials over the same ring."""
        R = self.ring
        subs = {}
        for k, v in mapping.items():
            k = var(k) if isinstance(k, str) else k
            subs[k] = v if isinstance(v, CommPolynomial) else CommPolynomial.constant(v, R)
        out = CommPolynomial.zero(R)
        for pp, c in self.terms.items():
            t = CommPolynomial.constant(c, R)
            for v, e in pp:
                t = t * (subs[v] ** e if v in subs else CommPolynomial.variable(v, R) ** e)
            out = out + t
        return out

    def rename(self, mapping: Mapping[Indeterminate, Indeterminate]) -> "CommPolynomial":
        out = {}
        R = self.ring
        for pp, c in self.terms.items():
            npp = pp_mul((), tuple(sorted(((mapping.get(v, v), e) for v, e in pp), key=lambda kv: kv[0].key)))
            merged = dict()
            for v, e in npp:
                merged[v] = merged.get(v, 0) + e
            npp = tuple(sorted(merged.items(), key=lambda kv: kv[0].key))
            val = R.add(out.get(npp, R.zero), c)
            if R.is_zero(val):
                out.pop(npp, None)
            else:
                out[npp] = val
        return CommPolynomial._raw(out, R)

    def change_ring(self, target: Ring) -> "CommPolynomial":
        """Coefficientwise image; denominators must be invertible in the target."""
        out = {}
        for pp, c in self.terms.items():
            if isinstance(self.ring, PrimeField) and not isinstance(target, PrimeField):
                raise TypeError("cannot lift prime field coefficients to characteristic 0")
            v = target(c)
            if not target.is_zero(v):
                out[pp] = v
        return CommPolynomial._raw(out, target)

    def content(self) -> int:
        if self.ring is not ZZ and self.ring != ZZ:
            raise TypeError("content is defined for integer polynomials")
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, c)
        return g

    def normalize_sign(self, order: MonomialOrder | str = DEGREVLEX) -> "CommPolynomial":
        """Make the leading coefficient positive (characteristic 0 only)."""
        if not self.terms or self.ring.characteristic:
            return self
        _, lc = self.leading_term(order)
        return -self if lc < 0 else self

    def content_normalize(self, order: MonomialOrder | str = DEGREVLEX) -> "CommPolynomial":
        """Divide out the content and fix the sign; for set comparisons."""
        if not self.terms:
            return self
        if self.ring.characteristic == 0:
            p = self.normalize_sign(order)
            if p.ring == ZZ:
                g = p.content()
                return CommPolynomial._raw({pp: c // g for pp, c in p.terms.items()}, ZZ)
            return p.scale(QQ.inv(p.leading_term(order)[1]))
        return self.monic(order)

    def monic(self, order: MonomialOrder | str = DEGREVLEX) -> "CommPolynomial":
        if not self.terms:
            return self
        _, lc = self.leading_term(order)
        return self.scale(self.ring.inv(lc))

    def frobenius_reduce(self, q: int) -> "CommPolynomial":
        """Reduce exponents modulo x^q = x: polynomial functions on GF(q)^n."""
        R = self.ring
        out: dict = {}
        for pp, c in self.terms.items():
            npp = tuple((v, (e - 1) % (q - 1) + 1) for v, e in pp)
            val = R.add(out.get(npp, R.zero), c)
            if R.is_zero(val):
                out.pop(npp, None)
            else:
                out[npp] = val
        return CommPolynomial._raw(out, R)

    # -- serialisation --------------------------------------------------------

    def to_text(self, order: MonomialOrder | str = DEGREVLEX) -> str:
        if not self.terms:
            return "0"
        R = self.ring
        parts = []
        for i, (pp, c) in enumerate(self.sorted_terms(order)):
            if R.characteristic == 0 and c < 0:
                sign, mag = "-", -c
            else:
                sign, mag = "+", c
            factors = [v.name if e == 1 else f"{v.name}^{e}" for v, e in pp]
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = f"{mag}*" + "*".join(factors)
            if i == 0:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def to_json(self) -> list[dict]:
        return [{"exponents": {v.name: e for v, e in pp}, "coefficient": str(c)}
                for pp, c in self.sorted_terms(DEGREVLEX)]

    @classmethod
    def from_json(cls, records: Iterable[Mapping], ring: Ring = ZZ) -> "CommPolynomial":
        terms: dict = {}
        for rec in records:
            pp = tuple(sorted(((var(k), int(e)) for k, e in rec["exponents"].items() if int(e)),
                              key=lambda kv: kv[0].key))
            c = ring(parse_rational(str(rec["coefficient"])))
            terms[pp] = ring.add(terms.get(pp, ring.zero), c)
        return cls(terms, ring)


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|\^|[-+*()]))")


def parse_poly(text: str, ring: Ring = ZZ) -> CommPolynomial:
    """Parse the text form, e.g. ``"a1*a4 + a3*b1 - 2*d4^2 + 1"``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
        tokens.append((m.group(1), m.group(2), m.group(3), m.start()))
        pos = m.end()
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None, None, len(text))

    def atom():
        nonlocal i
        num, name, op, at = peek()
        if num is not None:
            i += 1
            return CommPolynomial.constant(parse_rational(num), ring)
        if name is not None:
            i += 1
            return CommPolynomial.variable(var(name), ring)
        if op == "(":
            i += 1
            val = expr()
            if peek()[2] != ")":
                raise ParseError(f"expected ')' at position {peek()[3]}")
            i += 1
            return val
        raise ParseError(f"unexpected token at position {at}")

    def power():
        nonlocal i
        base = atom()
        if peek()[2] in ("^", "**"):
            i += 1
            num, _, _, at = peek()
            if num is None or "/" in num:
                raise ParseError(f"expected integer exponent at position {at}")
            i += 1
            return base ** int(num)
        return base

    def term():
        nonlocal i
        val = power()
        while True:
            num, name, op, _ = peek()
            if op == "*":
                i += 1
                val = val * power()
            elif num is not None or name is not None or op == "(":
                val = val * power()
            else:
                return val

    def expr():
        nonlocal i
        sign = 1
        if peek()[2] in ("+", "-"):
            sign = -1 if peek()[2] == "-" else 1
            i += 1
        val = term() if sign == 1 else -term()
        while peek()[2] in ("+", "-"):
            op = peek()[2]
            i += 1
            t = term()
            val = val + t if op == "+" else val - t
        return val

    result = expr()
    if i != len(tokens):
        raise ParseError(f"trailing input at position {peek()[3]}")
    return result
