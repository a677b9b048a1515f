"""Buchberger Gröbner bases over QQ and GF(p).

Internally a monomial is a pair of packed integers: an *order key* whose
integer comparison is the monomial order, and an *exponent word* with a guard
bit per field used for divisibility tests.  Both are additive under
multiplication.  Polynomials are dicts from order key to coefficient, with the
terms kept in a heap during division.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .commpoly import (CommPolynomial, DEGREVLEX, Indeterminate, MonomialOrder, pp_degree,
                       pp_div, pp_lcm, _order)
from .exactarith import QQ, ZZ, PrimeField, Ring

__all__ = [
    "Ideal",
    "GroebnerBasis",
    "BudgetExceeded",
    "NotInIdeal",
    "s_polynomial",
    "reduce",
    "buchberger",
    "is_inconsistent",
    "lift",
    "clear_denominators",
]

_BITS = 8
_MASK = (1 << _BITS) - 1
_GUARD_BIT = 1 << (_BITS - 1)


class BudgetExceeded(RuntimeError):
    """Raised when a run hits its pair or time budget.

    ``state`` can be handed back to :func:`buchberger` (``resume=``) to
    continue where the run stopped.
    """

    def __init__(self, message: str, state: "_State"):
        super().__init__(message)
        self.state = state


class NotInIdeal(ValueError):
    pass


@dataclass
class Ideal:
    generators: list[CommPolynomial]
    order: MonomialOrder = DEGREVLEX

    def __post_init__(self):
        self.order = _order(self.order)
        self.generators = [g for g in self.generators if g]
        rings = {g.ring for g in self.generators}
        if len(rings) > 1:
            raise ValueError("generators over different rings")

    @property
    def ring(self) -> Ring:
        return self.generators[0].ring if self.generators else QQ


@dataclass
class GroebnerBasis:
    basis: list[CommPolynomial]
    order: MonomialOrder
    ring: Ring
    pairs_processed: int = 0
    max_degree: int = 0
    seconds: float = 0.0
    # cofactors[i][j]: coefficient of input generator j in basis element i
    cofactors: list[list[CommPolynomial]] | None = None

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant() and bool(self.basis[0])

    def reduce(self, f: CommPolynomial) -> CommPolynomial:
        return reduce(f, self.basis, self.order)

    def contains(self, f: CommPolynomial) -> bool:
        return not self.reduce(f)


class _Codec:
    """Translate between power products and packed monomials."""

    def __init__(self, variables: Sequence[Indeterminate], order: MonomialOrder):
        self.vars = list(variables)
        self.n = len(self.vars)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.lex = order.kind == "lex"
        self.guard = sum(_GUARD_BIT << (_BITS * i) for i in range(self.n))
        self._decode: dict[int, int] = {}

    def exps(self, pp) -> list[int]:
        e = [0] * self.n
        for v, k in pp:
            if k >= _GUARD_BIT:
                raise OverflowError("exponent too large for packed monomials")
            e[self.index[v]] = k
        return e

    def pack_exp(self, e: list[int]) -> int:
        # variable 0 in the most significant field
        w = 0
        for k in e:
            w = (w << _BITS) | k
        return w

    def pack_order(self, e: list[int]) -> int:
        if self.lex:
            return self.pack_exp(e)
        d = sum(e)
        if d >= 1 << _BITS:
            raise OverflowError("degree too large for packed monomials")
        # fields: d, d - e_n, d - e_n - e_{n-1}, ..., e_1
        w = d
        s = d
        for k in reversed(e[1:]):
            s -= k
            w = (w << _BITS) | s
        return w

    def unpack_order(self, o: int) -> list[int]:
        if not self.n:
            return []
        if self.lex:
            e = []
            for _ in range(self.n):
                e.append(o & _MASK)
                o >>= _BITS
            return e[::-1]
        fields = []
        for _ in range(self.n):
            fields.append(o & _MASK)
            o >>= _BITS
        fields.reverse()  # fields[0] = d, fields[j] = d - (e_n + ... + e_{n-j+1})
        e = [0] * self.n
        e[0] = fields[self.n - 1]
        for j in range(1, self.n):
            e[self.n - j] = fields[j - 1] - fields[j]
        return e

    def exp_of(self, o: int) -> int:
        w = self._decode.get(o)
        if w is None:
            w = self.pack_exp(self.unpack_order(o))
            self._decode[o] = w
        return w

    def degree_of(self, o: int) -> int:
        if self.lex or not self.n:
            return sum(self.unpack_order(o))
        return o >> (_BITS * (self.n - 1))

    def encode(self, p: CommPolynomial) -> dict[int, object]:
        return {self.pack_order(self.exps(pp)): c for pp, c in p.terms.items()}

    def decode(self, d: dict[int, object], ring: Ring) -> CommPolynomial:
        terms = {}
        for o, c in d.items():
            e = self.unpack_order(o)
            terms[tuple((self.vars[i], k) for i, k in enumerate(e) if k)] = c
        return CommPolynomial._raw(terms, ring)


class _Arith:
    """Coefficient operations specialised for the field."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.p = ring.p if isinstance(ring, PrimeField) else 0

    def inv(self, c):
        return pow(c, -1, self.p) if self.p else self.ring.inv(c)


@dataclass
class _Poly:
    terms: dict  # order key -> coefficient
    lm: int      # leading order key
    lexp: int    # packed exponent word of lm
    sugar: int
    cof: list | None = None  # cofactor dicts, one per input generator


@dataclass
class _State:
    codec: _Codec
    arith: _Arith
    order: MonomialOrder
    ngens: int
    track: bool
    basis: list = field(default_factory=list)   # list[_Poly]
    pairs: list = field(default_factory=list)   # heap of (sugar, lcm_key, i, j)
    pairs_processed: int = 0
    max_degree: int = 0
    seconds: float = 0.0
    pending: list = field(default_factory=list)  # inputs not yet inserted
    active: list = field(default_factory=list)   # indices eligible for new pairs
    strategy: str = "sugar"                      # or "normal": smallest lcm first


def _leading(d: dict) -> int:
    return max(d)


def _scaled_sub(target: dict, src: dict, shift: int, c, p: int) -> None:
    """target -= c * x^shift * src (in place)."""
    if p:
        for o, v in src.items():
            k = o + shift
            nv = (target.get(k, 0) - c * v) % p
            if nv:
                target[k] = nv
            else:
                target.pop(k, None)
    else:
        for o, v in src.items():
            k = o + shift
            nv = target.get(k, 0) - c * v
            if nv:
                target[k] = nv
            else:
                target.pop(k, None)


def _normal_form(st: _State, terms: dict, cof: list | None, full: bool = True,
                 skip: int = -1) -> tuple[dict, list | None]:
    """Reduce ``terms`` by the live basis; returns the (monic) remainder."""
    codec, p = st.codec, st.arith.p
    guard = codec.guard
    live = [(st.basis[i].lexp, st.basis[i]) for i in st.active if i != skip]
    terms = dict(terms)
    heap = [-o for o in terms]
    heapq.heapify(heap)
    rem: dict = {}
    while heap:
        o = -heapq.heappop(heap)
        c = terms.get(o)
        if c is None or o in rem:
            continue
        # drop duplicate heap entries
        while heap and heap[0] == -o:
            heapq.heappop(heap)
        e = codec.exp_of(o)
        reducer = None
        for ge, g in live:
            if not (e - ge) & guard:
                reducer = g
                break
        if reducer is None:
            rem[o] = c
            del terms[o]
            if not full:
                # top-reduction only: the rest is kept unreduced
                for k, v in terms.items():
                    rem[k] = v
                break
            continue
        shift = o - reducer.lm
        gt = reducer.terms
        if p:
            for k, v in gt.items():
                kk = k + shift
                old = terms.get(kk)
                if old is None:
                    terms[kk] = (-c * v) % p
                    heapq.heappush(heap, -kk)
                else:
                    nv = (old - c * v) % p
                    if nv:
                        terms[kk] = nv
                    else:
                        del terms[kk]
        else:
            for k, v in gt.items():
                kk = k + shift
                old = terms.get(kk)
                if old is None:
                    terms[kk] = -c * v
                    heapq.heappush(heap, -kk)
                else:
                    nv = old - c * v
                    if nv:
                        terms[kk] = nv
                    else:
                        del terms[kk]
        if cof is not None:
            for j in range(st.ngens):
                if reducer.cof[j]:
                    _scaled_sub(cof[j], reducer.cof[j], shift, c, p)
    return rem, cof


def _make_monic(st: _State, terms: dict, cof: list | None, sugar: int) -> _Poly:
    lm = _leading(terms)
    lc = terms[lm]
    p = st.arith.p
    if lc != 1:
        inv = st.arith.inv(lc)
        if p:
            terms = {k: v * inv % p for k, v in terms.items()}
            if cof is not None:
                cof = [{k: v * inv % p for k, v in d.items()} for d in cof]
        else:
            terms = {k: _norm(v * inv) for k, v in terms.items()}
            if cof is not None:
                cof = [{k: _norm(v * inv) for k, v in d.items()} for d in cof]
    return _Poly(terms, lm, st.codec.exp_of(lm), sugar, cof)


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _lcm_exp(a: int, b: int, n: int) -> int:
    w = 0
    for i in range(n - 1, -1, -1):
        s = _BITS * i
        w = (w << _BITS) | max((a >> s) & _MASK, (b >> s) & _MASK)
    return w


def _exp_to_order(codec: _Codec, w: int) -> int:
    e = []
    for _ in range(codec.n):
        e.append(w & _MASK)
        w >>= _BITS
    return codec.pack_order(e[::-1])


def _coprime(a: int, b: int) -> bool:
    # no variable occurs in both leading monomials
    n = 0
    while a and b:
        if (a & _MASK) and (b & _MASK):
            return False
        a >>= _BITS
        b >>= _BITS
        n += 1
    return True


def _divides(a: int, b: int, guard: int) -> bool:
    return not (b - a) & guard


def _update(st: _State, h_index: int) -> None:
    """Gebauer–Möller update of the pair queue for a new basis element."""
    codec = st.codec
    guard = codec.guard
    n = codec.n
    h = st.basis[h_index]
    cands = []
    for i in st.active:
        g = st.basis[i]
        cands.append((i, _lcm_exp(g.lexp, h.lexp, n), _coprime(g.lexp, h.lexp)))
    # keep (g, h) if coprime or if no other candidate lcm divides its lcm
    kept = []
    for a, (i, lcm, cop) in enumerate(cands):
        if cop:
            kept.append((i, lcm, cop))
            continue
        rest = [c[1] for c in kept] + [c[1] for c in cands[a + 1:]]
        if any(_divides(other, lcm, guard) for other in rest):
            continue
        kept.append((i, lcm, cop))
    # old pairs survive unless lm(h) strictly cuts them
    old = []
    for entry in st.pairs:
        _, _, lcm, i, j = entry
        if _divides(h.lexp, lcm, guard):
            if (_lcm_exp(st.basis[i].lexp, h.lexp, n) != lcm
                    and _lcm_exp(st.basis[j].lexp, h.lexp, n) != lcm):
                continue
        old.append(entry)
    hdeg = h.sugar - codec.degree_of(h.lm)
    for i, lcm, cop in kept:
        if cop:
            continue
        g = st.basis[i]
        okey = _exp_to_order(codec, lcm)
        if st.strategy == "normal":
            sugar = codec.degree_of(okey)
        else:
            sugar = max(g.sugar - codec.degree_of(g.lm), hdeg) + codec.degree_of(okey)
        old.append((sugar, okey, lcm, i, h_index))
    heapq.heapify(old)
    st.pairs = old
    st.active = [i for i in st.active if not _divides(h.lexp, st.basis[i].lexp, guard)]
    st.active.append(h_index)


def _spoly_terms(st: _State, i: int, j: int, lcm_order: int):
    gi, gj = st.basis[i], st.basis[j]
    p = st.arith.p
    si, sj = lcm_order - gi.lm, lcm_order - gj.lm
    terms = {k + si: v for k, v in gi.terms.items()}
    _scaled_sub(terms, gj.terms, sj, 1, p)
    cof = None
    if st.track:
        cof = [{k + si: v for k, v in d.items()} for d in gi.cof]
        for t in range(st.ngens):
            _scaled_sub(cof[t], gj.cof[t], sj, 1, p)
    return terms, cof


def _insert(st: _State, poly: _Poly) -> int:
    st.basis.append(poly)
    idx = len(st.basis) - 1
    _update(st, idx)
    return idx


def _is_unit(poly: _Poly) -> bool:
    return poly.lm == 0


def _init_state(ideal: Ideal, track: bool, strategy: str = "sugar") -> _State:
    gens = ideal.generators
    variables = sorted({v for g in gens for v in g.indeterminates()}, key=lambda v: v.key)
    codec = _Codec(variables, ideal.order)
    st = _State(codec, _Arith(ideal.ring), ideal.order, len(gens), track, strategy=strategy)
    for idx, g in enumerate(gens):
        terms = codec.encode(g)
        cof = None
        if track:
            cof = [{} for _ in gens]
            cof[idx] = {0: 1}
        st.pending.append((terms, cof, max(pp_degree(pp) for pp in g.terms)))
    # smallest inputs first
    st.pending.sort(key=lambda t: (t[2], _leading(t[0])), reverse=True)
    return st


def _run(st: _State, max_pairs=None, max_seconds=None, max_degree=None) -> None:
    start = time.monotonic()
    base = st.seconds
    codec = st.codec
    pair_limit = None if max_pairs is None else st.pairs_processed + max_pairs
    try:
        while st.pending:
            terms, cof, sugar = st.pending.pop()
            rem, cof = _normal_form(st, terms, cof)
            if rem:
                poly = _make_monic(st, rem, cof, sugar)
                _insert(st, poly)
                if _is_unit(poly):
                    st.pairs = []
                    st.pending = []
                    return
        while st.pairs:
            if pair_limit is not None and st.pairs_processed >= pair_limit:
                raise BudgetExceeded(f"S-pair budget of {max_pairs} exhausted", st)
            # the time budget is per call, so a resumed run gets a fresh slice
            if max_seconds is not None and time.monotonic() - start >= max_seconds:
                raise BudgetExceeded(f"time budget of {max_seconds}s exhausted", st)
            sugar, okey, lcm, i, j = heapq.heappop(st.pairs)
            if max_degree is not None and codec.degree_of(okey) > max_degree:
                heapq.heappush(st.pairs, (sugar, okey, lcm, i, j))
                raise BudgetExceeded(f"degree budget {max_degree} exceeded", st)
            st.pairs_processed += 1
            st.max_degree = max(st.max_degree, codec.degree_of(okey))
            terms, cof = _spoly_terms(st, i, j, okey)
            if not terms:
                continue
            rem, cof = _normal_form(st, terms, cof)
            if not rem:
                continue
            poly = _make_monic(st, rem, cof, sugar)
            _insert(st, poly)
            if _is_unit(poly):
                st.pairs = []
                return
    finally:
        st.seconds = base + time.monotonic() - start


def _interreduce(st: _State) -> list[_Poly]:
    guard = st.codec.guard
    polys = [st.basis[i] for i in st.active]
    # minimal basis: drop elements whose lm is divisible by another lm
    polys.sort(key=lambda g: g.lm)
    minimal: list[_Poly] = []
    for g in polys:
        if any(_divides(m.lexp, g.lexp, guard) for m in minimal):
            continue
        minimal.append(g)
    # tail reduction
    st.basis = list(minimal)
    st.active = list(range(len(minimal)))
    out = []
    for i, g in enumerate(minimal):
        rem, cof = _normal_form(st, g.terms, [dict(c) for c in g.cof] if g.cof is not None else None,
                                skip=i)
        # the leading term survives because no other lm divides it
        poly = _make_monic(st, rem, cof, g.sugar)
        out.append(poly)
        st.basis[i] = poly
    out.sort(key=lambda g: g.lm, reverse=True)
    return out


def buchberger(ideal: Ideal | Sequence[CommPolynomial], order: MonomialOrder | str | None = None, *,
               max_pairs: int | None = None, max_seconds: float | None = None,
               max_degree: int | None = None, track: bool = False,
               resume: _State | None = None, strategy: str = "sugar") -> GroebnerBasis:
    """Reduced Gröbner basis with Gebauer–Möller pair pruning and sugar selection.

    ``strategy="normal"`` selects pairs by lcm degree instead of sugar.
    ``track=True`` records, for each basis element, cofactors expressing it in
    the input generators (needed by :func:`lift`).
    """
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal), _order(order or DEGREVLEX))
    elif order is not None:
        ideal = Ideal(ideal.generators, _order(order))
    ring = ideal.ring
    if not ring.is_field:
        raise ValueError("Gröbner bases need field coefficients (use q or fp:<p>)")
    if resume is not None:
        st = resume
    else:
        if not ideal.generators:
            return GroebnerBasis([], ideal.order, ring)
        if strategy not in ("sugar", "normal"):
            raise ValueError(f"unknown pair selection strategy {strategy!r}")
        st = _init_state(ideal, track, strategy)
    _run(st, max_pairs=max_pairs, max_seconds=max_seconds, max_degree=max_degree)
    final = _interreduce(st)
    codec = st.codec
    basis = [codec.decode(g.terms, ring) for g in final]
    cofactors = None
    if st.track:
        cofactors = [[codec.decode(c, ring) for c in g.cof] for g in final]
    return GroebnerBasis(basis, st.order, ring, st.pairs_processed, st.max_degree,
                         st.seconds, cofactors)


def s_polynomial(f: CommPolynomial, g: CommPolynomial, order: MonomialOrder | str = DEGREVLEX) -> CommPolynomial:
    if not f or not g:
        raise ValueError("S-polynomial of a zero polynomial")
    o = _order(order)
    mf, cf = f.leading_term(o)
    mg, cg = g.leading_term(o)
    R = f.ring
    lcm = pp_lcm(mf, mg)
    return f.mul_term(pp_div(lcm, mf), R.inv(cf)) - g.mul_term(pp_div(lcm, mg), R.inv(cg))


def reduce(f: CommPolynomial, G: Sequence[CommPolynomial], order: MonomialOrder | str = DEGREVLEX) -> CommPolynomial:
    """Full normal form of ``f`` modulo ``G`` (generic division, any order of G)."""
    o = _order(order)
    G = [g for g in G if g]
    if not f or not G:
        return f
    R = f.ring
    variables = sorted({v for g in [f, *G] for v in g.indeterminates()}, key=lambda v: v.key)
    codec = _Codec(variables, o)
    st = _State(codec, _Arith(R), o, 0, False)
    for g in G:
        st.basis.append(_make_monic(st, codec.encode(g), None, 0))
    st.active = list(range(len(st.basis)))
    rem, _ = _normal_form(st, codec.encode(f), None)
    return codec.decode(rem, R)


def is_inconsistent(ideal: Ideal | Sequence[CommPolynomial], order: MonomialOrder | str | None = None,
                    **budget) -> bool:
    return buchberger(ideal, order, **budget).is_unit()


def clear_denominators(cofactors: Sequence[CommPolynomial]) -> tuple[list[CommPolynomial], int]:
    """Scale rational cofactors to integer ones; returns (cofactors, n)."""
    import math
    den = 1
    for h in cofactors:
        for c in h.terms.values():
            if isinstance(c, Fraction):
                den = den * c.denominator // math.gcd(den, c.denominator)
    out = [CommPolynomial._raw({pp: int(c * den) for pp, c in h.terms.items()}, ZZ) for h in cofactors]
    g = 0
    for h in out:
        for c in h.terms.values():
            g = math.gcd(g, c)
    # keep n exact: only divide by a common factor of every cofactor and of den
    g = math.gcd(g, den) if g else den
    if g > 1:
        out = [CommPolynomial._raw({pp: c // g for pp, c in h.terms.items()}, ZZ) for h in out]
        den //= g
    return out, den


def lift(ideal: Ideal | Sequence[CommPolynomial], target: CommPolynomial,
         order: MonomialOrder | str | None = None, **budget) -> list[CommPolynomial]:
    """Cofactors h_i with sum h_i g_i = target, from the traced Buchberger run."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal), _order(order or DEGREVLEX))
    gens = ideal.generators
    R = ideal.ring
    gb = buchberger(ideal, order, track=True, **budget)
    # divide target by the basis, recording quotients
    variables = sorted({v for g in [target, *gens, *gb.basis] for v in g.indeterminates()},
                       key=lambda v: v.key)
    codec = _Codec(variables, ideal.order)
    st = _State(codec, _Arith(R), ideal.order, len(gens), True)
    for b, cof in zip(gb.basis, gb.cofactors):
        poly = _make_monic(st, codec.encode(b), [codec.encode(c) for c in cof], 0)
        st.basis.append(poly)
    st.active = list(range(len(st.basis)))
    neg = [{} for _ in gens]
    rem, neg = _normal_form(st, codec.encode(target), neg)
    if rem:
        raise NotInIdeal("target is not in the ideal")
    # _normal_form accumulated -(sum of quotient * cofactor); flip the sign
    return [(-codec.decode(d, R)) for d in neg]
