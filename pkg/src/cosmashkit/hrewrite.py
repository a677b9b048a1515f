"""The pull-out operator H^X on multilinear non-associative polynomials.

H^X looks for the submonomial X inside a monomial M.  If X sits two levels
below some node G, one of the four rewrite rules

    (Xy)z -> alpha,  (yX)z -> beta,  z(Xy) -> gamma,  z(yX) -> delta

replaces G by  k1 X(yz) + k2 X(zy) + k3 (yz)X + k4 (zy)X  where k is the
rule's coefficient family.  Otherwise M is left alone.  Coefficients are
integer polynomials in the sixteen rule indeterminates.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .commpoly import CommPolynomial, alpha, beta, delta, gamma
from .exactarith import ZZ
from .magma import Leaf, Monomial, Node, parse_monomial

if TYPE_CHECKING:
    from .magma import NAPolynomial

__all__ = [
    "NotPresent",
    "AtRoot",
    "RuleTable",
    "SymbolicNAPolynomial",
    "locate",
    "h_step",
    "h_apply",
    "h_compose",
    "SHAPES",
    "render_coefficient",
    "render",
]


class _Marker:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self):
        return self.name


NotPresent = _Marker("NotPresent")
AtRoot = _Marker("AtRoot")

# shape -> coefficient family
SHAPES = {"(Xy)z": "alpha", "(yX)z": "beta", "z(Xy)": "gamma", "z(yX)": "delta"}
_FAMILY = {"alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta}


class RuleTable:
    """Coefficients of the four rules; ``swap_delta`` exchanges delta_3 and delta_4."""

    def __init__(self, swap_delta: bool = False):
        self.swap_delta = swap_delta

    def coefficient(self, family: str, k: int) -> CommPolynomial:
        if self.swap_delta and family == "delta" and k in (3, 4):
            k = 7 - k
        return CommPolynomial.variable(_FAMILY[family](k), ZZ)

    def rhs(self, family: str, X: Monomial, y: Monomial, z: Monomial) -> list[tuple[CommPolynomial, Monomial]]:
        shapes = (Node(X, Node(y, z)), Node(X, Node(z, y)), Node(Node(y, z), X), Node(Node(z, y), X))
        return [(self.coefficient(family, k + 1), m) for k, m in enumerate(shapes)]

    def __eq__(self, other):
        return isinstance(other, RuleTable) and other.swap_delta == self.swap_delta

    def __hash__(self):
        return hash(self.swap_delta)


DEFAULT_RULES = RuleTable()


class SymbolicNAPolynomial:
    """Magma monomials with integer polynomial coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, CommPolynomial] | None = None):
        self.terms: dict[Monomial, CommPolynomial] = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def monomial(cls, m: Monomial | str) -> "SymbolicNAPolynomial":
        if isinstance(m, str):
            m = parse_monomial(m)
        return cls({m: CommPolynomial.constant(1, ZZ)})

    def __add__(self, other: "SymbolicNAPolynomial") -> "SymbolicNAPolynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out[m] + c if m in out else c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return SymbolicNAPolynomial(out)

    def __neg__(self):
        return SymbolicNAPolynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: CommPolynomial) -> "SymbolicNAPolynomial":
        return SymbolicNAPolynomial({m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, SymbolicNAPolynomial) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m: Monomial | str) -> CommPolynomial:
        if isinstance(m, str):
            m = parse_monomial(m)
        return self.terms.get(m, CommPolynomial.zero(ZZ))

    def support(self) -> set[Monomial]:
        return set(self.terms)

    def specialize(self, assignment: Mapping, field) -> "NAPolynomial":
        """Evaluate every coefficient, giving an ordinary polynomial over ``field``."""
        from .magma import NAPolynomial
        return NAPolynomial({m: c.evaluate(assignment, field) for m, c in self.terms.items()}, field)

    def __repr__(self):
        return "SymbolicNAPolynomial(" + ", ".join(
            f"({c}) {m}" for m, c in sorted(self.terms.items(), key=lambda kv: kv[0].key, reverse=True)) + ")"


def _leaves(m: Monomial) -> list[str]:
    return list(m.leaves())


def _check_multilinear(m: Monomial, what: str) -> None:
    names = _leaves(m)
    if len(names) != len(set(names)):
        raise ValueError(f"{what} {m} is not multilinear")


def _find(m: Monomial, X: Monomial, path: tuple) -> list[tuple]:
    if m == X:
        return [path]
    if isinstance(m, Leaf):
        return []
    return _find(m.left, X, path + ("L",)) + _find(m.right, X, path + ("R",))


def locate(M: Monomial | str, X: Monomial | str):
    """Path (tuple of 'L'/'R') to X in M, or :data:`NotPresent` / :data:`AtRoot`."""
    if isinstance(M, str):
        M = parse_monomial(M)
    if isinstance(X, str):
        X = parse_monomial(X)
    _check_multilinear(M, "monomial")
    _check_multilinear(X, "submonomial")
    hits = _find(M, X, ())
    if not hits:
        return NotPresent
    if len(hits) > 1:
        raise ValueError(f"{X} occurs more than once in {M}")
    path = hits[0]
    if len(path) < 2:
        return AtRoot
    return path


def _subtree(m: Monomial, path: Sequence[str]) -> Monomial:
    for step in path:
        m = m.left if step == "L" else m.right
    return m


def _replace(m: Monomial, path: Sequence[str], new: Monomial) -> Monomial:
    if not path:
        return new
    if path[0] == "L":
        return Node(_replace(m.left, path[1:], new), m.right)
    return Node(m.left, _replace(m.right, path[1:], new))


def _match(G: Node, path2: tuple[str, str]) -> tuple[str, Monomial, Monomial]:
    """Rule family and the (y, z) operands for X at ``path2`` below G."""
    outer, inner = path2
    P = G.left if outer == "L" else G.right
    z = G.right if outer == "L" else G.left
    y = P.right if inner == "L" else P.left
    shape = {("L", "L"): "(Xy)z", ("L", "R"): "(yX)z", ("R", "L"): "z(Xy)", ("R", "R"): "z(yX)"}[path2]
    return SHAPES[shape], y, z


def h_step(M: Monomial | str, X: Monomial | str, rules: RuleTable = DEFAULT_RULES) -> SymbolicNAPolynomial:
    if isinstance(M, str):
        M = parse_monomial(M)
    if isinstance(X, str):
        X = parse_monomial(X)
    where = locate(M, X)
    if where is NotPresent or where is AtRoot:
        return SymbolicNAPolynomial.monomial(M)
    gpath = where[:-2]
    G = _subtree(M, gpath)
    family, y, z = _match(G, where[-2:])
    out = {}
    for coef, rhs in rules.rhs(family, X, y, z):
        out[_replace(M, gpath, rhs)] = coef
    return SymbolicNAPolynomial(out)


def h_apply(p: SymbolicNAPolynomial, X: Monomial | str, rules: RuleTable = DEFAULT_RULES) -> SymbolicNAPolynomial:
    if isinstance(X, str):
        X = parse_monomial(X)
    out = SymbolicNAPolynomial()
    for m, c in p.terms.items():
        out = out + h_step(m, X, rules).scale(c)
    return out


def h_compose(p: SymbolicNAPolynomial | Monomial | str, Xs: Iterable[Monomial | str],
              rules: RuleTable = DEFAULT_RULES) -> SymbolicNAPolynomial:
    """Apply H^{X_1} first, then H^{X_2}, and so on."""
    if not isinstance(p, SymbolicNAPolynomial):
        p = SymbolicNAPolynomial.monomial(p)
    for X in Xs:
        p = h_apply(p, X, rules)
    return p


_GREEK = {"alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ", "lambda": "λ"}
_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _symbol(v) -> str:
    g = _GREEK.get(v.family)
    return g + str(v.index).translate(_SUB) if g else v.name


def render_coefficient(c: CommPolynomial) -> str:
    """Greek-letter form, e.g. ``α₂α₃ + α₄β₂``.

    Factors of a product are written in family-then-index order, repeated
    factors spelled out; products are ordered by their last factor.
    """
    terms = []
    for pp, k in c.terms.items():
        factors = sorted((v for v, e in pp for _ in range(e)), key=lambda v: v.key)
        terms.append((tuple(reversed([v.key for v in factors])), factors, k))
    terms.sort(key=lambda t: t[0])
    out = ""
    for i, (_, factors, k) in enumerate(terms):
        body = "".join(_symbol(v) for v in factors)
        mag = abs(k)
        if mag != 1 or not body:
            body = f"{mag}{body}"
        if i == 0:
            out = ("-" if k < 0 else "") + body
        else:
            out += (" - " if k < 0 else " + ") + body
    return out or "0"


def render(p: SymbolicNAPolynomial, order: Sequence[Monomial | str] | None = None) -> str:
    """``coefficient monomial + ...``; multi-term coefficients are parenthesised.

    ``order`` fixes the monomial sequence (default: insertion order).
    """
    ms = list(p.terms) if order is None else [parse_monomial(m) if isinstance(m, str) else m for m in order]
    if set(ms) != set(p.terms):
        raise ValueError("order must list exactly the support")
    parts = []
    for m in ms:
        c = p.terms[m]
        text = render_coefficient(c)
        if text == "1":
            parts.append(str(m))
        elif len(c.terms) > 1:
            parts.append(f"({text}){m}")
        else:
            parts.append(f"{text} {m}")
    return " + ".join(parts) if parts else "0"
