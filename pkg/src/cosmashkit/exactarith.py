"""Exact scalars: integers, rationals and prime fields.

Integers are plain Python ``int`` and rationals are :class:`fractions.Fraction`.
Prime field elements are stored inside polynomials and matrices as bare
residues in ``range(p)``; the field object carries the modulus and does the
arithmetic.  :class:`PrimeFieldElement` is the standalone value type used at
API boundaries.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ParseError",
    "Ring",
    "IntegerRing",
    "RationalField",
    "PrimeField",
    "PrimeFieldElement",
    "ZZ",
    "QQ",
    "GF",
    "parse_field",
    "parse_decimal",
    "format_decimal",
    "parse_rational",
    "gcd",
    "lcm",
    "field_invert",
    "is_prime",
]


class ParseError(ValueError):
    """Malformed textual input."""


_DECIMAL_RE = re.compile(r"-?[0-9]+")
_CHUNK = 1000


def parse_decimal(s: str) -> int:
    """Read an optionally signed decimal integer of any length."""
    if not isinstance(s, str):
        raise TypeError("expected a string")
    if not s:
        raise ParseError("empty string at position 0")
    for i, ch in enumerate(s):
        if ch.isdigit() and ch.isascii():
            continue
        if ch == "-" and i == 0 and len(s) > 1:
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    neg = s.startswith("-")
    digits = s[1:] if neg else s
    # chunked so the interpreter's str->int digit limit never applies
    value = 0
    for start in range(0, len(digits), _CHUNK):
        piece = digits[start:start + _CHUNK]
        value = value * 10 ** len(piece) + int(piece)
    return -value if neg else value


def format_decimal(n: int) -> str:
    """Inverse of :func:`parse_decimal` for canonical strings."""
    if n < 0:
        return "-" + format_decimal(-n)
    if n < 10 ** _CHUNK:
        return str(n)
    parts = []
    base = 10 ** _CHUNK
    while n:
        n, r = divmod(n, base)
        parts.append(r)
    head = str(parts[-1])
    return head + "".join(str(p).zfill(_CHUNK) for p in reversed(parts[:-1]))


def parse_rational(s: str) -> Fraction:
    """Parse ``"num"`` or ``"num/den"``."""
    s = s.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        d = parse_decimal(den.strip())
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return Fraction(parse_decimal(num.strip()), d)
    return Fraction(parse_decimal(s))


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // math.gcd(a, b)


def is_prime(p: int) -> bool:
    """Deterministic trial division; fine for the small moduli used here."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


class Ring:
    """Coefficient domain.  Elements are plain Python numbers."""

    characteristic: int = 0
    is_field: bool = True
    spec: str = ""

    zero = 0
    one = 1

    def __call__(self, x):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        return a ** n

    def is_zero(self, a) -> bool:
        return a == 0

    def parse(self, s: str):
        return self(parse_rational(s))

    def format(self, a) -> str:
        return str(a)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)


class IntegerRing(Ring):
    is_field = False
    spec = "z"

    def __call__(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        if isinstance(x, PrimeFieldElement):
            raise TypeError("cannot coerce a prime field element into ZZ")
        return int(x)

    def inv(self, a):
        if a in (1, -1):
            return a
        if a == 0:
            raise ZeroDivisionError("division by zero")
        raise ArithmeticError(f"{a} is not a unit in ZZ")

    def div(self, a, b):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{b} does not divide {a} in ZZ")
        return q

    def parse(self, s: str):
        return parse_decimal(s.strip())


class RationalField(Ring):
    spec = "q"

    def __call__(self, x):
        if isinstance(x, PrimeFieldElement):
            raise TypeError("cannot coerce a prime field element into QQ")
        if isinstance(x, str):
            x = parse_rational(x)
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else x

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("division by zero")
        r = Fraction(1) / a
        return r.numerator if r.denominator == 1 else r

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        r = Fraction(a) / b
        return r.numerator if r.denominator == 1 else r


class PrimeField(Ring):
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.spec = f"fp:{p}"

    def __call__(self, x):
        if isinstance(x, PrimeFieldElement):
            if x.modulus != self.p:
                raise ValueError("modulus mismatch")
            return x.residue
        if isinstance(x, str):
            x = parse_rational(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"denominator {x.denominator} not invertible mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return pow(a, -1, self.p)

    def pow(self, a, n: int):
        return pow(a, n, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def element(self, a) -> "PrimeFieldElement":
        return PrimeFieldElement(self(a), self.p)


ZZ = IntegerRing()
QQ = RationalField()
_FIELDS: dict[int, PrimeField] = {}


def GF(p: int) -> PrimeField:
    if p not in _FIELDS:
        _FIELDS[p] = PrimeField(p)
    return _FIELDS[p]


def parse_field(spec: str) -> Ring:
    """``"q"`` -> QQ, ``"z"`` -> ZZ, ``"fp:<p>"`` -> GF(p)."""
    s = spec.strip().lower()
    if s in ("q", "qq"):
        return QQ
    if s in ("z", "zz"):
        return ZZ
    if s.startswith("fp:"):
        return GF(parse_decimal(s[3:]))
    raise ParseError(f"unknown field spec {spec!r}")


@dataclass(frozen=True)
class PrimeFieldElement:
    residue: int
    modulus: int

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ValueError(f"{self.modulus} is not prime")
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, PrimeFieldElement):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            return other.residue
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement((self.residue + o) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement((self.residue - o) % self.modulus, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement((o - self.residue) % self.modulus, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PrimeFieldElement(self.residue * o % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return PrimeFieldElement(-self.residue % self.modulus, self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * field_invert(PrimeFieldElement(o, self.modulus))

    def __bool__(self) -> bool:
        return self.residue != 0

    def __int__(self) -> int:
        return self.residue

    def __str__(self) -> str:
        return str(self.residue)


def field_invert(x: PrimeFieldElement) -> PrimeFieldElement:
    if x.residue == 0:
        raise ZeroDivisionError(f"0 has no inverse in GF({x.modulus})")
    return PrimeFieldElement(pow(x.residue, -1, x.modulus), x.modulus)
