"""Exact linear algebra over QQ and GF(p).

Dense matrices go through :func:`rref` (fraction-free Bareiss elimination over
QQ, ordinary elimination over GF(p)).  :class:`SparseEchelon` is an
incremental echelon form on sparse rows, used when spanning sets are large
and mostly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .exactarith import QQ, PrimeField, Ring

__all__ = [
    "Matrix",
    "NoSolution",
    "rref",
    "rank",
    "kernel_basis",
    "in_span",
    "solve_affine",
    "SparseEchelon",
]


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class Matrix:
    """Rectangular matrix of exact field scalars (immutable by convention)."""

    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows: Sequence[Sequence], field: Ring = QQ, ncols: int | None = None):
        self.field = field
        self.rows = [[field(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("matrix rows have different lengths")

    @classmethod
    def zeros(cls, m: int, n: int, field: Ring = QQ) -> "Matrix":
        return cls([[0] * n for _ in range(m)], field, n)

    @classmethod
    def identity(cls, n: int, field: Ring = QQ) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], field, n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.shape == other.shape
                and self.field == other.field and self.rows == other.rows)

    def __repr__(self):
        return f"Matrix({self.rows!r}, {self.field.spec})"

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for a matrix with {self.ncols} columns")
        F = self.field
        out = []
        for r in self.rows:
            s = F.zero
            for a, b in zip(r, v):
                if a and b:
                    s = F.add(s, F.mul(a, b))
            out.append(s)
        return out

    def stack(self, other: "Matrix") -> "Matrix":
        if other.ncols != self.ncols:
            raise ValueError("column counts differ")
        return Matrix(self.rows + other.rows, self.field, self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                      self.field, self.nrows)


@dataclass(frozen=True)
class NoSolution:
    reason: str = "inconsistent system"

    def __bool__(self):
        return False


def _rref_fp(rows: list[list[int]], ncols: int, p: int):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _rref_qq(rows: list[list], ncols: int):
    # clear denominators row by row, then fraction-free (Bareiss) forward pass
    work = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction):
                den = den * x.denominator // _gcd(den, x.denominator)
        work.append([int(x * den) for x in row])
    m = len(work)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, m) if work[i][c]), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        pr = work[r]
        a = pr[c]
        for i in range(r + 1, m):
            b = work[i][c]
            row = work[i]
            work[i] = [(a * x - b * y) // prev for x, y in zip(row, pr)]
        prev = a
        pivots.append(c)
        r += 1
        if r == m:
            break
    # back substitution to reduced form over QQ
    out = [[Fraction(x) for x in work[i]] for i in range(r)]
    for k in range(r - 1, -1, -1):
        c = pivots[k]
        inv = 1 / out[k][c]
        out[k] = [x * inv for x in out[k]]
        for i in range(k):
            f = out[i][c]
            if f:
                out[i] = [x - f * y for x, y in zip(out[i], out[k])]
    out = [[_norm(x) for x in row] for row in out]
    out += [[0] * ncols for _ in range(m - r)]
    return out, pivots


def _gcd(a: int, b: int) -> int:
    from math import gcd
    return gcd(a, b)


def rref(M: Matrix) -> tuple[Matrix, list[int], int]:
    """Reduced row echelon form, pivot columns (first nonzero choice) and rank."""
    if isinstance(M.field, PrimeField):
        rows, pivots = _rref_fp(M.rows, M.ncols, M.field.p)
    else:
        rows, pivots = _rref_qq(M.rows, M.ncols)
    return Matrix(rows, M.field, M.ncols), pivots, len(pivots)


def rank(M: Matrix) -> int:
    return rref(M)[2]


def kernel_basis(M: Matrix) -> list[list]:
    """Basis of {v : Mv = 0}, one vector per free column.

    Each vector is scaled so that its first nonzero entry is 1.
    """
    R, pivots, rk = rref(M)
    F = M.field
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [F.zero] * M.ncols
        v[f] = F.one
        for k, c in enumerate(pivots):
            v[c] = F.neg(R.rows[k][f])
        lead = next(x for x in v if not F.is_zero(x))
        if lead != F.one:
            inv = F.inv(lead)
            v = [F.mul(x, inv) for x in v]
        basis.append(v)
    return basis


def in_span(v: Sequence, S: Sequence[Sequence], field: Ring = QQ):
    """``(True, coefficients)`` if v is a combination of S, else ``(False, None)``."""
    n = len(v)
    for s in S:
        if len(s) != n:
            raise ValueError("dimension mismatch")
    if not S:
        if all(field.is_zero(field(x)) for x in v):
            return True, []
        return False, None
    # columns of A are the vectors of S
    A = Matrix([[S[j][i] for j in range(len(S))] for i in range(n)], field, len(S))
    sol = solve_affine(A, v)
    if isinstance(sol, NoSolution):
        return False, None
    return True, sol[0]


def solve_affine(M: Matrix, b: Sequence):
    """All x with Mx = b, as ``(particular, kernel_basis)`` or :class:`NoSolution`."""
    if len(b) != M.nrows:
        raise ValueError("right-hand side has the wrong length")
    F = M.field
    aug = Matrix([list(r) + [F(bi)] for r, bi in zip(M.rows, b)], F, M.ncols + 1)
    R, pivots, _ = rref(aug)
    if M.ncols in pivots:
        return NoSolution()
    x = [F.zero] * M.ncols
    for k, c in enumerate(pivots):
        x[c] = R.rows[k][M.ncols]
    if M.apply(x) != [F(bi) for bi in b]:
        raise ArithmeticError("particular solution failed verification")
    return x, kernel_basis(M)


class SparseEchelon:
    """Incrementally maintained echelon basis of sparse vectors.

    Vectors are dicts from column key to nonzero scalar.  ``rank_key`` orders
    columns; the pivot of a row is its largest column.  Rows are kept monic and
    mutually reduced at their pivots only (semi-reduced), which is enough for
    membership tests and rank.
    """

    def __init__(self, field: Ring = QQ, key=None):
        self.field = field
        self.key = key
        self.rows: dict[Hashable, dict] = {}  # pivot -> row
        self._p = field.p if isinstance(field, PrimeField) else 0

    def __len__(self) -> int:
        return len(self.rows)

    def _pivot(self, v: dict):
        return max(v, key=self.key) if self.key else max(v)

    def reduce(self, v: dict) -> dict:
        """Remainder of ``v`` after eliminating every pivot column it meets."""
        v = dict(v)
        p = self._p
        key = self.key
        while True:
            cols = [c for c in v if c in self.rows]
            if not cols:
                return v
            # largest pivot first: its row only touches smaller columns
            c = max(cols, key=key) if key else max(cols)
            f = v[c]
            for k, x in self.rows[c].items():
                if p:
                    nv = (v.get(k, 0) - f * x) % p
                else:
                    nv = _norm(v.get(k, 0) - f * x)
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)

    def add(self, v: dict) -> bool:
        """Insert ``v``; returns True if it enlarged the span."""
        r = self.reduce({k: x for k, x in v.items() if not self.field.is_zero(x)})
        if not r:
            return False
        piv = self._pivot(r)
        inv = self.field.inv(r[piv])
        if self._p:
            r = {k: x * inv % self._p for k, x in r.items()}
        else:
            r = {k: _norm(x * inv) for k, x in r.items()}
        self.rows[piv] = r
        return True

    def extend(self, vs: Iterable[dict]) -> int:
        return sum(1 for v in vs if self.add(v))

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def pivots(self) -> set:
        return set(self.rows)
