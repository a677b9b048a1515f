"""Cosmash products, comparison maps, Higgins commutators and the CA model.

Coproducts of free factors (and of finite-dimensional factors given by
multiplication tables) are truncated free algebras.  The n-ary cosmash is the
kernel of the map killing each block of factors in turn; kernels are
computed slice by slice, a slice being one grade (multidegree in the atomic
generators) when every relation involved is homogeneous.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .commpoly import CommPolynomial, var
from .exactarith import QQ, PrimeField, Ring, parse_field
from .linalg import Matrix, kernel_basis, rank, rref, solve_affine, NoSolution, SparseEchelon
from .magma import Leaf, Monomial, NAPolynomial, Node, parse_expression, print_expression, substitute
from .variety import DEFAULT_LIMIT, TruncatedFreeAlgebra, VarietyPresentation, truncated_free_algebra

__all__ = [
    "FreeFactor",
    "FDAlgebra",
    "PresentedFactor",
    "coproduct_truncated",
    "SigmaMap",
    "sigma_map",
    "CosmashResult",
    "cosmash",
    "cross_effect_kernel",
    "DegreeReport",
    "ComparisonReport",
    "comparison_phi",
    "comparison_psi",
    "comparison_quaternary",
    "IndependenceResult",
    "independence_check",
    "HigginsResult",
    "higgins_commutator",
    "ca_coproduct",
    "ca_cosmash_tensor_check",
    "ca_ternary_kernel_dimension",
    "closure_check",
    "random_ca_algebra",
    "random_instance",
]


# -- factors -------------------------------------------------------------------------

@dataclass
class FreeFactor:
    generators: tuple[str, ...]
    weights: dict[str, int] | None = None

    def __post_init__(self):
        self.generators = tuple(self.generators)

    @property
    def names(self) -> list[str]:
        return list(self.generators)

    def weight_map(self) -> dict[str, int]:
        return {g: (self.weights or {}).get(g, 1) for g in self.generators}

    def grade_map(self) -> dict[str, Counter]:
        return {}

    def relations(self, field: Ring) -> list[NAPolynomial]:
        return []


class FDAlgebra:
    """Finite-dimensional algebra by structure constants e_i e_j = sum_k c[i,j,k] e_k."""

    def __init__(self, labels: Sequence[str], table: Mapping[tuple[int, int], Mapping[int, object]],
                 field: Ring = QQ, weights: Sequence[int] | None = None):
        self.labels = list(labels)
        self.field = field
        self.dimension = len(self.labels)
        self.table: dict[tuple[int, int], dict[int, object]] = {}
        for (i, j), out in table.items():
            row = {k: field(c) for k, c in out.items() if not field.is_zero(field(c))}
            if row:
                self.table[(i, j)] = row
        self.weights = list(weights) if weights is not None else [1] * self.dimension

    # construction ---------------------------------------------------------------
    @classmethod
    def from_json(cls, data: Mapping | str) -> "FDAlgebra":
        if isinstance(data, str):
            data = json.loads(data)
        F = parse_field(data.get("field", "q"))
        n = int(data["dimension"])
        labels = data.get("basis") or [f"e{i + 1}" for i in range(n)]
        table: dict = {}
        for i, j, k, v in data.get("constants", []):
            table.setdefault((int(i), int(j)), {})[int(k)] = F(v) if not isinstance(v, str) else _scalar(F, v)
        return cls(labels, table, F, data.get("weights"))

    def to_json(self) -> dict:
        consts = [[i, j, k, _fmt(self.field, c)] for (i, j), row in sorted(self.table.items())
                  for k, c in sorted(row.items())]
        return {"dimension": self.dimension, "basis": self.labels, "field": self.field.spec,
                "constants": consts, "weights": self.weights}

    @classmethod
    def zero_algebra(cls, n: int, field: Ring = QQ, prefix: str = "e") -> "FDAlgebra":
        return cls([f"{prefix}{i + 1}" for i in range(n)], {}, field)

    def relabel(self, prefix: str) -> "FDAlgebra":
        return FDAlgebra([f"{prefix}{i + 1}" for i in range(self.dimension)], self.table, self.field, self.weights)

    def change_basis(self, P: Sequence[Sequence]) -> "FDAlgebra":
        """Same algebra in the basis f_j = sum_i P[i][j] e_i (P invertible)."""
        F = self.field
        n = self.dimension
        M = Matrix(P, F, n)
        inv_cols = []
        for k in range(n):
            sol = solve_affine(M, [F.one if i == k else F.zero for i in range(n)])
            if isinstance(sol, NoSolution) or sol[1]:
                raise ValueError("basis change matrix is singular")
            inv_cols.append(sol[0])  # e_k = sum_l inv_cols[k][l] f_l
        cols = [[M[i, j] for i in range(n)] for j in range(n)]
        table = {}
        for a in range(n):
            for b in range(n):
                prod = self.multiply(cols[a], cols[b])
                out = [F.zero] * n
                for k, c in enumerate(prod):
                    if not F.is_zero(c):
                        for l, x in enumerate(inv_cols[k]):
                            out[l] = F.add(out[l], F.mul(c, x))
                table[(a, b)] = dict(enumerate(out))
        return FDAlgebra(self.labels, table, F, self.weights)

    # arithmetic -------------------------------------------------------------------
    def basis_vector(self, i: int) -> list:
        return [self.field.one if k == i else self.field.zero for k in range(self.dimension)]

    def multiply(self, x: Sequence, y: Sequence) -> list:
        F = self.field
        out = [F.zero] * self.dimension
        for (i, j), row in self.table.items():
            if F.is_zero(x[i]) or F.is_zero(y[j]):
                continue
            s = F.mul(x[i], y[j])
            for k, c in row.items():
                out[k] = F.add(out[k], F.mul(s, c))
        return out

    def multiply_generic(self, x: Sequence, y: Sequence) -> list:
        """Product of vectors with polynomial (or any ring-like) coordinates."""
        out = [None] * self.dimension
        for (i, j), row in self.table.items():
            s = x[i] * y[j]
            if not s:
                continue
            for k, c in row.items():
                t = s.scale(c) if hasattr(s, "scale") else s * c
                out[k] = t if out[k] is None else out[k] + t
        return out

    def is_commutative(self) -> bool:
        return all(self.table.get((i, j), {}) == self.table.get((j, i), {})
                   for i in range(self.dimension) for j in range(i))

    def is_associative(self) -> bool:
        n = self.dimension
        e = [self.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                ij = self.multiply(e[i], e[j])
                for k in range(n):
                    if self.multiply(ij, e[k]) != self.multiply(e[i], self.multiply(e[j], e[k])):
                        return False
        return True

    def is_ca(self) -> bool:
        return self.is_commutative() and self.is_associative()

    def satisfies(self, phi: NAPolynomial | str) -> bool:
        """Whether phi vanishes on generic elements (as functions over a prime field)."""
        if isinstance(phi, str):
            phi = parse_expression(phi, self.field)
        vals = _generic_evaluate(self, phi)
        return all(_vanishes(v, self.field) for v in vals)

    # as a factor in a coproduct ---------------------------------------------------
    @property
    def names(self) -> list[str]:
        return list(self.labels)

    def weight_map(self) -> dict[str, int]:
        return dict(zip(self.labels, self.weights))

    def grade_map(self) -> dict[str, Counter]:
        return {}

    def relations(self, field: Ring) -> list[NAPolynomial]:
        out = []
        for i in range(self.dimension):
            for j in range(self.dimension):
                terms = {Node(Leaf(self.labels[i]), Leaf(self.labels[j])): field.one}
                for k, c in self.table.get((i, j), {}).items():
                    terms[Leaf(self.labels[k])] = field.neg(field(c))
                out.append(NAPolynomial(terms, field))
        return out

    def __repr__(self):
        return f"FDAlgebra(dim={self.dimension}, field={self.field.spec}, nonzero products={len(self.table)})"


def _scalar(F: Ring, text: str):
    from fractions import Fraction
    return F(Fraction(text))


def _fmt(F: Ring, c) -> str:
    return str(c)


class PresentedFactor(FDAlgebra):
    """A finite-dimensional factor whose basis carries weights and grade vectors.

    Used to feed a cosmash back in as a factor: basis element k_i stands for a
    kernel vector of known grade, products are given by the table.
    """

    def __init__(self, labels, table, field, weights, grades: Sequence[Mapping[str, int]],
                 images: Sequence[NAPolynomial]):
        super().__init__(labels, table, field, weights)
        self.grades = [Counter(g) for g in grades]
        self.images = list(images)

    def grade_map(self) -> dict[str, Counter]:
        return dict(zip(self.labels, self.grades))


def coproduct_truncated(V: VarietyPresentation, factors: Sequence, bound: int,
                        limit: int = DEFAULT_LIMIT) -> TruncatedFreeAlgebra:
    """Coproduct of the factors in V, cut at weighted degree ``bound``."""
    factors = [FreeFactor(tuple(f)) if isinstance(f, (list, tuple, str)) else f for f in factors]
    weights: dict[str, int] = {}
    grades: dict[str, Counter] = {}
    relations: list[NAPolynomial] = []
    for f in factors:
        for name, w in f.weight_map().items():
            if name in weights:
                raise ValueError(f"generator {name!r} appears in two factors")
            weights[name] = w
        grades.update(f.grade_map())
        relations.extend(f.relations(V.field))
    T = truncated_free_algebra(V, weights, bound, relations, limit, grades)
    T.factors = factors
    return T


# -- the Sigma map and the kernel ---------------------------------------------------

def _kill(p_terms: Mapping[Monomial, object], killed: set[str]) -> dict:
    return {m: c for m, c in p_terms.items() if not killed.intersection(m.leaves())}


class SigmaMap:
    """Map from a coproduct into the sub-coproducts obtained by killing one block."""

    def __init__(self, coproduct: TruncatedFreeAlgebra, partition: Sequence[Sequence[int]] | None = None,
                 limit: int = DEFAULT_LIMIT):
        factors = coproduct.factors
        if partition is None:
            partition = [[i] for i in range(len(factors))]
        partition = [list(b) for b in partition]
        flat = sorted(i for b in partition for i in b)
        if len(partition) < 2 or any(not b for b in partition) or flat != list(range(len(factors))):
            raise ValueError("partition must split the factors into at least two nonempty disjoint blocks")
        self.source = coproduct
        self.partition = partition
        self.components: list[TruncatedFreeAlgebra] = []
        self.killed: list[set[str]] = []
        V = coproduct.presentation
        for l, block in enumerate(partition):
            keep = [factors[i] for b in partition if b is not block for i in b]
            self.components.append(coproduct_truncated(V, keep, coproduct.bound, limit))
            self.killed.append({n for i in block for n in factors[i].names})

    @property
    def n(self) -> int:
        return len(self.partition)

    def image(self, element) -> list[dict]:
        if isinstance(element, (Leaf, Node)):
            element = {element: self.source.field.one}
        elif isinstance(element, NAPolynomial):
            element = element.terms
        return [comp.project(_kill(element, k)) for comp, k in zip(self.components, self.killed)]

    @property
    def graded(self) -> bool:
        return self.source.graded and all(c.graded for c in self.components)


def sigma_map(coproduct: TruncatedFreeAlgebra, partition=None, limit: int = DEFAULT_LIMIT) -> SigmaMap:
    return SigmaMap(coproduct, partition, limit)


def _slices(T: TruncatedFreeAlgebra, graded: bool) -> dict:
    out: dict = {}
    for m in T.basis:
        out.setdefault(T.grade(m) if graded else None, []).append(m)
    return out


def _kernel_of(columns: Sequence[Monomial], images: Sequence[list[dict]], F: Ring) -> list[dict]:
    """Kernel of the linear map sending column j to images[j] (a list of sparse vectors)."""
    rows_index: dict = {}
    for img in images:
        for c, vec in enumerate(img):
            for m in vec:
                rows_index.setdefault((c, m), len(rows_index))
    if not rows_index:
        return [{m: F.one} for m in columns]
    M = [[F.zero] * len(columns) for _ in rows_index]
    for j, img in enumerate(images):
        for c, vec in enumerate(img):
            for m, x in vec.items():
                M[rows_index[(c, m)]][j] = x
    ker = kernel_basis(Matrix(M, F, len(columns)))
    return [{columns[j]: x for j, x in enumerate(v) if not F.is_zero(x)} for v in ker]


@dataclass
class CosmashResult:
    """Kernel of the Sigma map: basis vectors grouped by weighted degree."""

    ambient: TruncatedFreeAlgebra
    sigma: SigmaMap
    kernel: dict[int, list[dict]]
    graded: bool

    @property
    def basis(self) -> list[dict]:
        return [v for w in sorted(self.kernel) for v in self.kernel[w]]

    @property
    def dimension(self) -> int:
        return sum(len(v) for v in self.kernel.values())

    def dimension_by_weight(self) -> dict[int, int]:
        return {w: len(self.kernel.get(w, [])) for w in range(1, self.ambient.bound + 1)}

    def dimension_by_grade(self) -> Counter:
        out = Counter()
        for v in self.basis:
            out[self.ambient.grade(next(iter(v)))] += 1
        return out

    def polynomials(self) -> list[NAPolynomial]:
        return [NAPolynomial(v, self.ambient.field) for v in self.basis]

    def multiply(self, x: Mapping, y: Mapping) -> dict:
        return self.ambient.multiply(x, y)

    def contains(self, element: Mapping) -> bool:
        ech = SparseEchelon(self.ambient.field, key=lambda m: (self.ambient.weight(m), m.key))
        ech.extend(self.basis)
        return ech.contains(self.ambient.project(element))

    def verify(self) -> bool:
        """Every basis vector dies under Sigma and products stay in the kernel."""
        for v in self.basis:
            if any(self.sigma.image(v)):
                return False
        basis = self.basis
        ech = SparseEchelon(self.ambient.field, key=lambda m: (self.ambient.weight(m), m.key))
        ech.extend(basis)
        for x in basis:
            for y in basis:
                p = self.multiply(x, y)
                if p and not ech.contains(p):
                    return False
        return True


def _weight_of(T: TruncatedFreeAlgebra, v: Mapping) -> int:
    return max(T.weight(m) for m in v)


def cosmash(V: VarietyPresentation, factors: Sequence, bound: int, partition=None,
            limit: int = DEFAULT_LIMIT) -> CosmashResult:
    """The n-ary cosmash of the factors (n = number of blocks) up to weight ``bound``."""
    T = coproduct_truncated(V, factors, bound, limit)
    sig = SigmaMap(T, partition, limit)
    graded = sig.graded
    kernel: dict[int, list[dict]] = {}
    for _, cols in sorted(_slices(T, graded).items(), key=lambda kv: str(kv[0])):
        for v in _kernel_of(cols, [sig.image(m) for m in cols], T.field):
            kernel.setdefault(_weight_of(T, v), []).append(v)
    return CosmashResult(T, sig, kernel, graded)


def cross_effect_kernel(V: VarietyPresentation, X, Y, Z, bound: int, limit: int = DEFAULT_LIMIT) -> dict[int, int]:
    """Dimensions of ker((X+Y) cosmash Z -> (X cosmash Z) x (Y cosmash Z)) per weight."""
    binary = cosmash(V, [X, Y, Z], bound, partition=[[0, 1], [2]], limit=limit)
    T = binary.ambient
    F = T.field
    x_names = set(binary.ambient.factors[0].names)
    y_names = set(binary.ambient.factors[1].names)
    xz = coproduct_truncated(V, [T.factors[0], T.factors[2]], bound, limit)
    yz = coproduct_truncated(V, [T.factors[1], T.factors[2]], bound, limit)
    out = {w: 0 for w in range(1, bound + 1)}
    by_grade: dict = {}
    for v in binary.basis:
        by_grade.setdefault(T.grade(next(iter(v))) if binary.graded else None, []).append(v)
    for vecs in by_grade.values():
        images = [[xz.project(_kill(v, y_names)), yz.project(_kill(v, x_names))] for v in vecs]
        labels = list(range(len(vecs)))
        for k in _kernel_of(labels, images, F):
            comb: dict = {}
            for j, c in k.items():
                for m, x in vecs[j].items():
                    comb[m] = F.add(comb.get(m, F.zero), F.mul(c, x))
            comb = {m: c for m, c in comb.items() if not F.is_zero(c)}
            out[_weight_of(T, comb)] += 1
    return out


# -- comparison maps ----------------------------------------------------------------

def _as_factor(spec, default_prefix: str):
    if isinstance(spec, (FreeFactor, FDAlgebra)):
        return spec
    if isinstance(spec, str):
        return FreeFactor((spec,))
    return FreeFactor(tuple(spec))


def _present(result: CosmashResult, letter: str) -> PresentedFactor:
    """Turn a binary cosmash into a factor: one generator per kernel basis vector."""
    T = result.ambient
    F = T.field
    basis = result.basis
    labels = [f"{letter}{i + 1}" for i in range(len(basis))]
    weights = [_weight_of(T, v) for v in basis]
    grades = []
    for v in basis:
        g = T.grade(next(iter(v)))
        grades.append(Counter(dict(g)))
    ech_cols = sorted({m for v in basis for m in v}, key=lambda m: (T.weight(m), m.key))
    table = {}
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            if weights[i] + weights[j] > T.bound:
                continue
            p = T.multiply(x, y)
            if not p:
                continue
            cols = sorted(set(ech_cols) | set(p), key=lambda m: (T.weight(m), m.key))
            A = Matrix([[v.get(c, F.zero) for v in basis] for c in cols], F, len(basis))
            sol = solve_affine(A, [p.get(c, F.zero) for c in cols])
            if isinstance(sol, NoSolution):
                raise ArithmeticError("cosmash kernel is not closed under multiplication")
            table[(i, j)] = dict(enumerate(sol[0]))
    images = [NAPolynomial(v, F) for v in basis]
    return PresentedFactor(labels, table, F, weights, grades, images)


@dataclass
class DegreeReport:
    weight: int
    source_dim: int
    target_dim: int
    rank: int

    @property
    def injective(self) -> bool:
        return self.rank == self.source_dim

    @property
    def surjective(self) -> bool:
        return self.rank == self.target_dim


@dataclass
class ComparisonReport:
    name: str
    degrees: dict[int, DegreeReport]
    kernel_witnesses: dict[int, list[tuple[NAPolynomial, NAPolynomial]]] = field(default_factory=dict)
    cokernel_witnesses: dict[int, list[NAPolynomial]] = field(default_factory=dict)
    matrices: dict[int, list[Matrix]] = field(default_factory=dict)  # one block per grade
    _image: dict = field(default_factory=dict, repr=False)
    _target: object = field(default=None, repr=False)

    def injective(self, weight: int | None = None) -> bool:
        ws = [weight] if weight is not None else list(self.degrees)
        return all(self.degrees[w].injective for w in ws if w in self.degrees)

    def surjective(self, weight: int | None = None) -> bool:
        ws = [weight] if weight is not None else list(self.degrees)
        return all(self.degrees[w].surjective for w in ws if w in self.degrees)

    def bijective(self, weight: int | None = None) -> bool:
        return self.injective(weight) and self.surjective(weight)

    def in_image(self, element: NAPolynomial | str) -> bool:
        Q: TruncatedFreeAlgebra = self._target
        if isinstance(element, str):
            element = parse_expression(element, Q.field)
        v = Q.project(element)
        if not v:
            return True
        ech = self._image.get(_weight_of(Q, v))
        return bool(ech) and ech.contains(v)

    def summary(self) -> str:
        lines = [f"{self.name}:"]
        for w, d in sorted(self.degrees.items()):
            lines.append(f"  degree {w}: source {d.source_dim}, target {d.target_dim}, rank {d.rank}, "
                         f"injective={'yes' if d.injective else 'no'}, surjective={'yes' if d.surjective else 'no'}")
        for w, ws in sorted(self.kernel_witnesses.items()):
            for src, expanded in ws:
                lines.append(f"  kernel witness (degree {w}): {print_expression(src)} -> {print_expression(expanded)}")
        for w, ws in sorted(self.cokernel_witnesses.items()):
            for t in ws:
                lines.append(f"  not in image (degree {w}): {print_expression(t)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "map": self.name,
            "degrees": {str(w): {"source": d.source_dim, "target": d.target_dim, "rank": d.rank,
                                 "injective": d.injective, "surjective": d.surjective}
                        for w, d in sorted(self.degrees.items())},
            "kernel_witnesses": {str(w): [print_expression(e) for _, e in ws]
                                 for w, ws in sorted(self.kernel_witnesses.items())},
            "cokernel_witnesses": {str(w): [print_expression(t) for t in ws]
                                   for w, ws in sorted(self.cokernel_witnesses.items())},
        }


def _compare(name: str, V: VarietyPresentation, source_factors: Sequence, target_factors: Sequence,
             bound: int, limit: int) -> ComparisonReport:
    """Rank the map from the binary cosmash of the source factors to the n-ary target cosmash."""
    F = V.field
    src = cosmash(V, source_factors, bound, limit=limit)
    tgt = cosmash(V, target_factors, bound, limit=limit)
    P, Q = src.ambient, tgt.ambient
    images: dict[str, NAPolynomial] = {}
    for f in source_factors:
        if isinstance(f, PresentedFactor):
            images.update(zip(f.labels, f.images))
        else:
            for n in f.names:
                images[n] = NAPolynomial.monomial(Leaf(n), 1, F)

    def push(v: Mapping) -> tuple[NAPolynomial, dict]:
        expanded = substitute(NAPolynomial(dict(v), F), images)
        return expanded, Q.project(expanded)

    report = ComparisonReport(name, {}, _target=Q)
    key = lambda m: (Q.weight(m), m.key)
    graded = src.graded and tgt.graded

    def slice_of(T, v):
        return T.grade(next(iter(v))) if graded else None

    for w in range(1, bound + 1):
        sources = src.kernel.get(w, [])
        targets = tgt.kernel.get(w, [])
        groups: dict = {}
        for v in sources:
            groups.setdefault(slice_of(P, v), ([], []))[0].append(v)
        for t in targets:
            groups.setdefault(slice_of(Q, t), ([], []))[1].append(t)
        total_rank = 0
        blocks = []
        ech = SparseEchelon(F, key=key)
        kwit, cwit = [], []
        for g in sorted(groups, key=str):
            source, target = groups[g]
            pushed = [push(v) for v in source]
            ech.extend(img for _, img in pushed)
            cols = sorted({m for _, img in pushed for m in img} | {m for t in target for m in t}, key=key)
            # coordinates of each image in the target kernel basis
            T = Matrix([[t.get(c, F.zero) for t in target] for c in cols], F, len(target))
            coords = []
            for expanded, img in pushed:
                sol = solve_affine(T, [img.get(c, F.zero) for c in cols])
                if isinstance(sol, NoSolution):
                    raise ArithmeticError(f"image of {print_expression(expanded)} is not in the target cosmash")
                coords.append(sol[0])
            M = Matrix([[coords[j][i] for j in range(len(source))] for i in range(len(target))], F, len(source))
            blocks.append(M)
            r = rank(M) if source and target else 0
            total_rank += r
            if r < len(source):
                kvecs = kernel_basis(M) if target else [[F.one if i == j else F.zero for i in range(len(source))]
                                                         for j in range(len(source))]
                for kv in kvecs:
                    comb: dict = {}
                    for j, c in enumerate(kv):
                        for m, x in source[j].items():
                            comb[m] = F.add(comb.get(m, F.zero), F.mul(c, x))
                    srcpoly = NAPolynomial({m: c for m, c in comb.items() if not F.is_zero(c)}, F)
                    expanded, img = push(srcpoly.terms)
                    if img:
                        raise ArithmeticError("kernel witness failed re-verification")
                    kwit.append((srcpoly, expanded))
            if r < len(target) and not cwit:
                local = SparseEchelon(F, key=key)
                local.extend(img for _, img in pushed)
                missing = [NAPolynomial(t, F) for t in target if not local.contains(t)]
                if not missing:
                    raise ArithmeticError("cokernel witness search failed")
                cwit.append(missing[0])
        report.degrees[w] = DegreeReport(w, len(sources), len(targets), total_rank)
        report.matrices[w] = blocks
        report._image[w] = ech
        if kwit:
            report.kernel_witnesses[w] = kwit
        if cwit:
            report.cokernel_witnesses[w] = cwit
    return report


def _letters_for(*factors) -> list[str]:
    used = {n[0] for f in factors for n in f.names}
    return [c for c in "kmnpqrstuvw" if c not in used]


def comparison_phi(V: VarietyPresentation, X, Y, Z, bound: int, limit: int = DEFAULT_LIMIT) -> ComparisonReport:
    """X cosmash (Y cosmash Z) -> X cosmash Y cosmash Z, ranked per weighted degree."""
    X, Y, Z = (_as_factor(f, "") for f in (X, Y, Z))
    letter = _letters_for(X, Y, Z)[0]
    K = _present(cosmash(V, [Y, Z], bound, limit=limit), letter)
    return _compare("Phi", V, [X, K], [X, Y, Z], bound, limit)


def comparison_psi(V: VarietyPresentation, X, Y, Z, bound: int, limit: int = DEFAULT_LIMIT) -> ComparisonReport:
    """(X cosmash Y) cosmash Z -> X cosmash Y cosmash Z."""
    X, Y, Z = (_as_factor(f, "") for f in (X, Y, Z))
    letter = _letters_for(X, Y, Z)[0]
    K = _present(cosmash(V, [X, Y], bound, limit=limit), letter)
    return _compare("Psi", V, [K, Z], [X, Y, Z], bound, limit)


def comparison_quaternary(V: VarietyPresentation, X, Y, Z, W, bound: int,
                          limit: int = DEFAULT_LIMIT) -> ComparisonReport:
    """(X cosmash Y) cosmash (Z cosmash W) -> the 4-ary cosmash."""
    X, Y, Z, W = (_as_factor(f, "") for f in (X, Y, Z, W))
    l1, l2 = _letters_for(X, Y, Z, W)[:2]
    K1 = _present(cosmash(V, [X, Y], bound, limit=limit), l1)
    K2 = _present(cosmash(V, [Z, W], bound, limit=limit), l2)
    return _compare("quaternary", V, [K1, K2], [X, Y, Z, W], bound, limit)


# -- independence --------------------------------------------------------------------

@dataclass
class IndependenceResult:
    independent: bool
    witness: NAPolynomial | None = None

    def __bool__(self):
        return self.independent


def independence_check(V: VarietyPresentation, monomials: Sequence[Monomial | str], factors: Sequence,
                       bound: int | None = None, limit: int = DEFAULT_LIMIT) -> IndependenceResult:
    """Linear independence of the monomials' images in the truncated coproduct."""
    F = V.field
    polys = [parse_expression(m, F) if isinstance(m, str) else NAPolynomial.monomial(m, 1, F) for m in monomials]
    if bound is None:
        bound = max(p.degree() for p in polys)
    T = coproduct_truncated(V, factors, bound, limit)
    imgs = [T.project(p) for p in polys]
    cols = sorted({m for v in imgs for m in v}, key=lambda m: (T.weight(m), m.key))
    M = Matrix([[v.get(c, F.zero) for v in imgs] for c in cols], F, len(imgs))
    ker = kernel_basis(M) if cols else [[F.one if i == j else F.zero for i in range(len(imgs))]
                                        for j in range(len(imgs))]
    if not ker:
        return IndependenceResult(True)
    wit = NAPolynomial.zero(F)
    for c, p in zip(ker[0], polys):
        if not F.is_zero(c):
            wit = wit + p.scale(c)
    if T.project(wit):
        raise ArithmeticError("dependency witness failed re-verification")
    return IndependenceResult(False, wit)


# -- Higgins commutator ----------------------------------------------------------------

@dataclass
class HigginsResult:
    basis: list[list]
    exact: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _span_basis(vectors: Sequence[Sequence], F: Ring) -> list[list]:
    vectors = [list(v) for v in vectors if any(not F.is_zero(x) for x in v)]
    if not vectors:
        return []
    R, _, r = rref(Matrix(vectors, F, len(vectors[0])))
    return [list(row) for row in R.rows[:r]]


def _contains(basis: Sequence[Sequence], v: Sequence, F: Ring) -> bool:
    if all(F.is_zero(x) for x in v):
        return True
    return len(_span_basis(list(basis) + [v], F)) == len(basis)


def _products(A: FDAlgebra, S: Sequence, T: Sequence) -> list[list]:
    return [A.multiply(s, t) for s in S for t in T]


def higgins_commutator(A: FDAlgebra, K: Sequence[Sequence], L: Sequence[Sequence], bound: int = 4) -> HigginsResult:
    """Span of all mixed words of degree <= bound in elements of K and L."""
    F = A.field
    K = _span_basis(K, F)
    L = _span_basis(L, F)
    for name, S in (("K", K), ("L", L)):
        for p in _products(A, S, S):
            if not _contains(S, p, F):
                raise ValueError(f"{name} is not a subalgebra")
    # words[n] = (K-only span, L-only span, mixed span) of degree n
    words = {1: (K, L, [])}
    for n in range(2, bound + 1):
        mixed = []
        for i in range(1, n):
            ki, li, mi = words[i]
            kj, lj, mj = words[n - i]
            mixed += _products(A, ki, lj) + _products(A, li, kj)
            mixed += _products(A, mi, ki + li + mi + kj + lj + mj) if mi else []
            mixed += _products(A, ki + li, mj) if mj else []
        kk = _span_basis([A.multiply(a, b) for i in range(1, n) for a in words[i][0] for b in words[n - i][0]], F)
        ll = _span_basis([A.multiply(a, b) for i in range(1, n) for a in words[i][1] for b in words[n - i][1]], F)
        words[n] = (kk, ll, _span_basis(mixed, F))
    M = _span_basis([v for n in words for v in words[n][2]], F)
    exact = _power_vanishes(A, bound + 1)
    if not exact:
        kl = _products(A, K, L) + _products(A, L, K)
        cl = _products(A, M, K + L + M) + _products(A, K + L + M, M)
        exact = all(_contains(M, v, F) for v in kl + cl)
    return HigginsResult(M, exact)


def _power_vanishes(A: FDAlgebra, n: int) -> bool:
    """Whether every product of n elements (any bracketing) is zero."""
    F = A.field
    powers = {1: [A.basis_vector(i) for i in range(A.dimension)]}
    for k in range(2, n + 1):
        vs = [A.multiply(a, b) for i in range(1, k) for a in powers[i] for b in powers[k - i]]
        powers[k] = _span_basis(vs, F)
    return not powers[n]


# -- the commutative associative model -----------------------------------------------

def ca_coproduct(A: FDAlgebra, B: FDAlgebra, check: bool = True) -> FDAlgebra:
    """A + B in CA: the space A (+) (A tensor B) (+) B with the seven-term product."""
    if A.field != B.field:
        raise ValueError("factors over different fields")
    if check and not (A.is_ca() and B.is_ca()):
        raise ValueError("ca_coproduct needs commutative associative factors")
    F = A.field
    n, m = A.dimension, B.dimension
    a = lambda i: i
    t = lambda i, j: n + i * m + j
    b = lambda j: n + n * m + j
    labels = list(A.labels) + [f"{A.labels[i]}*{B.labels[j]}" for i in range(n) for j in range(m)] + list(B.labels)
    table: dict = {}

    def put(x, y, k, c):
        row = table.setdefault((x, y), {})
        row[k] = F.add(row.get(k, F.zero), c)

    for (i, k), row in A.table.items():
        for l, c in row.items():
            put(a(i), a(k), a(l), c)                      # ac
            for j in range(m):
                put(a(i), t(k, j), t(l, j), c)            # a c' (x) d'
                put(t(i, j), a(k), t(l, j), c)            # a' c (x) b'
    for (j, q), row in B.table.items():
        for l, c in row.items():
            put(b(j), b(q), b(l), c)                      # bd
            for i in range(n):
                put(t(i, j), b(q), t(i, l), c)            # a' (x) b' d
                put(b(j), t(i, q), t(i, l), c)            # c' (x) b d'
    for (i, k), ra in A.table.items():
        for (j, q), rb in B.table.items():
            for l, ca_ in ra.items():
                for r, cb in rb.items():
                    put(t(i, j), t(k, q), t(l, r), F.mul(ca_, cb))  # a'c' (x) b'd'
    for i in range(n):
        for j in range(m):
            put(a(i), b(j), t(i, j), F.one)               # a (x) d
            put(b(j), a(i), t(i, j), F.one)               # c (x) b
    W = list(A.weights) + [A.weights[i] + B.weights[j] for i in range(n) for j in range(m)] + list(B.weights)
    C = FDAlgebra(labels, table, F, W)
    C.parts = (n, m)
    return C


def _ca_map(A: FDAlgebra, B: FDAlgebra, fa: Sequence[Sequence] | None, fb: Sequence[Sequence] | None,
            A2: FDAlgebra | None, B2: FDAlgebra | None) -> Matrix:
    """Matrix of f + g : A+B -> A2+B2 (None kills the factor) on the CA coproduct basis."""
    F = A.field
    n, m = A.dimension, B.dimension
    n2 = A2.dimension if A2 else 0
    m2 = B2.dimension if B2 else 0
    size = n2 + n2 * m2 + m2
    cols = []
    for i in range(n):
        v = [F.zero] * size
        if fa is not None:
            for k in range(n2):
                v[k] = fa[k][i]
        cols.append(v)
    for i in range(n):
        for j in range(m):
            v = [F.zero] * size
            if fa is not None and fb is not None:
                for k in range(n2):
                    for l in range(m2):
                        v[n2 + k * m2 + l] = F.mul(fa[k][i], fb[l][j])
            cols.append(v)
    for j in range(m):
        v = [F.zero] * size
        if fb is not None:
            for l in range(m2):
                v[n2 + n2 * m2 + l] = fb[l][j]
        cols.append(v)
    return Matrix([[cols[c][r] for c in range(len(cols))] for r in range(size)], F, len(cols))


def _identity(n: int, F: Ring) -> list[list]:
    return [[F.one if i == j else F.zero for j in range(n)] for i in range(n)]


def ca_cosmash_tensor_check(A: FDAlgebra, B: FDAlgebra, C: FDAlgebra | None = None) -> bool:
    """Binary: ker(A+B -> A x B) is A tensor B via a (x) b -> ab, as algebras.

    Ternary: the cosmash kernel of A+B+C, by definition and via the cross
    effect, has dimension dim A dim B dim C and contains the products (ab)c.
    """
    if C is not None:
        return _ca_ternary_check(A, B, C)
    F = A.field
    D = ca_coproduct(A, B)
    n, m = A.dimension, B.dimension
    proj = Matrix([[F.one if (c == r if r < n else c == r + n * m) else F.zero for c in range(D.dimension)]
                   for r in range(n + m)], F, D.dimension)
    ker = kernel_basis(proj)
    if len(ker) != n * m:
        return False
    phi = {}
    for i in range(n):
        for j in range(m):
            v = D.multiply(D.basis_vector(i), D.basis_vector(n + n * m + j))
            if any(not F.is_zero(x) for x in proj.apply(v)):
                return False
            phi[(i, j)] = v
    if len(_span_basis(list(phi.values()), F)) != n * m:
        return False
    # multiplicativity on basis tensors: (a (x) b)(c (x) d) = ac (x) bd
    for (i, j), x in phi.items():
        for (k, l), y in phi.items():
            ac = A.multiply(A.basis_vector(i), A.basis_vector(k))
            bd = B.multiply(B.basis_vector(j), B.basis_vector(l))
            expect = [F.zero] * D.dimension
            for p, cp in enumerate(ac):
                for q, cq in enumerate(bd):
                    if not F.is_zero(cp) and not F.is_zero(cq):
                        for r, val in enumerate(phi[(p, q)]):
                            expect[r] = F.add(expect[r], F.mul(F.mul(cp, cq), val))
            if D.multiply(x, y) != expect:
                return False
    return True


def ca_ternary_kernel_dimension(A: FDAlgebra, B: FDAlgebra, C: FDAlgebra) -> tuple[int, int]:
    """(definition, cross-effect) dimensions of the ternary cosmash in the CA model."""
    F = A.field
    AB = ca_coproduct(A, B)
    n, m, k = A.dimension, B.dimension, C.dimension
    I = lambda d: _identity(d, F)
    # AB -> A and AB -> B as matrices (rows target, cols source)
    to_a = [[F.one if c == r else F.zero for c in range(AB.dimension)] for r in range(n)]
    to_b = [[F.one if c == n + n * m + r else F.zero for c in range(AB.dimension)] for r in range(m)]
    kill_c = _ca_map(AB, C, I(AB.dimension), None, AB, None)      # -> A+B
    kill_b = _ca_map(AB, C, to_a, I(k), A, C)                      # -> A+C
    kill_a = _ca_map(AB, C, to_b, I(k), B, C)                      # -> B+C
    stacked = kill_c.stack(kill_b).stack(kill_a)
    by_def = len(kernel_basis(stacked))
    # cross effect: ker((A+B) cosmash C -> (A cosmash C) x (B cosmash C))
    # (A+B) cosmash C inside A+B+C: killed by both C and A+B
    kill_ab = _ca_map(AB, C, None, I(k), None, C)
    both = kernel_basis(kill_c.stack(kill_ab))
    imgs = [kill_b.apply(v) + kill_a.apply(v) for v in both]
    if both:
        M = Matrix([[imgs[j][i] for j in range(len(both))] for i in range(len(imgs[0]))], F, len(both))
        cross = len(kernel_basis(M))
    else:
        cross = 0
    return by_def, cross


def _ca_ternary_check(A: FDAlgebra, B: FDAlgebra, C: FDAlgebra) -> bool:
    by_def, cross = ca_ternary_kernel_dimension(A, B, C)
    return by_def == cross == A.dimension * B.dimension * C.dimension


# -- closure checks with generic elements ----------------------------------------------

def _generic_element(A: FDAlgebra, prefix: str) -> list:
    F = A.field
    return [CommPolynomial.variable(var(f"{prefix}{i + 1}"), F) for i in range(A.dimension)]


def _eval_monomial(A: FDAlgebra, m: Monomial, env: Mapping[str, list]) -> list:
    if isinstance(m, Leaf):
        return env[m.name]
    x = _eval_monomial(A, m.left, env)
    y = _eval_monomial(A, m.right, env)
    zero = CommPolynomial.zero(A.field)
    out = A.multiply_generic([c if c is not None else zero for c in x], [c if c is not None else zero for c in y])
    return [c if c is not None else zero for c in out]


def _generic_evaluate(A: FDAlgebra, phi: NAPolynomial) -> list:
    names = sorted(phi.variables())
    prefixes = ["t", "s", "u", "v", "w", "r"]
    env = {n: _generic_element(A, prefixes[i] if i < len(prefixes) else f"g{i}_") for i, n in enumerate(names)}
    total = [CommPolynomial.zero(A.field)] * A.dimension
    for m, c in phi.terms.items():
        val = _eval_monomial(A, m, env)
        total = [t + v.scale(c) for t, v in zip(total, val)]
    return total


def _vanishes(p: CommPolynomial, F: Ring) -> bool:
    if isinstance(F, PrimeField):
        p = p.frobenius_reduce(F.p)
    return not p


def closure_check(phi: NAPolynomial | str, A: FDAlgebra, B: FDAlgebra, field: Ring | None = None) -> bool:
    """Whether the CA coproduct of A and B again satisfies phi.

    phi is evaluated on generic elements whose coordinates are independent
    indeterminates; over GF(p) vanishing is tested as a polynomial function.
    """
    F = field or A.field
    if isinstance(phi, str):
        phi = parse_expression(phi, F)
    for name, X in (("A", A), ("B", B)):
        if not X.satisfies(phi):
            raise ValueError(f"{name} does not satisfy {print_expression(phi)}")
    return ca_coproduct(A, B).satisfies(phi)


# -- random test algebras -----------------------------------------------------------

def _random_invertible(n: int, F: Ring, rng: random.Random) -> list[list]:
    while True:
        P = [[F(rng.randint(-2, 2) if not isinstance(F, PrimeField) else rng.randrange(F.p)) for _ in range(n)]
             for _ in range(n)]
        if n == 0 or rank(Matrix(P, F, n)) == n:
            return P


def _block_sum(blocks: Sequence[dict], F: Ring) -> tuple[int, dict]:
    table: dict = {}
    off = 0
    for blk in blocks:
        for (i, j), row in blk["table"].items():
            table[(i + off, j + off)] = {k + off: c for k, c in row.items()}
        off += blk["dim"]
    return off, table


def _trunc_poly(length: int) -> dict:
    """t, t^2, ..., t^length with t^(length+1) = 0 (no unit)."""
    table = {}
    for i in range(length):
        for j in range(length):
            if i + j + 1 < length:
                table[(i, j)] = {i + j + 1: 1}
    return {"dim": length, "table": table}


_UNIT_LINE = {"dim": 1, "table": {(0, 0): {0: 1}}}
_ZERO_LINE = {"dim": 1, "table": {}}
_DUAL_NUMBERS = {"dim": 2, "table": {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}}  # 1, t with t^2 = 0


def random_ca_algebra(dim: int, field: Ring = QQ, rng: random.Random | None = None, prefix: str = "e") -> FDAlgebra:
    """Random commutative associative algebra: a direct sum of small blocks in a random basis."""
    rng = rng or random.Random()
    blocks = []
    left = dim
    while left:
        choices = [_UNIT_LINE, _ZERO_LINE] + ([_DUAL_NUMBERS, _trunc_poly(2)] if left >= 2 else []) \
            + ([_trunc_poly(3)] if left >= 3 else [])
        blk = rng.choice(choices)
        blocks.append(blk)
        left -= blk["dim"]
    n, table = _block_sum(blocks, field)
    A = FDAlgebra([f"{prefix}{i + 1}" for i in range(n)], table, field)
    return A.change_basis(_random_invertible(n, field, rng)) if n else A


def random_instance(kind: str, dim: int, field: Ring, rng: random.Random | None = None,
                    prefix: str = "e") -> FDAlgebra:
    """Random small CA algebra satisfying an extra identity.

    kinds: ``ca`` (none), ``square_zero`` (xx = 0 over GF(2)), ``nil`` (x^p = 0
    over GF(p)), ``bool`` (x = xx over GF(2)).
    """
    rng = rng or random.Random()
    p = field.characteristic
    if kind == "ca":
        return random_ca_algebra(dim, field, rng, prefix)
    if kind == "square_zero":
        if p != 2:
            raise ValueError("square_zero instances need GF(2)")
        blocks = []
        left = dim
        while left:
            if left >= 3 and rng.random() < 0.6:
                # e1 e2 = e3: exterior-type, squares vanish in characteristic 2
                blocks.append({"dim": 3, "table": {(0, 1): {2: 1}, (1, 0): {2: 1}}})
                left -= 3
            else:
                blocks.append(_ZERO_LINE)
                left -= 1
    elif kind == "nil":
        if p < 2:
            raise ValueError("nil instances need a prime field")
        blocks = []
        left = dim
        while left:
            length = rng.randint(1, min(left, p - 1)) if p > 2 else 1
            blocks.append(_trunc_poly(length))
            left -= length
    elif kind == "bool":
        if p != 2:
            raise ValueError("Boolean instances need GF(2)")
        blocks = [_UNIT_LINE] * dim
    else:
        raise ValueError(f"unknown instance kind {kind!r}")
    n, table = _block_sum(blocks, field)
    A = FDAlgebra([f"{prefix}{i + 1}" for i in range(n)], table, field)
    return A.change_basis(_random_invertible(n, field, rng)) if n else A
