"""Graded algebras and modules on finite degree windows.

A :class:`GradedAlgebraTruncation` stores ``A_0 .. A_d`` with named bases
and, for every ``i + j <= d``, a matrix ``A_{i+j} x (A_i (x) A_j)`` whose
column ``s * dim A_j + t`` is the product of the ``s``-th basis element of
``A_i`` with the ``t``-th basis element of ``A_j``.

A :class:`GradedModuleWindow` stores ``M_p .. M_q`` (inclusive on both ends)
and the positive-degree action tables in the same layout.

The homological code never looks at these per-degree tables directly.  It
works with the flattened :class:`Augmentation` (a basis of the augmentation
ideal with structure constants) and :class:`ModuleData` (one action matrix
per augmentation basis element).  Ungraded finite-dimensional algebras
(:class:`FiniteAlgebra`) flatten to the same shapes with ``graded=False``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .linalg import (
    Echelon,
    Quotient,
    SparseMatrix,
    hstack,
    rank,
    solve,
    to_scalar,
)


class WindowViolation(ValueError):
    pass


class NotASubmodule(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class BiDegree:
    projective: int
    cohomological: int

    def __add__(self, other: "BiDegree") -> "BiDegree":
        return BiDegree(self.projective + other.projective, self.cohomological + other.cohomological)

    @property
    def parity(self) -> int:
        # only the cohomological component enters sign rules
        return self.cohomological % 2


Vector = dict  # sparse {index: Fraction}


# ---------------------------------------------------------------------------
# flattened structures used by the homological code


@dataclass(frozen=True)
class Augmentation:
    """Basis of the augmentation ideal ``A_+`` with structure constants.

    ``mul[(s, t)]`` is the sparse product of basis elements ``s`` and ``t``.
    In the graded case only products landing inside the stored degrees are
    present; missing pairs multiply to zero.
    """

    degrees: tuple[int, ...]
    names: tuple[str, ...]
    mul: Mapping[tuple[int, int], Mapping[int, Fraction]]
    graded: bool = True

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def product(self, s: int, t: int) -> Mapping[int, Fraction]:
        return self.mul.get((s, t), {})

    @cached_property
    def by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for s, d in enumerate(self.degrees):
            out.setdefault(d, []).append(s)
        return out


@dataclass(frozen=True)
class ModuleData:
    degrees: tuple[int, ...]
    names: tuple[str, ...]
    act: tuple[SparseMatrix, ...]

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @cached_property
    def act_rows(self) -> tuple[dict[int, dict[int, Fraction]], ...]:
        return tuple({r: row for r, row in m.rows()} for m in self.act)

    @cached_property
    def act_cols(self) -> tuple[list[dict[int, Fraction]], ...]:
        return tuple(m.columns() for m in self.act)

    @cached_property
    def by_degree(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, d in enumerate(self.degrees):
            out.setdefault(d, []).append(v)
        return out


# ---------------------------------------------------------------------------
# graded algebra


@dataclass(frozen=True, eq=False)
class GradedAlgebraTruncation:
    max_degree: int
    basis: tuple[tuple[str, ...], ...]
    mult: Mapping[tuple[int, int], SparseMatrix]
    unital: bool = True
    commutative: bool = False
    generators: tuple[tuple[int, Mapping[int, Fraction]], ...] = ()
    generator_names: tuple[str, ...] = ()

    def dim(self, i: int) -> int:
        if 0 <= i <= self.max_degree:
            return len(self.basis[i])
        return 0

    @property
    def dims(self) -> list[int]:
        return [len(b) for b in self.basis]

    def product(self, i: int, s: int, j: int, t: int) -> dict[int, Fraction]:
        if i + j > self.max_degree:
            raise WindowViolation(f"product of degrees {i}+{j} beyond truncation {self.max_degree}")
        m = self.mult[(i, j)]
        return m.column(s * self.dim(j) + t)

    def left_matrix(self, i: int, a: Mapping[int, Fraction], j: int) -> SparseMatrix:
        """Matrix of ``x -> a * x`` from ``A_j`` to ``A_{i+j}`` for ``a`` in ``A_i``."""
        m = self.mult[(i, j)]
        dj = self.dim(j)
        cols = m.columns()
        out = []
        for t in range(dj):
            acc: dict[int, Fraction] = {}
            for s, c in a.items():
                for r, v in cols[s * dj + t].items():
                    acc[r] = acc.get(r, 0) + c * v
            out.append({r: v for r, v in acc.items() if v})
        return SparseMatrix.from_columns(self.dim(i + j), out)

    def augmentation(self, width: int | None = None) -> Augmentation:
        """Flatten ``A_1 .. A_width`` (``A_0 .. A_width`` when non-unital)."""
        if width is None:
            width = self.max_degree
        if width > self.max_degree:
            raise WindowViolation(f"need algebra degrees up to {width}, truncation stops at {self.max_degree}")
        lo = 1 if self.unital else 0
        index: dict[tuple[int, int], int] = {}
        degrees, names = [], []
        for i in range(lo, width + 1):
            for s, name in enumerate(self.basis[i]):
                index[(i, s)] = len(degrees)
                degrees.append(i)
                names.append(name)
        mul: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, s), a in index.items():
            for (j, t), b in index.items():
                if i + j > width:
                    continue
                prod = self.product(i, s, j, t)
                if prod:
                    mul[(a, b)] = {index[(i + j, u)]: v for u, v in prod.items()}
        return Augmentation(tuple(degrees), tuple(names), mul, graded=True)

    def generator_vectors(self) -> list[tuple[int, dict[int, Fraction]]]:
        return [(d, dict(v)) for d, v in self.generators]


def algebra_from_products(
    basis: Sequence[Sequence[str]],
    product,
    unital: bool = True,
    commutative: bool = False,
    generators=(),
    generator_names=(),
) -> GradedAlgebraTruncation:
    """Build the tables from a callback ``product(i, s, j, t) -> {u: coeff}``."""
    d = len(basis) - 1
    mult = {}
    for i in range(d + 1):
        for j in range(d + 1 - i):
            di, dj, dk = len(basis[i]), len(basis[j]), len(basis[i + j])
            cols = []
            for s in range(di):
                for t in range(dj):
                    cols.append(product(i, s, j, t))
            mult[(i, j)] = SparseMatrix.from_columns(dk, cols) if cols else SparseMatrix.zero(dk, 0)
    return GradedAlgebraTruncation(
        d,
        tuple(tuple(b) for b in basis),
        mult,
        unital=unital,
        commutative=commutative,
        generators=tuple((g, dict(v)) for g, v in generators),
        generator_names=tuple(generator_names),
    )


# ---------------------------------------------------------------------------
# ungraded finite-dimensional algebras (possibly non-unital)


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """Finite-dimensional algebra given on a basis of its augmentation ideal.

    With ``unital=True`` the algebra is ``K.1 + span(names)``; otherwise it is
    ``span(names)`` itself (so ``A_+ = A``).  Products are only needed among
    the listed basis elements.
    """

    names: tuple[str, ...]
    products: Mapping[tuple[int, int], Mapping[int, Fraction]]
    unital: bool = True
    commutative: bool = False

    @property
    def dim(self) -> int:
        return len(self.names) + (1 if self.unital else 0)

    def augmentation(self, width: int | None = None) -> Augmentation:
        return Augmentation(
            (0,) * len(self.names),
            tuple(self.names),
            {k: dict(v) for k, v in self.products.items() if v},
            graded=False,
        )


def dual_numbers() -> FiniteAlgebra:
    """``K[e]/(e^2)``."""
    return FiniteAlgebra(("e",), {}, unital=True, commutative=True)


@dataclass(frozen=True, eq=False)
class FiniteModule:
    algebra: FiniteAlgebra
    dim: int
    action: tuple[SparseMatrix, ...]
    names: tuple[str, ...] = ()

    def module_data(self, aug: Augmentation | None = None) -> ModuleData:
        names = self.names or tuple(f"v{i}" for i in range(self.dim))
        return ModuleData((0,) * self.dim, names, tuple(self.action))


def finite_module(algebra: FiniteAlgebra, action: Sequence[Sequence[Sequence[object]]] | Sequence[SparseMatrix], dim: int | None = None) -> FiniteModule:
    mats = [a if isinstance(a, SparseMatrix) else SparseMatrix.from_dense(a) for a in action]
    if dim is None:
        dim = mats[0].nrows if mats else 0
    if len(mats) != len(algebra.names):
        raise ValueError("one action matrix per basis element of the augmentation ideal")
    return FiniteModule(algebra, dim, tuple(mats))


# ---------------------------------------------------------------------------
# graded modules on windows


@dataclass(frozen=True, eq=False)
class GradedModuleWindow:
    algebra: GradedAlgebraTruncation
    window: tuple[int, int]
    basis: Mapping[int, tuple[str, ...]]
    action: Mapping[tuple[int, int], SparseMatrix]

    @property
    def p(self) -> int:
        return self.window[0]

    @property
    def q(self) -> int:
        return self.window[1]

    def degrees(self) -> range:
        return range(self.p, self.q + 1)

    def dim(self, j: int) -> int:
        return len(self.basis.get(j, ()))

    @property
    def total_dim(self) -> int:
        return sum(self.dim(j) for j in self.degrees())

    def nonzero_degrees(self) -> list[int]:
        return [j for j in self.degrees() if self.dim(j)]

    def act_matrix(self, i: int, s: int, j: int) -> SparseMatrix:
        """Matrix of the ``s``-th basis element of ``A_i`` from ``M_j`` to ``M_{i+j}``."""
        dj, dk = self.dim(j), self.dim(i + j)
        if i == 0 and self.algebra.unital:
            return SparseMatrix.identity(dj)
        m = self.action.get((i, j))
        if m is None:
            return SparseMatrix.zero(dk, dj)
        return m.submatrix(list(range(dk)), [s * dj + t for t in range(dj)])

    def act_vector(self, i: int, a: Mapping[int, Fraction], j: int) -> SparseMatrix:
        out = SparseMatrix.zero(self.dim(i + j), self.dim(j))
        for s, c in a.items():
            out = out + self.act_matrix(i, s, j).scale(c)
        return out

    @cached_property
    def offsets(self) -> dict[int, int]:
        off, out = 0, {}
        for j in self.degrees():
            out[j] = off
            off += self.dim(j)
        return out

    def module_data(self, aug: Augmentation) -> ModuleData:
        """Flatten, with one action matrix per element of ``aug``."""
        degrees, names = [], []
        for j in self.degrees():
            for name in self.basis.get(j, ()):
                degrees.append(j)
                names.append(name)
        n = len(degrees)
        A = self.algebra
        lo = 1 if A.unital else 0
        local: list[tuple[int, int]] = []
        for i in range(lo, A.max_degree + 1):
            for s in range(A.dim(i)):
                local.append((i, s))
        mats = []
        # aug was built from this algebra with the same enumeration order
        for g in range(aug.dim):
            i, s = local[g]
            rows: dict[int, dict[int, Fraction]] = {}
            for j in self.degrees():
                if i + j > self.q or not self.dim(j) or not self.dim(i + j):
                    continue
                blk = self.act_matrix(i, s, j)
                for r, c, v in blk.entries():
                    rows.setdefault(self.offsets[i + j] + r, {})[self.offsets[j] + c] = v
            mats.append(SparseMatrix.from_rows(n, n, rows))
        return ModuleData(tuple(degrees), tuple(names), tuple(mats))


def algebra_as_module(A: GradedAlgebraTruncation, p: int, q: int) -> GradedModuleWindow:
    """``A_{[p,q]}`` as a module over ``A``."""
    if p <= q and q > A.max_degree:
        raise WindowViolation(f"window top {q} beyond algebra truncation {A.max_degree}")
    basis = {j: A.basis[j] for j in range(max(p, 0), q + 1)}
    action = {}
    for i in range(1 if A.unital else 0, q - p + 1):
        for j in range(max(p, 0), q - i + 1):
            if i + j <= A.max_degree and A.dim(i) and A.dim(j):
                action[(i, j)] = A.mult[(i, j)]
    return GradedModuleWindow(A, (p, q), basis, action)


def zero_module(A: GradedAlgebraTruncation, p: int = 0, q: int = -1) -> GradedModuleWindow:
    return GradedModuleWindow(A, (p, q), {}, {})


def hilbert_function(m: GradedModuleWindow) -> dict[int, int]:
    return {j: m.dim(j) for j in m.degrees()}


def truncate_window(m: GradedModuleWindow, p: int, q: int) -> GradedModuleWindow:
    if p > q:
        return GradedModuleWindow(m.algebra, (p, q), {}, {})
    if p < m.p or q > m.q:
        raise WindowViolation(f"[{p},{q}] is not inside [{m.p},{m.q}]")
    basis = {j: m.basis[j] for j in range(p, q + 1) if j in m.basis}
    action = {(i, j): mat for (i, j), mat in m.action.items() if p <= j and i + j <= q}
    return GradedModuleWindow(m.algebra, (p, q), basis, action)


def twist(m: GradedModuleWindow, n: int) -> GradedModuleWindow:
    """``M(n)``: degree ``i`` of the result is degree ``i + n`` of ``m``."""
    if n == 0:
        return m
    basis = {j - n: names for j, names in m.basis.items()}
    action = {(i, j - n): mat for (i, j), mat in m.action.items()}
    return GradedModuleWindow(m.algebra, (m.p - n, m.q - n), basis, action)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    witness: str = ""


def validate(obj) -> list[Violation]:
    if isinstance(obj, GradedAlgebraTruncation):
        return _validate_algebra(obj)
    if isinstance(obj, GradedModuleWindow):
        return _validate_module(obj)
    if isinstance(obj, FiniteAlgebra):
        return _validate_finite(obj)
    raise TypeError(type(obj))


def _vec_eq(a: Mapping, b: Mapping) -> bool:
    return {k: v for k, v in a.items() if v} == {k: v for k, v in b.items() if v}


def _apply_product(A: GradedAlgebraTruncation, i: int, vec: Mapping[int, Fraction], j: int, t: int, left: bool):
    """``vec * b_t`` (left=True) or ``b_t * vec`` with ``vec`` in ``A_i`` and ``b_t`` in ``A_j``."""
    acc: dict[int, Fraction] = {}
    for s, c in vec.items():
        prod = A.product(i, s, j, t) if left else A.product(j, t, i, s)
        for u, v in prod.items():
            acc[u] = acc.get(u, 0) + c * v
    return {u: v for u, v in acc.items() if v}


def _validate_algebra(A: GradedAlgebraTruncation) -> list[Violation]:
    out: list[Violation] = []
    d = A.max_degree
    for i in range(d + 1):
        for j in range(d + 1 - i):
            m = A.mult.get((i, j))
            want = (A.dim(i + j), A.dim(i) * A.dim(j))
            if m is None or m.shape != want:
                out.append(Violation("shape", (i, j), f"expected {want}"))
    if out:
        return out
    if A.unital:
        if A.dim(0) != 1:
            out.append(Violation("unit", (0,), f"dim A_0 = {A.dim(0)}"))
        else:
            for j in range(d + 1):
                for t in range(A.dim(j)):
                    e = {t: Fraction(1)}
                    if not _vec_eq(A.product(0, 0, j, t), e):
                        out.append(Violation("unit", (0, j), f"1*{A.basis[j][t]}"))
                    if not _vec_eq(A.product(j, t, 0, 0), e):
                        out.append(Violation("unit", (j, 0), f"{A.basis[j][t]}*1"))
    if A.commutative:
        for i in range(d + 1):
            for j in range(i, d + 1 - i):
                for s in range(A.dim(i)):
                    for t in range(A.dim(j)):
                        if not _vec_eq(A.product(i, s, j, t), A.product(j, t, i, s)):
                            out.append(
                                Violation("commutativity", (i, j, s, t), f"{A.basis[i][s]}*{A.basis[j][t]}")
                            )
    for i in range(d + 1):
        for j in range(d + 1 - i):
            for k in range(d + 1 - i - j):
                for s in range(A.dim(i)):
                    for t in range(A.dim(j)):
                        ab = A.product(i, s, j, t)
                        for u in range(A.dim(k)):
                            lhs = _apply_product(A, i + j, ab, k, u, left=True)
                            bc = A.product(j, t, k, u)
                            rhs = _apply_product(A, j + k, bc, i, s, left=False)
                            if not _vec_eq(lhs, rhs):
                                out.append(
                                    Violation(
                                        "associativity",
                                        (i, j, k, s, t, u),
                                        f"({A.basis[i][s]}*{A.basis[j][t]})*{A.basis[k][u]}",
                                    )
                                )
    if A.generators:
        # warn when the declared generators do not generate the truncation
        gens = A.generator_vectors()
        reach: dict[int, list[dict]] = {0: [{0: Fraction(1)}]} if A.unital else {}
        for k in range(1, d + 1):
            ech = Echelon()
            vecs = []
            for e, g in gens:
                if e == k and ech.add_fraction_row(g):
                    vecs.append(dict(g))
                for v in reach.get(k - e, []) if e <= k and k - e >= 1 else []:
                    w = {}
                    for s, c in g.items():
                        for t, c2 in v.items():
                            for u, c3 in A.product(e, s, k - e, t).items():
                                w[u] = w.get(u, 0) + c * c2 * c3
                    w = {u: x for u, x in w.items() if x}
                    if w and ech.add_fraction_row(w):
                        vecs.append(w)
            reach[k] = vecs
            if ech.rank < A.dim(k):
                out.append(Violation("generation", (k,), f"generators span {ech.rank} of {A.dim(k)}"))
    return out


def _validate_finite(A: FiniteAlgebra) -> list[Violation]:
    out = []
    n = len(A.names)

    def mul(x: Mapping[int, Fraction], t: int, left: bool):
        acc: dict[int, Fraction] = {}
        for s, c in x.items():
            prod = A.products.get((s, t) if left else (t, s), {})
            for u, v in prod.items():
                acc[u] = acc.get(u, 0) + c * v
        return {u: v for u, v in acc.items() if v}

    for s in range(n):
        for t in range(n):
            if A.commutative and not _vec_eq(A.products.get((s, t), {}), A.products.get((t, s), {})):
                out.append(Violation("commutativity", (s, t), f"{A.names[s]}*{A.names[t]}"))
            for u in range(n):
                lhs = mul(A.products.get((s, t), {}), u, left=True)
                rhs = mul(A.products.get((t, u), {}), s, left=False)
                if not _vec_eq(lhs, rhs):
                    out.append(Violation("associativity", (s, t, u), f"({A.names[s]}*{A.names[t]})*{A.names[u]}"))
    return out


def _validate_module(m: GradedModuleWindow) -> list[Violation]:
    out: list[Violation] = []
    A = m.algebra
    for (i, j), mat in m.action.items():
        want = (m.dim(i + j), A.dim(i) * m.dim(j))
        if mat.shape != want:
            out.append(Violation("shape", (i, j), f"expected {want}"))
    if out:
        return out
    for i in range(1, m.q - m.p + 1):
        for k in range(1, m.q - m.p + 1 - i):
            if i + k > A.max_degree:
                continue
            for j in m.degrees():
                if j + i + k > m.q or not m.dim(j):
                    continue
                for s in range(A.dim(i)):
                    for t in range(A.dim(k)):
                        lhs = m.act_matrix(i, s, j + k) @ m.act_matrix(k, t, j)
                        rhs = m.act_vector(i + k, A.product(i, s, k, t), j)
                        if lhs != rhs:
                            out.append(
                                Violation("mixed-associativity", (i, k, j, s, t), f"{A.basis[i][s]}*({A.basis[k][t]}*m)")
                            )
    return out


# ---------------------------------------------------------------------------
# submodule points


@dataclass(frozen=True, eq=False)
class SubmodulePoint:
    ambient: GradedModuleWindow
    spaces: Mapping[int, SparseMatrix]

    def __post_init__(self):
        for j in self.ambient.degrees():
            mat = self.spaces.get(j)
            if mat is None:
                continue
            if mat.nrows != self.ambient.dim(j):
                raise ValueError(f"basis matrix in degree {j} has wrong row count")
            if rank(mat) != mat.ncols:
                raise ValueError(f"basis matrix in degree {j} is not of full column rank")

    def space(self, j: int) -> SparseMatrix:
        mat = self.spaces.get(j)
        if mat is None:
            return SparseMatrix.zero(self.ambient.dim(j), 0)
        return mat

    def dim(self, j: int) -> int:
        return self.space(j).ncols

    @property
    def dims(self) -> dict[int, int]:
        return {j: self.dim(j) for j in self.ambient.degrees()}


def submodule_from_vectors(ambient: GradedModuleWindow, vectors: Mapping[int, Sequence[Mapping[int, Fraction]]]) -> SubmodulePoint:
    """Span the given vectors per degree, discarding dependent ones."""
    spaces = {}
    for j, vecs in vectors.items():
        ech = Echelon()
        keep = [dict(v) for v in vecs if v and ech.add_fraction_row(v)]
        spaces[j] = SparseMatrix.from_columns(ambient.dim(j), keep)
    return SubmodulePoint(ambient, spaces)


def whole_module(m: GradedModuleWindow) -> SubmodulePoint:
    return SubmodulePoint(m, {j: SparseMatrix.identity(m.dim(j)) for j in m.degrees()})


def submodule_module(V: SubmodulePoint) -> GradedModuleWindow:
    """``V`` with the induced action; raises NotASubmodule when ``V`` is not stable."""
    M = V.ambient
    A = M.algebra
    basis = {j: tuple(f"v{j}_{k}" for k in range(V.dim(j))) for j in M.degrees()}
    action = {}
    for i in range(1, M.q - M.p + 1):
        for j in M.degrees():
            if i + j > M.q or not V.dim(j):
                continue
            blocks = []
            for s in range(A.dim(i)):
                img = M.act_matrix(i, s, j) @ V.space(j)
                x = solve(V.space(i + j), img)
                if x is None:
                    raise NotASubmodule(f"A_{i}[{s}] * V_{j} not inside V_{i + j}", (i, s, j))
                blocks.append(x)
            if blocks:
                action[(i, j)] = hstack(blocks)
    return GradedModuleWindow(A, M.window, basis, action)


def quotient_module(V: SubmodulePoint) -> GradedModuleWindow:
    """``M / V`` on the same window, coordinates given by complements of standard vectors."""
    M = V.ambient
    A = M.algebra
    quots = {j: Quotient(M.dim(j), V.space(j)) for j in M.degrees()}
    basis = {j: tuple(M.basis[j][c] for c in quots[j].free) for j in M.degrees() if j in M.basis}
    action = {}
    for i in range(1, M.q - M.p + 1):
        for j in M.degrees():
            if i + j > M.q or not quots[j].dim:
                continue
            cols = []
            for s in range(A.dim(i)):
                act = M.act_matrix(i, s, j)
                for f in quots[j].free:
                    img = act.apply({f: Fraction(1)})
                    cols.append(quots[i + j].project(img))
            action[(i, j)] = SparseMatrix.from_columns(quots[i + j].dim, cols)
    return GradedModuleWindow(A, M.window, basis, action)


def inclusion_matrix(V: SubmodulePoint) -> SparseMatrix:
    """Flattened inclusion ``V -> M`` in the bases used by ``module_data``."""
    M = V.ambient
    rows: dict[int, dict[int, Fraction]] = {}
    col_off = 0
    for j in M.degrees():
        mat = V.space(j)
        for r, c, v in mat.entries():
            rows.setdefault(M.offsets[j] + r, {})[col_off + c] = v
        col_off += mat.ncols
    return SparseMatrix.from_rows(M.total_dim, col_off, rows)


def scalar_vector(values: Sequence[object]) -> dict[int, Fraction]:
    return {i: to_scalar(v) for i, v in enumerate(values) if to_scalar(v)}
