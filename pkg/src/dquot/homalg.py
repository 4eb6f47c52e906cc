"""Ext, Tor and A-infinity checks.

Each derived quantity has two independent routes: the reduced bar complex
(:mod:`dquot.bar`) and a minimal free resolution (:mod:`dquot.resolution`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .bar import (
    ainf_residual,
    bar_codifferential,
    bar_hom_complex,
    compose_into,
    hom_complex_window,
    merge,
    tor_complex,
    words,
)
from .complexes import CochainComplex
from .graded import (
    Augmentation,
    FiniteAlgebra,
    FiniteModule,
    GradedAlgebraTruncation,
    GradedModuleWindow,
    ModuleData,
    SubmodulePoint,
    WindowViolation,
    submodule_module,
    truncate_window,
)
from .linalg import SparseMatrix, kernel_basis
from .resolution import ext_free_complex, free_resolution_window, tor_free_complex

Module = Union[GradedModuleWindow, FiniteModule, SubmodulePoint]


class CapReached(RuntimeError):
    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


@dataclass
class Setup:
    aug: Augmentation
    V: ModuleData
    N: ModuleData
    graded: bool
    unital: bool


def _as_module(m: Module):
    if isinstance(m, SubmodulePoint):
        return submodule_module(m)
    return m


def _nonzero_range(m: GradedModuleWindow) -> tuple[int, int] | None:
    degs = m.nonzero_degrees()
    return (min(degs), max(degs)) if degs else None


def prepare(A, V: Module, N: Module, min_width: int = 0) -> Setup:
    V, N = _as_module(V), _as_module(N)
    if isinstance(A, FiniteAlgebra):
        aug = A.augmentation()
        return Setup(aug, V.module_data(aug), N.module_data(aug), False, A.unital)
    rv, rn = _nonzero_range(V), _nonzero_range(N)
    width = 0 if rv is None or rn is None else max(0, rn[1] - rv[0], min_width)
    for m in (V, N):
        r = _nonzero_range(m)
        if r is not None:
            width = max(width, r[1] - r[0])
    if width > A.max_degree:
        raise WindowViolation(f"degree span {width} exceeds algebra truncation {A.max_degree}")
    aug = A.augmentation(width)
    return Setup(aug, V.module_data(aug), N.module_data(aug), True, A.unital)


# ---------------------------------------------------------------------------
# Ext


@dataclass
class ExtResult:
    i: int
    dim: int
    basis: SparseMatrix
    complex: CochainComplex


def bar_hom(A, V: Module, N: Module, n_max: int | None = None) -> CochainComplex:
    s = prepare(A, V, N)
    return bar_hom_complex(s.aug, s.V, s.N, n_max)[0]


def ext_bar(A, V: Module, N: Module, i: int, n_max: int | None = None) -> ExtResult:
    """``Ext^i`` (``Ext^{i,0}`` when graded) from three bar terms."""
    s = prepare(A, V, N)
    if not s.graded and n_max is not None and i > n_max - 1:
        raise ValueError(f"Ext^{i} needs arity cap at least {i + 1}")
    c, _ = hom_complex_window(s.aug, s.V, s.N, i - 1, i + 1)
    return ExtResult(i, c.cohomology(i), c.cohomology_basis(i), c)


def ext_bar_table(A, V: Module, N: Module, i_max: int) -> dict[int, int]:
    s = prepare(A, V, N)
    c, _ = hom_complex_window(s.aug, s.V, s.N, 0, i_max + 1)
    return {i: c.cohomology(i) for i in range(i_max + 1)}


def resolution(A, V: Module, length: int, top: int | None = None):
    s = prepare(A, V, V)
    return free_resolution_window(s.aug, s.V, length, top=top, unital=s.unital)


def _res_for(A, V: Module, N: Module, length: int):
    s = prepare(A, V, N)
    top = None
    if s.graded:
        tops = [max(m.degrees) for m in (s.V, s.N) if m.dim]
        top = max(tops) if tops else 0
    return s, free_resolution_window(s.aug, s.V, length, top=top, unital=s.unital)


def ext_free(A, V: Module, N: Module, i: int) -> int:
    s, res = _res_for(A, V, N, i + 1)
    c = ext_free_complex(res, s.N, max(i - 1, 0), i + 1)
    return c.cohomology(i)


def ext_free_table(A, V: Module, N: Module, i_max: int) -> dict[int, int]:
    s, res = _res_for(A, V, N, i_max + 1)
    c = ext_free_complex(res, s.N, 0, i_max + 1)
    return {i: c.cohomology(i) for i in range(i_max + 1)}


def hom_direct(A, V: Module, N: Module) -> int:
    """``dim Hom0_A(V, N)`` by solving the linearity conditions directly."""
    s = prepare(A, V, N)
    unknowns = [(v, o) for v in range(s.V.dim) for o in range(s.N.dim) if s.V.degrees[v] == s.N.degrees[o]]
    idx = {x: k for k, x in enumerate(unknowns)}
    rows: list[dict[int, Fraction]] = []
    # phi(a v) - a phi(v) = 0 for every basis a, v and output coordinate
    for a in range(s.aug.dim):
        av = s.V.act_cols[a]
        an = s.N.act_rows[a]
        for v in range(s.V.dim):
            eq: dict[tuple[int, int], Fraction] = {}
            for v2, c in av[v].items():
                for o in range(s.N.dim):
                    if (v2, o) in idx:
                        eq.setdefault(o, {})
                        eq[o][idx[(v2, o)]] = eq[o].get(idx[(v2, o)], 0) + c
            for o2, row in an.items():
                for o, c in row.items():
                    k = idx.get((v, o))
                    if k is not None:
                        eq.setdefault(o2, {})
                        eq[o2][k] = eq[o2].get(k, 0) - c
            for r in eq.values():
                r = {k: x for k, x in r.items() if x}
                if r:
                    rows.append(r)
    m = SparseMatrix.from_rows(len(rows), len(unknowns), dict(enumerate(rows)))
    return kernel_basis(m).ncols


# ---------------------------------------------------------------------------
# Tor


def _tor_width(A, P: Module, Q: Module, degree: int | None) -> int:
    """Algebra degrees that can occur in a chain of total degree ``degree``."""
    if degree is None or isinstance(A, FiniteAlgebra):
        return 0
    rp, rq = _nonzero_range(_as_module(P)), _nonzero_range(_as_module(Q))
    if rp is None or rq is None:
        return 0
    return min(A.max_degree, max(0, degree - rp[0] - rq[0]))


def tor_bar(A, P: Module, Q: Module, i: int, degree: int | None = None, n_max: int | None = None) -> int:
    """``Tor_i`` from the two-sided bar complex, in one projective degree when graded."""
    s = prepare(A, P, Q, _tor_width(A, P, Q, degree))
    if s.graded and degree is None:
        raise ValueError("graded Tor is computed one projective degree at a time")
    c = tor_complex(s.aug, s.V, s.N, i + 1, degree, lo=i - 1)
    return c.cohomology(-i)


def tor_free(A, P: Module, Q: Module, i: int, degree: int | None = None) -> int:
    s = prepare(A, P, Q, _tor_width(A, P, Q, degree))
    top = degree if s.graded else None
    if s.graded and degree is None:
        raise ValueError("graded Tor is computed one projective degree at a time")
    if s.graded:
        # generators above ``degree`` cannot contribute
        res = free_resolution_window(s.aug, s.V, i + 1, top=max(top, max(s.V.degrees) if s.V.dim else top), unital=s.unital)
    else:
        res = free_resolution_window(s.aug, s.V, i + 1, unital=s.unital)
    c = tor_free_complex(res, s.N, max(i - 1, 0), i + 1, degree)
    return c.cohomology(-i)


def derived_intersection(ip, gens_y: Sequence, gens_z: Sequence, i: int, max_degree: int | None = None) -> dict[int, int]:
    """``Tor_i(O_Y, O_Z)`` on the affine cone, per projective degree ``0..max_degree``."""
    from .ingest import ModulePresentation, module_from_presentation

    if max_degree is None:
        max_degree = ip.d_max
    P = module_from_presentation(ModulePresentation.make(ip, [0], [[g] for g in gens_y], (0, max_degree)))
    Q = module_from_presentation(ModulePresentation.make(ip, [0], [[g] for g in gens_z], (0, max_degree)))
    from .ingest import coordinate_algebra

    A = coordinate_algebra(ip)
    return {t: tor_bar(A, P, Q, i, degree=t) for t in range(max_degree + 1)}


def derived_intersection_oracle(ip, gens_y: Sequence, gens_z: Sequence, i: int, max_degree: int | None = None) -> dict[int, int]:
    from .ingest import ModulePresentation, coordinate_algebra, module_from_presentation

    if max_degree is None:
        max_degree = ip.d_max
    P = module_from_presentation(ModulePresentation.make(ip, [0], [[g] for g in gens_y], (0, max_degree)))
    Q = module_from_presentation(ModulePresentation.make(ip, [0], [[g] for g in gens_z], (0, max_degree)))
    A = coordinate_algebra(ip)
    return {t: tor_free(A, P, Q, i, degree=t) for t in range(max_degree + 1)}


# ---------------------------------------------------------------------------
# A-infinity structures

Table = dict[int, dict[tuple[tuple[int, ...], int], dict[int, Fraction]]]


@dataclass
class AInfinityModuleStructure:
    """``mu[n][(word, v)]`` is the sparse image of ``mu_n(word, v)``."""

    aug: Augmentation
    dim: int
    mu: Table
    arity_bound: int
    degrees: tuple[int, ...] = ()

    @classmethod
    def from_module(cls, aug: Augmentation, V: ModuleData, arity_bound: int = 1) -> "AInfinityModuleStructure":
        mu1 = {}
        for a in range(aug.dim):
            for v, col in enumerate(V.act_cols[a]):
                if col:
                    mu1[((a,), v)] = dict(col)
        return cls(aug, V.dim, {1: mu1}, arity_bound, V.degrees)

    def entries(self) -> list[tuple[int, tuple[int, ...], int, int]]:
        """All admissible ``(n, word, v, out)`` slots (projective degree 0 when graded)."""
        out = []
        for n in range(1, self.arity_bound + 1):
            for w, dw in words(self.aug, n, None if not self.aug.graded else _span(self)):
                for v in range(self.dim):
                    for u in range(self.dim):
                        if self.aug.graded and self.degrees and self.degrees[u] != self.degrees[v] + dw:
                            continue
                        out.append((n, w, v, u))
        return out

    def get(self, n: int, w: tuple[int, ...], v: int, u: int) -> Fraction:
        return self.mu.get(n, {}).get((w, v), {}).get(u, Fraction(0))

    def perturbed(self, n: int, w: tuple[int, ...], v: int, u: int, delta) -> "AInfinityModuleStructure":
        mu = {k: {key: dict(val) for key, val in t.items()} for k, t in self.mu.items()}
        slot = mu.setdefault(n, {}).setdefault((w, v), {})
        x = slot.get(u, 0) + Fraction(delta)
        if x:
            slot[u] = x
        else:
            slot.pop(u, None)
        return AInfinityModuleStructure(self.aug, self.dim, mu, max(self.arity_bound, n), self.degrees)


def _span(s: AInfinityModuleStructure) -> int | None:
    if not s.degrees:
        return None
    return max(s.degrees) - min(s.degrees)


@dataclass
class AInfReport:
    residuals: dict[int, dict[tuple[tuple[int, ...], int], dict[int, Fraction]]]
    checked_arity: int

    @property
    def passed(self) -> bool:
        return not any(self.residuals.values())

    @property
    def first_failure(self) -> int | None:
        bad = [n for n, r in self.residuals.items() if r]
        return min(bad) if bad else None


def check_ainf_module(s: AInfinityModuleStructure, arity: int | None = None) -> AInfReport:
    """Residuals of the A-infinity identities for arities ``2..arity``.

    Past ``2 * arity_bound`` every term vanishes, which is the default.
    """
    if arity is None:
        arity = 2 * s.arity_bound
    span = _span(s) if s.aug.graded else None
    res: dict[int, dict] = {}
    for n in range(2, arity + 1):
        bad = {}
        for w, _ in words(s.aug, n, span):
            for v in range(s.dim):
                r = ainf_residual(s.aug, s.mu, n, w, v)
                if r:
                    bad[(w, v)] = r
        res[n] = bad
    return AInfReport(res, arity)


def bar_square_failure(s: AInfinityModuleStructure, n_max: int | None = None) -> int | None:
    """Smallest word length on which ``D^2`` is nonzero, or None."""
    if n_max is None:
        n_max = 2 * s.arity_bound
    D, basis = bar_codifferential(s.aug, s.mu, s.dim, n_max)
    sq = D @ D
    lengths = [len(basis[c][0]) for c in range(sq.ncols) if sq.column(c)]
    return min(lengths) if lengths else None


@dataclass
class AInfinityMorphismData:
    source: AInfinityModuleStructure
    target: ModuleData
    f: Table
    arity_bound: int


def check_ainf_morphism(m: AInfinityMorphismData, arity: int | None = None) -> AInfReport:
    """Residuals ``-(F o D)`` per arity ``1..arity``; arity 1 reads ``f0(a m) - a f0(m)``."""
    s = m.source
    aug = s.aug
    if arity is None:
        arity = m.arity_bound + s.arity_bound
    N = m.target
    res: dict[int, dict] = {}
    for n in range(1, arity + 1):
        bad = {}
        for w, _ in words(aug, n, _span(s) if aug.graded else None):
            for v in range(s.dim):
                out: dict[int, Fraction] = {}

                def acc(vec, c):
                    for u, x in vec.items():
                        y = out.get(u, 0) + c * x
                        if y:
                            out[u] = y
                        else:
                            out.pop(u, None)

                inner = compose_into(aug, m.f, w[1:], {v: Fraction(1)})
                for o, c in inner.items():
                    acc(N.act_cols[w[0]][o], c)
                for i in range(1, n):
                    sign = -1 if i % 2 else 1
                    for w2, k in merge(aug, w, i):
                        acc(compose_into(aug, m.f, w2, {v: Fraction(1)}), sign * k)
                for p in range(n):
                    mid = compose_into(aug, s.mu, w[p:], {v: Fraction(1)})
                    if mid:
                        acc(compose_into(aug, m.f, w[:p], mid), -1 if (p + 1) % 2 else 1)
                if out:
                    bad[(w, v)] = {u: -x for u, x in out.items()}
        res[n] = bad
    return AInfReport(res, arity)


def morphism_from_map(source: AInfinityModuleStructure, target: ModuleData, f0: SparseMatrix) -> AInfinityMorphismData:
    table = {0: {((), v): col for v, col in enumerate(f0.columns()) if col}}
    return AInfinityMorphismData(source, target, table, 0)


# ---------------------------------------------------------------------------
# truncation stabilization


@dataclass
class StabilizationResult:
    q0: int
    table: dict[tuple[int, int], int]
    upper_vanishing: dict[tuple[int, int], int]
    free_vanishing: dict[tuple[int, int], int]


def _ext_table(A, V, N, i_max, method):
    if method == "bar":
        return ext_bar_table(A, V, N, i_max)
    return ext_free_table(A, V, N, i_max)


def stabilization_bound(A: GradedAlgebraTruncation, M: GradedModuleWindow, N: GradedModuleWindow, i_max: int, q_start: int | None = None, cap: int | None = None, method: str = "free") -> StabilizationResult:
    """Smallest ``q`` with ``Ext^{i,0}(M_{<=q}, N_{<=q})`` equal for ``q`` and ``q+1``, ``i <= i_max``.

    ``M`` and ``N`` are given on long windows; ``cap`` defaults to the
    largest ``q`` for which ``q + 1`` still fits in both.  Also records
    ``Ext^{i,0}(M_{>=q+1}, N_{<=q})`` and ``Ext^{i,0}(A_{<=q}, N_{<=q})``.
    """
    from .graded import algebra_as_module

    top = min(M.q, N.q)
    if cap is None:
        cap = top - 1
    if q_start is None:
        q_start = max(M.p, N.p)
    table: dict[tuple[int, int], int] = {}
    upper: dict[tuple[int, int], int] = {}
    free: dict[tuple[int, int], int] = {}

    def row(q):
        Mq = truncate_window(M, M.p, q)
        Nq = truncate_window(N, N.p, q)
        t = _ext_table(A, Mq, Nq, i_max, method)
        for i, d in t.items():
            table[(i, q)] = d
        if q + 1 <= M.q:
            hi = min(M.q, q + 1 + max(0, q - N.p))
            t2 = _ext_table(A, truncate_window(M, q + 1, hi), Nq, i_max, method)
            for i, d in t2.items():
                upper[(i, q)] = d
        if q <= A.max_degree:
            F = algebra_as_module(A, 0, q)
            t3 = _ext_table(A, F, truncate_window(N, N.p, q) if N.p >= 0 else Nq, i_max, method)
            for i, d in t3.items():
                free[(i, q)] = d
        return t

    q = q_start
    prev = row(q)
    while q + 1 <= cap + 1 and q + 1 <= top:
        nxt = row(q + 1)
        if nxt == prev:
            return StabilizationResult(q, table, upper, free)
        prev = nxt
        q += 1
    raise CapReached(f"no stabilization up to q = {q}", table)
