"""Derived models: the action classifier, its pi0 and tangent complexes, and cones."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bar import HomBasis, hom_basis, hom_differential, preimages, words
from .complexes import CochainComplex
from .dga import FreeDgaPresentation, GCAlgebra, Generator, pi0_ideal
from .graded import (
    Augmentation,
    BiDegree,
    ModuleData,
    SubmodulePoint,
    inclusion_matrix,
    quotient_module,
    submodule_module,
    truncate_window,
)
from .homalg import AInfinityModuleStructure, check_ainf_module, ext_free_table, hom_direct, prepare
from .linalg import SparseMatrix, hstack, vstack


class NotAnAction(ValueError):
    pass


class WindowUnstable(RuntimeError):
    def __init__(self, message: str, smaller: dict, larger: dict):
        super().__init__(message)
        self.smaller = smaller
        self.larger = larger


def _single(A, V) -> tuple[Augmentation, ModuleData]:
    s = prepare(A, V, V)
    return s.aug, s.V


# ---------------------------------------------------------------------------
# the classifier of A-infinity actions


@dataclass
class RActPresentation:
    presentation: FreeDgaPresentation
    keys: list[tuple[int, tuple[int, ...], int, int]]  # (n, word, in, out)
    aug: Augmentation
    dim: int

    def point(self, s: AInfinityModuleStructure) -> dict[str, Fraction]:
        """Values of the degree-0 generators at the action ``s``."""
        out = {}
        gens = self.presentation.generators
        for k, (n, w, v, u) in enumerate(self.keys):
            if n == 1:
                out[gens[k].name] = s.get(1, w, v, u)
        return out

    def pi0(self):
        return pi0_ideal(self.presentation)


def _word_name(aug: Augmentation, w: tuple[int, ...]) -> str:
    return ",".join(aug.names[s] for s in w)


def build_ract_dga(A, V, arity_max: int | None = None, check: bool = True) -> RActPresentation:
    """Generators are the matrix entries of ``mu_n`` (cohomological degree ``1-n``)::

        d mu_n(w)[out, in] = sum_i (-1)^{i+1} mu_{n-1}(.., a_i a_{i+1}, ..)[out, in]
                             + sum_p (-1)^p sum_u mu_p(w[:p])[out, u] * mu_{n-p}(w[p:])[u, in]
    """
    aug, VD = _single(A, V)
    span = None
    if aug.graded:
        span = (max(VD.degrees) - min(VD.degrees)) if VD.dim else 0
        if arity_max is None:
            arity_max = span // max(1, min(aug.degrees)) if aug.dim else 0
    elif arity_max is None:
        raise ValueError("ungraded classifiers need an arity cap")
    keys = []
    for n in range(1, arity_max + 1):
        for w, dw in words(aug, n, span):
            for v in range(VD.dim):
                for u in range(VD.dim):
                    if aug.graded and VD.degrees[u] != VD.degrees[v] + dw:
                        continue
                    keys.append((n, w, v, u))
    gens = [
        Generator(f"m{n}[{_word_name(aug, w)}]({u},{v})", BiDegree(0, 1 - n))
        for n, w, v, u in keys
    ]
    R = GCAlgebra(gens)
    index = {k: i for i, k in enumerate(keys)}
    diff = {}
    for i, (n, w, v, u) in enumerate(keys):
        x: dict = {}
        for pos in range(1, n):
            sign = 1 if pos % 2 else -1
            prod = aug.product(w[pos - 1], w[pos])
            for s, k in prod.items():
                w2 = w[: pos - 1] + (s,) + w[pos + 1 :]
                g = index.get((n - 1, w2, v, u))
                if g is not None:
                    x = R.add(x, R.gen(g), sign * k)
        for p in range(1, n):
            sign = -1 if p % 2 else 1
            for mid in range(VD.dim):
                g1 = index.get((p, w[:p], mid, u))
                g2 = index.get((n - p, w[p:], v, mid))
                if g1 is not None and g2 is not None:
                    x = R.add(x, R.mul(R.gen(g1), R.gen(g2)), sign)
        if x:
            diff[i] = x
    pres = FreeDgaPresentation(R, diff)
    if check:
        pres.check()
    return RActPresentation(pres, keys, aug, VD.dim)


# ---------------------------------------------------------------------------
# tangent complexes


@dataclass
class TangentResult:
    complex: CochainComplex
    cohomology: dict[int, int]


def _genuine(A, mu) -> ModuleData:
    if isinstance(mu, AInfinityModuleStructure):
        if any(mu.mu.get(n) for n in mu.mu if n >= 2):
            raise NotAnAction("higher operations present; a genuine action is required")
        rep = check_ainf_module(mu, 2)
        if not rep.passed:
            raise NotAnAction(f"associativity fails: {rep.residuals[2]}")
        acts = []
        for a in range(mu.aug.dim):
            cols = [mu.mu.get(1, {}).get(((a,), v), {}) for v in range(mu.dim)]
            acts.append(SparseMatrix.from_columns(mu.dim, cols))
        degs = mu.degrees or (0,) * mu.dim
        return ModuleData(tuple(degs), tuple(f"v{i}" for i in range(mu.dim)), tuple(acts))
    raise TypeError("expected an AInfinityModuleStructure")


def tangent_ract(A, mu, arity_max: int | None = None) -> TangentResult:
    """Term ``i`` is ``Hom(A_+^{(x)(i+1)} (x) V, V)`` with the bar-cochain differential of ``mu``."""
    if isinstance(mu, AInfinityModuleStructure):
        aug = mu.aug
        VD = _genuine(A, mu)
    else:
        aug, VD = _single(A, mu)
        s = AInfinityModuleStructure.from_module(aug, VD)
        if not check_ainf_module(s, 2).passed:
            raise NotAnAction("the given module structure is not associative")
    if arity_max is None:
        if not aug.graded:
            raise ValueError("ungraded tangent complexes need an arity cap")
        span = (max(VD.degrees) - min(VD.degrees)) if VD.dim else 0
        arity_max = span // max(1, min(aug.degrees)) if aug.dim else 0
    bases = [hom_basis(aug, VD, VD, n) for n in range(1, arity_max + 2)]
    pre = preimages(aug)
    diffs = {}
    for i in range(len(bases) - 1):
        if bases[i].dim and bases[i + 1].dim:
            diffs[i] = hom_differential(aug, VD, VD, bases[i], bases[i + 1], pre)
    c = CochainComplex({i: b.dim for i, b in enumerate(bases)}, diffs)
    # the top term has no outgoing differential computed, so report below it
    return TangentResult(c, {i: c.cohomology(i) for i in range(len(bases) - 1)})


@dataclass
class RLinCone:
    complex: CochainComplex
    residual: dict[tuple[tuple[str, ...], int, int], Fraction]

    @property
    def linear(self) -> bool:
        return not self.residual


def rlin_cone(A, V, M, f: SparseMatrix, n_max: int | None = None) -> RLinCone:
    """``K --(delta f)--> C^1(V, M) -> C^2(V, M) -> ...`` with ``K`` in degree 0."""
    s = prepare(A, V, M)
    aug = s.aug
    if n_max is None:
        if not aug.graded:
            n_max = 2
        else:
            span = (max(s.N.degrees) - min(s.V.degrees)) if s.V.dim and s.N.dim else 0
            n_max = max(1, span // max(1, min(aug.degrees) if aug.dim else 1))
    if f.shape != (s.N.dim, s.V.dim):
        raise ValueError(f"map has shape {f.shape}, expected {(s.N.dim, s.V.dim)}")
    b0 = hom_basis(aug, s.V, s.N, 0)
    fvec = {}
    for r, c, x in f.entries():
        k = b0.index.get(((), c, r))
        if k is None:
            raise ValueError(f"entry ({r},{c}) does not preserve degree")
        fvec[k] = x
    bases = {n: hom_basis(aug, s.V, s.N, n) for n in range(1, n_max + 1)}
    pre = preimages(aug)
    d01 = hom_differential(aug, s.V, s.N, b0, bases[1], pre) if bases[1].dim and b0.dim else SparseMatrix.zero(bases[1].dim, b0.dim)
    delta_f = d01.apply(fvec)
    diffs = {0: SparseMatrix.from_columns(bases[1].dim, [delta_f])}
    for n in range(1, n_max):
        if bases[n].dim and bases[n + 1].dim:
            diffs[n] = hom_differential(aug, s.V, s.N, bases[n], bases[n + 1], pre)
    dims = {0: 1}
    dims.update({n: b.dim for n, b in bases.items()})
    c = CochainComplex(dims, diffs)
    readable = {}
    for k, x in delta_f.items():
        w, v, o = bases[1].items[k]
        readable[(tuple(aug.names[a] for a in w), v, o)] = x
    return RLinCone(c, readable)


@dataclass
class TangentComplexReport:
    complex: CochainComplex
    cohomology: dict[int, int]
    oracle: dict[int, int]
    hom_classical: int | None = None

    @property
    def passed(self) -> bool:
        ok = self.cohomology == self.oracle
        if self.hom_classical is not None and 0 in self.cohomology:
            ok = ok and self.cohomology[0] == self.hom_classical
        return ok


def _inclusion_on_hom(iota: SparseMatrix, src: HomBasis, dst: HomBasis) -> SparseMatrix:
    cols_i = iota.columns()
    cols = []
    for w, v, o in src.items:
        col = {}
        for m, x in cols_i[o].items():
            r = dst.index.get((w, v, m))
            if r is not None:
                col[r] = x
        cols.append(col)
    return SparseMatrix.from_columns(dst.dim, cols)


def rg_cone_complex(A, V: SubmodulePoint, h_max: int = 2) -> CochainComplex:
    """Term ``i`` (``i >= -1``) is ``C^{i+1}(V, V) (+) C^i(V, M)``; ``d(phi, psi) = (-d phi, iota phi + d psi)``."""
    M = V.ambient
    Vm = submodule_module(V)
    s = prepare(A, Vm, M)
    aug = s.aug
    VD = Vm.module_data(aug)
    MD = s.N
    iota = inclusion_matrix(V)
    pre = preimages(aug)
    top = h_max + 1
    bVV = {n: hom_basis(aug, VD, VD, n) for n in range(0, top + 2)}
    bVM = {n: hom_basis(aug, VD, MD, n) for n in range(0, top + 1)}
    dVV = {n: hom_differential(aug, VD, VD, bVV[n], bVV[n + 1], pre) for n in range(0, top + 1)}
    dVM = {n: hom_differential(aug, VD, MD, bVM[n], bVM[n + 1], pre) for n in range(0, top)}
    inc = {n: _inclusion_on_hom(iota, bVV[n], bVM[n]) for n in range(0, top + 1)}
    # terms run from -1 to top, so cohomology is exact through top - 1 = h_max

    def dimVM(n):
        return bVM[n].dim if n in bVM else 0

    dims = {i: bVV[i + 1].dim + dimVM(i) for i in range(-1, top + 1)}
    dims[-1] = bVV[0].dim
    diffs = {}
    for i in range(-1, top):
        # T^i = C^{i+1}(V,V) + C^i(V,M)  ->  T^{i+1} = C^{i+2}(V,V) + C^{i+1}(V,M)
        a = bVV[i + 1].dim
        b = dimVM(i)
        a2 = bVV[i + 2].dim
        b2 = dimVM(i + 1)
        top_left = dVV[i + 1].scale(-1)
        top_right = SparseMatrix.zero(a2, b)
        bottom_left = inc[i + 1] if i + 1 in inc else SparseMatrix.zero(b2, a)
        bottom_right = dVM[i] if i >= 0 and i in dVM else SparseMatrix.zero(b2, b)
        diffs[i] = vstack([hstack([top_left, top_right]), hstack([bottom_left, bottom_right])])
    return CochainComplex(dims, diffs)


def tangent_rg_cone(A, V: SubmodulePoint, h_max: int = 2) -> TangentComplexReport:
    """Cohomology of the cone in degrees ``0..h_max`` against ``Ext^i(V, M/V)`` from a free resolution."""
    submodule_module(V)  # raises NotASubmodule
    c = rg_cone_complex(A, V, h_max)
    coh = {i: c.cohomology(i) for i in range(0, h_max + 1)}
    Vm = submodule_module(V)
    Q = quotient_module(V)
    oracle = ext_free_table(A, Vm, Q, h_max)
    hom0 = hom_direct(A, Vm, Q)
    return TangentComplexReport(c, coh, oracle, hom0)


def truncate_point(V: SubmodulePoint, p: int, q: int) -> SubmodulePoint:
    M = truncate_window(V.ambient, p, q)
    return SubmodulePoint(M, {j: V.space(j) for j in range(p, q + 1)})


def derived_quot_tangent(qp, V: SubmodulePoint, h_max: int = 2, check_window: bool = True) -> TangentComplexReport:
    """The cone at the problem's window, compared with the window one degree shorter."""
    A = qp.algebra
    rep = tangent_rg_cone(A, V, h_max)
    if check_window:
        p, q = V.ambient.window
        if q - 1 >= p:
            smaller = tangent_rg_cone(A, truncate_point(V, p, q - 1), h_max)
            if smaller.cohomology != rep.cohomology:
                raise WindowUnstable(
                    f"tangent cohomology changes between [{p},{q - 1}] and [{p},{q}]",
                    smaller.cohomology,
                    rep.cohomology,
                )
    return rep
