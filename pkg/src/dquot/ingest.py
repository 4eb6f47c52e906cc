"""Graded algebras and modules from polynomial presentations.

Everything is computed one degree at a time: the degree-``t`` piece of
``S/I`` is the quotient of the monomials of degree ``t`` by the span of all
``m * g`` with ``g`` a generator of ``I``.  The surviving (standard) monomials
are the non-pivot columns of an echelon form whose columns are ordered by
decreasing grlex, so they are the same monomials a grlex Groebner basis
would leave, without computing one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

from .graded import (
    GradedAlgebraTruncation,
    GradedModuleWindow,
    SubmodulePoint,
    WindowViolation,
    algebra_as_module,
    algebra_from_products,
)
from .linalg import Quotient, SparseMatrix, Echelon
from .poly import Poly, format_monomial, monomials_of_degree, parse_poly, variable_names


class InconsistentGrading(ValueError):
    pass


class NotContained(ValueError):
    pass


def _as_poly(p, variables) -> Poly:
    if isinstance(p, Poly):
        if p.variables != tuple(variables):
            raise ValueError("polynomial over the wrong variables")
        return p
    return parse_poly(str(p), variables)


@dataclass(frozen=True)
class IdealPresentation:
    variables: tuple[str, ...]
    generators: tuple[Poly, ...] = ()
    d_max: int = 4
    degrees: tuple[int, ...] = ()

    @classmethod
    def make(cls, nvars: int | Sequence[str], generators: Sequence = (), d_max: int = 4, degrees: Sequence[int] = ()):
        variables = tuple(variable_names(nvars)) if isinstance(nvars, int) else tuple(nvars)
        gens = tuple(_as_poly(g, variables) for g in generators)
        return cls(variables, gens, d_max, tuple(degrees))

    @property
    def weights(self) -> tuple[int, ...]:
        return self.degrees or (1,) * len(self.variables)

    def generator_degree(self, g: Poly) -> int:
        ds = g.degrees(self.weights)
        if len(ds) != 1:
            raise InconsistentGrading(f"{g} is not homogeneous")
        return next(iter(ds))

    def with_d_max(self, d_max: int) -> "IdealPresentation":
        return IdealPresentation(self.variables, self.generators, d_max, self.degrees)


class QuotientRing:
    """Per-degree normal forms for ``S/I`` up to ``d_max``."""

    def __init__(self, ip: IdealPresentation):
        self.ip = ip
        n = len(ip.variables)
        w = ip.weights
        if any(x <= 0 for x in w):
            raise InconsistentGrading("variable degrees must be positive")
        gens = []
        for g in ip.generators:
            if g.is_zero():
                continue
            gens.append((ip.generator_degree(g), g))
        self.monomials: list[list[tuple[int, ...]]] = []
        self.mono_index: list[dict[tuple[int, ...], int]] = []
        self.quotients: list[Quotient] = []
        for t in range(ip.d_max + 1):
            mons = monomials_of_degree(n, t, w)
            idx = {m: i for i, m in enumerate(mons)}
            rels = []
            for e, g in gens:
                if e > t:
                    continue
                for m in monomials_of_degree(n, t - e, w):
                    vec: dict[int, Fraction] = {}
                    for gm, c in g.terms.items():
                        k = idx[tuple(a + b for a, b in zip(m, gm))]
                        vec[k] = vec.get(k, 0) + c
                    vec = {k: v for k, v in vec.items() if v}
                    if vec:
                        rels.append(vec)
            self.monomials.append(mons)
            self.mono_index.append(idx)
            self.quotients.append(Quotient(len(mons), SparseMatrix.from_columns(len(mons), rels)))

    def dim(self, t: int) -> int:
        return self.quotients[t].dim if 0 <= t <= self.ip.d_max else 0

    def standard(self, t: int) -> list[tuple[int, ...]]:
        q = self.quotients[t]
        return [self.monomials[t][c] for c in q.free]

    def normal_form(self, p: Poly) -> dict[int, dict[int, Fraction]]:
        """Coordinates of ``p`` per degree on the standard monomial bases."""
        by_deg: dict[int, dict[int, Fraction]] = {}
        w = self.ip.weights
        for m, c in p.terms.items():
            t = sum(a * b for a, b in zip(m, w))
            if t > self.ip.d_max:
                raise WindowViolation(f"degree {t} beyond truncation {self.ip.d_max}")
            k = self.mono_index[t][m]
            by_deg.setdefault(t, {})
            by_deg[t][k] = by_deg[t].get(k, 0) + c
        return {t: self.quotients[t].project(v) for t, v in by_deg.items()}

    def monomial_nf(self, m: tuple[int, ...]) -> tuple[int, dict[int, Fraction]]:
        t = sum(a * b for a, b in zip(m, self.ip.weights))
        return t, self.quotients[t].project({self.mono_index[t][m]: Fraction(1)})

    @cached_property
    def algebra(self) -> GradedAlgebraTruncation:
        ip = self.ip
        std = [self.standard(t) for t in range(ip.d_max + 1)]
        basis = [[format_monomial(ip.variables, m) or "1" for m in ms] for ms in std]

        def product(i, s, j, t):
            m = tuple(a + b for a, b in zip(std[i][s], std[j][t]))
            return self.monomial_nf(m)[1]

        gens, names = [], []
        for k, v in enumerate(ip.variables):
            e = [0] * len(ip.variables)
            e[k] = 1
            deg, vec = self.monomial_nf(tuple(e))
            if deg <= ip.d_max and vec:
                gens.append((deg, vec))
                names.append(v)
        unital = self.dim(0) == 1
        return algebra_from_products(basis, product, unital=unital, commutative=True, generators=gens, generator_names=names)


@lru_cache(maxsize=64)
def quotient_ring(ip: IdealPresentation) -> QuotientRing:
    return QuotientRing(ip)


def coordinate_algebra(ip: IdealPresentation) -> GradedAlgebraTruncation:
    if ip.d_max < 0:
        raise ValueError("d_max must be non-negative")
    return quotient_ring(ip).algebra


# ---------------------------------------------------------------------------
# modules


@dataclass(frozen=True)
class ModulePresentation:
    ideal: IdealPresentation
    generator_degrees: tuple[int, ...]
    relations: tuple[tuple[Poly, ...], ...] = ()
    window: tuple[int, int] = (0, 3)
    generator_names: tuple[str, ...] = ()

    @classmethod
    def make(cls, ideal: IdealPresentation, generator_degrees: Sequence[int], relations: Sequence[Sequence] = (), window=(0, 3), generator_names=()):
        rels = tuple(tuple(_as_poly(c, ideal.variables) for c in r) for r in relations)
        for r in rels:
            if len(r) != len(generator_degrees):
                raise ValueError("relation length differs from the number of generators")
        return cls(ideal, tuple(generator_degrees), rels, tuple(window), tuple(generator_names))

    def relation_degree(self, r: Sequence[Poly]) -> int | None:
        degs = set()
        w = self.ideal.weights
        for d, c in zip(self.generator_degrees, r):
            for e in c.degrees(w):
                degs.add(e + d)
        if len(degs) > 1:
            raise InconsistentGrading(f"relation {[str(c) for c in r]} is not homogeneous")
        return next(iter(degs)) if degs else None


def module_from_presentation(mp: ModulePresentation) -> GradedModuleWindow:
    p, q = mp.window
    ip = mp.ideal
    if not mp.generator_degrees:
        return GradedModuleWindow(coordinate_algebra(ip), (p, q), {}, {})
    need = q - min(mp.generator_degrees)
    if p <= q and need > ip.d_max:
        raise WindowViolation(f"window top {q} needs algebra degree {need}, truncation is {ip.d_max}")
    R = quotient_ring(ip)
    A = R.algebra
    names = mp.generator_names or tuple(f"e{k}" for k in range(len(mp.generator_degrees)))
    rel_degs = [mp.relation_degree(r) for r in mp.relations]
    n = len(ip.variables)

    # free coordinates in degree t: (generator k, standard monomial index in A_{t-d_k})
    layout: dict[int, list[tuple[int, int]]] = {}
    quots: dict[int, Quotient] = {}
    for t in range(p, q + 1):
        cells = [(k, s) for k, d in enumerate(mp.generator_degrees) for s in range(A.dim(t - d))]
        layout[t] = cells
        pos = {c: i for i, c in enumerate(cells)}
        rels = []
        for r, D in zip(mp.relations, rel_degs):
            if D is None or D > t:
                continue
            for m in monomials_of_degree(n, t - D, ip.weights):
                vec: dict[int, Fraction] = {}
                for k, comp in enumerate(r):
                    for cm, c in comp.terms.items():
                        deg, nf = R.monomial_nf(tuple(a + b for a, b in zip(m, cm)))
                        for s, v in nf.items():
                            key = pos[(k, s)]
                            vec[key] = vec.get(key, 0) + c * v
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    rels.append(vec)
        quots[t] = Quotient(len(cells), SparseMatrix.from_columns(len(cells), rels))

    basis = {}
    for t in range(p, q + 1):
        out = []
        for c in quots[t].free:
            k, s = layout[t][c]
            mono = A.basis[t - mp.generator_degrees[k]][s]
            out.append(names[k] if mono == "1" else f"{mono}*{names[k]}")
        basis[t] = tuple(out)

    action = {}
    for i in range(1, q - p + 1):
        for j in range(p, q - i + 1):
            src, dst = quots[j], quots[i + j]
            if not src.dim:
                continue
            pos = {c: x for x, c in enumerate(layout[i + j])}
            cols = []
            for s in range(A.dim(i)):
                for f in src.free:
                    k, b = layout[j][f]
                    prod = A.product(i, s, j - mp.generator_degrees[k], b)
                    cols.append(dst.project({pos[(k, u)]: v for u, v in prod.items()}))
            action[(i, j)] = SparseMatrix.from_columns(dst.dim, cols)
    return GradedModuleWindow(A, (p, q), basis, action)


def ideal_submodule(ip: IdealPresentation, gens: Sequence, window: tuple[int, int]) -> SubmodulePoint:
    """Graded pieces of the ideal generated by ``gens`` inside ``A_{[p,q]}``."""
    p, q = window
    R = quotient_ring(ip)
    A = R.algebra
    M = algebra_as_module(A, p, q)
    n = len(ip.variables)
    polys = []
    for g in gens:
        try:
            g = _as_poly(g, ip.variables)
        except ValueError as exc:
            raise NotContained(str(exc)) from exc
        if g.is_zero():
            continue
        ds = g.degrees(ip.weights)
        if len(ds) != 1:
            raise NotContained(f"{g} is not homogeneous")
        e = next(iter(ds))
        if e > ip.d_max:
            raise NotContained(f"{g} has degree {e} beyond the truncation")
        polys.append((e, g))
    spaces = {}
    for t in range(p, q + 1):
        ech = Echelon()
        keep = []
        for e, g in polys:
            if e > t:
                continue
            for m in monomials_of_degree(n, t - e, ip.weights):
                prod = Poly(ip.variables, {tuple(a + b for a, b in zip(m, gm)): c for gm, c in g.terms.items()})
                vec = R.normal_form(prod).get(t, {})
                if vec and ech.add_fraction_row(vec):
                    keep.append(vec)
        spaces[t] = SparseMatrix.from_columns(A.dim(t), keep)
    return SubmodulePoint(M, spaces)
