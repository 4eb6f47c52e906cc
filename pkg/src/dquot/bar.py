"""Reduced bar constructions on flattened algebra and module data.

Words are tuples of augmentation-basis indices.  Sign conventions used
throughout (all elements of ``A`` sit in cohomological degree 0):

* bar resolution of a genuine module ``V``::

      D(a0 | a1..an | v) = sum_{i=0}^{n-1} (-1)^i (..| a_i a_{i+1} |..| v)
                           + (-1)^n (a0 | a1..a_{n-1} | a_n v)

* the induced cochain differential on ``C^n = Hom0(A_+^{(x)n} (x) V, N)``::

      (df)(a1..a_{n+1}, v) = a1 f(a2..a_{n+1}, v)
                             + sum_{i=1}^{n} (-1)^i f(.., a_i a_{i+1}, .., v)
                             + (-1)^{n+1} f(a1..an, a_{n+1} v)

* two-sided bar for Tor, chains ``P (x) A_+^{(x)n} (x) Q``::

      d(p | a1..an | q) = (p a1 | a2..an | q)
                          + sum_{i=1}^{n-1} (-1)^i (p | .., a_i a_{i+1}, .. | q)
                          + (-1)^n (p | a1..a_{n-1} | a_n q)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Mapping

from .complexes import CochainComplex
from .graded import Augmentation, ModuleData
from .linalg import SparseMatrix


def words(aug: Augmentation, n: int, max_degree: int | None = None) -> list[tuple[tuple[int, ...], int]]:
    """Words of length ``n`` with their total degree, bounded by ``max_degree`` when graded."""
    if not aug.graded or max_degree is None:
        return [(w, 0 if not aug.graded else sum(aug.degrees[s] for s in w)) for w in iproduct(range(aug.dim), repeat=n)]
    out: list[tuple[tuple[int, ...], int]] = []

    def rec(prefix: tuple[int, ...], deg: int):
        if len(prefix) == n:
            out.append((prefix, deg))
            return
        for s in range(aug.dim):
            d = deg + aug.degrees[s]
            if d + (n - len(prefix) - 1) * _min_degree(aug) <= max_degree:
                rec(prefix + (s,), d)

    rec((), 0)
    return out


def _min_degree(aug: Augmentation) -> int:
    return min(aug.degrees) if aug.degrees else 0


def preimages(aug: Augmentation) -> dict[int, list[tuple[int, int, Fraction]]]:
    """``s -> [(b, c, k)]`` with ``k`` the ``s``-coefficient of ``b * c``."""
    out: dict[int, list[tuple[int, int, Fraction]]] = {}
    for (b, c), prod in aug.mul.items():
        for s, k in prod.items():
            if k:
                out.setdefault(s, []).append((b, c, k))
    return out


def _degree_span(V: ModuleData, N: ModuleData) -> int | None:
    if not V.dim or not N.dim:
        return None
    return max(N.degrees) - min(V.degrees)


# ---------------------------------------------------------------------------
# Hom complexes


@dataclass
class HomBasis:
    """Basis of ``Hom0(A_+^{(x)n} (x) V, N)``: triples ``(word, v, out)``."""

    n: int
    items: list[tuple[tuple[int, ...], int, int]]
    index: dict[tuple[tuple[int, ...], int, int], int]

    @property
    def dim(self) -> int:
        return len(self.items)


def hom_basis(aug: Augmentation, V: ModuleData, N: ModuleData, n: int) -> HomBasis:
    items = []
    span = _degree_span(V, N)
    if span is not None and (not aug.graded or n * _min_degree(aug) <= span or n == 0):
        n_by_deg = N.by_degree
        for w, dw in words(aug, n, span):
            for v in range(V.dim):
                for o in n_by_deg.get(dw + V.degrees[v], ()):
                    items.append((w, v, o))
    return HomBasis(n, items, {x: i for i, x in enumerate(items)})


def hom_differential(aug: Augmentation, V: ModuleData, N: ModuleData, src: HomBasis, dst: HomBasis, pre=None) -> SparseMatrix:
    """Matrix of the cochain differential ``C^n -> C^{n+1}`` for a genuine module ``V``."""
    n = src.n
    if pre is None:
        pre = preimages(aug)
    nrows = dst.dim
    idx = dst.index
    ncols_ = N.act_cols
    vrows = V.act_rows
    cols = []
    for (w, v, o) in src.items:
        col: dict[int, Fraction] = {}

        def add(key, c):
            r = idx.get(key)
            if r is not None:
                s = col.get(r, 0) + c
                if s:
                    col[r] = s
                else:
                    col.pop(r, None)

        # a1 . f(a2.., v)
        for a in range(aug.dim):
            for o2, c in ncols_[a][o].items():
                add(((a,) + w, v, o2), c)
        # merges
        for i in range(1, n + 1):
            sign = -1 if i % 2 else 1
            for b, c, k in pre.get(w[i - 1], ()):
                add((w[: i - 1] + (b, c) + w[i:], v, o), sign * k)
        # f(a1..an, a_{n+1} v)
        sign = -1 if (n + 1) % 2 else 1
        for a in range(aug.dim):
            for v2, c in vrows[a].get(v, {}).items():
                add((w + (a,), v2, o), sign * c)
        cols.append(col)
    return SparseMatrix.from_columns(nrows, cols)


def bar_hom_complex(aug: Augmentation, V: ModuleData, N: ModuleData, n_max: int | None = None, check: bool = True) -> tuple[CochainComplex, list[HomBasis]]:
    """Terms ``0..n_max`` of the bar cochain complex; ``n_max`` defaults to the degree span when graded."""
    if n_max is None:
        if not aug.graded:
            raise ValueError("ungraded bar complexes need an arity cap")
        span = _degree_span(V, N)
        n_max = 0 if span is None or not aug.dim else max(0, span // max(1, _min_degree(aug)))
    bases = [hom_basis(aug, V, N, n) for n in range(n_max + 1)]
    pre = preimages(aug)
    diffs = {}
    for n in range(n_max):
        if bases[n].dim and bases[n + 1].dim:
            diffs[n] = hom_differential(aug, V, N, bases[n], bases[n + 1], pre)
    dims = {n: b.dim for n, b in enumerate(bases)}
    return CochainComplex(dims, diffs, check=check), bases


def hom_complex_window(aug: Augmentation, V: ModuleData, N: ModuleData, lo: int, hi: int) -> tuple[CochainComplex, dict[int, HomBasis]]:
    """Terms ``lo..hi`` only (enough for ``H^i`` with ``lo = i - 1``, ``hi = i + 1``)."""
    lo = max(lo, 0)
    bases = {n: hom_basis(aug, V, N, n) for n in range(lo, hi + 1)}
    pre = preimages(aug)
    diffs = {}
    for n in range(lo, hi):
        if bases[n].dim and bases[n + 1].dim:
            diffs[n] = hom_differential(aug, V, N, bases[n], bases[n + 1], pre)
    return CochainComplex({n: b.dim for n, b in bases.items()}, diffs), bases


# ---------------------------------------------------------------------------
# A-infinity evaluation


def compose_into(aug: Augmentation, mu: Mapping[int, Mapping[tuple[tuple[int, ...], int], Mapping[int, Fraction]]], w: tuple[int, ...], vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
    """``mu_{len w}(w, vec)`` for a sparse vector ``vec``."""
    table = mu.get(len(w), {})
    out: dict[int, Fraction] = {}
    for v, c in vec.items():
        img = table.get((w, v))
        if img:
            for u, x in img.items():
                s = out.get(u, 0) + c * x
                if s:
                    out[u] = s
                else:
                    out.pop(u, None)
    return out


def merge(aug: Augmentation, w: tuple[int, ...], i: int) -> list[tuple[tuple[int, ...], Fraction]]:
    """Expand ``w`` with letters ``i`` and ``i+1`` (1-based) multiplied."""
    prod = aug.product(w[i - 1], w[i])
    return [(w[: i - 1] + (s,) + w[i + 1 :], k) for s, k in prod.items()]


def ainf_residual(aug: Augmentation, mu, n: int, w: tuple[int, ...], v: int) -> dict[int, Fraction]:
    """Residual of the arity-``n`` identity at ``(w, v)``::

        sum_i (-1)^{i+1} mu_{n-1}(.., a_i a_{i+1}, .., v)
        + sum_{p=1}^{n-1} (-1)^p mu_p(a1..ap, mu_{n-p}(a_{p+1}..an, v))
    """
    out: dict[int, Fraction] = {}

    def acc(vec, c):
        for u, x in vec.items():
            s = out.get(u, 0) + c * x
            if s:
                out[u] = s
            else:
                out.pop(u, None)

    for i in range(1, n):
        sign = 1 if i % 2 else -1
        for w2, k in merge(aug, w, i):
            acc(compose_into(aug, mu, w2, {v: Fraction(1)}), sign * k)
    for p in range(1, n):
        inner = compose_into(aug, mu, w[p:], {v: Fraction(1)})
        if inner:
            acc(compose_into(aug, mu, w[:p], inner), -1 if p % 2 else 1)
    return out


def bar_codifferential(aug: Augmentation, mu, dimV: int, n_max: int) -> tuple[SparseMatrix, list[tuple[tuple[int, ...], int]]]:
    """``D`` on ``(+)_{n <= n_max} A_+^{(x)n} (x) V`` built from an A-infinity structure ``mu``::

        D(a1..an | v) = sum_i (-1)^i (.., a_i a_{i+1}, .. | v)
                        + sum_{p=0}^{n-1} (-1)^{p+1} (a1..ap | mu_{n-p}(a_{p+1}..an, v))

    ``D`` never increases word length, so ``D^2`` restricted to this space is exact.
    """
    basis = [(w, v) for n in range(n_max + 1) for w, _ in words(aug, n, None) for v in range(dimV)]
    index = {x: i for i, x in enumerate(basis)}
    cols = []
    for w, v in basis:
        n = len(w)
        col: dict[int, Fraction] = {}

        def add(key, c):
            r = index[key]
            s = col.get(r, 0) + c
            if s:
                col[r] = s
            else:
                col.pop(r, None)

        for i in range(1, n):
            sign = -1 if i % 2 else 1
            for w2, k in merge(aug, w, i):
                add((w2, v), sign * k)
        for p in range(n):
            sign = -1 if (p + 1) % 2 else 1
            for u, c in compose_into(aug, mu, w[p:], {v: Fraction(1)}).items():
                add((w[:p], u), sign * c)
        cols.append(col)
    return SparseMatrix.from_columns(len(basis), cols), basis


# ---------------------------------------------------------------------------
# Tor


def tor_chain_basis(aug: Augmentation, P: ModuleData, Q: ModuleData, n: int, degree: int | None):
    items = []
    max_deg = None
    if aug.graded and degree is not None:
        max_deg = degree - (min(P.degrees) if P.dim else 0) - (min(Q.degrees) if Q.dim else 0)
        if max_deg < n * _min_degree(aug):
            return items
    for w, dw in words(aug, n, max_deg):
        for p in range(P.dim):
            for q in range(Q.dim):
                if degree is not None and aug.graded and P.degrees[p] + dw + Q.degrees[q] != degree:
                    continue
                items.append((p, w, q))
    return items


def tor_differential(aug: Augmentation, P: ModuleData, Q: ModuleData, src, dst) -> SparseMatrix:
    """``B_n -> B_{n-1}`` in the two-sided bar complex."""
    index = {x: i for i, x in enumerate(dst)}
    prow = P.act_cols
    qcol = Q.act_cols
    cols = []
    for p, w, q in src:
        n = len(w)
        col: dict[int, Fraction] = {}

        def add(key, c):
            r = index.get(key)
            if r is not None:
                s = col.get(r, 0) + c
                if s:
                    col[r] = s
                else:
                    col.pop(r, None)

        for p2, c in prow[w[0]][p].items():
            add((p2, w[1:], q), c)
        for i in range(1, n):
            sign = -1 if i % 2 else 1
            for w2, k in merge(aug, w, i):
                add((p, w2, q), sign * k)
        sign = -1 if n % 2 else 1
        for q2, c in qcol[w[-1]][q].items():
            add((p, w[:-1], q2), sign * c)
        cols.append(col)
    return SparseMatrix.from_columns(len(dst), cols)


def tor_complex(aug: Augmentation, P: ModuleData, Q: ModuleData, n_max: int, degree: int | None = None, lo: int = 0) -> CochainComplex:
    """Chains ``B_lo..B_{n_max}`` placed in cohomological degrees ``-n``."""
    bases = {n: tor_chain_basis(aug, P, Q, n, degree) for n in range(max(lo, 0), n_max + 1)}
    diffs = {}
    for n in range(max(lo, 0) + 1, n_max + 1):
        if bases[n] and bases[n - 1]:
            diffs[-n] = tor_differential(aug, P, Q, bases[n], bases[n - 1])
    return CochainComplex({-n: len(b) for n, b in bases.items()}, diffs)
