"""Minimal free resolutions by per-degree linear algebra.

This is the classical side used to cross-check every bar computation.  A
module is handled in flattened form (:class:`~dquot.graded.ModuleData`);
minimal generators are a complement of ``A_+ X`` (Nakayama), and each new
layer resolves the kernel of the previous map.  In the graded case
everything is cut off above a top degree ``T``; a truncated module has no
elements above its window, so the result is exact through ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .complexes import CochainComplex
from .graded import Augmentation, ModuleData
from .linalg import Quotient, SparseMatrix, kernel_basis, solve


class WindowTooShort(ValueError):
    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


@dataclass
class FreeLayer:
    """``F = (+)_g A g``; basis elements are ``(g, a)`` with ``a = -1`` the unit."""

    gen_degrees: list[int]
    basis: list[tuple[int, int]]
    degrees: list[int]
    # image of each generator in the previous layer (or in the module, for layer 0)
    images: list[dict[int, Fraction]]

    @property
    def rank(self) -> int:
        return len(self.gen_degrees)


@dataclass
class FreeResolutionWindow:
    aug: Augmentation
    layers: list[FreeLayer]
    top: int | None
    validity: tuple[int | None, int | None]

    @property
    def generator_degrees(self) -> list[list[int]]:
        return [sorted(l.gen_degrees) for l in self.layers]

    def composition_zero(self) -> bool:
        """Check ``d_{k-1} d_k = 0`` for layers ``k >= 2``."""
        R = _Resolver(self.aug, self.top)
        for k in range(2, len(self.layers)):
            pp, prev, cur = self.layers[k - 2], self.layers[k - 1], self.layers[k]
            idx = {b: i for i, b in enumerate(pp.basis)}
            for img in cur.images:
                total: dict[int, Fraction] = {}
                for col, c in img.items():
                    g, a = prev.basis[col]
                    for r, v in R.act_vector(a, prev.images[g], pp.basis, idx).items():
                        total[r] = total.get(r, 0) + c * v
                if any(total.values()):
                    return False
        return True


class _Resolver:
    def __init__(self, aug: Augmentation, top: int | None):
        self.aug = aug
        self.top = top
        self.graded = aug.graded

    def free(self, gen_degrees: Sequence[int]) -> tuple[list[tuple[int, int]], list[int]]:
        basis, degrees = [], []
        for g, d in enumerate(gen_degrees):
            for a in [-1] + list(range(self.aug.dim)):
                da = 0 if a < 0 else self.aug.degrees[a]
                if self.graded and self.top is not None and d + da > self.top:
                    continue
                basis.append((g, a))
                degrees.append(d + da if self.graded else 0)
        return basis, degrees

    def act_vector(self, a: int, vec: dict[int, Fraction], basis, index) -> dict[int, Fraction]:
        if a < 0:
            return dict(vec)
        cols = self.act_on_free(a, [basis[c] for c in vec], index)
        out: dict[int, Fraction] = {}
        for (c, v), col in zip(vec.items(), cols):
            for r, w in col.items():
                out[r] = out.get(r, 0) + v * w
        return out

    def act_on_free(self, b: int, basis: list[tuple[int, int]], index: dict) -> list[dict[int, Fraction]]:
        """Columns of the action of aug element ``b`` on a free layer."""
        cols = []
        for g, a in basis:
            col = {}
            if a < 0:
                r = index.get((g, b))
                if r is not None:
                    col[r] = Fraction(1)
            else:
                for s, k in self.aug.product(b, a).items():
                    r = index.get((g, s))
                    if r is not None:
                        col[r] = k
            cols.append(col)
        return cols


def _module_generators(X: ModuleData) -> list[int]:
    """Coordinates of ``X`` whose unit vectors give minimal generators."""
    cols = []
    for m in X.act:
        cols.extend(c for c in m.columns() if c)
    q = Quotient(X.dim, SparseMatrix.from_columns(X.dim, cols))
    return list(q.free)


def free_resolution_window(aug: Augmentation, V: ModuleData, length: int, top: int | None = None, unital: bool = True) -> FreeResolutionWindow:
    """Layers ``F_0 .. F_length`` of a minimal free resolution of ``V``.

    ``top`` bounds the degrees computed in the graded case (default: top of ``V``).
    """
    if not unital:
        raise ValueError("free resolutions need a unital algebra")
    graded = aug.graded
    if graded:
        if top is None:
            top = max(V.degrees) if V.dim else 0
        if V.dim:
            width = max(aug.degrees) if aug.dim else 0
            need = top - min(V.degrees)
            if need > width and aug.dim:
                raise WindowTooShort(
                    f"degrees up to {top} need algebra degree {need}, have {width}",
                    min(V.degrees) + width + 1,
                )
    R = _Resolver(aug, top if graded else None)
    layers: list[FreeLayer] = []
    X = V
    # embedding of X's coordinates into the previous free layer (None for V itself)
    X_in_prev: list[dict[int, Fraction]] | None = None
    for k in range(length + 1):
        gens = _module_generators(X)
        gen_deg = [X.degrees[f] for f in gens]
        basis, degrees = R.free(gen_deg)
        index = {b: i for i, b in enumerate(basis)}
        # map F_k -> X
        eps_cols = []
        for g, a in basis:
            x = {gens[g]: Fraction(1)}
            if a >= 0:
                x = X.act[a].apply(x)
            eps_cols.append(x)
        images = [X_in_prev[f] if X_in_prev is not None else {f: Fraction(1)} for f in gens]
        layers.append(FreeLayer(gen_deg, basis, degrees, images))
        if k == length:
            break
        # kernel, degree by degree
        by_deg: dict[int, list[int]] = {}
        for i, d in enumerate(degrees):
            by_deg.setdefault(d, []).append(i)
        kvecs: list[dict[int, Fraction]] = []
        kdeg: list[int] = []
        for d in sorted(by_deg):
            cols_idx = by_deg[d]
            sub = SparseMatrix.from_columns(X.dim, [eps_cols[i] for i in cols_idx])
            ker = kernel_basis(sub)
            for col in ker.columns():
                kvecs.append({cols_idx[j]: v for j, v in col.items()})
                kdeg.append(d)
        if not kvecs:
            for _ in range(k + 1, length + 1):
                layers.append(FreeLayer([], [], [], []))
            break
        # the kernel as a module
        kpos: dict[int, list[int]] = {}
        for i, d in enumerate(kdeg):
            kpos.setdefault(d, []).append(i)
        kmats = {d: SparseMatrix.from_columns(len(basis), [kvecs[i] for i in idxs]) for d, idxs in kpos.items()}
        act = []
        for b in range(aug.dim):
            fcols = R.act_on_free(b, basis, index)
            targets: dict[int, list[tuple[int, dict]]] = {}
            for i, vec in enumerate(kvecs):
                img: dict[int, Fraction] = {}
                for c, v in vec.items():
                    for r, w in fcols[c].items():
                        s = img.get(r, 0) + v * w
                        if s:
                            img[r] = s
                        else:
                            img.pop(r, None)
                if img:
                    d = kdeg[i] + (aug.degrees[b] if graded else 0)
                    targets.setdefault(d, []).append((i, img))
            rows: dict[int, dict[int, Fraction]] = {}
            for d, items in targets.items():
                if d not in kmats:
                    raise RuntimeError("kernel not closed under the action")
                sol = solve(kmats[d], SparseMatrix.from_columns(len(basis), [img for _, img in items]))
                if sol is None:
                    raise RuntimeError("kernel not closed under the action")
                for j, (i, _) in enumerate(items):
                    for r, v in sol.column(j).items():
                        rows.setdefault(kpos[d][r], {})[i] = v
            act.append(SparseMatrix.from_rows(len(kvecs), len(kvecs), rows))
        X = ModuleData(tuple(kdeg), tuple(f"k{i}" for i in range(len(kvecs))), tuple(act))
        X_in_prev = kvecs
    lo = min(V.degrees) if graded and V.dim else None
    return FreeResolutionWindow(aug, layers, top if graded else None, (lo, top if graded else None))


def _full_action(aug: Augmentation, N: ModuleData, a: int, o: int) -> dict[int, Fraction]:
    if a < 0:
        return {o: Fraction(1)}
    return N.act_cols[a][o]


def ext_free_complex(res: FreeResolutionWindow, N: ModuleData, lo: int, hi: int) -> CochainComplex:
    """``Hom0(F_k, N)`` for ``k`` in ``lo..hi``."""
    aug = res.aug
    bases = {}
    for k in range(lo, hi + 1):
        layer = res.layers[k] if k < len(res.layers) and k >= 0 else FreeLayer([], [], [], [])
        items = []
        for g, d in enumerate(layer.gen_degrees):
            for o in range(N.dim):
                if not aug.graded or N.degrees[o] == d:
                    items.append((g, o))
        bases[k] = items
    diffs = {}
    for k in range(lo, hi):
        src, dst = bases[k], bases[k + 1]
        if not src or not dst:
            continue
        cur, nxt = res.layers[k], res.layers[k + 1]
        dindex = {x: i for i, x in enumerate(dst)}
        # (delta phi)(g') = sum_{(g,a)} c * a . phi(g)
        cols = {i: {} for i in range(len(src))}
        sindex = {x: i for i, x in enumerate(src)}
        for g2, img in enumerate(nxt.images):
            for col, c in img.items():
                g, a = cur.basis[col]
                for o in range(N.dim):
                    si = sindex.get((g, o))
                    if si is None:
                        continue
                    for o2, v in _full_action(aug, N, a, o).items():
                        r = dindex.get((g2, o2))
                        if r is not None:
                            cols[si][r] = cols[si].get(r, 0) + c * v
        diffs[k] = SparseMatrix.from_columns(len(dst), [{r: v for r, v in cols[i].items() if v} for i in range(len(src))])
    return CochainComplex({k: len(b) for k, b in bases.items()}, diffs)


def tor_free_complex(res: FreeResolutionWindow, Q: ModuleData, lo: int, hi: int, degree: int | None = None) -> CochainComplex:
    """``F_k (x)_A Q`` for ``k`` in ``lo..hi``, placed in cohomological degree ``-k``."""
    aug = res.aug
    bases = {}
    for k in range(lo, hi + 1):
        layer = res.layers[k] if 0 <= k < len(res.layers) else FreeLayer([], [], [], [])
        items = []
        for g, d in enumerate(layer.gen_degrees):
            for q in range(Q.dim):
                if degree is None or not aug.graded or d + Q.degrees[q] == degree:
                    items.append((g, q))
        bases[k] = items
    diffs = {}
    for k in range(lo + 1, hi + 1):
        src, dst = bases[k], bases[k - 1]
        if not src or not dst:
            continue
        prev, cur = res.layers[k - 1], res.layers[k]
        dindex = {x: i for i, x in enumerate(dst)}
        cols = []
        for g2, q in src:
            col: dict[int, Fraction] = {}
            for c_idx, c in cur.images[g2].items():
                g, a = prev.basis[c_idx]
                for q2, v in _full_action(aug, Q, a, q).items():
                    r = dindex.get((g, q2))
                    if r is not None:
                        col[r] = col.get(r, 0) + c * v
            cols.append({r: v for r, v in col.items() if v})
        diffs[-k] = SparseMatrix.from_columns(len(dst), cols)
    return CochainComplex({-k: len(b) for k, b in bases.items()}, diffs)
