"""Finite cochain complexes of finite-dimensional spaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .linalg import Echelon, Quotient, SparseMatrix, column_space_basis, kernel_basis, rank


class SignError(RuntimeError):
    """Raised when a constructed differential does not square to zero."""


@dataclass(eq=False)
class CochainComplex:
    """``dims[i]`` is the dimension of ``C^i``; ``diffs[i]`` is ``d^i: C^i -> C^{i+1}``.

    Missing terms are zero.  ``d^{i+1} d^i = 0`` is checked on construction
    unless ``check=False``.
    """

    dims: Mapping[int, int]
    diffs: Mapping[int, SparseMatrix]
    names: Mapping[int, Sequence[str]] = field(default_factory=dict)
    check: bool = True
    _ranks: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.dims = {i: d for i, d in self.dims.items()}
        for i, m in self.diffs.items():
            if m.shape != (self.dim(i + 1), self.dim(i)):
                raise ValueError(f"d^{i} has shape {m.shape}, expected {(self.dim(i + 1), self.dim(i))}")
        if self.check:
            for i in self.diffs:
                if i + 1 in self.diffs:
                    sq = self.diffs[i + 1] @ self.diffs[i]
                    if not sq.is_zero():
                        raise SignError(f"d^{i + 1} d^{i} != 0 ({sq.nnz} nonzero entries)")

    def dim(self, i: int) -> int:
        return self.dims.get(i, 0)

    def d(self, i: int) -> SparseMatrix:
        m = self.diffs.get(i)
        if m is None:
            return SparseMatrix.zero(self.dim(i + 1), self.dim(i))
        return m

    @property
    def degrees(self) -> list[int]:
        return sorted(i for i, d in self.dims.items() if d)

    def rank_d(self, i: int) -> int:
        if i not in self._ranks:
            self._ranks[i] = rank(self.d(i)) if self.dim(i) and self.dim(i + 1) else 0
        return self._ranks[i]

    def cohomology(self, i: int) -> int:
        return self.dim(i) - self.rank_d(i) - self.rank_d(i - 1)

    def cohomology_table(self, degrees: Sequence[int] | None = None) -> dict[int, int]:
        if degrees is None:
            degrees = self.degrees
        return {i: self.cohomology(i) for i in degrees}

    def cohomology_basis(self, i: int) -> SparseMatrix:
        """Cocycles whose classes form a basis of ``H^i``."""
        z = kernel_basis(self.d(i))
        b = column_space_basis(self.d(i - 1))
        q = Quotient(self.dim(i), b)
        # keep cocycles independent modulo coboundaries
        ech = Echelon()
        keep = []
        for col in z.columns():
            proj = q.project(col)
            if proj and ech.add_fraction_row(proj):
                keep.append(col)
        return SparseMatrix.from_columns(self.dim(i), keep)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * d for i, d in self.dims.items())

    def is_d_squared_zero(self) -> bool:
        return all((self.d(i + 1) @ self.d(i)).is_zero() for i in self.diffs)


def shifted(c: CochainComplex, k: int) -> CochainComplex:
    """``C[k]``: term ``i`` is ``C^{i+k}`` and the differential picks up ``(-1)^k``."""
    sign = -1 if k % 2 else 1
    return CochainComplex(
        {i - k: d for i, d in c.dims.items()},
        {i - k: m.scale(sign) for i, m in c.diffs.items()},
        {i - k: n for i, n in c.names.items()},
        check=False,
    )
