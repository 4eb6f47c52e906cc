"""Exact sparse linear algebra over the rationals.

Scalars are :class:`fractions.Fraction` (always in lowest terms, positive
denominator).  Matrices are stored row-wise as ``{row: {col: value}}`` with
no explicit zeros.  Elimination clears denominators row by row and works on
integer rows with content normalisation, pivoting on a static column order
that puts sparse columns first.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

Scalar = Fraction


class LinalgError(Exception):
    pass


class CompositionNonzero(LinalgError):
    """Raised when ``d_out @ d_in`` is not the zero matrix."""


def to_scalar(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(x)


def format_scalar(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class SparseMatrix:
    """Immutable sparse matrix with Fraction entries."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative shape")
        self.nrows = nrows
        self.ncols = ncols
        rows: dict[int, dict[int, Fraction]] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry {(r, c)} outside {nrows}x{ncols}")
                v = to_scalar(v)
                if v:
                    rows.setdefault(r, {})[c] = v
        self._rows = rows

    @classmethod
    def _from_rows(cls, nrows: int, ncols: int, rows: dict[int, dict[int, Fraction]]) -> "SparseMatrix":
        # trusted constructor: rows must already be zero-free
        m = cls.__new__(cls)
        m.nrows = nrows
        m.ncols = ncols
        m._rows = {r: row for r, row in rows.items() if row}
        return m

    @classmethod
    def from_rows(cls, nrows: int, ncols: int, rows: Mapping[int, Mapping[int, object]]) -> "SparseMatrix":
        clean: dict[int, dict[int, Fraction]] = {}
        for r, row in rows.items():
            if not 0 <= r < nrows:
                raise IndexError(r)
            d = {}
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise IndexError(c)
                v = to_scalar(v)
                if v:
                    d[c] = v
            if d:
                clean[r] = d
        return cls._from_rows(nrows, ncols, clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], ncols: int | None = None) -> "SparseMatrix":
        nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if nrows else 0
        rows = {}
        for r, row in enumerate(data):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            d = {c: to_scalar(v) for c, v in enumerate(row) if to_scalar(v)}
            if d:
                rows[r] = d
        return cls._from_rows(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, object]]) -> "SparseMatrix":
        rows: dict[int, dict[int, Fraction]] = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                v = to_scalar(v)
                if v:
                    rows.setdefault(r, {})[c] = v
        return cls.from_rows(nrows, len(columns), rows)

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls._from_rows(nrows, ncols, {})

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls._from_rows(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        r, c = key
        if not (0 <= r < self.nrows and 0 <= c < self.ncols):
            raise IndexError(key)
        return self._rows.get(r, {}).get(c, Fraction(0))

    def row(self, r: int) -> dict[int, Fraction]:
        return dict(self._rows.get(r, {}))

    def rows(self) -> Iterator[tuple[int, dict[int, Fraction]]]:
        for r in sorted(self._rows):
            yield r, self._rows[r]

    def column(self, c: int) -> dict[int, Fraction]:
        return {r: row[c] for r, row in self._rows.items() if c in row}

    def columns(self) -> list[dict[int, Fraction]]:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self.ncols)]
        for r, row in self._rows.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def entries(self) -> Iterator[tuple[int, int, Fraction]]:
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows.values())

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries():
            out[r][c] = v
        return out

    @property
    def T(self) -> "SparseMatrix":
        rows: dict[int, dict[int, Fraction]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                rows.setdefault(c, {})[r] = v
        return SparseMatrix._from_rows(self.ncols, self.nrows, rows)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        out: dict[int, dict[int, Fraction]] = {}
        for r, row in self._rows.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                brow = orows.get(k)
                if brow is None:
                    continue
                for c, b in brow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return SparseMatrix._from_rows(self.nrows, other.ncols, out)

    def apply(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times a sparse column vector."""
        out: dict[int, Fraction] = {}
        for r, row in self._rows.items():
            s = 0
            for c, v in row.items():
                x = vec.get(c)
                if x:
                    s += v * x
            if s:
                out[r] = Fraction(s)
        return out

    def _combine(self, other: "SparseMatrix", sign: int) -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            tgt = out.setdefault(r, {})
            for c, v in row.items():
                s = tgt.get(c, 0) + sign * v
                if s:
                    tgt[c] = s
                else:
                    tgt.pop(c, None)
        return SparseMatrix._from_rows(self.nrows, self.ncols, out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "SparseMatrix":
        return self.scale(-1)

    def scale(self, k) -> "SparseMatrix":
        k = to_scalar(k)
        if not k:
            return SparseMatrix.zero(self.nrows, self.ncols)
        return SparseMatrix._from_rows(
            self.nrows, self.ncols, {r: {c: v * k for c, v in row.items()} for r, row in self._rows.items()}
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SparseMatrix":
        cpos = {c: j for j, c in enumerate(cols)}
        out = {}
        for i, r in enumerate(rows):
            row = self._rows.get(r)
            if not row:
                continue
            d = {cpos[c]: v for c, v in row.items() if c in cpos}
            if d:
                out[i] = d
        return SparseMatrix._from_rows(len(rows), len(cols), out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(self.entries())))

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


def hstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ValueError("nothing to stack")
    nrows = blocks[0].nrows
    out: dict[int, dict[int, Fraction]] = {}
    off = 0
    for b in blocks:
        if b.nrows != nrows:
            raise ValueError("row count mismatch")
        for r, row in b._rows.items():
            tgt = out.setdefault(r, {})
            for c, v in row.items():
                tgt[c + off] = v
        off += b.ncols
    return SparseMatrix._from_rows(nrows, off, out)


def vstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ValueError("nothing to stack")
    ncols = blocks[0].ncols
    out: dict[int, dict[int, Fraction]] = {}
    off = 0
    for b in blocks:
        if b.ncols != ncols:
            raise ValueError("column count mismatch")
        for r, row in b._rows.items():
            out[r + off] = dict(row)
        off += b.nrows
    return SparseMatrix._from_rows(off, ncols, out)


# ---------------------------------------------------------------------------
# elimination


def _int_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in row.values():
        d = v.denominator
        if d != 1:
            den = den * d // gcd(den, d)
    out = {c: v.numerator * (den // v.denominator) for c, v in row.items() if v}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental row echelon form over Z with a fixed column order.

    ``order`` maps a column to its sort key; the pivot of every stored row is
    its minimal column under that key, which guarantees termination of the
    reduction loop.
    """

    def __init__(self, order: Mapping[int, object] | None = None):
        self._order = order
        self.pivots: dict[int, dict[int, int]] = {}

    def _key(self, c):
        if self._order is None:
            return c
        return self._order.get(c, (1, c))

    def _lead(self, row):
        return min(row, key=self._key)

    def reduce(self, row: dict[int, int]) -> dict[int, int]:
        pivots = self.pivots
        while row:
            c = self._lead(row)
            prow = pivots.get(c)
            if prow is None:
                return row
            a = row[c]
            b = prow[c]
            g = gcd(a, b)
            ma, mb = b // g, a // g
            if ma < 0:
                ma, mb = -ma, -mb
            new = {k: v * ma for k, v in row.items()} if ma != 1 else dict(row)
            for k, v in prow.items():
                s = new.get(k, 0) - mb * v
                if s:
                    new[k] = s
                else:
                    new.pop(k, None)
            row = _primitive(new)
        return row

    def add(self, row: dict[int, int]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        self.pivots[self._lead(row)] = row
        return True

    def add_fraction_row(self, row: Mapping[int, Fraction]) -> bool:
        return self.add(_int_row(row))

    def contains(self, row: Mapping[int, Fraction]) -> bool:
        return not self.reduce(_int_row(row))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduced(self) -> dict[int, dict[int, Fraction]]:
        """Reduced row echelon form: pivot -> row with pivot entry 1."""
        done: dict[int, dict[int, Fraction]] = {}
        for c in sorted(self.pivots, key=self._key, reverse=True):
            row = self.pivots[c]
            p = row[c]
            r = {k: Fraction(v, p) for k, v in row.items()}
            for c2 in sorted((k for k in r if k != c and k in done), key=self._key):
                f = r.get(c2)
                if not f:
                    continue
                for k, v in done[c2].items():
                    s = r.get(k, 0) - f * v
                    if s:
                        r[k] = s
                    else:
                        r.pop(k, None)
            done[c] = r
        return done


def _markowitz_order(m: SparseMatrix) -> dict[int, tuple[int, int]]:
    counts: dict[int, int] = {}
    for _, row in m._rows.items():
        for c in row:
            counts[c] = counts.get(c, 0) + 1
    return {c: (n, c) for c, n in counts.items()}


def _echelon(m: SparseMatrix) -> Echelon:
    ech = Echelon(_markowitz_order(m))
    for _, row in sorted(m._rows.items(), key=lambda kv: (len(kv[1]), kv[0])):
        ech.add(_int_row(row))
    return ech


def rank(m: SparseMatrix) -> int:
    """Rank over Q."""
    if m.is_zero():
        return 0
    # eliminate along the shorter side
    if m.nrows > m.ncols:
        m = m.T
    return _echelon(m).rank


def rref(m: SparseMatrix) -> dict[int, dict[int, Fraction]]:
    return _echelon(m).reduced()


def kernel_basis(m: SparseMatrix) -> SparseMatrix:
    """Columns form a basis of the right kernel, one per free column, in column order."""
    red = rref(m)
    free = [c for c in range(m.ncols) if c not in red]
    fpos = {c: j for j, c in enumerate(free)}
    rows: dict[int, dict[int, Fraction]] = {}
    for c in free:
        rows.setdefault(c, {})[fpos[c]] = Fraction(1)
    for c, row in red.items():
        for f, v in row.items():
            if f != c:
                rows.setdefault(c, {})[fpos[f]] = -v
    return SparseMatrix._from_rows(m.ncols, len(free), rows)


def solve(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix | None:
    """A particular X with ``a @ X == b``, or None when some column is inconsistent."""
    if a.nrows != b.nrows:
        raise ValueError("row count mismatch")
    n = a.ncols
    order: dict[int, object] = dict(_markowitz_order(a))
    for j in range(b.ncols):
        order[n + j] = (float("inf"), n + j)
    ech = Echelon(order)
    for r in range(a.nrows):
        row = dict(a._rows.get(r, {}))
        for c, v in b._rows.get(r, {}).items():
            row[n + c] = v
        if row:
            ech.add(_int_row(row))
    if any(c >= n for c in ech.pivots):
        return None
    red = ech.reduced()
    out: dict[int, dict[int, Fraction]] = {}
    for c, row in red.items():
        d = {k - n: v for k, v in row.items() if k >= n}
        if d:
            out[c] = d
    return SparseMatrix._from_rows(n, b.ncols, out)


def solve_vector(a: SparseMatrix, rhs: Mapping[int, Fraction]) -> dict[int, Fraction] | None:
    x = solve(a, SparseMatrix.from_columns(a.nrows, [rhs]))
    if x is None:
        return None
    return x.column(0)


def independent_columns(m: SparseMatrix) -> list[int]:
    """Indices of a maximal independent set of columns, greedily in index order."""
    ech = Echelon()
    keep = []
    for j, col in enumerate(m.columns()):
        if col and ech.add_fraction_row(col):
            keep.append(j)
    return keep


def column_space_basis(m: SparseMatrix) -> SparseMatrix:
    cols = m.columns()
    return SparseMatrix.from_columns(m.nrows, [cols[j] for j in independent_columns(m)])


class Quotient:
    """Coordinates on ``Q^n / span(sub)`` given by a complement of standard basis vectors.

    ``free`` lists the ambient coordinates whose images form the quotient
    basis; ``project`` maps an ambient vector to quotient coordinates.
    """

    def __init__(self, n: int, sub: SparseMatrix):
        if sub.nrows != n:
            raise ValueError("subspace lives in the wrong ambient space")
        ech = Echelon()
        for col in sub.columns():
            if col:
                ech.add_fraction_row(col)
        self.n = n
        self.red = ech.reduced()
        self.free = [c for c in range(n) if c not in self.red]
        self._fpos = {c: j for j, c in enumerate(self.free)}
        self.dim = len(self.free)

    def project(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for c, v in vec.items():
            if not v:
                continue
            if c in self._fpos:
                j = self._fpos[c]
                out[j] = out.get(j, 0) + v
            else:
                for k, w in self.red[c].items():
                    if k != c:
                        j = self._fpos[k]
                        out[j] = out.get(j, 0) - v * w
        return {j: Fraction(v) for j, v in out.items() if v}

    def matrix(self) -> SparseMatrix:
        """The projection as a ``dim x n`` matrix."""
        return SparseMatrix.from_columns(self.dim, [self.project({c: Fraction(1)}) for c in range(self.n)])

    def lift(self, j: int) -> dict[int, Fraction]:
        return {self.free[j]: Fraction(1)}


def in_span(sub: SparseMatrix, vec: Mapping[int, Fraction]) -> bool:
    ech = Echelon()
    for col in sub.columns():
        if col:
            ech.add_fraction_row(col)
    return ech.contains(vec) if vec else True


def cohomology_dim(d_in: SparseMatrix, d_out: SparseMatrix) -> int:
    """dim ker(d_out) - rank(d_in) at the middle spot of ``. -d_in-> . -d_out-> .``."""
    if d_out.ncols != d_in.nrows:
        raise ValueError(f"incompatible shapes {d_in.shape} then {d_out.shape}")
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out @ d_in != 0")
    return d_out.ncols - rank(d_out) - rank(d_in)


def vec_add(acc: dict, vec: Mapping, coef=1) -> None:
    """In place ``acc += coef * vec`` for sparse dict vectors."""
    for k, v in vec.items():
        s = acc.get(k, 0) + coef * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


def random_matrix(rng, nrows: int, ncols: int, density: float = 0.5, lo: int = -3, hi: int = 3) -> SparseMatrix:
    rows: dict[int, dict[int, Fraction]] = {}
    for r in range(nrows):
        for c in range(ncols):
            if rng.random() < density:
                v = rng.randint(lo, hi)
                if v:
                    rows.setdefault(r, {})[c] = Fraction(v)
    return SparseMatrix._from_rows(nrows, ncols, rows)


def iter_unit(n: int) -> Iterable[dict[int, Fraction]]:
    for i in range(n):
        yield {i: Fraction(1)}
