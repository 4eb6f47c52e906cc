"""Submodules of a windowed module as points of a product of Grassmannians.

A point is a graded subspace ``V_j`` of ``M_j`` for each ``j`` in the
window.  Stability under the declared algebra generators cuts out the Quot
locus; in an affine chart each ``V_j`` is the graph ``T_j [I; X_j]`` over a
frame ``T_j`` and stability becomes quadratic equations in the ``X`` entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .graded import (
    GradedAlgebraTruncation,
    GradedModuleWindow,
    NotASubmodule,
    SubmodulePoint,
    submodule_from_vectors,
)
from .linalg import Quotient, SparseMatrix, hstack, kernel_basis, rank, solve
from .poly import Poly


def _generators(A: GradedAlgebraTruncation, width: int) -> list[tuple[int, dict[int, Fraction]]]:
    gens = A.generator_vectors()
    if gens:
        return [(d, v) for d, v in gens if 1 <= d <= width]
    # no declared generators: every basis element of positive degree
    return [(i, {s: Fraction(1)}) for i in range(1, min(width, A.max_degree) + 1) for s in range(A.dim(i))]


def _generator_name(A: GradedAlgebraTruncation, k: int, d: int, v) -> str:
    if k < len(A.generator_names):
        return A.generator_names[k]
    if len(v) == 1:
        (s,) = v
        return A.basis[d][s]
    return f"g{k}"


@dataclass
class QuotProblem:
    algebra: GradedAlgebraTruncation
    ambient: GradedModuleWindow
    h: dict[int, int]

    def __post_init__(self):
        for j in self.ambient.degrees():
            k = self.h.get(j, 0)
            if not 0 <= k <= self.ambient.dim(j):
                raise ValueError(f"h({j}) = {k} outside [0, {self.ambient.dim(j)}]")

    @classmethod
    def of_point(cls, V: SubmodulePoint) -> "QuotProblem":
        return cls(V.ambient.algebra, V.ambient, dict(V.dims))

    def generators(self):
        M = self.ambient
        return _generators(self.algebra, M.q - M.p)


# ---------------------------------------------------------------------------
# pointwise tests


def is_submodule(V: SubmodulePoint) -> tuple[bool, tuple | None]:
    """Stability under the declared generators; the witness is ``(generator, degree, vector)``."""
    M = V.ambient
    A = M.algebra
    for k, (d, a) in enumerate(_generators(A, M.q - M.p)):
        for j in M.degrees():
            if j + d > M.q or not V.dim(j):
                continue
            img = M.act_vector(d, a, j) @ V.space(j)
            target = V.space(j + d)
            for c, col in enumerate(img.columns()):
                if col and not _in_span(target, col):
                    return False, (_generator_name(A, k, d, a), j, dict(V.space(j).column(c)))
    return True, None


def _in_span(mat: SparseMatrix, vec) -> bool:
    if not vec:
        return True
    return solve(mat, SparseMatrix.from_columns(mat.nrows, [vec])) is not None


def section_values(V: SubmodulePoint) -> dict[tuple[str, int], SparseMatrix]:
    """Matrices of ``a (x) V_j -> M_{j+e} -> M_{j+e} / V_{j+e}`` per generator ``a`` and degree ``j``."""
    M = V.ambient
    A = M.algebra
    out = {}
    quots = {j: Quotient(M.dim(j), V.space(j)) for j in M.degrees()}
    for k, (d, a) in enumerate(_generators(A, M.q - M.p)):
        name = _generator_name(A, k, d, a)
        for j in M.degrees():
            if j + d > M.q:
                continue
            img = M.act_vector(d, a, j) @ V.space(j)
            q = quots[j + d]
            cols = [q.project(col) for col in img.columns()]
            out[(name, j)] = SparseMatrix.from_columns(q.dim, cols)
    return out


def tangent_classical(V: SubmodulePoint) -> tuple[int, list[dict[int, SparseMatrix]]]:
    """Degree-0 maps ``phi_j: V_j -> M_j / V_j`` commuting with the generators, by a direct solve."""
    ok, w = is_submodule(V)
    if not ok:
        raise NotASubmodule("point is not a submodule", w)
    M = V.ambient
    A = M.algebra
    quots = {j: Quotient(M.dim(j), V.space(j)) for j in M.degrees()}
    # unknowns: entries of each phi_j, a (dim M_j/V_j) x (dim V_j) matrix, column-major
    offs, n = {}, 0
    for j in M.degrees():
        offs[j] = n
        n += quots[j].dim * V.dim(j)

    def var(j, r, c):
        return offs[j] + c * quots[j].dim + r

    rows = []
    for d, a in _generators(A, M.q - M.p):
        for j in M.degrees():
            if j + d > M.q or not V.dim(j):
                continue
            act = M.act_vector(d, a, j)
            qj, qk = quots[j], quots[j + d]
            # a acting on M_j / V_j -> M_{j+d} / V_{j+d}
            abar = [qk.project(act.apply({f: Fraction(1)})) for f in qj.free]
            # a restricted to V: coordinates in V_{j+d}
            av = solve(V.space(j + d), act @ V.space(j))
            for c in range(V.dim(j)):
                for r in range(qk.dim):
                    row: dict[int, Fraction] = {}
                    # phi_{j+d}(a v_c) - a phi_j(v_c)
                    for c2, x in av.column(c).items():
                        row[var(j + d, r, c2)] = row.get(var(j + d, r, c2), 0) + x
                    for r2 in range(qj.dim):
                        x = abar[r2].get(r, 0)
                        if x:
                            row[var(j, r2, c)] = row.get(var(j, r2, c), 0) - x
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
    sys = SparseMatrix.from_rows(len(rows), n, dict(enumerate(rows)))
    ker = kernel_basis(sys)
    basis = []
    for col in ker.columns():
        maps = {}
        for j in M.degrees():
            maps[j] = SparseMatrix.from_rows(
                quots[j].dim,
                V.dim(j),
                {r: {c: col[var(j, r, c)] for c in range(V.dim(j)) if var(j, r, c) in col} for r in range(quots[j].dim)},
            )
        basis.append(maps)
    return ker.ncols, basis


# ---------------------------------------------------------------------------
# charts and equations


@dataclass
class ChartSpec:
    """Per degree, a frame ``T_j`` whose first ``k_j`` columns span the centre point.

    ``labels[j]`` names the frame columns (row indices for pivot charts).
    """

    frames: dict[int, SparseMatrix]
    k: dict[int, int]
    labels: dict[int, tuple[int, ...]]

    @classmethod
    def pivots(cls, qp: QuotProblem, pivots: Mapping[int, Sequence[int]]) -> "ChartSpec":
        M = qp.ambient
        frames, ks, labels = {}, {}, {}
        for j in M.degrees():
            n = M.dim(j)
            piv = list(pivots.get(j, ()))
            if len(piv) != qp.h.get(j, 0):
                raise ValueError(f"degree {j}: {len(piv)} pivots for h = {qp.h.get(j, 0)}")
            if len(set(piv)) != len(piv) or any(not 0 <= r < n for r in piv):
                raise ValueError(f"degree {j}: bad pivot rows {piv}")
            order = piv + [r for r in range(n) if r not in piv]
            frames[j] = SparseMatrix.from_columns(n, [{r: Fraction(1)} for r in order])
            ks[j] = len(piv)
            labels[j] = tuple(order)
        return cls(frames, ks, labels)

    @classmethod
    def centered(cls, V: SubmodulePoint) -> "ChartSpec":
        """A chart with ``V`` at the origin: frame = basis of ``V_j`` then standard complement."""
        M = V.ambient
        frames, ks, labels = {}, {}, {}
        for j in M.degrees():
            n = M.dim(j)
            q = Quotient(n, V.space(j))
            comp = SparseMatrix.from_columns(n, [{f: Fraction(1)} for f in q.free])
            frames[j] = hstack([V.space(j), comp])
            ks[j] = V.dim(j)
            labels[j] = tuple(range(n))
        return cls(frames, ks, labels)

    def var(self, j: int, r: int, c: int) -> str:
        return f"X_{j}_{self.labels[j][r]}_{self.labels[j][self.k[j] + c]}"

    def variables(self, qp: QuotProblem) -> list[str]:
        out = []
        for j in qp.ambient.degrees():
            n = qp.ambient.dim(j)
            for c in range(n - self.k[j]):
                for r in range(self.k[j]):
                    out.append(self.var(j, r, c))
        return out


@dataclass
class PolynomialSystem:
    variables: list[str]
    equations: list[Poly]
    labels: list[str]

    def evaluate(self, point: Mapping[str, object]) -> list[Fraction]:
        return [e.evaluate(point) for e in self.equations]

    def vanishes(self, point: Mapping[str, object]) -> bool:
        return not any(self.evaluate(point))

    def max_degree(self) -> int:
        return max((e.total_degree() for e in self.equations), default=0)

    def jacobian_at_origin(self) -> SparseMatrix:
        pos = {v: i for i, v in enumerate(self.variables)}
        rows = {}
        for i, e in enumerate(self.equations):
            lin = e.linear_part()
            row = {pos[v]: c for v, c in lin.items() if c}
            if row:
                rows[i] = row
        return SparseMatrix.from_rows(len(self.equations), len(self.variables), rows)


def _graph(qp: QuotProblem, chart: ChartSpec, j: int) -> list[list[Poly]]:
    """Frame coordinates of the basis of ``V_j``: an ``n x k`` matrix of polynomials."""
    n, k = qp.ambient.dim(j), chart.k[j]
    vs = chart.variables(qp)
    out = []
    for r in range(n):
        row = []
        for c in range(k):
            if r < k:
                row.append(Poly.constant(vs, 1 if r == c else 0))
            else:
                row.append(Poly.var(vs, chart.var(j, c, r - k)))
        out.append(row)
    return out


def _inverse(m: SparseMatrix) -> SparseMatrix:
    inv = solve(m, SparseMatrix.identity(m.nrows))
    if inv is None or m.nrows != m.ncols:
        raise ValueError("chart frame is not invertible")
    return inv


def chart_equations(qp: QuotProblem, chart: ChartSpec) -> PolynomialSystem:
    """``y_F - X_{j+e} y_P = 0`` where ``y = T_{j+e}^{-1} a T_j [I; X_j]`` for each generator ``a``."""
    M = qp.ambient
    A = qp.algebra
    vs = chart.variables(qp)
    zero = Poly.constant(vs, 0)
    graphs = {j: _graph(qp, chart, j) for j in M.degrees()}
    invs = {j: _inverse(chart.frames[j]) for j in M.degrees() if M.dim(j)}
    eqs, labels = [], []
    for g, (d, a) in enumerate(qp.generators()):
        name = _generator_name(A, g, d, a)
        for j in M.degrees():
            t = j + d
            if t > M.q or not chart.k[j]:
                continue
            nt, kt = M.dim(t), chart.k[t]
            if nt == kt:
                continue
            # constant matrix T_t^{-1} a T_j, then multiply by the graph
            lin = invs[t] @ M.act_vector(d, a, j) @ chart.frames[j]
            dense = lin.to_dense()
            y = []
            for r in range(nt):
                row = []
                for c in range(chart.k[j]):
                    acc = zero
                    for m in range(M.dim(j)):
                        x = dense[r][m]
                        if x:
                            acc = acc + graphs[j][m][c] * x
                    row.append(acc)
                y.append(row)
            for f in range(nt - kt):
                for c in range(chart.k[j]):
                    e = y[kt + f][c]
                    for p in range(kt):
                        if not y[p][c].is_zero():
                            e = e - Poly.var(vs, chart.var(t, p, f)) * y[p][c]
                    if not e.is_zero():
                        eqs.append(e)
                        labels.append(f"{name}:{j}:{f}:{c}")
    return PolynomialSystem(vs, eqs, labels)


def point_from_chart(qp: QuotProblem, chart: ChartSpec, values: Mapping[str, object]) -> SubmodulePoint:
    M = qp.ambient
    spaces = {}
    for j in M.degrees():
        g = _graph(qp, chart, j)
        mat = SparseMatrix.from_dense([[e.evaluate(values) for e in row] for row in g]) if g and chart.k[j] else SparseMatrix.zero(M.dim(j), 0)
        spaces[j] = chart.frames[j] @ mat if chart.k[j] else SparseMatrix.zero(M.dim(j), 0)
    return SubmodulePoint(M, spaces)


def chart_coordinates(qp: QuotProblem, chart: ChartSpec, V: SubmodulePoint) -> dict[str, Fraction] | None:
    """Graph coordinates of ``V``, or ``None`` when ``V`` lies outside the chart."""
    M = qp.ambient
    out = {}
    for j in M.degrees():
        k = chart.k[j]
        if V.dim(j) != k:
            return None
        if not k:
            continue
        y = _inverse(chart.frames[j]) @ V.space(j)
        top = y.submatrix(list(range(k)), list(range(k)))
        if rank(top) < k:
            return None
        x = y @ _inverse(top)
        n = M.dim(j)
        for f in range(n - k):
            for c in range(k):
                out[chart.var(j, c, f)] = x.to_dense()[k + f][c]
    return out


@dataclass
class JacobianReport:
    kernel_dim: int
    classical_dim: int

    @property
    def passed(self) -> bool:
        return self.kernel_dim == self.classical_dim


def jacobian_tangent_check(qp: QuotProblem, chart: ChartSpec, V: SubmodulePoint) -> JacobianReport:
    coords = chart_coordinates(qp, chart, V)
    if coords is None or any(coords.values()):
        raise ValueError("point is not at the chart origin")
    system = chart_equations(qp, chart)
    jac = system.jacobian_at_origin()
    ker = len(system.variables) - rank(jac)
    dim, _ = tangent_classical(V)
    return JacobianReport(ker, dim)


def generate_from_bottom(M: GradedModuleWindow, vectors: Sequence[Mapping[int, object]], p: int | None = None, q: int | None = None) -> SubmodulePoint:
    """Degree ``p + j`` piece is the span of ``A_j . W_p``; zero below ``p``."""
    if p is None:
        p = M.p
    if q is None:
        q = M.q
    A = M.algebra
    w = [{k: Fraction(v) for k, v in vec.items() if v} for vec in vectors]
    out = {p: w}
    for t in range(p + 1, q + 1):
        d = t - p
        if d > A.max_degree:
            raise ValueError(f"algebra truncated below degree {d}")
        vecs = []
        for s in range(A.dim(d)):
            act = M.act_matrix(d, s, p)
            vecs.extend(act.apply(v) for v in w)
        out[t] = vecs
    return submodule_from_vectors(M, out)
