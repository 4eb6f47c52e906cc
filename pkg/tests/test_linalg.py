from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dquot.linalg import (
    Echelon,
    Quotient,
    SparseMatrix,
    cohomology_dim,
    CompositionNonzero,
    format_scalar,
    hstack,
    in_span,
    kernel_basis,
    rank,
    rref,
    solve,
    solve_vector,
    to_scalar,
    vstack,
)

small = st.integers(min_value=-4, max_value=4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    n = draw(st.integers(1, max_rows))
    m = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=m, max_size=m), min_size=n, max_size=n))
    return SparseMatrix.from_dense(rows)


def det(rows):
    """Laplace expansion; fine for the tiny matrices used here."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for c in range(n):
        minor = [r[:c] + r[c + 1 :] for r in rows[1:]]
        total += (-1) ** c * rows[0][c] * det(minor)
    return total


def brute_rank(rows):
    """Largest nonvanishing minor, by exhaustive search."""
    from itertools import combinations

    n, m = len(rows), len(rows[0]) if rows else 0
    for k in range(min(n, m), 0, -1):
        for rs in combinations(range(n), k):
            for cs in combinations(range(m), k):
                if det([[rows[r][c] for c in cs] for r in rs]):
                    return k
    return 0


def test_scalars_are_exact():
    assert to_scalar("3/6") == Fraction(1, 2)
    assert format_scalar(Fraction(-4, 6)) == "-2/3"
    assert format_scalar(Fraction(5)) == "5"


def test_rank_of_known_matrices():
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1
    assert rank(SparseMatrix.identity(4)) == 4
    assert rank(SparseMatrix.zero(3, 5)) == 0


@given(matrices(4, 4))
@settings(max_examples=60, deadline=None)
def test_rank_matches_minors(a):
    assert rank(a) == brute_rank(a.to_dense())


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_nullity_and_kernel(a):
    k = kernel_basis(a)
    assert rank(a) + k.ncols == a.ncols
    assert (a @ k).is_zero()
    assert rank(k) == k.ncols
    assert rank(a) == rank(a.T)


@given(matrices(), st.data())
@settings(max_examples=80, deadline=None)
def test_solve_consistent_systems(a, data):
    x = SparseMatrix.from_dense([[data.draw(small)] for _ in range(a.ncols)])
    b = a @ x
    sol = solve(a, b)
    assert sol is not None
    assert a @ sol == b


def test_solve_reports_inconsistency():
    a = SparseMatrix.from_dense([[1, 1], [2, 2]])
    assert solve_vector(a, {0: Fraction(1), 1: Fraction(3)}) is None
    assert solve_vector(a, {0: Fraction(1), 1: Fraction(2)}) is not None


@given(matrices())
@settings(max_examples=40, deadline=None)
def test_rref_rows_are_reduced(a):
    red = rref(a)
    for c, row in red.items():
        assert row[c] == 1
        for c2, other in red.items():
            if c2 != c:
                assert c not in other
    assert len(red) == rank(a)
    # same row space as the input
    stacked = SparseMatrix.from_rows(len(red), a.ncols, dict(enumerate(red.values())))
    assert rank(vstack([a, stacked])) == rank(a)


def test_echelon_incremental():
    e = Echelon()
    assert e.add_fraction_row({0: Fraction(1), 1: Fraction(1)})
    assert e.add_fraction_row({1: Fraction(2)})
    assert not e.add_fraction_row({0: Fraction(3), 1: Fraction(-5)})
    assert e.contains({0: Fraction(1)})
    assert e.rank == 2


def test_quotient_projection():
    sub = SparseMatrix.from_dense([[1], [1], [0]])
    q = Quotient(3, sub)
    assert q.dim == 2
    assert not any(q.project({0: Fraction(1), 1: Fraction(1)}).values())
    assert q.project({2: Fraction(5)})
    assert in_span(sub, {0: Fraction(2), 1: Fraction(2)})
    assert not in_span(sub, {0: Fraction(1)})


def test_block_stacking():
    a = SparseMatrix.identity(2)
    b = SparseMatrix.from_dense([[1], [2]])
    assert hstack([a, b]).shape == (2, 3)
    assert vstack([a, SparseMatrix.zero(1, 2)]).shape == (3, 2)
    assert hstack([a, b]).to_dense()[1] == [0, 1, 2]


def test_cohomology_of_short_complex():
    d0 = SparseMatrix.from_dense([[1], [0]])
    d1 = SparseMatrix.from_dense([[0, 1]])
    assert cohomology_dim(d0, d1) == 0
    with pytest.raises(CompositionNonzero):
        cohomology_dim(d0, SparseMatrix.from_dense([[1, 0]]))
