from fractions import Fraction

import pytest

from dquot.dgmodels import (
    NotAnAction,
    WindowUnstable,
    build_ract_dga,
    derived_quot_tangent,
    rg_cone_complex,
    rlin_cone,
    tangent_ract,
    tangent_rg_cone,
    truncate_point,
)
from dquot.graded import NotASubmodule, algebra_as_module, dual_numbers, finite_module, submodule_from_vectors, whole_module
from dquot.homalg import AInfinityModuleStructure, bar_hom, prepare
from dquot.ingest import ideal_submodule
from dquot.linalg import SparseMatrix
from dquot.quot import QuotProblem

from conftest import poly_algebra


def test_ract_over_dual_numbers():
    E = dual_numbers()
    r = build_ract_dga(E, finite_module(E, [[[0]]]), 3)
    P = r.presentation
    assert [g.degree.cohomological for g in P.generators] == [0, -1, -2]
    R = P.algebra
    assert P.d_gen(1) == R.scale(R.mul(R.gen(0), R.gen(0)), -1)
    assert [str(p) for p in r.pi0()] == ["-m1[e](0,0)^2"]


def test_ract_d_squared_on_longer_arities():
    E = dual_numbers()
    K2 = finite_module(E, [[[0, 1], [0, 0]]])
    r = build_ract_dga(E, K2, 4)
    assert r.presentation.validate() == []
    # pi0 is generated by the four entries of G^2
    assert len(r.pi0()) == 4
    assert all(p.total_degree() == 2 for p in r.pi0())


def test_ract_graded_degree_bookkeeping():
    ip, A = poly_algebra(2, d_max=3)
    point = algebra_as_module(A, 2, 2)
    r = build_ract_dga(A, point)
    assert r.presentation.generators == ()
    r2 = build_ract_dga(A, algebra_as_module(A, 0, 2))
    assert r2.presentation.validate() == []
    assert {g.degree.cohomological for g in r2.presentation.generators} == {0, -1}


def test_ract_pi0_evaluates_like_associativity():
    ip, A = poly_algebra(2, d_max=3)
    M = algebra_as_module(A, 0, 2)
    r = build_ract_dga(A, M)
    s = prepare(A, M, M)
    mu = AInfinityModuleStructure.from_module(s.aug, s.V)
    point = r.point(mu)
    assert all(p.evaluate(point) == 0 for p in r.pi0())


def test_tangent_ract_matches_shifted_ext():
    E = dual_numbers()
    K = finite_module(E, [[[0]]])
    t = tangent_ract(E, K, 5)
    assert t.cohomology == {i: 1 for i in range(5)}
    # H^0 is the space of degree-1 cocycles of the bar complex
    c = bar_hom(E, K, K, 3)
    z1 = c.dim(1) - c.rank_d(1)
    assert t.cohomology[0] == z1
    with pytest.raises(NotAnAction):
        tangent_ract(E, finite_module(E, [[[1]]]), 3)


def test_rlin_cone_detects_nonlinearity():
    E = dual_numbers()
    K2 = finite_module(E, [[[0, 1], [0, 0]]])
    ok = rlin_cone(E, K2, K2, SparseMatrix.identity(2))
    assert ok.linear and ok.complex.cohomology(0) == 1
    bad = rlin_cone(E, K2, K2, SparseMatrix.from_dense([[1, 0], [0, 0]]))
    assert not bad.linear
    assert bad.complex.cohomology(0) == 0
    assert bad.complex.is_d_squared_zero()
    # (delta f)(e, v1) = e . f(v1) - f(e . v1) = 0 - v0 is the only nonzero entry
    assert bad.residual == {(("e",), 1, 0): Fraction(-1)}


def test_rlin_cone_without_augmentation():
    from dquot.graded import FiniteAlgebra, FiniteModule

    triv = FiniteAlgebra((), {})
    V = FiniteModule(triv, 2, ())
    cone = rlin_cone(triv, V, V, SparseMatrix.from_dense([[1, 2], [3, 4]]))
    assert cone.linear


@pytest.mark.parametrize("d", [1, 2, 3])
def test_points_on_the_projective_line(d):
    ip, A = poly_algebra(2, d_max=6)
    V = ideal_submodule(ip, [f"x0^{d}"], (1, 5))
    rep = tangent_rg_cone(A, V)
    assert rep.cohomology == {0: d, 1: 0, 2: 0}
    assert rep.passed


def test_point_on_the_plane():
    ip, A = poly_algebra(3, d_max=6)
    V = ideal_submodule(ip, ["x0", "x1"], (1, 4))
    rep = tangent_rg_cone(A, V)
    assert rep.cohomology == rep.oracle == {0: 2, 1: 1, 2: 0}
    assert rep.hom_classical == 2


def test_cone_is_a_complex_and_whole_module_is_rigid():
    ip, A = poly_algebra(2, d_max=5)
    V = ideal_submodule(ip, ["x0^2", "x0*x1"], (1, 4))
    c = rg_cone_complex(A, V, 2)
    assert c.is_d_squared_zero()
    M = algebra_as_module(A, 1, 4)
    rep = tangent_rg_cone(A, whole_module(M))
    assert rep.cohomology == {0: 0, 1: 0, 2: 0}


def test_cone_rejects_non_submodules():
    ip, A = poly_algebra(2, d_max=3)
    M = algebra_as_module(A, 1, 2)
    W = submodule_from_vectors(M, {1: [{0: 1}], 2: [{2: 1}]})
    with pytest.raises(NotASubmodule):
        tangent_rg_cone(A, W)


def test_derived_quot_tangent_window_check():
    ip, A = poly_algebra(2, d_max=6)
    V = ideal_submodule(ip, ["x0^2"], (1, 5))
    rep = derived_quot_tangent(QuotProblem.of_point(V), V)
    assert rep.cohomology == {0: 2, 1: 0, 2: 0}
    # on [1, 2] the degree-2 generator has not propagated yet
    short = ideal_submodule(ip, ["x0^2"], (1, 2))
    with pytest.raises(WindowUnstable):
        derived_quot_tangent(QuotProblem.of_point(short), short)
    assert truncate_point(V, 1, 3).dims == {1: 0, 2: 1, 3: 2}
