from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dquot.complexes import SignError
from dquot.dga import FreeDgaPresentation, GCAlgebra, Generator, pi0_ideal
from dquot.graded import BiDegree, FiniteAlgebra
from dquot.homotopy import parse_element


def algebra(*specs):
    return GCAlgebra([Generator(n, BiDegree(0, d)) for n, d in specs])


def test_koszul_signs():
    R = algebra(("a", 0), ("u", -1), ("v", -1))
    u, v, a = R.gen("u"), R.gen("v"), R.gen("a")
    assert R.mul(u, v) == R.scale(R.mul(v, u), -1)
    assert R.mul(u, u) == {}
    assert R.mul(a, u) == R.mul(u, a)
    assert R.mul(R.mul(a, a), a) == R.product([0, 0, 0])


words = st.lists(st.integers(0, 3), min_size=0, max_size=4)


@given(words, words, words)
@settings(max_examples=80, deadline=None)
def test_multiplication_is_associative(x, y, z):
    R = algebra(("a", 0), ("u", -1), ("b", -2), ("v", -3))
    X, Y, Z = R.product(x), R.product(y), R.product(z)
    assert R.mul(R.mul(X, Y), Z) == R.mul(X, R.mul(Y, Z))


@given(words, words)
@settings(max_examples=80, deadline=None)
def test_graded_commutativity(x, y):
    R = algebra(("a", 0), ("u", -1), ("b", -2), ("v", -3))
    X, Y = R.product(x), R.product(y)
    if not X or not Y:
        return
    dx, dy = R.degree(X), R.degree(Y)
    assert R.mul(X, Y) == R.scale(R.mul(Y, X), (-1) ** (dx * dy))


def koszul_on_two_elements():
    R = algebra(("a", 0), ("b", 0), ("u", -1), ("w", -1), ("t", -2))
    d = {R.index["u"]: parse_element(R, "a"), R.index["w"]: parse_element(R, "b"), R.index["t"]: parse_element(R, "b*u - a*w")}
    return FreeDgaPresentation(R, d)


def test_leibniz_and_square_zero():
    P = koszul_on_two_elements()
    assert P.validate() == []
    R = P.algebra
    x = parse_element(R, "u*w + 2*a*t")
    y = parse_element(R, "t*u - b^2*w")
    lhs = P.d(R.mul(x, y))
    rhs = R.add(R.mul(P.d(x), y), R.mul(x, P.d(y)), (-1) ** R.degree(x))
    assert lhs == rhs
    assert P.d(P.d(x)) == {} and P.d(P.d(y)) == {}


def test_wrong_sign_is_caught():
    R = algebra(("a", 0), ("b", 0), ("u", -1), ("w", -1), ("t", -2))
    d = {R.index["u"]: parse_element(R, "a"), R.index["w"]: parse_element(R, "b"), R.index["t"]: parse_element(R, "b*u + a*w")}
    P = FreeDgaPresentation(R, d)
    with pytest.raises(SignError):
        P.check()


def test_pi0_ideal_reads_degree_minus_one():
    P = koszul_on_two_elements()
    assert [str(p) for p in pi0_ideal(P)] == ["a", "b"]
    assert pi0_ideal(FreeDgaPresentation(algebra(("a", 0)), {})) == []


# -- a thin arity-truncated D(A): free associative algebra on the words of A_+


class FreeAssociative:
    """Words ``(a_0 .. a_n)`` of basis elements of ``A_+`` sit in degree ``-n``."""

    def __init__(self, alg: FiniteAlgebra, max_len: int):
        self.alg = alg
        self.gens = [w for n in range(1, max_len + 1) for w in product(range(len(alg.names)), repeat=n)]

    @staticmethod
    def deg(w):
        return -(len(w) - 1)

    def add(self, x, y, c=1):
        out = dict(x)
        for k, v in y.items():
            s = out.get(k, 0) + c * v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return out

    def mul(self, x, y):
        out = {}
        for k1, v1 in x.items():
            for k2, v2 in y.items():
                out = self.add(out, {k1 + k2: v1 * v2})
        return out

    def d_gen(self, w):
        out = {}
        n = len(w) - 1
        for i in range(n):
            for s, c in self.alg.products.get((w[i], w[i + 1]), {}).items():
                out = self.add(out, {(w[:i] + (s,) + w[i + 2 :],): c}, (-1) ** i)
            out = self.add(out, {(w[: i + 1], w[i + 1 :]): Fraction(1)}, -((-1) ** i))
        return out

    def d(self, x):
        out = {}
        for mono, c in x.items():
            deg = 0
            for j, g in enumerate(mono):
                left = {mono[:j]: Fraction(1)}
                right = {mono[j + 1 :]: Fraction(1)}
                out = self.add(out, self.mul(self.mul(left, self.d_gen(g)), right), c * (-1) ** deg)
                deg += self.deg(g)
        return out


@pytest.mark.parametrize(
    "alg",
    [
        FiniteAlgebra(("e",), {}, commutative=True),
        # K[x]/x^3 on A_+ = span(x, x^2)
        FiniteAlgebra(("x", "x2"), {(0, 0): {1: Fraction(1)}}, commutative=True),
        # noncommutative: p*q = r, every other product zero
        FiniteAlgebra(("p", "q", "r"), {(0, 1): {2: Fraction(1)}}),
    ],
)
def test_cobar_bar_algebra_squares_to_zero(alg):
    D = FreeAssociative(alg, 4)
    for w in D.gens:
        assert D.d(D.d_gen(w)) == {}, w
