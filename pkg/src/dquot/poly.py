"""Commutative polynomials with rational coefficients.

Exponent vectors are tuples over a fixed variable list.  Monomials compare
graded-lexicographically (total weighted degree first, then lex with the
first variable largest).
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from .linalg import format_scalar, to_scalar

Monomial = tuple[int, ...]


class ParseError(ValueError):
    pass


def grlex_key(mono: Monomial, weights: Sequence[int] | None = None):
    deg = sum(e * (weights[i] if weights else 1) for i, e in enumerate(mono))
    return (deg, mono)


def monomials_of_degree(nvars: int, degree: int, weights: Sequence[int] | None = None) -> list[Monomial]:
    """All exponent vectors of the given weighted degree, in decreasing grlex order."""
    weights = list(weights) if weights else [1] * nvars
    out: list[Monomial] = []

    def rec(i: int, left: int, acc: list[int]):
        if i == nvars - 1:
            if left % weights[i] == 0:
                out.append(tuple(acc + [left // weights[i]]))
            return
        for e in range(left // weights[i], -1, -1):
            rec(i + 1, left - e * weights[i], acc + [e])

    if nvars == 0:
        return [()] if degree == 0 else []
    if degree < 0:
        return []
    rec(0, degree, [])
    out.sort(key=lambda m: m, reverse=True)
    return out


class Poly:
    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[Monomial, object] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            if len(m) != n:
                raise ValueError("exponent length does not match variables")
            c = to_scalar(c)
            if c:
                clean[tuple(m)] = clean.get(tuple(m), 0) + c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def constant(cls, variables, c) -> "Poly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, variables, name: str) -> "Poly":
        i = list(variables).index(name)
        e = [0] * len(variables)
        e[i] = 1
        return cls(variables, {tuple(e): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "Poly"):
        if self.variables != other.variables:
            raise ValueError("polynomials over different variables")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.variables, other)
        self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Poly(self.variables, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.variables, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            k = to_scalar(other)
            return Poly(self.variables, {m: c * k for m, c in self.terms.items()})
        self._check(other)
        t: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Poly(self.variables, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.constant(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        return self == Poly.constant(self.variables, other)

    def __hash__(self):
        return hash((self.variables, tuple(sorted(self.terms.items()))))

    def degrees(self, weights: Sequence[int] | None = None) -> set[int]:
        return {grlex_key(m, weights)[0] for m in self.terms}

    def is_homogeneous(self, weights: Sequence[int] | None = None) -> bool:
        return len(self.degrees(weights)) <= 1

    def total_degree(self, weights: Sequence[int] | None = None) -> int:
        ds = self.degrees(weights)
        return max(ds) if ds else -1

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        vals = [to_scalar(point[v]) for v in self.variables]
        s = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for x, e in zip(vals, m):
                if e:
                    t *= x**e
            s += t
        return s

    def substitute(self, values: Mapping[str, object]) -> "Poly":
        """Substitute constants for some variables; the variable list is kept."""
        idx = {v: i for i, v in enumerate(self.variables)}
        vals = {idx[k]: to_scalar(v) for k, v in values.items()}
        t: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = list(m)
            for i, x in vals.items():
                if e[i]:
                    c = c * x ** e[i]
                    e[i] = 0
            if c:
                t[tuple(e)] = t.get(tuple(e), 0) + c
        return Poly(self.variables, t)

    def diff(self, name: str) -> "Poly":
        i = self.variables.index(name)
        t = {}
        for m, c in self.terms.items():
            if m[i]:
                e = list(m)
                e[i] -= 1
                t[tuple(e)] = c * m[i]
        return Poly(self.variables, t)

    def linear_part(self) -> dict[str, Fraction]:
        out = {}
        for m, c in self.terms.items():
            if sum(m) == 1:
                out[self.variables[m.index(1)]] = c
        return out

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def sorted_terms(self, weights=None) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0], weights), reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"


def format_monomial(variables: Sequence[str], mono: Monomial) -> str:
    parts = []
    for v, e in zip(variables, mono):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def format_poly(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (m, c) in enumerate(p.sorted_terms()):
        mono = format_monomial(p.variables, m)
        neg = c < 0
        a = -c if neg else c
        if mono:
            body = mono if a == 1 else f"{format_scalar(a)}*{mono}"
        else:
            body = format_scalar(a)
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_TERM = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?$")
_NUMBER = re.compile(r"^\d+(?:/\d+)?$")


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse strings like ``"3/2*x0^2*x1 - x2 + 1"``."""
    variables = tuple(variables)
    idx = {v: i for i, v in enumerate(variables)}
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    terms: dict[Monomial, Fraction] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse polynomial {text!r} at {pos}")
        sign, body = m.group(1), m.group(2).strip()
        if sign is None and not first:
            raise ParseError(f"missing operator in {text!r}")
        first = False
        pos = m.end()
        if not body:
            raise ParseError(f"dangling sign in {text!r}")
        coef = Fraction(-1 if sign == "-" else 1)
        exps = [0] * len(variables)
        for factor in body.split("*"):
            factor = factor.strip()
            if _NUMBER.match(factor):
                try:
                    coef *= Fraction(factor)
                except ZeroDivisionError as exc:
                    raise ParseError(f"zero denominator in {text!r}") from exc
                continue
            fm = _FACTOR.match(factor)
            if not fm or fm.group(1) not in idx:
                raise ParseError(f"bad factor {factor!r} in {text!r}")
            exps[idx[fm.group(1)]] += int(fm.group(2) or 1)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coef
    return Poly(variables, terms)


def all_monomials_upto(nvars: int, degree: int) -> list[Monomial]:
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def variable_names(n: int, prefix: str = "x") -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def polys_from_strings(items: Iterable[str], variables: Sequence[str]) -> list[Poly]:
    return [parse_poly(s, variables) for s in items]
