"""Free graded-commutative dg-algebras on finitely many generators.

An element is a dict ``monomial -> Fraction``; a monomial is a sorted tuple
of ``(generator index, exponent)`` pairs.  Odd generators (odd
cohomological degree) square to zero, and reordering odd factors costs the
Koszul sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .complexes import SignError
from .graded import BiDegree
from .linalg import format_scalar, to_scalar
from .poly import Poly

Mono = tuple[tuple[int, int], ...]
Element = dict


@dataclass(frozen=True)
class Generator:
    name: str
    degree: BiDegree

    @property
    def odd(self) -> bool:
        return self.degree.parity == 1


class GCAlgebra:
    def __init__(self, generators: Sequence[Generator]):
        self.generators = tuple(generators)
        self.index = {g.name: i for i, g in enumerate(self.generators)}
        self._odd = [g.odd for g in self.generators]

    # -- basic elements
    def gen(self, i: int | str) -> Element:
        if isinstance(i, str):
            i = self.index[i]
        return {((i, 1),): Fraction(1)}

    def one(self) -> Element:
        return {(): Fraction(1)}

    def const(self, c) -> Element:
        c = to_scalar(c)
        return {(): c} if c else {}

    def mono_degree(self, m: Mono) -> int:
        return sum(self.generators[g].degree.cohomological * e for g, e in m)

    def mono_weight(self, m: Mono) -> int:
        return sum(self.generators[g].degree.projective * e for g, e in m)

    def degree(self, x: Element) -> int | None:
        ds = {self.mono_degree(m) for m in x}
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return next(iter(ds)) if ds else None

    # -- arithmetic
    def mono_mul(self, a: Mono, b: Mono) -> tuple[int, Mono] | None:
        sign = 1
        odd = self._odd
        # Koszul sign: each odd factor of b moves left past the larger odd factors of a
        for h, _ in b:
            if odd[h]:
                for g, _ in a:
                    if odd[g] and g > h:
                        sign = -sign
        out: dict[int, int] = dict(a)
        for h, e in b:
            if h in out:
                if odd[h]:
                    return None
                out[h] += e
            else:
                out[h] = e
        return sign, tuple(sorted(out.items()))

    def mul(self, x: Element, y: Element) -> Element:
        out: dict[Mono, Fraction] = {}
        for a, c in x.items():
            for b, k in y.items():
                r = self.mono_mul(a, b)
                if r is None:
                    continue
                s, m = r
                v = out.get(m, 0) + s * c * k
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def add(self, x: Element, y: Element, coef=1) -> Element:
        out = dict(x)
        for m, c in y.items():
            v = out.get(m, 0) + coef * c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return out

    def scale(self, x: Element, c) -> Element:
        c = to_scalar(c)
        return {m: v * c for m, v in x.items()} if c else {}

    def factors(self, m: Mono) -> list[int]:
        out = []
        for g, e in m:
            out.extend([g] * e)
        return out

    def product(self, gens: Sequence[int]) -> Element:
        out = self.one()
        for g in gens:
            out = self.mul(out, self.gen(g))
        return out

    def format(self, x: Element) -> str:
        if not x:
            return "0"
        parts = []
        for i, (m, c) in enumerate(sorted(x.items(), key=lambda kv: (-sum(e for _, e in kv[0]), kv[0]))):
            mono = "*".join(
                self.generators[g].name + (f"^{e}" if e > 1 else "") for g, e in m
            )
            neg = c < 0
            a = -c if neg else c
            body = mono if mono and a == 1 else (f"{format_scalar(a)}*{mono}" if mono else format_scalar(a))
            parts.append(("-" if neg else "") + body if i == 0 else (" - " if neg else " + ") + body)
        return "".join(parts)


@dataclass(eq=False)
class FreeDgaPresentation:
    algebra: GCAlgebra
    differential: dict[int, Element]

    @property
    def generators(self) -> tuple[Generator, ...]:
        return self.algebra.generators

    def d_gen(self, i: int) -> Element:
        return self.differential.get(i, {})

    def d(self, x: Element) -> Element:
        """Extend the generator differential as a derivation of degree +1."""
        R = self.algebra
        out: Element = {}
        for m, c in x.items():
            fs = R.factors(m)
            deg = 0
            for j, g in enumerate(fs):
                dg = self.d_gen(g)
                if dg:
                    term = R.mul(R.mul(R.product(fs[:j]), dg), R.product(fs[j + 1 :]))
                    sign = -1 if deg % 2 else 1
                    out = R.add(out, term, sign * c)
                deg += R.generators[g].degree.cohomological
        return out

    def validate(self) -> list[str]:
        """Degree bookkeeping and ``d^2 = 0`` on every generator."""
        R = self.algebra
        problems = []
        for i, g in enumerate(R.generators):
            if g.degree.cohomological > 0:
                problems.append(f"{g.name}: positive cohomological degree")
            dg = self.d_gen(i)
            for m in dg:
                if R.mono_degree(m) != g.degree.cohomological + 1:
                    problems.append(f"d({g.name}) has a term of degree {R.mono_degree(m)}")
                    break
                if R.mono_weight(m) != g.degree.projective:
                    problems.append(f"d({g.name}) changes projective degree")
                    break
            dd = self.d(dg)
            if dd:
                problems.append(f"d^2({g.name}) = {R.format(dd)}")
        return problems

    def check(self) -> None:
        bad = [p for p in self.validate() if p.startswith("d^2")]
        if bad:
            raise SignError("; ".join(bad))

    def degree_zero_generators(self) -> list[int]:
        return [i for i, g in enumerate(self.generators) if g.degree.cohomological == 0]

    def to_poly(self, x: Element) -> Poly:
        """Restrict to degree-0 generators (others set to zero) as a commutative polynomial."""
        zero = self.degree_zero_generators()
        pos = {g: k for k, g in enumerate(zero)}
        names = [self.generators[g].name for g in zero]
        terms = {}
        for m, c in x.items():
            if all(g in pos for g, _ in m):
                e = [0] * len(zero)
                for g, k in m:
                    e[pos[g]] = k
                terms[tuple(e)] = terms.get(tuple(e), 0) + c
        return Poly(names, terms)


def pi0_ideal(p: FreeDgaPresentation) -> list[Poly]:
    """Images under ``d`` of the degree -1 generators, as polynomials in the degree-0 ones."""
    out = []
    for i, g in enumerate(p.generators):
        if g.degree.cohomological == -1:
            poly = p.to_poly(p.d_gen(i))
            if not poly.is_zero():
                out.append(poly)
    return out
