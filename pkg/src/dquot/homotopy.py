"""Polynomial M-homotopies between dg-algebra maps out of a free algebra.

Given maps ``f0, f1: B -> C`` with ``B`` free, build a family ``f_t`` that is
polynomial in ``t`` together with ``f_t``-derivations ``s_t`` of degree -1
such that ``d f_t / dt = d s_t + s_t d``.  Generators are handled from degree
0 downward; each step is a finite ``d``-preimage problem in ``C`` solved over
monomials of bounded total degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .dga import Element, FreeDgaPresentation, GCAlgebra
from .linalg import SparseMatrix, solve_vector, to_scalar


class NotHomotopic(ValueError):
    pass


class AcyclicityFailure(RuntimeError):
    def __init__(self, message: str, generator: str | None = None):
        super().__init__(message)
        self.generator = generator


TPoly = dict  # power of t -> Element


def parse_element(R: GCAlgebra, text: str) -> Element:
    """Parse sums of products such as ``"a^2 - 3/2*a*c"``; factor order is kept."""
    s = text.replace(" ", "")
    if not s or s == "0":
        return {}
    out: Element = {}
    for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
        coef = Fraction(-1 if sign == "-" else 1)
        term = R.one()
        for f in body.split("*"):
            name, _, exp = f.partition("^")
            if name in R.index:
                for _ in range(int(exp) if exp else 1):
                    term = R.mul(term, R.gen(name))
            else:
                if exp:
                    raise ValueError(f"cannot parse factor {f!r}")
                coef *= to_scalar(name)
        out = R.add(out, term, coef)
    return out


# -- polynomials in t with coefficients in C


def t_add(R: GCAlgebra, x: TPoly, y: TPoly, c=1) -> TPoly:
    out = dict(x)
    for k, e in y.items():
        v = R.add(out.get(k, {}), e, c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def t_mul(R: GCAlgebra, x: TPoly, y: TPoly) -> TPoly:
    out: TPoly = {}
    for i, a in x.items():
        for j, b in y.items():
            out = t_add(R, out, {i + j: R.mul(a, b)})
    return out


def t_deriv(R: GCAlgebra, x: TPoly) -> TPoly:
    return {k - 1: R.scale(e, k) for k, e in x.items() if k > 0}


def t_eval(R: GCAlgebra, x: TPoly, t) -> Element:
    t = to_scalar(t)
    out: Element = {}
    for k, e in x.items():
        out = R.add(out, e, t**k)
    return out


def t_apply_d(P: FreeDgaPresentation, x: TPoly) -> TPoly:
    return {k: v for k, v in ((k, P.d(e)) for k, e in x.items()) if v}


def t_const(e: Element) -> TPoly:
    return {0: e} if e else {}


# -- preimages of d in C


def _monomials(R: GCAlgebra, degree: int, weight: int, cap: int) -> list:
    gens = R.generators
    out = []

    def rec(i, mono, deg, wt, size):
        if i == len(gens):
            if deg == degree and wt == weight:
                out.append(tuple(mono))
            return
        g = gens[i]
        limit = 1 if g.odd else cap - size
        for e in range(0, limit + 1):
            if size + e > cap:
                break
            rec(i + 1, mono + ([(i, e)] if e else []), deg + e * g.degree.cohomological, wt + e * g.degree.projective, size + e)

    rec(0, [], 0, 0, 0)
    return out


def d_preimage(P: FreeDgaPresentation, z: Element, cap: int | None = None) -> Element | None:
    """Some ``y`` with ``d y = z`` among monomials of total degree ``<= cap``, or ``None``."""
    R = P.algebra
    if not z:
        return {}
    deg = R.degree(z)
    weights = {R.mono_weight(m) for m in z}
    if len(weights) > 1:
        raise ValueError("element is not homogeneous in projective degree")
    wt = weights.pop()
    if cap is None:
        cap = max(sum(e for _, e in m) for m in z) + 1
    cands = _monomials(R, deg - 1, wt, cap)
    images = [P.d({m: Fraction(1)}) for m in cands]
    rows = {}
    for m in list(z) + [m for im in images for m in im]:
        rows.setdefault(m, len(rows))
    A = SparseMatrix.from_columns(len(rows), [{rows[m]: c for m, c in im.items()} for im in images])
    sol = solve_vector(A, {rows[m]: c for m, c in z.items()})
    if sol is None:
        return None
    return {cands[j]: c for j, c in sol.items() if c}


# -- the construction


@dataclass
class MHomotopy:
    source: FreeDgaPresentation
    target: FreeDgaPresentation
    f: dict[int, TPoly]
    s: dict[int, TPoly]
    floor: int

    def apply_f(self, x: Element) -> TPoly:
        R = self.target.algebra
        B = self.source.algebra
        out: TPoly = {}
        for m, c in x.items():
            term = {0: R.one()}
            for g in B.factors(m):
                term = t_mul(R, term, self.f[g])
            out = t_add(R, out, term, c)
        return out

    def apply_s(self, x: Element) -> TPoly:
        """``s(x1..xm) = sum_j (-1)^{|x1..x_{j-1}|} f(x1..x_{j-1}) s(x_j) f(x_{j+1}..)``."""
        R = self.target.algebra
        B = self.source.algebra
        out: TPoly = {}
        for m, c in x.items():
            fs = B.factors(m)
            deg = 0
            for j, g in enumerate(fs):
                left = {0: R.one()}
                for h in fs[:j]:
                    left = t_mul(R, left, self.f[h])
                right = {0: R.one()}
                for h in fs[j + 1 :]:
                    right = t_mul(R, right, self.f[h])
                term = t_mul(R, t_mul(R, left, self.s.get(g, {})), right)
                out = t_add(R, out, term, c * (-1 if deg % 2 else 1))
                deg += B.generators[g].degree.cohomological
        return out

    def at(self, t) -> dict[str, Element]:
        R = self.target.algebra
        return {self.source.generators[g].name: t_eval(R, p, t) for g, p in self.f.items()}

    def homotopy_defect(self) -> dict[str, TPoly]:
        """``f'_t - (d s_t + s_t d)`` on every handled generator (empty when exact)."""
        R = self.target.algebra
        bad = {}
        for g in self.f:
            lhs = t_deriv(R, self.f[g])
            rhs = t_add(R, t_apply_d(self.target, self.s.get(g, {})), self.apply_s(self.source.d_gen(g)))
            diff = t_add(R, lhs, rhs, -1)
            if diff:
                bad[self.source.generators[g].name] = diff
        return bad

    def chain_defect(self, t) -> dict[str, Element]:
        """``d f_t(e) - f_t(d e)`` at a given ``t``."""
        R = self.target.algebra
        bad = {}
        for g in self.f:
            a = self.target.d(t_eval(R, self.f[g], t))
            b = t_eval(R, self.apply_f(self.source.d_gen(g)), t)
            diff = R.add(a, b, -1)
            if diff:
                bad[self.source.generators[g].name] = diff
        return bad


def _as_element(R: GCAlgebra, x) -> Element:
    return parse_element(R, x) if isinstance(x, str) else dict(x)


def _check_map(B: FreeDgaPresentation, C: FreeDgaPresentation, f: dict[int, Element], label: str, floor: int) -> None:
    R = C.algebra
    for g, img in f.items():
        gen = B.generators[g]
        if img and R.degree(img) != gen.degree.cohomological:
            raise ValueError(f"{label}({gen.name}) has the wrong degree")
    for g in f:
        dg = B.d_gen(g)
        # only generators inside the truncation can be checked
        if any(B.generators[h].degree.cohomological < floor for m in dg for h, _ in m):
            continue
        lhs = C.d(f[g])
        rhs: Element = {}
        for m, c in dg.items():
            term = R.one()
            for h in B.algebra.factors(m):
                term = R.mul(term, f[h])
            rhs = R.add(rhs, term, c)
        if R.add(lhs, rhs, -1):
            raise ValueError(f"{label} does not commute with d on {B.generators[g].name}")


def m_homotopy_construct(
    B: FreeDgaPresentation,
    C: FreeDgaPresentation,
    f0: Mapping,
    f1: Mapping,
    floor: int | None = None,
    cap: int | None = None,
) -> MHomotopy:
    """Build ``(f_t, s_t)`` on the generators of ``B`` of degree ``>= floor``.

    ``f0`` and ``f1`` map generator names of ``B`` to elements of ``C`` (dicts
    or strings).  Generators not mentioned are sent to zero.
    """
    R = C.algebra
    if floor is None:
        floor = min((g.degree.cohomological for g in B.generators), default=0)
    keep = [i for i, g in enumerate(B.generators) if g.degree.cohomological >= floor]
    F0 = {i: _as_element(R, f0.get(B.generators[i].name, {})) for i in keep}
    F1 = {i: _as_element(R, f1.get(B.generators[i].name, {})) for i in keep}
    _check_map(B, C, F0, "f0", floor)
    _check_map(B, C, F1, "f1", floor)

    h = MHomotopy(B, C, {}, {}, floor)
    order = sorted(keep, key=lambda i: (-B.generators[i].degree.cohomological, i))
    for g in order:
        name = B.generators[g].name
        a, b = F0[g], F1[g]
        base = t_add(R, t_const(a), {1: R.add(b, a, -1)})
        if B.generators[g].degree.cohomological == 0:
            h.f[g] = base
            y = d_preimage(C, R.add(b, a, -1), cap)
            if y is None:
                raise NotHomotopic(f"f0 and f1 differ on H^0 at {name}")
            h.s[g] = t_const(y)
            continue
        # correct the interpolation so that f_t commutes with d
        r = t_add(R, h.apply_f(B.d_gen(g)), t_apply_d(C, base), -1)
        x: TPoly = {}
        for k, rk in r.items():
            if k < 2:
                continue
            y = d_preimage(C, rk, cap)
            if y is None:
                raise AcyclicityFailure(f"no d-preimage for the t^{k} correction of {name}", name)
            x = t_add(R, x, {k: y, 1: R.scale(y, -1)})
        ft = t_add(R, base, x)
        h.f[g] = ft
        if t_add(R, t_apply_d(C, ft), h.apply_f(B.d_gen(g)), -1):
            raise AcyclicityFailure(f"interpolation of {name} cannot be made closed", name)
        target = t_add(R, t_deriv(R, ft), h.apply_s(B.d_gen(g)), -1)
        if t_apply_d(C, target):
            raise AcyclicityFailure(f"residual for {name} is not d-closed", name)
        s: TPoly = {}
        for k, z in target.items():
            y = d_preimage(C, z, cap)
            if y is None:
                raise AcyclicityFailure(f"no d-preimage for s_t({name}) at t^{k}", name)
            if y:
                s[k] = y
        h.s[g] = s
    return h
