"""Acceptance suite: each test is one criterion and records a single PASS/FAIL line."""

import json
import random
from contextlib import contextmanager
from fractions import Fraction

from dquot.bar import tor_complex
from dquot.cli import Problem, main
from dquot.dga import FreeDgaPresentation, GCAlgebra, Generator
from dquot.dgmodels import build_ract_dga, derived_quot_tangent, rg_cone_complex, rlin_cone, tangent_rg_cone
from dquot.graded import (
    BiDegree,
    FiniteAlgebra,
    algebra_as_module,
    dual_numbers,
    finite_module,
    quotient_module,
    submodule_module,
)
from dquot.homalg import (
    AInfinityModuleStructure,
    bar_hom,
    bar_square_failure,
    check_ainf_module,
    derived_intersection,
    derived_intersection_oracle,
    ext_bar_table,
    ext_free_table,
    prepare,
    stabilization_bound,
)
from dquot.homotopy import m_homotopy_construct, parse_element
from dquot.ingest import ideal_submodule, quotient_ring
from dquot.linalg import SparseMatrix, rank, solve
from dquot.poly import parse_poly
from dquot.quot import (
    ChartSpec,
    QuotProblem,
    chart_coordinates,
    chart_equations,
    generate_from_bottom,
    is_submodule,
    jacobian_tangent_check,
    point_from_chart,
    section_values,
)

from conftest import ACCEPTANCE_LINES, CORPUS, cyclic_quotient, k_over_dual, poly_algebra, random_monomial, random_small_instance

SEED = 20261016


@contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException:
        line = f"[FAIL] criterion {number:2d}: {title}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"[PASS] criterion {number:2d}: {title}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def corpus_points():
    """Every submodule point declared by a corpus document, with its source."""
    out = []
    for path in sorted(CORPUS.glob("*.json")):
        P = Problem(json.loads(path.read_text()))
        for name in P.names():
            spec = P._specs[name]
            if spec.get("kind") == "ideal":
                out.append((path.stem, name, spec, P.ideal, P.module(name)))
    return out


def random_monomial_point(rng):
    ip, A = poly_algebra(2, d_max=5)
    gens = [random_monomial(rng, 2, rng.randint(1, 2)) for _ in range(rng.randint(1, 2))]
    return ip, A, ideal_submodule(ip, gens, (1, 3))


# 1 ---------------------------------------------------------------------------


def test_bar_soundness():
    rng = random.Random(SEED)
    with criterion(1, "bar/Hom/tensor/cone complexes satisfy d^2 = 0 on 50 random instances"):
        checked = 0
        for _ in range(50):
            ip, A, V, N = random_small_instance(rng)
            assert bar_hom(A, V, N).is_d_squared_zero()
            s = prepare(A, V, N)
            for t in range(4):
                assert tor_complex(s.aug, s.V, s.N, 3, t).is_d_squared_zero()
            sv = prepare(A, V, V)
            cone = rlin_cone(A, V, V, SparseMatrix.identity(sv.V.dim), 3)
            assert cone.complex.is_d_squared_zero() and cone.linear
            ip2, A2, W = random_monomial_point(rng)
            assert rg_cone_complex(A2, W, 2).is_d_squared_zero()
            checked += 1
        assert checked >= 50


# 2 ---------------------------------------------------------------------------


def ext_pairs():
    E, K = k_over_dual()
    yield "K over K[e]", E, K, K, 6
    ip, A = poly_algebra(2, d_max=5)
    V = ideal_submodule(ip, ["x0"], (1, 4))
    yield "(x) in K[x,y]", A, submodule_module(V), quotient_module(V), 3
    ip, A = poly_algebra(3, d_max=5)
    V = ideal_submodule(ip, ["x0", "x1"], (1, 3))
    yield "(x,y) in K[x,y,z]", A, submodule_module(V), quotient_module(V), 3
    ip, A = poly_algebra(2, d_max=6)
    for f in ["x0 + x1", "x0^2 - x1^2", "x0^3 + x0*x1^2 + x1^3"]:
        V = ideal_submodule(ip, [f], (1, 4))
        yield f"({f})", A, submodule_module(V), quotient_module(V), 3


def test_ext_oracle_equivalence():
    rng = random.Random(SEED + 2)
    with criterion(2, "ext_bar equals ext_free on the corpus and 20 random monomial submodules"):
        for label, A, V, N, i_max in ext_pairs():
            bar = ext_bar_table(A, V, N, i_max)
            assert bar == ext_free_table(A, V, N, i_max), label
            if label.startswith("K over"):
                assert bar == {i: 1 for i in range(7)}
        for _ in range(20):
            ip, A, W = random_monomial_point(rng)
            V, Q = submodule_module(W), quotient_module(W)
            assert ext_bar_table(A, V, Q, 3) == ext_free_table(A, V, Q, 3)


# 3 ---------------------------------------------------------------------------


def test_derived_tangent_theorem():
    with criterion(3, "tangent cone cohomology equals Ext(V, M/V); Hilb^d(P^1) gives (d,0,0), the P^2 point (2,1,0)"):
        for doc, name, spec, ip, V in corpus_points():
            rep = tangent_rg_cone(V.ambient.algebra, V)
            assert rep.cohomology == rep.oracle, (doc, name)
        ip, A = poly_algebra(2, d_max=6)
        for d in (1, 2, 3):
            rep = tangent_rg_cone(A, ideal_submodule(ip, [f"x0^{d}"], (1, 5)))
            assert rep.cohomology == rep.oracle == {0: d, 1: 0, 2: 0}
        ip, A = poly_algebra(3, d_max=6)
        rep = tangent_rg_cone(A, ideal_submodule(ip, ["x0", "x1"], (1, 4)))
        assert rep.cohomology == rep.oracle == {0: 2, 1: 1, 2: 0}


# 4 ---------------------------------------------------------------------------


def random_invertible(rng, n):
    while True:
        m = SparseMatrix.from_dense([[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)])
        if rank(m) == n:
            return m


def conjugated(s: AInfinityModuleStructure, g: SparseMatrix, ginv: SparseMatrix) -> AInfinityModuleStructure:
    """Transport the arity-one action along ``g``: ``a -> g mu(a) g^{-1}``."""
    words = sorted({w for (n, w, v, u) in s.entries() if n == 1})
    mu1 = {}
    for w in words:
        m = SparseMatrix.from_dense([[s.get(1, w, v, u) for v in range(s.dim)] for u in range(s.dim)])
        c = g @ m @ ginv
        for v in range(s.dim):
            col = c.column(v)
            if col:
                mu1[(w, v)] = dict(col)
    return AInfinityModuleStructure(s.aug, s.dim, {1: mu1}, s.arity_bound, s.degrees)


def block_conjugator(rng, degrees):
    """Random invertible matrix preserving the projective grading, with its inverse."""
    n = len(degrees)
    dense = [[Fraction(0)] * n for _ in range(n)]
    for d in sorted(set(degrees)):
        idx = [i for i, x in enumerate(degrees) if x == d]
        block = random_invertible(rng, len(idx)).to_dense()
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                dense[i][j] = block[a][b]
    g = SparseMatrix.from_dense(dense)
    cols = [solve(g, SparseMatrix.from_dense([[Fraction(int(r == c))] for r in range(n)])) for c in range(n)]
    inv = SparseMatrix.from_dense([[cols[c].to_dense()[r][0] for c in range(n)] for r in range(n)])
    assert (g @ inv) == SparseMatrix.identity(n)
    return g, inv


def randomly_perturbed(rng, s: AInfinityModuleStructure) -> AInfinityModuleStructure:
    slots = [e for e in s.entries() if e[0] == 1]
    out = s
    for _ in range(rng.randint(1, 3)):
        n, w, v, u = rng.choice(slots)
        delta = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        if delta:
            out = out.perturbed(n, w, v, u, delta)
    return out


def pi0_vs_residual(rng, A, M, label):
    r = build_ract_dga(A, M, 2)
    ideal = r.pi0()
    s = prepare(A, M, M)
    base = AInfinityModuleStructure.from_module(s.aug, s.V)
    stats = {True: 0, False: 0}
    for k in range(120):
        g, ginv = block_conjugator(rng, s.V.degrees or (0,) * s.V.dim)
        mu = conjugated(base, g, ginv)
        if k % 2:
            mu = randomly_perturbed(rng, mu)
        point = r.point(mu)
        vanish = all(p.evaluate(point) == 0 for p in ideal)
        residual_ok = not check_ainf_module(mu, 2).residuals.get(2)
        assert vanish == residual_ok, label
        stats[vanish] += 1
    return stats


def chart_three_way(rng, qp, chart, sample_point):
    system = chart_equations(qp, chart)
    stats = {True: 0, False: 0}
    n = 0
    while n < 120:
        if n % 2:
            vals = {v: Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for v in system.variables}
        else:
            vals = chart_coordinates(qp, chart, sample_point(rng))
            if vals is None:
                continue
        P = point_from_chart(qp, chart, vals)
        eq = system.vanishes(vals)
        sub = is_submodule(P)[0]
        sec = all(m.is_zero() for m in section_values(P).values())
        assert eq == sub == sec
        stats[eq] += 1
        n += 1
    return stats


def test_pi0_theorem():
    rng = random.Random(SEED + 4)
    with criterion(4, "pi0 vanishing, associativity residual and chart/submodule tests agree on random points"):
        ip, A = poly_algebra(2, d_max=3)
        stats = pi0_vs_residual(rng, A, algebra_as_module(A, 0, 2), "K[x,y] on A[0,2]")
        assert stats[True] >= 50 and stats[False] >= 20
        E = dual_numbers()
        stats = pi0_vs_residual(rng, E, finite_module(E, [[[0, 1], [0, 0]]]), "K[e] on K^2")
        assert stats[True] >= 50 and stats[False] >= 20

        ip, A = poly_algebra(2, d_max=4)
        M = algebra_as_module(A, 1, 2)
        qp = QuotProblem(A, M, {1: 1, 2: 2})
        chart = ChartSpec.pivots(qp, {1: [0], 2: [0, 1]})
        line = lambda r: generate_from_bottom(M, [{0: 1, 1: Fraction(r.randint(-4, 4), r.randint(1, 3))}])
        stats = chart_three_way(rng, qp, chart, line)
        assert stats[True] >= 50 and stats[False] >= 20

        ip3, A3 = poly_algebra(3, d_max=3)
        M3 = algebra_as_module(A3, 1, 2)
        qp3 = QuotProblem(A3, M3, {1: 2, 2: 5})
        V0 = ideal_submodule(ip3, ["x0", "x1"], (1, 2))
        chart3 = ChartSpec.centered(V0)

        def plane_point(r):
            a, b = (Fraction(r.randint(-3, 3), r.randint(1, 2)) for _ in range(2))
            return generate_from_bottom(M3, [{0: 1, 2: a}, {1: 1, 2: b}])

        stats = chart_three_way(rng, qp3, chart3, plane_point)
        assert stats[True] >= 50 and stats[False] >= 20


# 5 ---------------------------------------------------------------------------


def test_stabilization():
    with criterion(5, "stabilization bound for (x,y) in K[x,y,z] with i_max = 2"):
        ip, A = poly_algebra(3, d_max=6)
        V = ideal_submodule(ip, ["x0", "x1"], (1, 5))
        res = stabilization_bound(A, submodule_module(V), quotient_module(V), 2)
        assert res.q0 is not None
        upper = {k: v for k, v in res.upper_vanishing.items() if k[1] >= res.q0}
        free = {k: v for k, v in res.free_vanishing.items() if k[1] >= res.q0 and k[0] > 0}
        assert upper and free
        assert not any(upper.values())
        assert not any(free.values())
        assert [res.table[(i, res.q0)] for i in range(3)] == [2, 1, 0]


# 6 ---------------------------------------------------------------------------


def test_window_widening():
    with criterion(6, "derived tangent dimensions unchanged under [p,q] -> [p,q+1] -> [p,q+2]"):
        for doc, name, spec, ip, V in corpus_points():
            p, q_doc = spec["window"]
            top_gen = max(parse_poly(g, ip.variables).total_degree(ip.weights) for g in spec["generators"])
            q = max(p + 2, top_gen + 1)
            ipw = ip.with_d_max(q + 3)
            dims = []
            for qq in (q, q + 1, q + 2):
                W = ideal_submodule(ipw, spec["generators"], (p, qq))
                rep = derived_quot_tangent(QuotProblem.of_point(W), W, check_window=False)
                dims.append(rep.cohomology)
            assert dims[0] == dims[1] == dims[2], (doc, dims)


# 7 ---------------------------------------------------------------------------


def koszul_hypersurface_tor(ip, f, gens_z, i, max_degree):
    """``0 -> A(-e) --f--> A -> O_Y`` tensored with ``O_Z``: Tor_1 is ker(f), Tor_0 is coker(f)."""
    Z = cyclic_quotient(ip, gens_z, (0, max_degree))
    poly = parse_poly(f, ip.variables)
    e = poly.total_degree(ip.weights)
    ((deg, vec),) = quotient_ring(ip).normal_form(poly).items()
    assert deg == e
    out = {}
    for t in range(max_degree + 1):
        src = Z.dim(t - e) if t - e >= Z.p else 0
        r = rank(Z.act_vector(e, vec, t - e)) if src and Z.dim(t) else 0
        out[t] = src - r if i == 1 else Z.dim(t) - r
    return out


def test_tor_intersections():
    with criterion(7, "Tor of transverse, self and trivial intersections matches the Koszul oracle"):
        ip, _ = poly_algebra(2, d_max=3)
        cases = {"transverse": (["x0"], ["x1"]), "self": (["x0"], ["x0"]), "trivial": (["x0"], [])}
        for label, (y, z) in cases.items():
            for i in (0, 1):
                bar = derived_intersection(ip, y, z, i)
                assert bar == derived_intersection_oracle(ip, y, z, i), (label, i)
                assert bar == koszul_hypersurface_tor(ip, y[0], z, i, ip.d_max), (label, i)
            assert all(v == 0 for v in derived_intersection(ip, y, z, 2).values())


# 8 ---------------------------------------------------------------------------


def test_classical_tangents():
    with criterion(8, "Jacobian kernel equals the classical tangent at every corpus point"):
        points = corpus_points()
        assert len(points) >= 4
        for doc, name, spec, ip, V in points:
            rep = jacobian_tangent_check(QuotProblem.of_point(V), ChartSpec.centered(V), V)
            assert rep.passed, (doc, rep)


# 9 ---------------------------------------------------------------------------


def dga(gens, diff):
    R = GCAlgebra([Generator(n, BiDegree(0, d)) for n, d in gens])
    P = FreeDgaPresentation(R, {R.index[n]: parse_element(R, s) for n, s in diff.items()})
    P.check()
    return P


def check_homotopy(C, f0, f1):
    h = m_homotopy_construct(C, C, f0, f1)
    assert h.homotopy_defect() == {}
    R = C.algebra
    as_elem = lambda f: {k: v if isinstance(v, dict) else parse_element(R, v) for k, v in f.items()}
    assert h.at(0) == as_elem(f0)
    assert h.at(1) == as_elem(f1)


def test_m_homotopy():
    rng = random.Random(SEED + 9)
    with criterion(9, "M-homotopy satisfies f'_t = [d, s_t] exactly with exact endpoints"):
        C = dga([("a", 0), ("c", -1)], {"c": "a^2"})
        check_homotopy(C, {"a": "a", "c": "c"}, {"a": "a + a^2", "c": "c + 2*a*c + a^2*c"})
        k = Fraction(rng.randint(1, 9), rng.randint(1, 4)) * rng.choice([1, -1])
        check_homotopy(C, {"a": "a", "c": "c"}, {"a": f"a + {k}*a^2", "c": f"c + {2 * k}*a*c + {k * k}*a^2*c"})


# 10 --------------------------------------------------------------------------


def rigid_instances():
    E, K = k_over_dual()
    yield "K over K[e]", E, K, 2
    x3 = FiniteAlgebra(("x", "x2"), {(0, 0): {1: Fraction(1)}}, commutative=True)
    yield "K over K[x]/x^3", x3, finite_module(x3, [[[0]], [[0]]]), 2
    ip, A = poly_algebra(1, d_max=4)
    yield "K[x] on A[0,3]", A, algebra_as_module(A, 0, 3), 2
    ip, A = poly_algebra(2, d_max=3)
    yield "K[x,y] on A[0,2]", A, algebra_as_module(A, 0, 2), 1


def flexible_instances():
    E = dual_numbers()
    yield "K^2 over K[e]", E, finite_module(E, [[[0, 1], [0, 0]]]), 2
    ip, A = poly_algebra(2, d_max=3)
    yield "K[x,y] on A[0,2], arity 2", A, algebra_as_module(A, 0, 2), 2


def perturbation_sweep(A, M, bound, deltas):
    s = prepare(A, M, M)
    mu = AInfinityModuleStructure.from_module(s.aug, s.V, bound)
    assert check_ainf_module(mu).passed and bar_square_failure(mu) is None
    for n, w, v, u in mu.entries():
        for delta in deltas:
            p = mu.perturbed(n, w, v, u, delta)
            rep = check_ainf_module(p, 2 * bound)
            assert (bar_square_failure(p, 2 * bound) is None) == rep.passed
            yield n, rep


def test_ainf_bidirectionality():
    rng = random.Random(SEED + 10)
    with criterion(10, "valid A-infinity structures pass, perturbations fail at arity >= n, bar D^2 agrees"):
        for label, A, M, bound in rigid_instances():
            deltas = (1, Fraction(rng.randint(2, 7), rng.randint(1, 5)))
            for n, rep in perturbation_sweep(A, M, bound, deltas):
                assert not rep.passed, label
                assert rep.first_failure >= n, label
        for label, A, M, bound in flexible_instances():
            for n, rep in perturbation_sweep(A, M, bound, (1,)):
                assert rep.passed or rep.first_failure >= n, label


# 11 --------------------------------------------------------------------------


def test_cli_determinism(tmp_path):
    with criterion(11, "CLI reports are byte-identical across 3 runs x 2 thread settings"):
        docs = sorted(CORPUS.glob("*.json"))
        assert docs
        for doc in docs:
            seen = set()
            for threads in (1, 4):
                for run in range(3):
                    out = tmp_path / f"{doc.stem}-{threads}-{run}.json"
                    assert main(["--input", str(doc), "--threads", str(threads), "--output", str(out)]) == 0
                    seen.add(out.read_bytes())
            assert len(seen) == 1, doc.stem
