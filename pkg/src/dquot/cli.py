"""Command-line front end: JSON problem documents in, JSON reports out.

Exit codes: 0 success, 2 a mathematical check failed (oracle mismatch,
failed verification, cap reached), 1 malformed or invalid input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any

from .dga import FreeDgaPresentation, GCAlgebra, Generator
from .dgmodels import WindowUnstable, build_ract_dga, derived_quot_tangent
from .graded import (
    BiDegree,
    FiniteAlgebra,
    GradedModuleWindow,
    NotASubmodule,
    SubmodulePoint,
    algebra_as_module,
    finite_module,
    hilbert_function,
    quotient_module,
    submodule_module,
)
from .homalg import (
    CapReached,
    derived_intersection,
    derived_intersection_oracle,
    ext_bar_table,
    ext_free_table,
    stabilization_bound,
    tor_bar,
    tor_free,
)
from .ingest import IdealPresentation, ModulePresentation, coordinate_algebra, ideal_submodule, module_from_presentation
from .homotopy import AcyclicityFailure, NotHomotopic, m_homotopy_construct, parse_element
from .poly import ParseError, format_poly
from .quot import ChartSpec, QuotProblem, chart_coordinates, chart_equations, jacobian_tangent_check

SCHEMA = "dquot-document/1"
REPORT_SCHEMA = "dquot-report/1"
TASKS = ("hilbert", "ext", "tor", "quot-eqs", "tangent", "ract", "stabilize", "mhomotopy", "intersect")


class ValidationError(ValueError):
    pass


class CheckFailed(RuntimeError):
    pass


def rational(x) -> str:
    return str(Fraction(x))


def _table(d: dict) -> list:
    return [[k, v] for k, v in sorted(d.items())]


# ---------------------------------------------------------------------------
# loading


class Problem:
    def __init__(self, doc: dict):
        if not isinstance(doc, dict):
            raise ValidationError("document must be a JSON object")
        if doc.get("schema") != SCHEMA:
            raise ValidationError(f"schema must be {SCHEMA!r}")
        self.doc = doc
        self.ideal = None
        self.algebra = self._algebra(doc.get("algebra"))
        self._mods: dict[str, Any] = {}
        self._specs = doc.get("modules", {}) or {}
        if not isinstance(self._specs, dict):
            raise ValidationError("modules must be an object")

    def _algebra(self, spec):
        if spec is None:
            return None
        kind = spec.get("kind")
        if kind == "polynomial":
            self.ideal = IdealPresentation.make(
                list(spec["variables"]), list(spec.get("ideal", [])), int(spec.get("max_degree", 4)), list(spec.get("degrees", []))
            )
            return coordinate_algebra(self.ideal)
        if kind == "finite":
            names = tuple(spec["basis"])
            idx = {n: i for i, n in enumerate(names)}
            prods = {}
            for key, val in spec.get("products", {}).items():
                a, _, b = key.partition("*")
                if a not in idx or b not in idx:
                    raise ValidationError(f"unknown basis element in product {key!r}")
                prods[(idx[a], idx[b])] = {idx[n]: Fraction(c) for n, c in val.items()}
            return FiniteAlgebra(names, prods, bool(spec.get("unital", True)), bool(spec.get("commutative", False)))
        raise ValidationError(f"unknown algebra kind {kind!r}")

    def module(self, name: str):
        if name in self._mods:
            return self._mods[name]
        if name not in self._specs:
            raise ValidationError(f"unknown module {name!r}")
        self._mods[name] = None  # cycle guard
        m = self._build(self._specs[name])
        self._mods[name] = m
        return m

    def _build(self, spec: dict):
        kind = spec.get("kind")
        A = self.algebra
        if isinstance(A, FiniteAlgebra):
            if kind == "finite":
                act = spec["action"]
                return finite_module(A, [[[Fraction(x) for x in row] for row in act[n]] for n in A.names], int(spec.get("dim", 0)) or None)
            if kind == "residue":
                return finite_module(A, [[[0]] for _ in A.names])
            raise ValidationError(f"module kind {kind!r} needs a graded algebra")
        if A is None:
            raise ValidationError("modules need an algebra")
        window = tuple(spec.get("window", (0, 3)))
        if kind == "free":
            return algebra_as_module(A, *window)
        if kind == "ideal":
            return ideal_submodule(self.ideal, list(spec["generators"]), window)
        if kind == "presentation":
            mp = ModulePresentation.make(self.ideal, list(spec["generator_degrees"]), list(spec.get("relations", [])), window)
            return module_from_presentation(mp)
        if kind == "residue":
            mp = ModulePresentation.make(self.ideal, [0], [[v] for v in self.ideal.variables], window)
            return module_from_presentation(mp)
        if kind in ("quotient", "submodule"):
            base = self.module(spec["of"])
            if not isinstance(base, SubmodulePoint):
                raise ValidationError(f"{spec['of']!r} is not a submodule point")
            return quotient_module(base) if kind == "quotient" else submodule_module(base)
        raise ValidationError(f"unknown module kind {kind!r}")

    def names(self) -> list[str]:
        return sorted(self._specs)


def _plain(m):
    return submodule_module(m) if isinstance(m, SubmodulePoint) else m


# ---------------------------------------------------------------------------
# tasks


def task_hilbert(P: Problem, t: dict, opts) -> dict:
    out = {}
    for name in t.get("modules", P.names()):
        m = P.module(name)
        if isinstance(m, SubmodulePoint):
            out[name] = _table(m.dims)
        elif isinstance(m, GradedModuleWindow):
            out[name] = _table(hilbert_function(m))
        else:
            out[name] = [[0, m.dim]]
    return {"hilbert": out}


def task_ext(P: Problem, t: dict, opts) -> dict:
    i_max = opts.max_degree if opts.max_degree is not None else int(t.get("i_max", 3))
    V, N = _plain(P.module(t["source"])), _plain(P.module(t["target"]))
    with ThreadPoolExecutor(max_workers=opts.threads) as ex:
        fb = ex.submit(ext_bar_table, P.algebra, V, N, i_max)
        ff = ex.submit(ext_free_table, P.algebra, V, N, i_max)
        bar, free = fb.result(), ff.result()
    return {"ext": _table(bar), "oracle": _table(free), "match": bar == free}


def task_tor(P: Problem, t: dict, opts) -> dict:
    i_max = opts.max_degree if opts.max_degree is not None else int(t.get("i_max", 2))
    L, R = _plain(P.module(t["left"])), _plain(P.module(t["right"]))
    degrees = t.get("degrees", [None])
    jobs = [(i, d) for i in range(i_max + 1) for d in degrees]
    with ThreadPoolExecutor(max_workers=opts.threads) as ex:
        bar = list(ex.map(lambda j: tor_bar(P.algebra, L, R, j[0], degree=j[1], n_max=opts.arity), jobs))
        free = list(ex.map(lambda j: tor_free(P.algebra, L, R, j[0], degree=j[1]), jobs))
    rows = [[i, d, b, f] for (i, d), b, f in zip(jobs, bar, free)]
    return {"tor": rows, "columns": ["i", "degree", "bar", "oracle"], "match": bar == free}


def _chart(qp: QuotProblem, spec, point):
    if spec in (None, "centered"):
        if point is None:
            raise ValidationError("a centered chart needs a point")
        return ChartSpec.centered(point)
    return ChartSpec.pivots(qp, {int(k): v for k, v in spec.items()})


def task_quot_eqs(P: Problem, t: dict, opts) -> dict:
    point = P.module(t["point"]) if "point" in t else None
    if point is not None:
        qp = QuotProblem.of_point(point)
    else:
        M = P.module(t["ambient"])
        qp = QuotProblem(P.algebra, M, {int(k): v for k, v in t["h"].items()})
    chart = _chart(qp, t.get("chart"), point)
    system = chart_equations(qp, chart)
    out = {
        "variables": system.variables,
        "equations": [format_poly(e) for e in system.equations],
        "max_equation_degree": system.max_degree(),
    }
    ok = True
    if point is not None:
        coords = chart_coordinates(qp, chart, point)
        if coords is not None:
            out["vanishes_at_point"] = system.vanishes(coords)
            ok = out["vanishes_at_point"]
            if not any(coords.values()):
                rep = jacobian_tangent_check(qp, chart, point)
                out["jacobian"] = {"kernel": rep.kernel_dim, "classical": rep.classical_dim, "match": rep.passed}
                ok = ok and rep.passed
    out["match"] = ok
    return out


def task_tangent(P: Problem, t: dict, opts) -> dict:
    h_max = opts.max_degree if opts.max_degree is not None else int(t.get("h_max", 2))
    point = P.module(t["point"])
    qp = QuotProblem.of_point(point)
    stable = True
    try:
        rep = derived_quot_tangent(qp, point, h_max, check_window=bool(t.get("check_window", True)))
    except WindowUnstable:
        stable = False
        rep = derived_quot_tangent(qp, point, h_max, check_window=False)
    return {
        "cohomology": _table(rep.cohomology),
        "oracle": _table(rep.oracle),
        "hom_classical": rep.hom_classical,
        "window_stable": stable,
        "match": rep.passed and stable,
    }


def task_ract(P: Problem, t: dict, opts) -> dict:
    arity = opts.arity if opts.arity is not None else t.get("arity")
    r = build_ract_dga(P.algebra, _plain(P.module(t["module"])), arity)
    pres = r.presentation
    R = pres.algebra
    gens = [[g.name, g.degree.projective, g.degree.cohomological] for g in pres.generators]
    diff = [[pres.generators[i].name, R.format(x)] for i, x in sorted(pres.differential.items())]
    return {
        "generators": gens,
        "differential": diff,
        "pi0": [format_poly(p) for p in r.pi0()],
        "d_squared_zero": not [p for p in pres.validate() if p.startswith("d^2")],
        "match": True,
    }


def task_stabilize(P: Problem, t: dict, opts) -> dict:
    i_max = opts.max_degree if opts.max_degree is not None else int(t.get("i_max", 2))
    M, N = _plain(P.module(t["source"])), _plain(P.module(t["target"]))
    res = stabilization_bound(P.algebra, M, N, i_max, t.get("q_start"), t.get("cap"))
    upper = {k: v for k, v in res.upper_vanishing.items() if k[1] >= res.q0}
    free = {k: v for k, v in res.free_vanishing.items() if k[1] >= res.q0 and k[0] > 0}
    return {
        "q0": res.q0,
        "table": [[i, q, d] for (i, q), d in sorted(res.table.items())],
        "upper": [[i, q, d] for (i, q), d in sorted(upper.items())],
        "free": [[i, q, d] for (i, q), d in sorted(free.items())],
        "match": not any(upper.values()) and not any(free.values()),
    }


def _dga(spec: dict) -> FreeDgaPresentation:
    gens = [Generator(n, BiDegree(int(spec.get("weights", {}).get(n, 0)), int(d))) for n, d in spec["generators"]]
    R = GCAlgebra(gens)
    diff = {R.index[n]: parse_element(R, s) for n, s in spec.get("differential", {}).items()}
    pres = FreeDgaPresentation(R, {k: v for k, v in diff.items() if v})
    pres.check()
    return pres


def task_mhomotopy(P: Problem, t: dict, opts) -> dict:
    B, C = _dga(t["source"]), _dga(t["target"])
    h = m_homotopy_construct(B, C, t["f0"], t["f1"], t.get("floor"), t.get("cap"))
    R = C.algebra
    ft = {B.generators[g].name: [[k, R.format(e)] for k, e in sorted(p.items())] for g, p in h.f.items()}
    st = {B.generators[g].name: [[k, R.format(e)] for k, e in sorted(p.items())] for g, p in h.s.items()}
    defect = h.homotopy_defect()
    ends = h.at(0) == {B.generators[g].name: parse_element(R, t["f0"].get(B.generators[g].name, "0")) for g in h.f}
    ends = ends and h.at(1) == {B.generators[g].name: parse_element(R, t["f1"].get(B.generators[g].name, "0")) for g in h.f}
    return {"f_t": ft, "s_t": st, "identity_holds": not defect, "endpoints": ends, "match": not defect and ends}


def task_intersect(P: Problem, t: dict, opts) -> dict:
    i_max = opts.max_degree if opts.max_degree is not None else int(t.get("i_max", 2))
    top = t.get("max_degree")
    ip = P.ideal
    with ThreadPoolExecutor(max_workers=opts.threads) as ex:
        bar = list(ex.map(lambda i: derived_intersection(ip, t["y"], t["z"], i, top), range(i_max + 1)))
        ora = list(ex.map(lambda i: derived_intersection_oracle(ip, t["y"], t["z"], i, top), range(i_max + 1)))
    rows = [[i, d, b[d], o[d]] for i, (b, o) in enumerate(zip(bar, ora)) for d in sorted(b)]
    return {"tor": rows, "columns": ["i", "degree", "bar", "oracle"], "match": bar == ora}


HANDLERS = {
    "hilbert": task_hilbert,
    "ext": task_ext,
    "tor": task_tor,
    "quot-eqs": task_quot_eqs,
    "tangent": task_tangent,
    "ract": task_ract,
    "stabilize": task_stabilize,
    "mhomotopy": task_mhomotopy,
    "intersect": task_intersect,
}


# ---------------------------------------------------------------------------
# driver


def run(raw: bytes, opts) -> tuple[dict, int]:
    digest = hashlib.sha256(raw).hexdigest()
    report: dict[str, Any] = {"schema": REPORT_SCHEMA, "input": {"sha256": digest}}
    try:
        doc = json.loads(raw.decode("utf-8"))
        problem = Problem(doc)
        report["input"]["document"] = doc
        task = dict(doc.get("task", {}))
        name = opts.task or task.get("name")
        if name not in HANDLERS:
            raise ValidationError(f"unknown task {name!r}")
        report["task"] = name
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        report["error"] = {"kind": "ParseError", "message": str(e)}
        return report, 1
    except (ParseError, ValidationError, KeyError, TypeError, ValueError) as e:
        report["error"] = {"kind": type(e).__name__, "message": str(e)}
        return report, 1
    try:
        result = HANDLERS[name](problem, task, opts)
    except ParseError as e:
        report["error"] = {"kind": "ParseError", "message": str(e)}
        return report, 1
    except (ValidationError, KeyError) as e:
        report["error"] = {"kind": "ValidationError", "message": str(e)}
        return report, 1
    except (CapReached, NotASubmodule, NotHomotopic, AcyclicityFailure) as e:
        report["error"] = {"kind": type(e).__name__, "message": str(e)}
        report["status"] = "failed"
        return report, 2
    report["result"] = result
    ok = bool(result.get("match", True))
    report["status"] = "ok" if ok else "mismatch"
    return report, 0 if ok else 2


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, default=rational) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dquot", description="Exact Ext/Tor, Quot equations and derived tangent computations.")
    p.add_argument("--input", required=True, help="problem document (JSON)")
    p.add_argument("--task", choices=TASKS, help="override the document's task")
    p.add_argument("--max-degree", type=int, dest="max_degree", help="top homological degree to report")
    p.add_argument("--arity", type=int, help="arity cap for bar constructions")
    p.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")
    p.add_argument("--output", help="report path (default: stdout)")
    return p


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    opts.threads = max(1, opts.threads)
    try:
        with open(opts.input, "rb") as fh:
            raw = fh.read()
    except OSError as e:
        print(f"dquot: cannot read {opts.input}: {e}", file=sys.stderr)
        return 1
    report, code = run(raw, opts)
    text = render(report)
    if opts.output:
        with open(opts.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
