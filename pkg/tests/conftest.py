from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from dquot.graded import algebra_as_module, finite_module, dual_numbers, quotient_module, submodule_module, twist
from dquot.ingest import IdealPresentation, ModulePresentation, coordinate_algebra, ideal_submodule, module_from_presentation
from dquot.linalg import SparseMatrix

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"

sys.path.insert(0, str(Path(__file__).resolve().parent))


def poly_algebra(nvars: int, ideal=(), d_max: int = 6):
    ip = IdealPresentation.make(nvars, list(ideal), d_max)
    return ip, coordinate_algebra(ip)


def residue_field(ip, window=(0, 3)):
    names = ip.variables
    return module_from_presentation(ModulePresentation.make(ip, [0], [[v] for v in names], window))


def cyclic_quotient(ip, relations, window):
    return module_from_presentation(ModulePresentation.make(ip, [0], [[r] for r in relations], window))


def k_over_dual():
    E = dual_numbers()
    return E, finite_module(E, [[[0]]])


def total_dim(A, width):
    return sum(A.dim(i) for i in range(width + 1))


def random_monomial(rng: random.Random, nvars: int, degree: int) -> str:
    exps = [0] * nvars
    for _ in range(degree):
        exps[rng.randrange(nvars)] += 1
    parts = [f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exps) if e]
    return "*".join(parts)


def random_small_instance(rng: random.Random):
    """A graded algebra of total dimension <= 6 up to the window width, and two modules on it."""
    while True:
        nvars = rng.choice([1, 2])
        width = rng.randint(1, 5 if nvars == 1 else 3)
        gens = [random_monomial(rng, nvars, rng.randint(1, width)) for _ in range(rng.randint(0, 2))] if nvars == 2 else []
        if nvars == 1 and rng.random() < 0.4:
            gens = [f"x0^{rng.randint(2, width + 1)}"]
        ip = IdealPresentation.make(nvars, gens, width)
        A = coordinate_algebra(ip)
        if total_dim(A, width) <= 6:
            break

    def module():
        p = rng.randint(0, 1)
        q = p + rng.randint(0, width - p)
        kind = rng.choice(["free", "residue", "ideal", "quotient", "cyclic"])
        if kind == "free":
            return algebra_as_module(A, p, q)
        if kind == "residue":
            return twist(residue_field(ip, (0, q - p)), -p) if p else residue_field(ip, (0, q))
        if kind == "cyclic":
            return cyclic_quotient(ip, [random_monomial(rng, nvars, rng.randint(1, max(1, q)))], (0, q))
        if q < 1:
            return algebra_as_module(A, p, q)
        V = ideal_submodule(ip, [random_monomial(rng, nvars, rng.randint(1, min(q, 2)))], (p, q))
        return submodule_module(V) if kind == "ideal" else quotient_module(V)

    return ip, A, module(), module()


@pytest.fixture
def rng():
    return random.Random(20261016)


def frac_matrix(rows):
    return SparseMatrix.from_dense([[Fraction(x) for x in r] for r in rows])


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
