#!/usr/bin/env python3
"""
In-process self-test: the library's invariants at reduced scale.

Each property is a named check returning a short detail string or raising
AssertionError. The report lists properties in a fixed order and carries no
timings, so two runs with the same seed produce identical text.

Usage:
    python selftest.py [--seed N]
    python nilconj.py selftest --seed 3
"""

import argparse
import random
import sys
from dataclasses import dataclass, field
from typing import Callable

from conjugacy import (
    build_conjugacy_system,
    change_of_variables,
    conjugator_length,
    decide_conjugacy,
    is_conjugator,
)
from gm_lab import (
    brute_force_cl,
    expected_conjugator,
    make_gm,
    predicted_cl,
    random_central_perturbation,
    random_conjugate_pair,
    random_word,
    witness_pair,
)
from intlinalg import (
    DEFAULT_SEARCH_BUDGET,
    IntegerMatrix,
    determinant,
    hermite_normal_form,
    minor_bound_check,
    rank_of,
    solve_integer_system,
)
from presentation import (
    CentralExtensionPresentation,
    NilconjError,
    commutator_bound,
    heisenberg,
    parse_presentation_text,
    render_presentation_text,
    validate_presentation,
)
from utils import get_default_seed, print_status, progress
from words import Word, collect, nf_conjugate, nf_multiply, parse_word

FAULTS = ("antisymmetry",)

TORSION_EXAMPLE = {
    "k": 3,
    "m": 1,
    "l": 1,
    "orders": [5],
    "gamma": [[1, 2, 1, 1], [1, 3, 2, 2], [2, 3, 2, 3]],
}


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str


@dataclass
class SelftestReport:
    seed: int
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def render(self) -> str:
        lines = [f"selftest seed={self.seed}"]
        for r in self.results:
            lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        verdict = "all properties hold" if self.passed else f"{len(self.failures)} failed: {', '.join(self.failures)}"
        lines.append(verdict)
        return "\n".join(lines) + "\n"


# =============================================================================
# Properties
# =============================================================================

def _builtins() -> list[tuple[str, CentralExtensionPresentation]]:
    return [
        ("heisenberg", heisenberg()),
        ("gm:1", make_gm(1)),
        ("gm:2", make_gm(2)),
        ("gm:3", make_gm(3)),
        ("torsion", validate_presentation(TORSION_EXAMPLE)),
    ]


def _corrupt(P: CentralExtensionPresentation) -> CentralExtensionPresentation:
    """Copy of P whose gamma[2][1] no longer mirrors gamma[1][2]."""
    gamma = [[list(cell) for cell in row] for row in P.gamma]
    gamma[1][0][0] = gamma[0][1][0] + 1
    return CentralExtensionPresentation(
        k=P.k,
        m=P.m,
        l=P.l,
        orders=P.orders,
        gamma=tuple(tuple(tuple(cell) for cell in row) for row in gamma),
        names=P.names,
    )


def antisymmetry_violations(P: CentralExtensionPresentation) -> list[str]:
    """Triples (i, j, s) where gamma_ij + gamma_ji is nonzero (mod o for torsion)."""
    bad = []
    for i in range(P.k):
        if any(P.gamma[i][i]):
            bad.append(f"diagonal {i + 1}")
        for j in range(i + 1, P.k):
            for s in range(P.r):
                total = P.gamma[i][j][s] + P.gamma[j][i][s]
                order = P.order_of_central(s)
                if (total % order if order else total) != 0:
                    bad.append(f"({i + 1},{j + 1},{s + 1})")
    return bad


def check_antisymmetry(rng: random.Random, ctx: dict) -> str:
    presentations = _builtins()
    if ctx.get("inject") == "antisymmetry":
        name, P = presentations[0]
        presentations[0] = (name, _corrupt(P))
    for name, P in presentations:
        bad = antisymmetry_violations(P)
        assert not bad, f"{name} violates antisymmetry at {', '.join(bad)}"
    return f"{len(presentations)} presentations"


def check_presentation_roundtrip(rng: random.Random, ctx: dict) -> str:
    for name, P in _builtins():
        assert parse_presentation_text(render_presentation_text(P)) == P, f"{name} does not round-trip"
        assert validate_presentation(P) == P, f"{name} changes under revalidation"
    return "text format and revalidation"


def check_homomorphism(rng: random.Random, ctx: dict) -> str:
    count = 0
    for name, P in _builtins():
        for _ in range(40):
            u, v = random_word(P, rng, 8), random_word(P, rng, 8)
            assert collect(P, u + v) == nf_multiply(P, collect(P, u), collect(P, v)), f"{name}: collect(uv) != uv"
            count += 1
    return f"{count} products"


def check_exponent_bound(rng: random.Random, ctx: dict) -> str:
    P = make_gm(3)
    L = commutator_bound(P)
    for _ in range(200):
        w = random_word(P, rng, 30, central=False)
        n = len(w)
        g = collect(P, w)
        assert all(abs(z) <= L * n * n for z in g.z), f"|z| exceeds Ln^2 for n={n}"
    return "200 words over gm:3"


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int) -> IntegerMatrix:
    return IntegerMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols=cols)


def check_hnf(rng: random.Random, ctx: dict) -> str:
    for _ in range(100):
        M = random_matrix(rng, rng.randint(1, 4), rng.randint(1, 5), 9)
        H, U = hermite_normal_form(M)
        assert M @ U == H, "M U != H"
        assert abs(determinant(U.entries)) == 1, "U is not unimodular"
    return "100 matrices"


def random_bounded_system(rng: random.Random, with_slack: bool) -> tuple[IntegerMatrix, tuple[int, ...]]:
    """Solvable full-row-rank system with r <= 3, d <= 5, |entries| <= 5."""
    while True:
        r = rng.randint(1, 3)
        d = rng.randint(r, 5)
        rows = [[rng.randint(-5, 5) for _ in range(d)] for _ in range(r)]
        if with_slack and d > r:
            order = rng.randint(2, 5)
            for i in range(r):
                rows[i][-1] = order if i == r - 1 else 0
        if rank_of(rows, d) < r:
            continue
        x = [rng.randint(-4, 4) for _ in range(d)]
        M = IntegerMatrix.from_rows(rows)
        return M, M.apply(x)


def check_minor_bound(rng: random.Random, ctx: dict) -> str:
    for i in range(60):
        M, b = random_bounded_system(rng, with_slack=i % 3 == 0)
        assert minor_bound_check(M, b, budget=ctx["budget"]), f"no solution within the minor bound for {M.entries} = {b}"
    return "60 systems"


def check_change_of_variables(rng: random.Random, ctx: dict) -> str:
    P = validate_presentation(TORSION_EXAMPLE)
    for _ in range(40):
        u, v, w = random_conjugate_pair(P, rng.randrange(10**9), 6)
        S = build_conjugacy_system(P, collect(P, u), collect(P, v))
        S2, pmat = change_of_variables(S)
        sol = solve_integer_system(S2.M, S2.b)
        assert sol is not None, "transformed system lost its solution"
        assert S.M.apply(pmat.apply(sol.particular)) == S.b, "x = P x' does not solve the original system"
    return "40 torsion systems"


def check_soundness(rng: random.Random, ctx: dict) -> str:
    count = 0
    for m in (1, 2, 3):
        P = make_gm(m)
        for _ in range(30):
            u, v, w = random_conjugate_pair(P, rng.randrange(10**9), 8)
            cert = decide_conjugacy(P, u, v, budget=ctx["budget"])
            assert cert is not None, f"gm:{m} pair constructed as conjugate reported not conjugate"
            assert cert.verified and is_conjugator(P, u, v, cert.witness_word), "certificate does not conjugate"
            assert cert.length <= len(w), "certificate longer than the known conjugator"
            count += 1
    return f"{count} conjugate pairs"


def check_non_conjugate(rng: random.Random, ctx: dict) -> str:
    count = 0
    for m in (1, 2, 3):
        P = make_gm(m)
        for _ in range(10):
            u, v = random_central_perturbation(P, rng.randrange(10**9), 8)
            assert decide_conjugacy(P, u, v, budget=ctx["budget"]) is None, f"gm:{m} central shift reported conjugate"
            count += 1
    P = make_gm(1)
    assert decide_conjugacy(P, parse_word(P, "c1"), Word()) is None, "c1 ~ 1 reported"
    return f"{count + 1} central perturbations"


def check_witness_family(rng: random.Random, ctx: dict) -> str:
    for m in (1, 2, 3):
        P = make_gm(m)
        for n in range(2, 6):
            u, v = witness_pair(P, n)
            assert len(u) + len(v) == 6 * n + 2, "input size is not 6n + 2"
            cl = conjugator_length(P, u, v, budget=ctx["budget"])
            assert cl == predicted_cl(m, n), f"gm:{m} n={n}: cl {cl} != {predicted_cl(m, n)}"
            w0 = expected_conjugator(P, m, n)
            assert nf_conjugate(P, collect(P, u), collect(P, w0)) == collect(P, v), "w0 does not conjugate"
    return "m in 1..3, n in 2..5"


def check_oracle(rng: random.Random, ctx: dict) -> str:
    P = make_gm(1)
    u, v = witness_pair(P, 2)
    found = brute_force_cl(P, u, v, radius=5)
    assert found == 4 == conjugator_length(P, u, v), f"oracle found {found}, expected 4"
    for _ in range(10):
        u, v, _ = random_conjugate_pair(P, rng.randrange(10**9), 3)
        assert brute_force_cl(P, u, v, radius=3) == conjugator_length(P, u, v), "oracle disagrees"
    return "gm:1 witness and 10 random pairs"


PROPERTIES: list[tuple[str, Callable[[random.Random, dict], str]]] = [
    ("presentation.antisymmetry", check_antisymmetry),
    ("presentation.roundtrip", check_presentation_roundtrip),
    ("words.homomorphism", check_homomorphism),
    ("words.exponent_bound", check_exponent_bound),
    ("intlinalg.hnf", check_hnf),
    ("intlinalg.minor_bound", check_minor_bound),
    ("conjugacy.change_of_variables", check_change_of_variables),
    ("conjugacy.soundness", check_soundness),
    ("conjugacy.non_conjugate", check_non_conjugate),
    ("gm_lab.witness_family", check_witness_family),
    ("gm_lab.oracle", check_oracle),
]


def run_selftest(
    seed: int = 0,
    budget: int = DEFAULT_SEARCH_BUDGET,
    inject: str | None = None,
) -> SelftestReport:
    """
    Run every property with its own seeded generator.

    Args:
        seed: base seed; property i uses Random(seed * 1000 + i)
        budget: node budget for searches
        inject: name of a fault to inject (negative control), one of FAULTS
    """
    if inject is not None and inject not in FAULTS:
        raise ValueError(f"unknown fault {inject!r}; choose from {', '.join(FAULTS)}")

    ctx = {"budget": budget, "inject": inject}
    report = SelftestReport(seed=seed)
    for i, (name, check) in enumerate(progress(PROPERTIES, desc="selftest")):
        rng = random.Random(seed * 1000 + i)
        try:
            detail = check(rng, ctx)
            report.results.append(PropertyResult(name, True, detail))
        except (AssertionError, NilconjError) as e:
            report.results.append(PropertyResult(name, False, str(e) or type(e).__name__))
    return report


def main():
    parser = argparse.ArgumentParser(description="Run the nilconj self-test")
    parser.add_argument("--seed", type=int, default=get_default_seed(), help="Base seed (default: NILCONJ_SEED or 0)")
    parser.add_argument("--inject", choices=FAULTS, help="Inject a fault to check the suite catches it")
    args = parser.parse_args()

    report = run_selftest(seed=args.seed, inject=args.inject)
    sys.stdout.write(report.render())
    if report.passed:
        print_status("Self-test passed", "success")
        sys.exit(0)
    print_status(f"Self-test failed: {', '.join(report.failures)}", "error")
    sys.exit(1)


if __name__ == "__main__":
    main()
