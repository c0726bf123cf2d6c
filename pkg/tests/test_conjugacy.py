"""Tests for the conjugacy reduction and exact conjugator length."""

import random

import pytest

from conjugacy import (
    DiophantineSystem,
    NotConjugateError,
    analyze_conjugacy,
    build_conjugacy_system,
    change_of_variables,
    conjugator_length,
    decide_conjugacy,
    is_conjugator,
    map_solutions,
    theoretical_minor_bound,
)
from gm_lab import predicted_cl, random_central_perturbation, random_conjugate_pair, witness_pair, witness_system
from intlinalg import IntegerMatrix, SearchBudgetExceeded, VerificationError, solve_integer_system
from presentation import commutator_bound
from words import EMPTY_WORD, collect, from_exponents, nf_conjugate, parse_word, render_word


def system_for(P, u, v):
    return build_conjugacy_system(P, collect(P, u), collect(P, v), input_size=len(u) + len(v))


def assert_entry_bound(P, S, n):
    bound = P.k * commutator_bound(P) * n
    assert all(abs(row[j]) <= bound for row in S.M.entries for j in range(P.k))


# =============================================================================
# System construction
# =============================================================================

def test_abelian_system_is_zero(abelian):
    u = parse_word(abelian, "a1 a2^-1 c1^2 c2")
    v = parse_word(abelian, "a2^-1 a1 c2^3")
    S = system_for(abelian, u, v)
    assert all(row[j] == 0 for row in S.M.entries for j in range(abelian.k))
    # slack column for c2 with order 4
    assert S.M.column(3) == (0, 4)
    assert S.b == (-2, 2)
    assert decide_conjugacy(abelian, u, v) is None


def test_abelian_conjugacy_is_equality(abelian):
    u = parse_word(abelian, "a1 c2^4")
    v = parse_word(abelian, "a1")
    cert = decide_conjugacy(abelian, u, v)
    assert cert is not None and cert.a_exponents == (0, 0, 0) and cert.length == 0


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 3, 5])
def test_witness_pair_builds_the_triangular_system(m, n, g1, g2, g3):
    P = {1: g1, 2: g2, 3: g3}[m]
    u, v = witness_pair(P, n)
    S = system_for(P, u, v)
    M, b = witness_system(m, n)
    assert S.M == M
    assert S.b == b
    assert_entry_bound(P, S, 6 * n + 2)


def test_differing_x_parts_raise(g2):
    with pytest.raises(NotConjugateError):
        build_conjugacy_system(g2, collect(g2, parse_word(g2, "a1")), collect(g2, parse_word(g2, "a2")))


def test_entry_bound_is_asserted():
    M = IntegerMatrix.from_rows([[7, 0]])
    with pytest.raises(VerificationError):
        DiophantineSystem(M, (0,), k=2, m=1, l=0, entry_bound=6)


def test_slack_structure_is_checked():
    M = IntegerMatrix.from_rows([[1, 5], [0, 3]])
    with pytest.raises(VerificationError):
        DiophantineSystem(M, (0, 0), k=1, m=1, l=1)


def test_random_witnesses_solve_their_system(g2):
    for seed in range(300):
        u, v, w = random_conjugate_pair(g2, seed, 8)
        S = system_for(g2, u, v)
        assert S.M.apply(collect(g2, w).x) == S.b
        assert_entry_bound(g2, S, len(u) + len(v))


# =============================================================================
# Change of variables
# =============================================================================

def test_change_of_variables_noop_without_torsion(g2):
    u, v = witness_pair(g2, 2)
    S = system_for(g2, u, v)
    S2, pmat = change_of_variables(S)
    assert S2 is S
    assert pmat == IntegerMatrix.identity(g2.k)


def test_change_of_variables_single_row():
    S = DiophantineSystem(IntegerMatrix.from_rows([[13, 5]]), (3,), k=1, m=0, l=1)
    S2, pmat = change_of_variables(S)
    # 13 = 2 * 5 + 3
    assert S2.M.entries == ((3, 5),)
    assert pmat.entries == ((1, 0), (-2, 1))


def test_change_of_variables_round_trip(torsion_group):
    for seed in range(60):
        u, v, _ = random_conjugate_pair(torsion_group, seed, 6)
        S = system_for(torsion_group, u, v)
        S2, pmat = change_of_variables(S)
        for j in range(torsion_group.l):
            order = S2.M.entries[torsion_group.m + j][torsion_group.k + j]
            assert all(0 <= S2.M.entries[torsion_group.m + j][t] < order for t in range(torsion_group.k))

        original = solve_integer_system(S.M, S.b)
        transformed = solve_integer_system(S2.M, S2.b)
        assert (original is None) == (transformed is None)
        if transformed is None:
            continue
        mapped = map_solutions(transformed, pmat)
        assert S.M.apply(mapped.particular) == S.b
        # backwards: x' = Pmat^-1 x solves the transformed system
        back = solve_integer_system(pmat, original.particular)
        assert back is not None and S2.M.apply(back.particular) == S2.b


# =============================================================================
# Decisions
# =============================================================================

def test_equal_words_need_no_conjugator(g2):
    u = parse_word(g2, "b1 a2^3 c1")
    cert = decide_conjugacy(g2, u, u)
    assert cert.a_exponents == (0, 0, 0, 0)
    assert cert.witness_word == EMPTY_WORD
    assert conjugator_length(g2, u, u) == 0


def test_central_elements_conjugate_only_to_themselves(g1):
    assert decide_conjugacy(g1, parse_word(g1, "c1"), EMPTY_WORD) is None
    with pytest.raises(NotConjugateError):
        conjugator_length(g1, parse_word(g1, "c1"), EMPTY_WORD)


def test_g2_witness_certificate(g2):
    u, v = witness_pair(g2, 3)
    cert = decide_conjugacy(g2, u, v)
    assert cert.a_exponents == (9, 27, 0, 0)
    assert cert.verified and cert.optimal and cert.exact
    assert render_word(g2, cert.witness_word) == "a1^9 a2^27"
    assert nf_conjugate(g2, collect(g2, u), collect(g2, cert.witness_word)) == collect(g2, v)


def test_g1_witness_length(g1):
    u, v = witness_pair(g1, 2)
    assert conjugator_length(g1, u, v) == 4


@pytest.mark.parametrize("m", [1, 2, 3])
def test_witness_family_exactness(m, g1, g2, g3):
    P = {1: g1, 2: g2, 3: g3}[m]
    for n in range(2, 11):
        u, v = witness_pair(P, n)
        cert = decide_conjugacy(P, u, v)
        assert cert.length == predicted_cl(m, n)
        assert cert.a_exponents == tuple(n ** (i + 1) for i in range(1, m + 1)) + (0, 0)


def test_witness_minor_bound_within_theoretical(g2):
    for n in (2, 4, 6):
        u, v = witness_pair(g2, n)
        report = analyze_conjugacy(g2, u, v)
        assert report.minor_bound <= report.theoretical_bound == theoretical_minor_bound(g2, 6 * n + 2)
        assert max(abs(e) for e in report.certificate.a_exponents) <= report.minor_bound


def test_analyze_reports_differing_abelianization(g2):
    report = analyze_conjugacy(g2, parse_word(g2, "a1"), parse_word(g2, "b1"))
    assert not report.conjugate
    assert report.system is None


@pytest.mark.parametrize("m", [1, 2, 3])
def test_random_pairs_are_always_certified(m, g1, g2, g3):
    P = {1: g1, 2: g2, 3: g3}[m]
    for seed in range(500):
        u, v, w = random_conjugate_pair(P, seed, 8)
        cert = decide_conjugacy(P, u, v)
        assert cert is not None, f"seed {seed}"
        assert cert.verified
        assert is_conjugator(P, u, v, cert.witness_word)
        assert cert.length == sum(abs(e) for e in cert.a_exponents)
        assert cert.length <= len(w)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_central_perturbations_are_rejected(m, g1, g2, g3):
    P = {1: g1, 2: g2, 3: g3}[m]
    for seed in range(100):
        u, v = random_central_perturbation(P, seed, 8)
        assert decide_conjugacy(P, u, v) is None, f"seed {seed}"


def test_torsion_pairs_are_certified(torsion_group):
    for seed in range(150):
        u, v, w = random_conjugate_pair(torsion_group, seed, 6)
        cert = decide_conjugacy(torsion_group, u, v)
        assert cert is not None and cert.verified
        assert not cert.exact
        assert cert.length <= len(w)


def test_reduction_is_exact_on_a_box(g2):
    rng = random.Random(5)
    for seed in range(20):
        u, v, _ = random_conjugate_pair(g2, seed, 6)
        S = system_for(g2, u, v)
        gu, gv = collect(g2, u), collect(g2, v)
        for _ in range(50):
            x = [rng.randint(-3, 3) for _ in range(g2.k)]
            conjugates = nf_conjugate(g2, gu, collect(g2, from_exponents(g2, x))) == gv
            assert conjugates == (S.M.apply(x) == S.b)


def test_length_is_a_lower_bound_over_the_coset(g2):
    rng = random.Random(6)
    for seed in range(30):
        u, v, _ = random_conjugate_pair(g2, seed, 6)
        cl = conjugator_length(g2, u, v)
        S = system_for(g2, u, v)
        solutions = solve_integer_system(S.M, S.b)
        for _ in range(20):
            coeffs = [rng.randint(-3, 3) for _ in solutions.kernel_basis]
            x = solutions.point(coeffs)
            assert cl <= sum(abs(e) for e in x[: g2.k])


def test_is_conjugator_agrees_with_conjugation(g2):
    for seed in range(100):
        u, v, w = random_conjugate_pair(g2, seed, 6)
        assert is_conjugator(g2, u, v, w)
        assert nf_conjugate(g2, collect(g2, u), collect(g2, w)) == collect(g2, v)


def test_budget_exhaustion(g2):
    u, v = witness_pair(g2, 2)
    with pytest.raises(SearchBudgetExceeded):
        conjugator_length(g2, u, v, budget=1)
    cert = decide_conjugacy(g2, u, v, budget=1)
    assert cert.verified and not cert.optimal
