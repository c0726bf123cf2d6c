#!/usr/bin/env python3
"""
Conjugacy decision and exact conjugator length.

For u, v with equal images in A, w = a_1^x_1 ... a_k^x_k conjugates u to v
(w^-1 u w = v) exactly when M x = b, where row i counts the exponent of c_i:

    M_ij = sum_t alpha_t gamma_{t j i}     (alpha = common x-part)
    b_i  = q_i - p_i                       (central exponents of v minus u)

Torsion rows m+1..r get a slack column with the single entry o_j, turning a
congruence mod o_j into an integer equation. Central letters are never needed
in a conjugator, and each letter moves one a-coordinate by at most one, so the
conjugator length is the least l1 norm of the a-part of a solution.
"""

from dataclasses import dataclass, field
from math import factorial, prod

from intlinalg import (
    DEFAULT_SEARCH_BUDGET,
    IntegerMatrix,
    RowReduction,
    SearchBudgetExceeded,
    SolutionSet,
    VerificationError,
    max_minor_bound,
    min_l1_in_coset,
    row_rank_reduce,
    solve_integer_system,
)
from presentation import CentralExtensionPresentation, NilconjError, commutator_bound, min_abs_residue
from words import NormalForm, Word, collect, from_exponents, nf_conjugate


class NotConjugateError(NilconjError):
    """Raised when an operation requires u ~ v but they are not conjugate."""
    pass


# =============================================================================
# Systems
# =============================================================================

@dataclass(frozen=True)
class DiophantineSystem:
    """
    M x = b with d = k + l columns; the last l are torsion slack columns.

    When entry_bound is given, |M_ij| <= entry_bound is asserted for j < k.
    """

    M: IntegerMatrix
    b: tuple[int, ...]
    k: int
    m: int
    l: int
    entry_bound: int | None = None

    def __post_init__(self):
        if self.M.cols != self.k + self.l or self.M.rows != self.m + self.l or len(self.b) != self.M.rows:
            raise ValueError("system shape does not match k, m, l")
        for j in range(self.l):
            column = self.M.column(self.k + j)
            nonzero = [i for i, v in enumerate(column) if v]
            if nonzero != [self.m + j] or column[self.m + j] < 2:
                raise VerificationError(f"slack column {self.k + j + 1} must hold one order entry in row {self.m + j + 1}")
        if self.entry_bound is not None:
            worst = max((abs(row[j]) for row in self.M.entries for j in range(self.k)), default=0)
            if worst > self.entry_bound:
                raise VerificationError(f"entry {worst} exceeds the bound kLn = {self.entry_bound}")


def build_conjugacy_system(
    P: CentralExtensionPresentation,
    u: NormalForm,
    v: NormalForm,
    input_size: int | None = None,
) -> DiophantineSystem:
    """
    System whose integer solutions, cut to the first k coordinates, are
    exactly the a-exponent vectors of conjugators of u to v.

    Args:
        input_size: |u| + |v|; when given, the entry bound kLn is asserted

    Raises:
        NotConjugateError: when the x-parts of u and v differ
    """
    if u.x != v.x:
        raise NotConjugateError("images in the abelianization differ; no conjugator exists")

    alpha = u.x
    k, m, l = P.k, P.m, P.l
    rows = []
    for i in range(P.r):
        order = P.order_of_central(i)
        row = []
        for j in range(k):
            entry = 0
            for t in range(k):
                if alpha[t]:
                    g = P.gamma[t][j][i]
                    if order is not None:
                        g = min_abs_residue(g, order)
                    entry += alpha[t] * g
            row.append(entry)
        slack = [0] * l
        if order is not None:
            slack[i - m] = order
        rows.append(row + slack)

    b = tuple(qi - pi for pi, qi in zip(u.central, v.central))
    bound = k * commutator_bound(P) * input_size if input_size is not None else None
    return DiophantineSystem(IntegerMatrix.from_rows(rows, cols=k + l), b, k, m, l, entry_bound=bound)


def change_of_variables(S: DiophantineSystem) -> tuple[DiophantineSystem, IntegerMatrix]:
    """
    Reduce the torsion rows of the first k columns into [0, o_j).

    With m_{m+j,t} = s o_j + r the lower-triangular unimodular Pmat carries
    -s in row k+j, column t, and M' = M Pmat. Solutions correspond through
    x = Pmat x', which leaves the first k coordinates unchanged.
    """
    d = S.k + S.l
    if S.l == 0:
        return S, IntegerMatrix.identity(d)

    pmat = [[int(i == j) for j in range(d)] for i in range(d)]
    for j in range(S.l):
        order = S.M.entries[S.m + j][S.k + j]
        for t in range(S.k):
            quotient, _ = divmod(S.M.entries[S.m + j][t], order)
            pmat[S.k + j][t] = -quotient
    P_matrix = IntegerMatrix.from_rows(pmat)
    reduced = DiophantineSystem(S.M @ P_matrix, S.b, S.k, S.m, S.l)

    for j in range(S.l):
        order = reduced.M.entries[S.m + j][S.k + j]
        if any(not 0 <= reduced.M.entries[S.m + j][t] < order for t in range(S.k)):
            raise VerificationError("torsion row not reduced by change of variables")
    return reduced, P_matrix


def map_solutions(S: SolutionSet, pmat: IntegerMatrix) -> SolutionSet:
    """Image of a solution set under x = Pmat x'."""
    return SolutionSet(pmat.apply(S.particular), tuple(pmat.apply(v) for v in S.kernel_basis))


def theoretical_minor_bound(P: CentralExtensionPresentation, n: int, central_letters: int = 0) -> int:
    """
    r! (kLn)^(m-1) max(kLn, 2Ln^2) 2 o_1...o_l, the instance form of the
    general upper bound on the minors of [M' : b].

    central_letters counts central letters in u and v; each can move a
    central exponent by one, so the right-side term becomes 2(Ln^2 + c).
    """
    L = commutator_bound(P)
    kLn = P.k * L * n
    torsion = 2 * prod(P.orders)
    if P.m == 0:
        return factorial(P.r) * torsion
    return factorial(P.r) * kLn ** (P.m - 1) * max(kLn, 2 * (L * n * n + central_letters)) * torsion


# =============================================================================
# Decisions
# =============================================================================

@dataclass(frozen=True)
class ConjugacyCertificate:
    """A verified conjugator a_1^x_1 ... a_k^x_k of u to v."""

    a_exponents: tuple[int, ...]
    witness_word: Word
    length: int
    verified: bool
    optimal: bool = True
    exact: bool = True
    search_nodes: int = 0


@dataclass
class ConjugacyReport:
    """Everything computed while deciding one conjugacy instance."""

    u: NormalForm
    v: NormalForm
    input_size: int
    system: DiophantineSystem | None = None
    reduction: RowReduction | None = None
    transformed: DiophantineSystem | None = None
    pmat: IntegerMatrix | None = None
    used_change_of_variables: bool = False
    minor_bound: int | None = None
    theoretical_bound: int | None = None
    certificate: ConjugacyCertificate | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def conjugate(self) -> bool:
        return self.certificate is not None


def is_conjugator(P: CentralExtensionPresentation, u: Word, v: Word, w: Word) -> bool:
    """True iff uw = wv in G."""
    return collect(P, u + w) == collect(P, w + v)


def _reduce_and_bound(S: DiophantineSystem) -> tuple[RowReduction, int | None]:
    reduction = row_rank_reduce(S.M, S.b)
    if reduction.inconsistent:
        return reduction, None
    return reduction, max_minor_bound(reduction.matrix, reduction.rhs)


def analyze_conjugacy(
    P: CentralExtensionPresentation,
    u: Word,
    v: Word,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ConjugacyReport:
    """
    Decide u ~ v and, when conjugate, find an l1-minimal certificate.

    The returned certificate is always re-verified by conjugating u with the
    witness; the linear algebra alone is never trusted.
    """
    u_nf, v_nf = collect(P, u), collect(P, v)
    n = len(u) + len(v)
    report = ConjugacyReport(u=u_nf, v=v_nf, input_size=n)

    if u_nf.x != v_nf.x:
        report.notes.append("a-exponents differ")
        return report

    central_letters = sum(abs(e) for g, e in u.syllables + v.syllables if g >= P.k)
    report.theoretical_bound = theoretical_minor_bound(P, n, central_letters)
    system = build_conjugacy_system(P, u_nf, v_nf, input_size=n)
    report.system = system

    reduction, bound = _reduce_and_bound(system)
    if reduction.inconsistent:
        report.reduction = reduction
        report.notes.append("system has no rational solution")
        return report
    pmat = None

    if P.l:
        transformed, candidate_pmat = change_of_variables(system)
        report.transformed, report.pmat = transformed, candidate_pmat
        reduction_t, bound_t = _reduce_and_bound(transformed)
        if bound_t is not None and bound_t < bound:
            pmat, reduction, bound = candidate_pmat, reduction_t, bound_t
            report.used_change_of_variables = True

    report.reduction, report.minor_bound = reduction, bound

    solutions = solve_integer_system(reduction.matrix, reduction.rhs)
    if solutions is None:
        report.notes.append("no integer solution")
        return report
    if pmat is not None:
        solutions = map_solutions(solutions, pmat)

    mask = [True] * P.k + [False] * P.l
    optimal = True
    try:
        best = min_l1_in_coset(solutions, mask, budget=budget)
        x, nodes = best.x, best.nodes
    except SearchBudgetExceeded as e:
        optimal, nodes = False, e.nodes
        x = e.best if e.best is not None else solutions.particular
        report.notes.append(f"l1 search stopped after {e.nodes} nodes; certificate may not be minimal")

    a_exponents = tuple(x[: P.k])
    witness = from_exponents(P, a_exponents)
    if nf_conjugate(P, u_nf, collect(P, witness)) != v_nf:
        raise VerificationError("certificate failed re-verification by conjugation")

    if P.l:
        report.notes.append("torsion centre: length is an upper bound on CL")
    report.certificate = ConjugacyCertificate(
        a_exponents=a_exponents,
        witness_word=witness,
        length=sum(abs(e) for e in a_exponents),
        verified=True,
        optimal=optimal,
        exact=P.l == 0,
        search_nodes=nodes,
    )
    return report


def decide_conjugacy(
    P: CentralExtensionPresentation,
    u: Word,
    v: Word,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ConjugacyCertificate | None:
    """Verified certificate when u ~ v, None otherwise."""
    return analyze_conjugacy(P, u, v, budget).certificate


def conjugator_length(
    P: CentralExtensionPresentation,
    u: Word,
    v: Word,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> int:
    """
    Least l1 norm of the a-part of a conjugator; equals CL(u, v) when the
    centre is torsion-free.

    Raises:
        NotConjugateError: when u and v are not conjugate
        SearchBudgetExceeded: when optimality could not be certified
    """
    certificate = decide_conjugacy(P, u, v, budget)
    if certificate is None:
        raise NotConjugateError("words are not conjugate")
    if not certificate.optimal:
        raise SearchBudgetExceeded(certificate.search_nodes, certificate.a_exponents, certificate.length)
    return certificate.length
