#!/usr/bin/env python3
"""
The G_m family, its witness pairs, a brute-force conjugator oracle and the
conjugator-length growth experiments.

G_m has generators a_1..a_m, b_1, b_2 (non-central) and c_1..c_m (central):

    [b_1, a_i] = c_i                (1 <= i <= m)
    [b_2, a_i] = c_{i+1}^-1         (1 <= i <= m-1)
    every other pair commutes

The witness pair u = b_1 b_2^n a_1^-n b_1^-n a_1^n b_1^n, v = b_1 b_2^n has
a unique conjugator a-part (n^2, n^3, ..., n^(m+1), 0, 0), so its conjugator
length grows like n^(m+1) while |u| + |v| = 6n + 2.

Usage (through the CLI):
    python nilconj.py gm --m 2 --n 4..20
    python nilconj.py survey --group gm:2 --samples 200
"""

import csv
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, TextIO

import numpy as np

from conjugacy import DiophantineSystem, analyze_conjugacy, build_conjugacy_system, conjugator_length
from intlinalg import (
    DEFAULT_SEARCH_BUDGET,
    IntegerMatrix,
    SearchBudgetExceeded,
    VerificationError,
    row_rank_reduce,
    solve_integer_system,
)
from presentation import CentralExtensionPresentation, PresentationError, validate_presentation
from words import (
    Word,
    collect,
    nf_conjugate,
    nf_identity,
    nf_multiply,
    nf_to_word,
    parse_word,
    word_of_generator,
)

# Experiment defaults
MAX_CL = 10**8
DEFAULT_BRUTE_FORCE_STATES = 2 * 10**6

CSV_COLUMNS = ["m", "n", "input_size", "cl", "predicted", "minor_bound", "wall_time_s"]


# =============================================================================
# The family
# =============================================================================

def gm_names(m: int) -> list[str]:
    return [f"a{i}" for i in range(1, m + 1)] + ["b1", "b2"] + [f"c{i}" for i in range(1, m + 1)]


def defining_relations(P: CentralExtensionPresentation, m: int) -> list[tuple[str, Word, Word]]:
    """
    Defining relations of G_m as (label, lhs, rhs) word pairs over P.

    Includes the commuting relations among the a's and between b_1 and b_2.
    """
    def w(text: str) -> Word:
        return parse_word(P, text)

    relations = []
    for i in range(1, m + 1):
        relations.append((f"b1 a{i}", w(f"b1 a{i}"), w(f"a{i} b1 c{i}")))
        if i < m:
            relations.append((f"b2 a{i}", w(f"b2 a{i}"), w(f"a{i} b2 c{i + 1}^-1")))
        else:
            relations.append((f"b2 a{i}", w(f"b2 a{i}"), w(f"a{i} b2")))
        for j in range(i + 1, m + 1):
            relations.append((f"a{i} a{j}", w(f"a{i} a{j}"), w(f"a{j} a{i}")))
    relations.append(("b1 b2", w("b1 b2"), w("b2 b1")))
    return relations


def check_relations(P: CentralExtensionPresentation, relations) -> list[str]:
    """Labels of relations whose two sides collect to different normal forms."""
    return [label for label, lhs, rhs in relations if collect(P, lhs) != collect(P, rhs)]


def make_gm(m: int) -> CentralExtensionPresentation:
    """
    Build G_m and check every defining relation by collection.

    Raises:
        ValueError: if m < 1
        PresentationError: if a defining relation fails to hold
    """
    if m < 1:
        raise ValueError(f"G_m needs m >= 1, got {m}")

    b1, b2 = m + 1, m + 2
    gamma = []
    for i in range(1, m + 1):
        gamma.append([b1, i, i, 1])
        if i < m:
            gamma.append([b2, i, i + 1, -1])

    P = validate_presentation({"k": m + 2, "m": m, "l": 0, "gamma": gamma, "names": gm_names(m)})
    failed = check_relations(P, defining_relations(P, m))
    if failed:
        raise PresentationError("relations", f"G_{m} relations do not hold: {', '.join(failed)}")
    return P


def gm_rank(P: CentralExtensionPresentation) -> int:
    """
    The m for which P is G_m.

    Raises:
        ValueError: if P is not one of the G_m presentations
    """
    m = P.k - 2
    if m < 1 or P.m != m or P.l or list(P.names) != gm_names(m) or P.gamma != make_gm(m).gamma:
        raise ValueError("presentation is not a G_m group")
    return m


def witness_pair(P: CentralExtensionPresentation, n: int) -> tuple[Word, Word]:
    """u = b1 b2^n a1^-n b1^-n a1^n b1^n and v = b1 b2^n."""
    gm_rank(P)
    if n < 1:
        raise ValueError(f"witness parameter must be positive, got {n}")
    u = parse_word(P, f"b1 b2^{n} a1^{-n} b1^{-n} a1^{n} b1^{n}")
    v = parse_word(P, f"b1 b2^{n}")
    return u, v


def expected_conjugator(P: CentralExtensionPresentation, m: int, n: int) -> Word:
    """a1^(n^2) a2^(n^3) ... am^(n^(m+1))."""
    if gm_rank(P) != m:
        raise ValueError(f"presentation is G_{P.k - 2}, not G_{m}")
    return parse_word(P, " ".join(f"a{i}^{n ** (i + 1)}" for i in range(1, m + 1)))


def predicted_cl(m: int, n: int) -> int:
    return sum(n ** (i + 1) for i in range(1, m + 1))


def retraction_lower_bound(m: int, n: int) -> int:
    """Every conjugator of the witness pair has at least n^(m+1) letters a_m."""
    return n ** (m + 1)


def witness_system(m: int, n: int) -> tuple[IntegerMatrix, tuple[int, ...]]:
    """
    The triangular system of the witness pair over (a_1..a_m, b_1, b_2):
    x_1 = n^2 and -n x_(i-1) + x_i = 0; the b columns are zero.
    """
    rows = []
    for i in range(m):
        row = [0] * (m + 2)
        row[i] = 1
        if i:
            row[i - 1] = -n
        rows.append(row)
    return IntegerMatrix.from_rows(rows), (n * n,) + (0,) * (m - 1)


# =============================================================================
# Brute-force oracle
# =============================================================================

def _solves_system(S: DiophantineSystem, x: tuple[int, ...]) -> bool:
    """True iff the a-part x extends to a solution of S (slack absorbs torsion rows)."""
    for i, (row, target) in enumerate(zip(S.M.entries, S.b)):
        residual = sum(a * e for a, e in zip(row[: S.k], x)) - target
        if i < S.m:
            if residual:
                return False
        elif residual % row[S.k + i - S.m]:
            return False
    return True


def _accelerated_cl(
    P: CentralExtensionPresentation,
    u: Word,
    v: Word,
    radius: int,
    max_states: int,
) -> int | None:
    u_nf, v_nf = collect(P, u), collect(P, v)
    if u_nf.x != v_nf.x:
        return None
    S = build_conjugacy_system(P, u_nf, v_nf)
    reduction = row_rank_reduce(S.M, S.b)
    if reduction.inconsistent or solve_integer_system(reduction.matrix, reduction.rhs) is None:
        return None

    start = (0,) * P.k
    if _solves_system(S, start):
        return 0
    steps = [tuple(sign * int(i == g) for i in range(P.k)) for g in range(P.k) for sign in (1, -1)]
    seen = {start}
    frontier = [start]
    for length in range(1, radius + 1):
        next_frontier = []
        for x in frontier:
            for step in steps:
                y = tuple(a + d for a, d in zip(x, step))
                if y in seen:
                    continue
                if _solves_system(S, y):
                    return length
                seen.add(y)
                if len(seen) > max_states:
                    raise SearchBudgetExceeded(max_states)
                next_frontier.append(y)
        frontier = next_frontier
    return None


def brute_force_cl(
    P: CentralExtensionPresentation,
    u: Word,
    v: Word,
    radius: int,
    max_states: int = DEFAULT_BRUTE_FORCE_STATES,
    accelerated: bool = False,
) -> int | None:
    """
    Shortest conjugator length by breadth-first search of the Cayley ball.

    Group elements are deduplicated by normal form and the full alphabet is
    searched. The accelerated mode walks a-exponent vectors instead: a word
    conjugates u to v exactly when its a-part extends to a solution of the
    conjugacy system. States are deduplicated by a-part and tested against
    the system; an unsolvable system prunes the whole ball.

    Returns:
        Least l <= radius such that some word of length l conjugates u to v,
        or None when no conjugator lies in the ball

    Raises:
        SearchBudgetExceeded: when more than max_states elements are visited
    """
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    if accelerated:
        return _accelerated_cl(P, u, v, radius, max_states)

    u_nf, v_nf = collect(P, u), collect(P, v)
    start = nf_identity(P)
    if nf_conjugate(P, u_nf, start) == v_nf:
        return 0

    letters = [word_of_generator(P, g, sign) for g in range(P.k + P.r) for sign in (1, -1)]

    seen = {start}
    frontier = [start]
    for length in range(1, radius + 1):
        next_frontier = []
        for g in frontier:
            for letter in letters:
                h = nf_multiply(P, g, letter)
                if h in seen:
                    continue
                if nf_conjugate(P, u_nf, h) == v_nf:
                    return length
                seen.add(h)
                if len(seen) > max_states:
                    raise SearchBudgetExceeded(max_states)
                next_frontier.append(h)
        frontier = next_frontier
        if not frontier:
            break
    return None


# =============================================================================
# Growth experiments
# =============================================================================

@dataclass
class ExperimentRecord:
    """One row of the growth experiment."""

    m: int
    n: int
    input_size: int
    cl: int
    predicted: int
    minor_bound: int
    wall_time_s: float
    minimizer: tuple[int, ...] = field(default=(), repr=False)

    def to_row(self) -> dict:
        row = asdict(self)
        row.pop("minimizer")
        return row


@dataclass
class GrowthResult:
    records: list[ExperimentRecord]
    slope: float | None
    truncated: str | None = None


def run_witness_instance(P: CentralExtensionPresentation, m: int, n: int, budget: int) -> ExperimentRecord:
    """
    Full pipeline for one witness pair, with the family's sanity checks.

    Raises:
        VerificationError: if any of the family's exact predictions fails
        SearchBudgetExceeded: if optimality could not be certified
    """
    u, v = witness_pair(P, n)
    start = time.perf_counter()
    report = analyze_conjugacy(P, u, v, budget=budget)
    elapsed = time.perf_counter() - start

    certificate = report.certificate
    if certificate is None:
        raise VerificationError(f"G_{m} witness pair with n={n} reported not conjugate")
    if not certificate.optimal:
        raise SearchBudgetExceeded(certificate.search_nodes, certificate.a_exponents, certificate.length)

    x = certificate.a_exponents
    expected = tuple(n ** (i + 1) for i in range(1, m + 1)) + (0, 0)
    if x != expected:
        raise VerificationError(f"minimizer {x} differs from the unique solution {expected}")
    if certificate.length < retraction_lower_bound(m, n):
        raise VerificationError(f"length {certificate.length} below the a_m letter count n^(m+1)")
    if max(abs(e) for e in x) > report.minor_bound:
        raise VerificationError(f"minimizer exceeds the minor bound {report.minor_bound} in sup-norm")

    return ExperimentRecord(
        m=m,
        n=n,
        input_size=report.input_size,
        cl=certificate.length,
        predicted=predicted_cl(m, n),
        minor_bound=report.minor_bound,
        wall_time_s=round(elapsed, 6),
        minimizer=x,
    )


def fit_slope(records: list[ExperimentRecord]) -> float | None:
    """Least-squares slope of log(cl) against log(input_size)."""
    if len({r.n for r in records}) < 2:
        return None
    x = np.log(np.asarray([r.input_size for r in records], dtype=float))
    y = np.log(np.asarray([r.cl for r in records], dtype=float))
    A = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[1])


def growth_experiment(
    m: int,
    n_values,
    budget: int = DEFAULT_SEARCH_BUDGET,
    max_cl: int = MAX_CL,
    time_budget: float | None = None,
    on_record: Callable[[ExperimentRecord], None] | None = None,
) -> GrowthResult:
    """
    Run the witness pipeline for each n and fit the growth exponent.

    Stops early, recording the reason in `truncated`, once a measured length
    exceeds max_cl or the accumulated wall time exceeds time_budget seconds.
    """
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values must be nonempty")
    if n_values != sorted(n_values):
        raise ValueError("n_values must be ascending")

    P = make_gm(m)
    records = []
    truncated = None
    started = time.perf_counter()
    for n in n_values:
        record = run_witness_instance(P, m, n, budget)
        records.append(record)
        if on_record is not None:
            on_record(record)
        if record.cl > max_cl:
            truncated = f"cl {record.cl} exceeded {max_cl} at n={n}"
            break
        if time_budget is not None and time.perf_counter() - started > time_budget:
            truncated = f"time budget of {time_budget}s exhausted at n={n}"
            break

    return GrowthResult(records=records, slope=fit_slope(records), truncated=truncated)


def experiment_csv_writer(stream: TextIO) -> csv.DictWriter:
    """DictWriter over CSV_COLUMNS with the header already written."""
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    return writer


def write_slope_line(stream: TextIO, slope: float | None) -> None:
    stream.write(f"# slope={'absent' if slope is None else f'{slope:.6f}'}\n")


def write_experiment_csv(result: GrowthResult, stream: TextIO) -> None:
    """Header, one row per record in input order, then `# slope=<value>`."""
    writer = experiment_csv_writer(stream)
    for record in result.records:
        writer.writerow(record.to_row())
    write_slope_line(stream, result.slope)


# =============================================================================
# Random pairs
# =============================================================================

def random_word(P: CentralExtensionPresentation, rng: random.Random, size: int, central: bool = True) -> Word:
    """Word of uniformly random length <= size over uniformly random letters."""
    generators = P.k + P.r if central else P.k
    length = rng.randint(0, size)
    return Word.from_letters((rng.randrange(generators), rng.choice((1, -1))) for _ in range(length))


def random_conjugate_pair(P: CentralExtensionPresentation, seed: int, size: int) -> tuple[Word, Word, Word]:
    """
    (u, v, w) with v = w^-1 u w rendered as a normal-form word.

    Deterministic in seed.
    """
    rng = random.Random(seed)
    u = random_word(P, rng, size)
    w = random_word(P, rng, size)
    v = nf_to_word(P, nf_conjugate(P, collect(P, u), collect(P, w)))
    return u, v, w


def random_central_perturbation(P: CentralExtensionPresentation, seed: int, size: int) -> tuple[Word, Word]:
    """
    Non-conjugate pair (u, u c_s^e) with c_s free central and e != 0.

    u avoids every generator whose commutators involve c_s, so row s of the
    conjugacy system is zero while its right side is e.
    """
    if P.m == 0:
        raise ValueError("central perturbation needs a free central generator")
    rng = random.Random(seed)
    s = rng.randrange(P.m)
    touching = {i for i in range(P.k) for j in range(P.k) if P.gamma[i][j][s]}
    allowed = [g for g in range(P.k + P.r) if g not in touching]
    length = rng.randint(0, size)
    u = Word.from_letters((rng.choice(allowed), rng.choice((1, -1))) for _ in range(length))
    e = rng.choice((1, -1, 2, -2, 3))
    return u, u + Word(((P.k + s, e),))


@dataclass
class SurveySummary:
    """Diagnostic statistics of conjugator length over random pairs."""

    samples: int
    max_cl: int
    mean_cl: float
    max_ratio: float
    worst_pair: tuple[Word, Word] | None = None


def random_cl_survey(
    P: CentralExtensionPresentation,
    seed: int,
    size: int,
    samples: int,
    budget: int = DEFAULT_SEARCH_BUDGET,
    progress_wrap: Callable | None = None,
) -> SurveySummary:
    """
    Conjugator length over random conjugate pairs.

    max_ratio is the largest cl / (|u| + |v|). Only a diagnostic: random
    pairs say nothing about the worst case.
    """
    indices = range(samples)
    if progress_wrap is not None:
        indices = progress_wrap(indices)

    lengths = []
    max_cl, max_ratio, worst = -1, 0.0, None
    for i in indices:
        u, v, _ = random_conjugate_pair(P, seed + i, size)
        cl = conjugator_length(P, u, v, budget=budget)
        if cl > max_cl:
            max_cl, worst = cl, (u, v)
        lengths.append(cl)
        max_ratio = max(max_ratio, cl / max(1, len(u) + len(v)))

    return SurveySummary(
        samples=samples,
        max_cl=max(max_cl, 0),
        mean_cl=float(np.mean(lengths)) if lengths else 0.0,
        max_ratio=max_ratio,
        worst_pair=worst,
    )
