#!/usr/bin/env python3
"""
Exact integer linear algebra.

Provides column-style Hermite normal form with its unimodular transform,
integer solving of M x = b, row-rank reduction, maximal-minor bounds and
certified searches inside solution cosets x0 + kernel lattice.

All arithmetic is on Python ints; ranks and determinants go through
sympy's DomainMatrix over ZZ (fraction-free elimination).
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from presentation import NilconjError

DEFAULT_SEARCH_BUDGET = 10**7


class RankDeficientError(NilconjError):
    """Raised when an operation needs full row rank."""
    pass


class VerificationError(NilconjError):
    """Raised when an internal self-check fails (indicates a bug)."""
    pass


class SearchBudgetExceeded(NilconjError):
    """Raised when a bounded search runs out of nodes; carries the best incumbent."""

    def __init__(self, nodes: int, best: tuple[int, ...] | None = None, objective: int | None = None):
        self.nodes = nodes
        self.best = best
        self.objective = objective
        detail = f", best objective so far {objective}" if objective is not None else ""
        super().__init__(f"search budget of {nodes} nodes exceeded{detail}")


# =============================================================================
# Matrices
# =============================================================================

@dataclass(frozen=True)
class IntegerMatrix:
    """
    Immutable r x d integer matrix.

    A matrix with zero rows is allowed and stands for an empty system;
    columns must be positive.
    """

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.cols < 1 or self.rows < 0:
            raise ValueError(f"invalid matrix shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        entries = tuple(tuple(int(v) for v in row) for row in rows)
        if cols is None:
            if not entries:
                raise ValueError("cols required for a matrix with no rows")
            cols = len(entries[0])
        return cls(len(entries), cols, entries)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def select_rows(self, indices: Sequence[int]) -> "IntegerMatrix":
        return IntegerMatrix(len(indices), self.cols, tuple(self.entries[i] for i in indices))

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product M x."""
        return tuple(sum(a * b for a, b in zip(row, x)) for row in self.entries)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        columns = [other.column(j) for j in range(other.cols)]
        return IntegerMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in columns) for row in self.entries),
        )


def _domain(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(v) for v in row] for row in rows], (len(rows), ncols), ZZ)


def rank_of(rows: Sequence[Sequence[int]], ncols: int) -> int:
    """Rank over Q."""
    if not rows:
        return 0
    return _domain(rows, ncols).rank()


def determinant(rows: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix."""
    if not rows:
        return 1
    return int(_domain(rows, len(rows)).det())


# =============================================================================
# Hermite normal form
# =============================================================================

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s a + t b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _hermite(rows: Sequence[Sequence[int]], ncols: int):
    """
    Column-style HNF working on lists.

    Returns:
        (H, U, pivots) with M U = H, U given as a list of rows, and pivots a
        list of (row, column) pairs; pivot j sits in column j.
    """
    H = [list(row) for row in rows]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    pivots: list[tuple[int, int]] = []

    def combine(c1: int, c2: int, s: int, t: int, u: int, v: int) -> None:
        # [c1, c2] <- [s c1 + t c2, u c1 + v c2]
        for mat in (H, U):
            for row in mat:
                a, b = row[c1], row[c2]
                row[c1] = s * a + t * b
                row[c2] = u * a + v * b

    def add_multiple(target: int, source: int, factor: int) -> None:
        for mat in (H, U):
            for row in mat:
                row[target] += factor * row[source]

    pc = 0
    for i in range(len(H)):
        if pc == ncols:
            break
        for j in range(pc + 1, ncols):
            b = H[i][j]
            if b == 0:
                continue
            a = H[i][pc]
            g, s, t = _xgcd(a, b)
            combine(pc, j, s, t, -b // g, a // g)
        piv = H[i][pc]
        if piv == 0:
            continue
        if piv < 0:
            for mat in (H, U):
                for row in mat:
                    row[pc] = -row[pc]
            piv = -piv
        for j in range(pc):
            q = H[i][j] // piv
            if q:
                add_multiple(j, pc, -q)
        pivots.append((i, pc))
        pc += 1

    return H, U, pivots


def hermite_normal_form(M: IntegerMatrix) -> tuple[IntegerMatrix, IntegerMatrix]:
    """
    Column-style Hermite normal form.

    Returns:
        (H, U) with U unimodular (d x d) and M U = H. H is lower echelon:
        pivot j sits in column j, is positive, has zeros above it, and the
        entries to its left in the pivot row lie in [0, pivot).
    """
    H, U, _ = _hermite(M.entries, M.cols)
    return IntegerMatrix.from_rows(H, M.cols), IntegerMatrix.from_rows(U, M.cols)


# =============================================================================
# Solving
# =============================================================================

@dataclass(frozen=True)
class SolutionSet:
    """Integer solutions x0 + span_Z(kernel_basis)."""

    particular: tuple[int, ...]
    kernel_basis: tuple[tuple[int, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.particular)

    def point(self, coefficients: Sequence[int]) -> tuple[int, ...]:
        x = list(self.particular)
        for c, v in zip(coefficients, self.kernel_basis):
            if c:
                for i, vi in enumerate(v):
                    x[i] += c * vi
        return tuple(x)


def solve_integer_system(M: IntegerMatrix, b: Sequence[int]) -> SolutionSet | None:
    """
    Solve M x = b over Z.

    Returns:
        SolutionSet, or None when no integer solution exists

    Raises:
        VerificationError: if the computed solution fails M x0 = b
    """
    b = tuple(int(v) for v in b)
    if len(b) != M.rows:
        raise ValueError(f"right side has length {len(b)}, expected {M.rows}")
    d = M.cols

    H, U, pivots = _hermite(M.entries, d)
    rank = len(pivots)
    y = [0] * d
    for row, col in pivots:
        acc = b[row] - sum(H[row][j] * y[j] for j in range(col))
        piv = H[row][col]
        if acc % piv:
            return None
        y[col] = acc // piv
    for i in range(M.rows):
        if sum(H[i][j] * y[j] for j in range(rank)) != b[i]:
            return None

    particular = tuple(sum(U[i][j] * y[j] for j in range(rank)) for i in range(d))
    kernel = tuple(tuple(U[i][j] for i in range(d)) for j in range(rank, d))

    if M.apply(particular) != b:
        raise VerificationError("particular solution does not satisfy M x0 = b")
    zero = (0,) * M.rows
    for v in kernel:
        if M.apply(v) != zero:
            raise VerificationError("kernel basis vector does not satisfy M v = 0")

    return SolutionSet(particular, kernel)


@dataclass(frozen=True)
class RowReduction:
    """Outcome of row_rank_reduce."""

    matrix: IntegerMatrix | None
    rhs: tuple[int, ...] | None
    kept_rows: tuple[int, ...]
    inconsistent: bool = False


def row_rank_reduce(M: IntegerMatrix, b: Sequence[int]) -> RowReduction:
    """
    Drop rows that are Q-dependent on earlier rows.

    A dropped row is harmless when the augmented row [M_i : b_i] is dependent
    too; otherwise the system has no rational solution and the result is
    flagged inconsistent.
    """
    b = tuple(int(v) for v in b)
    kept: list[int] = []
    for i in range(M.rows):
        candidate = kept + [i]
        if rank_of([M.entries[j] for j in candidate], M.cols) > len(kept):
            kept.append(i)
            continue
        augmented = [M.entries[j] + (b[j],) for j in candidate]
        if rank_of(augmented, M.cols + 1) > len(kept):
            return RowReduction(None, None, tuple(kept), inconsistent=True)

    return RowReduction(M.select_rows(kept), tuple(b[i] for i in kept), tuple(kept))


def max_minor_bound(M: IntegerMatrix, b: Sequence[int]) -> int:
    """
    Largest |det| over all r x r submatrices of [M : b].

    Raises:
        RankDeficientError: when M does not have full row rank
    """
    r = M.rows
    if rank_of(M.entries, M.cols) < r:
        raise RankDeficientError(f"matrix of {r} rows has rank below {r}; reduce rows first")
    augmented = [row + (int(bi),) for row, bi in zip(M.entries, b)]
    best = 0
    for cols in combinations(range(M.cols + 1), r):
        sub = [[row[c] for c in cols] for row in augmented]
        best = max(best, abs(determinant(sub)))
    return best


# =============================================================================
# Searches in solution cosets
# =============================================================================

@dataclass(frozen=True)
class CosetMinimum:
    """Certified minimizer of the masked l1 objective."""

    x: tuple[int, ...]
    objective: int
    nodes: int


class _EchelonCoset:
    """
    A coset restricted to selected coordinates, with an echelon basis.

    Coordinates outside `rows` are carried along but unconstrained. The
    restricted kernel lattice is put into column HNF so that the j-th basis
    vector vanishes above its pivot row p_j; the value of every row below
    p_j and above p_{j+1} is fixed once coefficients 0..j are fixed.
    """

    def __init__(self, S: SolutionSet, rows: Sequence[int]):
        self.S = S
        self.rows = list(rows)
        self.base = [S.particular[i] for i in self.rows]
        self.basis: list[list[int]] = []
        self.lifted: list[tuple[int, ...]] = []
        self.pivot_rows: list[int] = []

        if not S.kernel_basis or not self.rows:
            return

        restricted = [[v[i] for v in S.kernel_basis] for i in self.rows]
        H, U, pivots = _hermite(restricted, len(S.kernel_basis))
        d = S.dimension
        for row, col in pivots:
            self.pivot_rows.append(row)
            self.basis.append([H[i][col] for i in range(len(self.rows))])
            lifted = [0] * d
            for coeff, v in zip((U[i][col] for i in range(len(S.kernel_basis))), S.kernel_basis):
                if coeff:
                    for t, vt in enumerate(v):
                        lifted[t] += coeff * vt
            self.lifted.append(tuple(lifted))

    @property
    def depth(self) -> int:
        return len(self.basis)

    def segment(self, level: int) -> range:
        """Rows whose value is fixed once coefficient `level` is chosen (-1 = constant rows)."""
        start = 0 if level < 0 else self.pivot_rows[level]
        stop = self.pivot_rows[level + 1] if level + 1 < self.depth else len(self.rows)
        return range(start, stop)

    def full_point(self, coefficients: Sequence[int]) -> tuple[int, ...]:
        x = list(self.S.particular)
        for c, v in zip(coefficients, self.lifted):
            if c:
                for i, vi in enumerate(v):
                    x[i] += c * vi
        return tuple(x)

    def center(self, level: int, current: Sequence[int]) -> int:
        """Coefficient that brings the pivot row closest to zero."""
        piv = self.basis[level][self.pivot_rows[level]]
        value = current[self.pivot_rows[level]]
        return _round_div(-value, piv)

    def interval(self, level: int, current: Sequence[int], radius: int) -> tuple[int, int]:
        """Coefficients keeping |pivot row| <= radius."""
        piv = self.basis[level][self.pivot_rows[level]]
        value = current[self.pivot_rows[level]]
        return -((radius + value) // piv), (radius - value) // piv


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a / b (b > 0), ties toward +infinity."""
    return (2 * a + b) // (2 * b)


def _normalize_mask(costed: Sequence[bool] | None, d: int) -> list[int]:
    if costed is None:
        return list(range(d))
    if len(costed) != d:
        raise ValueError(f"mask has length {len(costed)}, expected {d}")
    return [i for i, flag in enumerate(costed) if flag]


def min_l1_in_coset(
    S: SolutionSet,
    costed: Sequence[bool] | None = None,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> CosetMinimum:
    """
    Minimize sum_{i in mask} |x_i| over x in the coset S.

    Branch-and-bound over the coefficients of an echelon basis of the costed
    kernel lattice. Every lattice point whose objective does not exceed the
    incumbent is visited, so the result is optimal; among optimal points the
    costed coordinates are lexicographically smallest. Cost-free coordinates
    follow deterministically from the lift.

    Raises:
        SearchBudgetExceeded: carries the best incumbent found
    """
    rows = _normalize_mask(costed, S.dimension)
    coset = _EchelonCoset(S, rows)

    best_obj: int | None = None
    best_key: tuple[int, ...] = ()
    best_coeffs: list[int] = []
    nodes = 0

    def descend(level: int, current: list[int], partial: int, coeffs: list[int]) -> None:
        nonlocal best_obj, best_key, best_coeffs, nodes
        if level == coset.depth:
            key = tuple(current)
            if best_obj is None or (partial, key) < (best_obj, best_key):
                best_obj, best_key, best_coeffs = partial, key, list(coeffs)
            return

        span = coset.segment(level)
        column = coset.basis[level]
        first_row = coset.pivot_rows[level]
        center = coset.center(level, current)
        c_up, c_down = center, center - 1

        while True:
            if best_obj is None:
                up_ok = down_ok = True
            else:
                lo, hi = coset.interval(level, current, best_obj - partial)
                c_up, c_down = max(c_up, lo), min(c_down, hi)
                up_ok, down_ok = c_up <= hi, c_down >= lo
            if not (up_ok or down_ok):
                return
            if up_ok and (not down_ok or c_up - center <= center - c_down):
                c, c_up = c_up, c_up + 1
            else:
                c, c_down = c_down, c_down - 1

            nodes += 1
            if nodes > budget:
                incumbent = coset.full_point(best_coeffs) if best_obj is not None else None
                raise SearchBudgetExceeded(budget, incumbent, best_obj)

            moved = list(current)
            for i in range(first_row, len(moved)):
                if column[i]:
                    moved[i] += c * column[i]
            cost = partial + sum(abs(moved[i]) for i in span)
            if best_obj is not None and cost > best_obj:
                continue
            coeffs.append(c)
            descend(level + 1, moved, cost, coeffs)
            coeffs.pop()

    constant_rows = coset.segment(-1) if coset.depth else range(len(coset.base))
    descend(0, list(coset.base), sum(abs(coset.base[i]) for i in constant_rows), [])

    return CosetMinimum(x=coset.full_point(best_coeffs), objective=best_obj, nodes=nodes)


def feasible_within(S: SolutionSet, bound: int, budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[int, ...] | None:
    """
    Find a point of S with every |x_i| <= bound, or None if none exists.

    Exhaustive over the echelon coefficient intervals, so None is a proof.

    Raises:
        SearchBudgetExceeded: when the enumeration runs out of nodes
    """
    coset = _EchelonCoset(S, range(S.dimension))
    nodes = 0

    if any(abs(coset.base[i]) > bound for i in (coset.segment(-1) if coset.depth else range(len(coset.base)))):
        return None

    def descend(level: int, current: list[int], coeffs: list[int]):
        nonlocal nodes
        if level == coset.depth:
            return coset.full_point(coeffs)
        lo, hi = coset.interval(level, current, bound)
        if lo > hi:
            return None
        center = min(max(coset.center(level, current), lo), hi)
        column = coset.basis[level]
        span = coset.segment(level)
        for offset in range(0, max(center - lo, hi - center) + 1):
            for c in ((center,) if offset == 0 else (center + offset, center - offset)):
                if c < lo or c > hi:
                    continue
                nodes += 1
                if nodes > budget:
                    raise SearchBudgetExceeded(budget)
                moved = list(current)
                for i in range(coset.pivot_rows[level], len(moved)):
                    if column[i]:
                        moved[i] += c * column[i]
                if any(abs(moved[i]) > bound for i in span):
                    continue
                coeffs.append(c)
                found = descend(level + 1, moved, coeffs)
                coeffs.pop()
                if found is not None:
                    return found
        return None

    return descend(0, list(coset.base), [])


def minor_bound_check(M: IntegerMatrix, b: Sequence[int], budget: int = DEFAULT_SEARCH_BUDGET) -> bool:
    """
    True iff M x = b has an integer solution with sup-norm at most max_minor_bound(M, b).

    Raises:
        ValueError: if the system has no integer solution
        SearchBudgetExceeded: when the bounded enumeration runs out of nodes
    """
    S = solve_integer_system(M, b)
    if S is None:
        raise ValueError("system has no integer solution")
    bound = max_minor_bound(M, b)
    return feasible_within(S, bound, budget) is not None


# =============================================================================
# CSV debug format
# =============================================================================

def dump_matrix_csv(M: IntegerMatrix) -> str:
    """Header `r,d` then one comma-separated row per line."""
    lines = [f"{M.rows},{M.cols}"]
    lines += [",".join(str(v) for v in row) for row in M.entries]
    return "\n".join(lines) + "\n"


def dump_vector_csv(v: Sequence[int]) -> str:
    """A vector in the matrix debug format, as a column."""
    return dump_matrix_csv(IntegerMatrix.from_rows([[x] for x in v], cols=1))


def parse_matrix_csv(text: str) -> IntegerMatrix:
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    rows, cols = (int(v) for v in lines[0].split(","))
    entries = [[int(v) for v in line.split(",")] for line in lines[1: 1 + rows]]
    return IntegerMatrix.from_rows(entries, cols=cols)
