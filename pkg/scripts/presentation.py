#!/usr/bin/env python3
"""
Central-extension presentations of class-2 nilpotent groups.

A presentation describes 1 -> Z -> G -> A -> 1 with A free abelian on
a_1..a_k and Z = Z^m x C_{o_1} x ... x C_{o_l} on c_1..c_r (r = m + l).
The commutator table gamma gives [a_i, a_j] = c_1^{g_ij1} ... c_r^{g_ijr}
under the convention [a, b] = a^-1 b^-1 a b.

Text format (UTF-8, line oriented, '#' starts a comment):

    k m l
    orders o_1 ... o_l
    names a1 a2 ... c1 ...          (optional, k + r labels)
    gamma i j s value               (1-based, i < j)

The JSON form uses the same field names:
    {"k": 2, "m": 1, "l": 0, "orders": [], "gamma": [[1, 2, 1, 1]]}
"""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from utils import load_json_file


class NilconjError(Exception):
    """Base exception for nilconj errors."""
    pass


class PresentationError(NilconjError):
    """Raised when presentation data violates an invariant."""

    def __init__(self, rule: str, message: str):
        self.rule = rule
        super().__init__(f"{rule}: {message}")


class PresentationFormatError(PresentationError):
    """Raised when a presentation file cannot be parsed."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__("format", f"line {line_no}: {message}")


NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def min_abs_residue(value: int, modulus: int) -> int:
    """Representative of value mod modulus with the smallest absolute value."""
    rep = value % modulus
    if 2 * rep > modulus:
        rep -= modulus
    return rep


# =============================================================================
# Presentation datum
# =============================================================================

@dataclass(frozen=True)
class CentralExtensionPresentation:
    """
    Validated group datum. Build instances with validate_presentation().

    gamma[i][j][s] is the exponent of c_{s+1} in [a_{i+1}, a_{j+1}] (0-based
    storage). Torsion entries (s >= m) are canonical residues in [0, o).
    """

    k: int
    m: int
    l: int
    orders: tuple[int, ...]
    gamma: tuple[tuple[tuple[int, ...], ...], ...]
    names: tuple[str, ...]
    _index: dict[str, int] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.names)})

    @property
    def r(self) -> int:
        return self.m + self.l

    @property
    def generator_names(self) -> tuple[str, ...]:
        """Labels of the non-central generators a_1..a_k."""
        return self.names[: self.k]

    @property
    def central_names(self) -> tuple[str, ...]:
        """Labels of the central generators c_1..c_r."""
        return self.names[self.k:]

    def label(self, index: int) -> str:
        return self.names[index]

    def index_of(self, name: str) -> int | None:
        """0-based generator index (central generators follow the k a's)."""
        return self._index.get(name)

    def order_of_central(self, s: int) -> int | None:
        """Order of c_{s+1}, or None when it has infinite order."""
        if s < self.m:
            return None
        return self.orders[s - self.m]

    def reduce_central(self, central: list[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Split a length-r exponent vector into (z, t) with t reduced mod orders."""
        z = tuple(central[: self.m])
        t = tuple(v % o for v, o in zip(central[self.m:], self.orders))
        return z, t

    def to_raw(self) -> dict[str, Any]:
        """Raw (JSON-compatible) form accepted by validate_presentation."""
        entries = []
        for i in range(self.k):
            for j in range(i + 1, self.k):
                for s in range(self.r):
                    value = self.gamma[i][j][s]
                    if value:
                        entries.append([i + 1, j + 1, s + 1, value])
        return {
            "k": self.k,
            "m": self.m,
            "l": self.l,
            "orders": list(self.orders),
            "gamma": entries,
            "names": list(self.names),
        }


# =============================================================================
# Validation
# =============================================================================

def default_names(k: int, r: int) -> tuple[str, ...]:
    return tuple(f"a{i + 1}" for i in range(k)) + tuple(f"c{s + 1}" for s in range(r))


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise PresentationError("count", f"{what} must be an integer, got {value!r}")
    return value


def validate_presentation(
    raw: "Mapping[str, Any] | CentralExtensionPresentation",
) -> CentralExtensionPresentation:
    """
    Validate raw presentation data and complete the commutator table.

    Entries for i > j may be omitted; they are derived by antisymmetry
    (exact on the free part, modulo o on the torsion part).

    Args:
        raw: Mapping with keys k, m, l, orders, gamma ([i, j, s, value] lists,
            1-based) and optional names; or an already validated presentation

    Returns:
        Completed, normalized, immutable presentation

    Raises:
        PresentationError: naming the violated rule
    """
    if isinstance(raw, CentralExtensionPresentation):
        raw = raw.to_raw()

    k = _as_int(raw.get("k"), "k")
    m = _as_int(raw.get("m", 0), "m")
    l = _as_int(raw.get("l", 0), "l")
    if k < 1:
        raise PresentationError("count", f"k must be positive, got {k}")
    if m < 0 or l < 0:
        raise PresentationError("count", f"m and l must be non-negative, got m={m}, l={l}")

    orders = tuple(_as_int(o, "order") for o in raw.get("orders", ()) or ())
    if len(orders) != l:
        raise PresentationError("count", f"expected {l} torsion orders, got {len(orders)}")
    for j, o in enumerate(orders):
        if o < 2:
            raise PresentationError("order", f"order o_{j + 1} = {o} must be at least 2")

    r = m + l
    table = [[[None] * r for _ in range(k)] for _ in range(k)]

    for entry in raw.get("gamma", ()) or ():
        if len(entry) != 4:
            raise PresentationError("index", f"gamma entry must be [i, j, s, value], got {entry!r}")
        i, j, s, value = (_as_int(v, "gamma entry") for v in entry)
        if not (1 <= i <= k and 1 <= j <= k and 1 <= s <= r):
            raise PresentationError("index", f"gamma index ({i}, {j}, {s}) out of range")
        i, j, s = i - 1, j - 1, s - 1
        if i == j:
            if value != 0:
                raise PresentationError("diagonal", f"gamma[{i + 1}][{i + 1}][{s + 1}] = {value} must be 0")
            continue
        if s >= m:
            value %= orders[s - m]
        previous = table[i][j][s]
        if previous is not None and previous != value:
            raise PresentationError(
                "antisymmetry",
                f"conflicting values {previous} and {value} for gamma[{i + 1}][{j + 1}][{s + 1}]",
            )
        table[i][j][s] = value

    gamma = [[[0] * r for _ in range(k)] for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            for s in range(r):
                upper, lower = table[i][j][s], table[j][i][s]
                if s < m:
                    if upper is not None and lower is not None and upper != -lower:
                        raise PresentationError(
                            "antisymmetry",
                            f"gamma[{i + 1}][{j + 1}][{s + 1}] = {upper} but "
                            f"gamma[{j + 1}][{i + 1}][{s + 1}] = {lower}",
                        )
                    value = upper if upper is not None else (-lower if lower is not None else 0)
                    gamma[i][j][s], gamma[j][i][s] = value, -value
                else:
                    o = orders[s - m]
                    if upper is not None and lower is not None and (upper + lower) % o:
                        raise PresentationError(
                            "antisymmetry",
                            f"gamma[{i + 1}][{j + 1}][{s + 1}] + gamma[{j + 1}][{i + 1}][{s + 1}] "
                            f"is not divisible by {o}",
                        )
                    value = upper if upper is not None else ((-lower) % o if lower is not None else 0)
                    gamma[i][j][s], gamma[j][i][s] = value % o, (-value) % o

    names = raw.get("names")
    names = tuple(names) if names else default_names(k, r)
    if len(names) != k + r:
        raise PresentationError("names", f"expected {k + r} generator names, got {len(names)}")
    for name in names:
        if not isinstance(name, str) or not NAME_PATTERN.match(name):
            raise PresentationError("names", f"invalid generator name {name!r}")
    if len(set(names)) != len(names):
        raise PresentationError("names", "generator names must be distinct")

    return CentralExtensionPresentation(
        k=k,
        m=m,
        l=l,
        orders=orders,
        gamma=tuple(tuple(tuple(cell) for cell in row) for row in gamma),
        names=names,
    )


def commutator_bound(P: CentralExtensionPresentation) -> int:
    """
    L = max over i < j of sum_s |gamma_ijs|.

    Torsion entries count with their minimal absolute residue.
    """
    best = 0
    for i in range(P.k):
        for j in range(i + 1, P.k):
            total = 0
            for s in range(P.r):
                value = P.gamma[i][j][s]
                if s >= P.m:
                    value = min_abs_residue(value, P.orders[s - P.m])
                total += abs(value)
            best = max(best, total)
    return best


# =============================================================================
# Builtin presentations
# =============================================================================

def heisenberg() -> CentralExtensionPresentation:
    """Discrete Heisenberg group: [a1, a2] = c1."""
    return validate_presentation({"k": 2, "m": 1, "l": 0, "gamma": [[1, 2, 1, 1]]})


def abelian(k: int, m: int = 0, orders: tuple[int, ...] = ()) -> CentralExtensionPresentation:
    """Z^k x Z^m x C_{o_1} x ... (all commutators trivial)."""
    return validate_presentation({"k": k, "m": m, "l": len(orders), "orders": list(orders), "gamma": []})


# =============================================================================
# Loading
# =============================================================================

def parse_presentation_text(text: str) -> CentralExtensionPresentation:
    """Parse the line-oriented presentation format."""
    header = None
    raw: dict[str, Any] = {"orders": [], "gamma": []}

    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()

        if header is None:
            if len(tokens) != 3:
                raise PresentationFormatError(line_no, "header must be 'k m l'")
            try:
                header = [int(t) for t in tokens]
            except ValueError:
                raise PresentationFormatError(line_no, f"non-integer header {content!r}")
            raw["k"], raw["m"], raw["l"] = header
            continue

        keyword, args = tokens[0], tokens[1:]
        try:
            if keyword == "orders":
                raw["orders"] = [int(t) for t in args]
            elif keyword == "gamma":
                if len(args) != 4:
                    raise PresentationFormatError(line_no, "expected 'gamma i j s value'")
                i, j, s, value = (int(t) for t in args)
                if i >= j:
                    raise PresentationFormatError(line_no, f"gamma lines need i < j, got i={i}, j={j}")
                raw["gamma"].append([i, j, s, value])
            elif keyword == "names":
                raw["names"] = args
            else:
                raise PresentationFormatError(line_no, f"unknown keyword {keyword!r}")
        except ValueError:
            raise PresentationFormatError(line_no, f"non-integer value in {content!r}")

    if header is None:
        raise PresentationFormatError(0, "missing 'k m l' header")

    return validate_presentation(raw)


def parse_presentation_json(data: Mapping[str, Any]) -> CentralExtensionPresentation:
    """Validate a JSON-decoded presentation."""
    if not isinstance(data, Mapping):
        raise PresentationFormatError(0, "JSON presentation must be an object")
    return validate_presentation(data)


def load_presentation(path: str) -> CentralExtensionPresentation:
    """Load a presentation from a .json or text file."""
    file_path = Path(path)
    if not file_path.exists():
        raise FileNotFoundError(f"Presentation not found: {path}")

    if file_path.suffix.lower() == ".json":
        try:
            data = load_json_file(path)
        except json.JSONDecodeError as e:
            raise PresentationFormatError(e.lineno, f"invalid JSON: {e.msg}")
        return parse_presentation_json(data)
    return parse_presentation_text(file_path.read_text(encoding="utf-8"))


def render_presentation_text(P: CentralExtensionPresentation) -> str:
    """Render P in the line-oriented format (inverse of parse_presentation_text)."""
    lines = [f"{P.k} {P.m} {P.l}"]
    if P.l:
        lines.append("orders " + " ".join(str(o) for o in P.orders))
    if P.names != default_names(P.k, P.r):
        lines.append("names " + " ".join(P.names))
    for i, j, s, value in P.to_raw()["gamma"]:
        lines.append(f"gamma {i} {j} {s} {value}")
    return "\n".join(lines) + "\n"
