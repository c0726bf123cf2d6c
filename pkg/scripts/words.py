#!/usr/bin/env python3
"""
Words, normal forms and collection for class-2 central extensions.

Every element of G has a unique normal form

    a_1^x_1 ... a_k^x_k  c_1^z_1 ... c_m^z_m  c_{m+1}^t_1 ... c_r^t_l

with 0 <= t_j < o_j. collect() computes it from a word by pushing a_1
letters to the left, then a_2 letters, and so on, emitting central
corrections from the commutator table as letters are pushed past each other.
Group arithmetic on normal forms uses the closed-form bilinear correction.

Words are stored as syllables (generator, exponent) so a_1^(n^4) costs one
syllable; len(word) is still the number of letters.
"""

import re
from dataclasses import dataclass
from typing import Iterator

from presentation import CentralExtensionPresentation, NilconjError, min_abs_residue


class WordParseError(NilconjError):
    """Raised when a word cannot be parsed; carries the offending token."""

    def __init__(self, token: str, message: str):
        self.token = token
        super().__init__(f"{message}: {token!r}")


TOKEN_PATTERN = re.compile(r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<exp>.*))?$")
EXPONENT_PATTERN = re.compile(r"^[+-]?\d+$")


# =============================================================================
# Words
# =============================================================================

@dataclass(frozen=True)
class Word:
    """
    A sequence of signed generator letters, stored run-length.

    Generator ids are 0-based: 0..k-1 are a_1..a_k, k..k+r-1 are c_1..c_r.
    Adjacent syllables of the same generator and sign are merged, so two
    Words are equal exactly when their letter sequences are equal.
    """

    syllables: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: list[tuple[int, int]] = []
        for gen, exp in self.syllables:
            if exp == 0:
                continue
            if merged and merged[-1][0] == gen and (merged[-1][1] > 0) == (exp > 0):
                merged[-1] = (gen, merged[-1][1] + exp)
            else:
                merged.append((gen, exp))
        object.__setattr__(self, "syllables", tuple(merged))

    def __len__(self) -> int:
        return sum(abs(exp) for _, exp in self.syllables)

    def __add__(self, other: "Word") -> "Word":
        return Word(self.syllables + other.syllables)

    def letters(self) -> Iterator[tuple[int, int]]:
        """Yield (generator id, sign) letter by letter."""
        for gen, exp in self.syllables:
            sign = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                yield gen, sign

    def inverse(self) -> "Word":
        """Reversed word with every letter inverted."""
        return Word(tuple((gen, -exp) for gen, exp in reversed(self.syllables)))

    def power(self, e: int) -> "Word":
        if e < 0:
            return self.inverse().power(-e)
        return Word(self.syllables * e)

    @classmethod
    def from_letters(cls, letters) -> "Word":
        return cls(tuple((gen, sign) for gen, sign in letters))


EMPTY_WORD = Word()


def parse_word(P: CentralExtensionPresentation, text: str) -> Word:
    """
    Parse whitespace-separated tokens `name` or `name^e`.

    The token `1` denotes the identity and contributes no letters.

    Raises:
        WordParseError: unknown generator name or malformed exponent
    """
    syllables = []
    for token in text.split():
        if token == "1":
            continue
        match = TOKEN_PATTERN.match(token)
        if not match:
            raise WordParseError(token, "Malformed token")
        name, exp_text = match.group("name"), match.group("exp")
        gen = P.index_of(name)
        if gen is None:
            raise WordParseError(token, f"Unknown generator {name!r}")
        if exp_text is None:
            exp = 1
        elif EXPONENT_PATTERN.match(exp_text):
            exp = int(exp_text)
        else:
            raise WordParseError(token, "Malformed exponent")
        syllables.append((gen, exp))
    return Word(tuple(syllables))


def render_word(P: CentralExtensionPresentation, w: Word) -> str:
    """Render a word in the syntax accepted by parse_word."""
    parts = []
    for gen, exp in w.syllables:
        name = P.label(gen)
        parts.append(name if exp == 1 else f"{name}^{exp}")
    return " ".join(parts)


def from_exponents(P: CentralExtensionPresentation, x) -> Word:
    """The word a_1^x_1 ... a_k^x_k."""
    return Word(tuple((i, e) for i, e in enumerate(x) if e))


# =============================================================================
# Normal forms
# =============================================================================

@dataclass(frozen=True)
class NormalForm:
    """Exponent data of a normal form; equality here is equality in G."""

    x: tuple[int, ...]
    z: tuple[int, ...]
    t: tuple[int, ...]

    @property
    def central(self) -> tuple[int, ...]:
        return self.z + self.t

    def is_central(self) -> bool:
        return not any(self.x)


def nf_identity(P: CentralExtensionPresentation) -> NormalForm:
    return NormalForm((0,) * P.k, (0,) * P.m, (0,) * P.l)


def _make_nf(P: CentralExtensionPresentation, x, central) -> NormalForm:
    z, t = P.reduce_central(central)
    return NormalForm(tuple(x), z, t)


def _correction(P: CentralExtensionPresentation, left_x, right_x) -> list[int]:
    """Central correction of (a^left_x)(a^right_x): sum over i < j of left_j right_i gamma_ji."""
    out = [0] * P.r
    for i in range(P.k):
        yi = right_x[i]
        if not yi:
            continue
        for j in range(i + 1, P.k):
            xj = left_x[j]
            if not xj:
                continue
            row = P.gamma[j][i]
            coeff = xj * yi
            for s in range(P.r):
                if row[s]:
                    out[s] += coeff * row[s]
    return out


def collect(P: CentralExtensionPresentation, w: Word) -> NormalForm:
    """
    Normal form of the element represented by w.

    Sweeps a_1 letters to the left, then a_2, ..., accumulating the
    commutator each push produces; central letters are moved to the end.
    """
    k, r = P.k, P.r
    x = [0] * k
    central = [0] * r
    remaining = []
    for gen, exp in w.syllables:
        if gen >= k:
            central[gen - k] += exp
        else:
            remaining.append((gen, exp))

    for s in range(k):
        passed = [0] * k
        rest = []
        for gen, exp in remaining:
            if gen != s:
                passed[gen] += exp
                rest.append((gen, exp))
                continue
            x[s] += exp
            # a_j^p a_s^e = a_s^e a_j^p [a_j, a_s]^(p e)
            for j in range(s + 1, k):
                p = passed[j]
                if p:
                    row = P.gamma[j][s]
                    for c in range(r):
                        if row[c]:
                            central[c] += p * exp * row[c]
        remaining = rest

    return _make_nf(P, x, central)


def nf_multiply(P: CentralExtensionPresentation, g: NormalForm, h: NormalForm) -> NormalForm:
    """Normal form of gh."""
    x = [gi + hi for gi, hi in zip(g.x, h.x)]
    central = [a + b for a, b in zip(g.central, h.central)]
    for s, value in enumerate(_correction(P, g.x, h.x)):
        central[s] += value
    return _make_nf(P, x, central)


def nf_invert(P: CentralExtensionPresentation, g: NormalForm) -> NormalForm:
    """Normal form of g^-1."""
    x = [-v for v in g.x]
    central = [-v for v in g.central]
    for s, value in enumerate(_correction(P, g.x, g.x)):
        central[s] += value
    return _make_nf(P, x, central)


def nf_power(P: CentralExtensionPresentation, g: NormalForm, e: int) -> NormalForm:
    """Normal form of g^e for any integer e (closed form)."""
    quad = _correction(P, g.x, g.x)
    tri = e * (e - 1) // 2
    x = [e * v for v in g.x]
    central = [e * c + tri * q for c, q in zip(g.central, quad)]
    return _make_nf(P, x, central)


def nf_conjugate(P: CentralExtensionPresentation, g: NormalForm, w: NormalForm) -> NormalForm:
    """Normal form of w^-1 g w."""
    return nf_multiply(P, nf_multiply(P, nf_invert(P, w), g), w)


def commutator(P: CentralExtensionPresentation, g: NormalForm, h: NormalForm) -> NormalForm:
    """Normal form of [g, h] = g^-1 h^-1 g h."""
    left = nf_multiply(P, nf_invert(P, g), nf_invert(P, h))
    return nf_multiply(P, left, nf_multiply(P, g, h))


def nf_to_word(P: CentralExtensionPresentation, g: NormalForm) -> Word:
    """
    Read a normal form as a word.

    Torsion exponents use the shorter signed representative, so
    t_j = o_j - 1 is emitted as c^-1.
    """
    syllables = [(i, e) for i, e in enumerate(g.x) if e]
    syllables += [(P.k + s, e) for s, e in enumerate(g.z) if e]
    for j, (t, o) in enumerate(zip(g.t, P.orders)):
        rep = min_abs_residue(t, o)
        if rep:
            syllables.append((P.k + P.m + j, rep))
    return Word(tuple(syllables))


def render_normal_form(P: CentralExtensionPresentation, g: NormalForm) -> str:
    """Canonical rendering a^x c^z c^t with 0 <= t < o; `1` for the identity."""
    syllables = [(i, e) for i, e in enumerate(g.x) if e]
    syllables += [(P.k + s, e) for s, e in enumerate(g.central) if e]
    return render_word(P, Word(tuple(syllables))) or "1"


def word_of_generator(P: CentralExtensionPresentation, gen: int, sign: int = 1) -> NormalForm:
    """Normal form of a single letter."""
    x = [0] * P.k
    central = [0] * P.r
    if gen < P.k:
        x[gen] = sign
    else:
        central[gen - P.k] = sign
    return _make_nf(P, x, central)
