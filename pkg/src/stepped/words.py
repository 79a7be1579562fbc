"""Free-group words, morphisms of the free group and Brun substitutions.

A word is a tuple of nonzero ints: ``k`` stands for the letter k and
``-k`` for its inverse.  Words handed around by this module are always
reduced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from . import linalg
from .linalg import IntMatrix

Word = tuple[int, ...]


def reduce_word(w, d: int | None = None) -> Word:
    """Free reduction of a raw signed-letter sequence.

    ``d`` (optional) bounds the alphabet; letters outside ``1..d`` raise.
    """
    out: list[int] = []
    for letter in w:
        letter = int(letter)
        if letter == 0 or (d is not None and abs(letter) > d):
            raise ValueError(f"letter {letter} out of range")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def abelianize(w, d: int) -> tuple[int, ...]:
    v = [0] * d
    for letter in w:
        if letter == 0 or abs(letter) > d:
            raise ValueError(f"letter {letter} out of range")
        v[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(v)


def format_word(w: Word) -> str:
    return "".join(f"{abs(x)}'" if x < 0 else str(x) for x in w)


@dataclass(frozen=True)
class Morphism:
    """Morphism of the free group F_d given by the images of its letters."""

    images: tuple[Word, ...]

    def __post_init__(self):
        d = len(self.images)
        object.__setattr__(self, "images", tuple(reduce_word(w, d) for w in self.images))

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, w) -> Word:
        out: list[int] = []
        for letter in w:
            img = self.images[abs(letter) - 1]
            out.extend(img if letter > 0 else inverse_word(img))
        return reduce_word(out, self.d)

    @cached_property
    def matrix(self) -> IntMatrix:
        cols = [abelianize(w, self.d) for w in self.images]
        return linalg.transpose(cols)

    def __str__(self) -> str:
        return format_morphism(self)


def identity_morphism(d: int) -> Morphism:
    return Morphism(tuple((k,) for k in range(1, d + 1)))


def incidence_matrix(sigma: Morphism) -> IntMatrix:
    """Column ``i`` is the abelianization of ``sigma(i)``."""
    return sigma.matrix


def is_unimodular(sigma: Morphism) -> bool:
    return abs(linalg.det(sigma.matrix)) == 1


def compose(sigma: Morphism, tau: Morphism) -> Morphism:
    """``sigma o tau``: apply ``tau`` first, then ``sigma``."""
    if sigma.d != tau.d:
        raise ValueError("dimension mismatch")
    return Morphism(tuple(sigma(w) for w in tau.images))


def _check_brun(a: int, i: int, j: int, d: int):
    if a < 1:
        raise ValueError("Brun substitution needs a >= 1")
    if i == j:
        raise ValueError("Brun substitution needs i != j")
    if not (1 <= i <= d and 1 <= j <= d):
        raise ValueError("index out of range")


def brun_substitution(a: int, i: int, j: int, d: int = 3) -> Morphism:
    """i -> i^a j, j -> i, other letters fixed."""
    _check_brun(a, i, j, d)
    images = [(k,) for k in range(1, d + 1)]
    images[i - 1] = (i,) * a + (j,)
    images[j - 1] = (i,)
    return Morphism(tuple(images))


def brun_substitution_inverse(a: int, i: int, j: int, d: int = 3) -> Morphism:
    """i -> j, j -> j^-a i, other letters fixed."""
    _check_brun(a, i, j, d)
    images = [(k,) for k in range(1, d + 1)]
    images[i - 1] = (j,)
    images[j - 1] = (-j,) * a + (i,)
    return Morphism(tuple(images))


def brun_matrix(a: int, i: int, j: int, d: int = 3) -> IntMatrix:
    m = [list(row) for row in linalg.identity(d)]
    m[i - 1][i - 1] = a
    m[i - 1][j - 1] = 1
    m[j - 1][i - 1] = 1
    m[j - 1][j - 1] = 0
    return linalg.as_matrix(m)


# --- text format -----------------------------------------------------------

class MorphismSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_ENTRY = re.compile(r"\s*([1-9])\s*:\s*")


def parse_morphism(text: str, d: int | None = None) -> Morphism:
    """Parse ``"1:12,2:13,3:1"``; an apostrophe after a digit inverts it."""
    entries: dict[int, list[int]] = {}
    pos = 0
    n = len(text)
    while True:
        m = _ENTRY.match(text, pos)
        if not m:
            raise MorphismSyntaxError("expected 'L:' entry", pos)
        letter = int(m.group(1))
        if letter in entries:
            raise MorphismSyntaxError(f"letter {letter} defined twice", m.start(1))
        pos = m.end()
        word: list[int] = []
        while pos < n and text[pos] != ",":
            ch = text[pos]
            if ch.isspace():
                pos += 1
            elif ch in "123456789":
                word.append(int(ch))
                pos += 1
            elif ch == "'" and word and word[-1] > 0:
                word[-1] = -word[-1]
                pos += 1
            else:
                raise MorphismSyntaxError(f"unexpected {ch!r}", pos)
        if not word:
            raise MorphismSyntaxError("empty image", pos)
        entries[letter] = word
        if pos >= n:
            break
        pos += 1  # comma
    size = d if d is not None else len(entries)
    if sorted(entries) != list(range(1, size + 1)):
        raise ValueError(f"letters 1..{size} must each appear exactly once on the left")
    for letter, word in entries.items():
        for x in word:
            if abs(x) > size:
                raise ValueError(f"letter {abs(x)} out of range in image of {letter}")
    return Morphism(tuple(tuple(entries[k]) for k in range(1, size + 1)))


def format_morphism(sigma: Morphism) -> str:
    if sigma.d > 9:
        raise ValueError("text format supports d <= 9")
    return ",".join(f"{k}:{format_word(w)}" for k, w in enumerate(sigma.images, start=1))
