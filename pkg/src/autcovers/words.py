"""Free-group words and endomorphisms given by generator images.

A word is a tuple of nonzero signed generator indices: ``3`` is x3 and ``-3``
is its inverse X3.  Generators are 1-indexed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, RankMismatch

_TOKEN = re.compile(r"([xX])(\d+)")


def _check_rank(letters: Iterable[int], rank: int | None) -> None:
    for a in letters:
        if a == 0 or (rank is not None and abs(a) > rank):
            raise IndexOutOfRange(f"letter {a} outside generators 1..{rank}")


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """Freely reduced word; construct through :func:`free_reduce` or :meth:`parse`."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce(int(a) for a in self.letters))
        _check_rank(self.letters, None)

    @classmethod
    def parse(cls, text: str | Sequence[str], rank: int | None = None) -> "Word":
        """Read ``x1 X2 x3`` style text (tokens may be concatenated: ``x1x2X1``).

        A list of tokens is accepted as well; ``"1"`` or ``""`` mean the empty word.
        """
        if not isinstance(text, str):
            text = " ".join(text)
        body = re.sub(r"\s+", "", text)
        if body in ("", "1", "e"):
            return cls(())
        letters = []
        pos = 0
        for m in _TOKEN.finditer(body):
            if m.start() != pos:
                raise ValueError(f"unreadable word {text!r} at position {pos}")
            idx = int(m.group(2))
            letters.append(idx if m.group(1) == "x" else -idx)
            pos = m.end()
        if pos != len(body):
            raise ValueError(f"unreadable word {text!r} at position {pos}")
        return free_reduce(letters, rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(-a for a in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k))

    @property
    def rank(self) -> int:
        """Largest generator index occurring (0 for the empty word)."""
        return max((abs(a) for a in self.letters), default=0)

    def pairs(self) -> list[tuple[int, int]]:
        return [(abs(a), 1 if a > 0 else -1) for a in self.letters]

    def tokens(self) -> list[str]:
        return [f"x{a}" if a > 0 else f"X{-a}" for a in self.letters]

    def __str__(self) -> str:
        return " ".join(self.tokens()) or "1"


def free_reduce(letters: Iterable[int], rank: int | None = None) -> Word:
    letters = [int(a) for a in letters]
    _check_rank(letters, rank)
    return Word(tuple(letters))


def gen(i: int) -> Word:
    return Word((i,))


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


def exponent_sums(w: Word, rank: int) -> list[int]:
    out = [0] * rank
    for a in w.letters:
        if abs(a) > rank:
            raise IndexOutOfRange(f"letter {a} outside generators 1..{rank}")
        out[abs(a) - 1] += 1 if a > 0 else -1
    return out


@dataclass(frozen=True)
class Endomorphism:
    """Endomorphism of F_rank, ``images[i]`` being the image of x_{i+1}.

    Automorphism status is asserted by the caller, never decided; see
    :meth:`check_unimodular` for the cheap necessary condition.
    """

    rank: int
    images: tuple[Word, ...]

    def __post_init__(self):
        images = tuple(w if isinstance(w, Word) else free_reduce(w) for w in self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.rank:
            raise RankMismatch(f"{len(images)} images for rank {self.rank}")
        for w in images:
            _check_rank(w.letters, self.rank)

    @classmethod
    def identity(cls, rank: int) -> "Endomorphism":
        return cls(rank, tuple(gen(i) for i in range(1, rank + 1)))

    @classmethod
    def parse(cls, rank: int, images: Sequence[str | Sequence[str]]) -> "Endomorphism":
        return cls(rank, tuple(Word.parse(w, rank) for w in images))

    def __call__(self, w: Word) -> Word:
        return apply_endo(self, w)

    @cached_property
    def abelianization(self) -> np.ndarray:
        """Row i holds the exponent sums of the image of x_{i+1}."""
        return np.array([exponent_sums(w, self.rank) for w in self.images], dtype=object).reshape(
            self.rank, self.rank
        )

    @cached_property
    def torelli(self) -> bool:
        """True when the action on the abelianization is trivial."""
        return all(
            self.abelianization[i, j] == (1 if i == j else 0)
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def check_unimodular(self) -> bool:
        ab = np.array(self.abelianization, dtype=float)
        return self.rank == 0 or abs(round(np.linalg.det(ab))) == 1

    def image_tokens(self) -> list[list[str]]:
        return [w.tokens() for w in self.images]

    def __str__(self) -> str:
        return "(" + ", ".join(str(w) for w in self.images) + ")"


def apply_endo(psi: Endomorphism, w: Word) -> Word:
    out: list[int] = []
    for a in w.letters:
        if abs(a) > psi.rank:
            raise IndexOutOfRange(f"letter {a} outside generators 1..{psi.rank}")
        img = psi.images[abs(a) - 1].letters
        out.extend(img if a > 0 else (-b for b in reversed(img)))
    return Word(tuple(out))


def compose(psi1: Endomorphism, psi2: Endomorphism) -> Endomorphism:
    """``psi1 o psi2``: x_i -> psi1(psi2(x_i))."""
    if psi1.rank != psi2.rank:
        raise RankMismatch(f"ranks {psi1.rank} and {psi2.rank}")
    return Endomorphism(psi1.rank, tuple(apply_endo(psi1, w) for w in psi2.images))


def power(psi: Endomorphism, k: int) -> Endomorphism:
    if k < 0:
        raise ValueError("automatic inversion is not supported")
    out = Endomorphism.identity(psi.rank)
    for _ in range(k):
        out = compose(psi, out)
    return out


def inner(rank: int, g: Word) -> Endomorphism:
    """Conjugation x -> g x g^-1."""
    _check_rank(g.letters, rank)
    return Endomorphism(rank, tuple(g * gen(i) * g.inverse() for i in range(1, rank + 1)))


def partial_conjugation(rank: int, target: int, by: Word | int) -> Endomorphism:
    """x_target -> g x_target g^-1 with every other generator fixed."""
    g = gen(by) if isinstance(by, int) else by
    images = [gen(i) for i in range(1, rank + 1)]
    images[target - 1] = g * gen(target) * g.inverse()
    return Endomorphism(rank, tuple(images))


def commutator_transvection(rank: int, target: int, a: int, b: int) -> Endomorphism:
    """x_target -> x_target [x_a, x_b]; Torelli whenever target not in {a, b}."""
    images = [gen(i) for i in range(1, rank + 1)]
    images[target - 1] = gen(target) * commutator(gen(a), gen(b))
    return Endomorphism(rank, tuple(images))


def is_torelli_for(psi: Endomorphism, phi) -> bool:
    """Whether ``phi(psi(x_i)) == phi(x_i)`` for every generator.

    For the full abelianization this is the Torelli condition; in general it is
    exactly what is needed for ``psi`` to commute with the deck group of the
    cover defined by ``phi``.
    """
    if phi.rank != psi.rank:
        raise RankMismatch(f"quotient of rank {phi.rank} vs endomorphism of rank {psi.rank}")
    return all(phi.evaluate(w) == phi.evaluate(gen(i + 1)) for i, w in enumerate(psi.images))
