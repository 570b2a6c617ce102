"""Free nilpotent quotients F/gamma_{c+1} and the Johnson filtration.

Elements are modelled through the truncated Magnus expansion
x_i -> 1 + X_i in Z<<X_1..X_n>> modulo degree c+1, which is faithful on the
class-c free nilpotent group.  Normal forms use a Hall basis indexed by
Lyndon words (standard bracketing): an element is written uniquely as the
ordered product of basic commutators b^e, degree by degree.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import BadDegree, DepthMismatch, IndexOutOfRange, InvalidParams, NoWitness
from .words import Endomorphism, Word, apply_endo, commutator, gen

MAX_RANK = 4
MAX_DEGREE = 6

Series = dict  # monomial tuple -> int


# -- truncated noncommutative series ---------------------------------------

def _mul(a: Series, b: Series, c: int) -> Series:
    out: Series = {}
    for u, x in a.items():
        room = c - len(u)
        for v, y in b.items():
            if len(v) <= room:
                k = u + v
                out[k] = out.get(k, 0) + x * y
    return {k: v for k, v in out.items() if v}


def _one() -> Series:
    return {(): 1}


def _letter(a: int, c: int) -> Series:
    j = abs(a)
    if a > 0:
        return {(): 1, (j,): 1} if c >= 1 else _one()
    # (1 + X)^-1 = sum (-X)^m
    return {(j,) * m: (-1) ** m for m in range(c + 1)}


def magnus_series(w: Word, c: int) -> Series:
    out = _one()
    for a in w.letters:
        out = _mul(out, _letter(a, c), c)
    return out


def _inverse(s: Series, c: int) -> Series:
    # s = 1 + y with y of positive degree: s^-1 = sum (-y)^m
    y = {k: -v for k, v in s.items() if k}
    out, term = _one(), _one()
    for _ in range(c):
        term = _mul(term, y, c)
        if not term:
            break
        for k, v in term.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def _power(s: Series, e: int, c: int) -> Series:
    if e < 0:
        s, e = _inverse(s, c), -e
    out = _one()
    while e:
        if e & 1:
            out = _mul(out, s, c)
        s = _mul(s, s, c)
        e >>= 1
    return out


def lowest_degree(s: Series) -> int | None:
    """Smallest positive degree of s - 1, or None if s = 1."""
    degs = [len(k) for k, v in s.items() if k and v]
    return min(degs) if degs else None


def substitute(s: Series, images: list[Series], c: int) -> Series:
    """Apply the algebra endomorphism X_j -> images[j-1] (no constant terms)."""
    cache: dict[tuple, Series] = {(): _one()}

    def mono(k):
        if k not in cache:
            cache[k] = _mul(mono(k[:-1]), images[k[-1] - 1], c)
        return cache[k]

    out: Series = {}
    for k, v in s.items():
        for m, x in mono(k).items():
            out[m] = out.get(m, 0) + v * x
    return {k: v for k, v in out.items() if v}


def endomorphism_images(psi: Endomorphism, c: int) -> list[Series]:
    out = []
    for img in psi.images:
        s = magnus_series(img, c)
        s.pop((), None)
        out.append(s)
    return out


# -- Lyndon words and the Hall basis ---------------------------------------

def lyndon_words(n: int, c: int) -> list[tuple[int, ...]]:
    """Lyndon words over 1..n of length <= c, in lexicographic order (Duval)."""
    out = []
    w = [0]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < c:
            w.append(w[len(w) - m])
        while w and w[-1] == n:
            w.pop()
    return out


def _standard_split(w: tuple[int, ...], lyndon: set) -> tuple[tuple, tuple]:
    for i in range(1, len(w)):
        if w[i:] in lyndon:
            return w[:i], w[i:]
    raise ValueError("not a Lyndon word of length >= 2")


@dataclass(frozen=True, eq=False)
class HallBasis:
    rank: int
    cutoff: int
    words: tuple[tuple[int, ...], ...]  # sorted by (degree, lex)

    @cached_property
    def position(self) -> dict[tuple[int, ...], int]:
        return {w: i for i, w in enumerate(self.words)}

    def degree(self, i: int) -> int:
        return len(self.words[i])

    def counts(self) -> list[int]:
        out = [0] * self.cutoff
        for w in self.words:
            out[len(w) - 1] += 1
        return out

    @cached_property
    def _split(self) -> dict:
        ly = set(self.words)
        return {w: _standard_split(w, ly) for w in self.words if len(w) > 1}

    def element_word(self, w: tuple[int, ...]) -> Word:
        """The basic commutator of w as a free-group word."""
        if len(w) == 1:
            return gen(w[0])
        u, v = self._split[w]
        return commutator(self.element_word(u), self.element_word(v))

    def label(self, w: tuple[int, ...]) -> str:
        if len(w) == 1:
            return f"x{w[0]}"
        u, v = self._split[w]
        return f"[{self.label(u)},{self.label(v)}]"

    @cached_property
    def series(self) -> list[Series]:
        return [magnus_series(self.element_word(w), self.cutoff) for w in self.words]

    def by_degree(self, d: int) -> list[int]:
        return [i for i, w in enumerate(self.words) if len(w) == d]

    def labels(self) -> list[str]:
        return [self.label(w) for w in self.words]


def hall_basis(n: int, c: int, max_rank: int = MAX_RANK, max_degree: int = MAX_DEGREE) -> HallBasis:
    if n < 1 or c < 1:
        raise InvalidParams("rank and cutoff must be positive")
    if n > max_rank or c > max_degree:
        raise InvalidParams(f"rank {n}, cutoff {c} exceed the configured caps ({max_rank}, {max_degree})")
    words = sorted(lyndon_words(n, c), key=lambda w: (len(w), w))
    return HallBasis(n, c, tuple(words))


# -- normal forms --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NilpotentElement:
    basis: HallBasis
    exponents: tuple[int, ...]

    def __eq__(self, other):
        return (
            isinstance(other, NilpotentElement)
            and self.basis.rank == other.basis.rank
            and self.basis.cutoff == other.basis.cutoff
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.basis.rank, self.basis.cutoff, self.exponents))

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def series(self) -> Series:
        B, c = self.basis, self.basis.cutoff
        out = _one()
        for s, e in zip(B.series, self.exponents):
            if e:
                out = _mul(out, _power(s, e, c), c)
        return out

    def __mul__(self, other: "NilpotentElement") -> "NilpotentElement":
        return collect_series(_mul(self.series(), other.series(), self.basis.cutoff), self.basis)

    def inverse(self) -> "NilpotentElement":
        return collect_series(_inverse(self.series(), self.basis.cutoff), self.basis)

    def lowest_degree(self) -> int | None:
        degs = [len(w) for w, e in zip(self.basis.words, self.exponents) if e]
        return min(degs) if degs else None

    def coefficient(self, w) -> int:
        return self.exponents[self.basis.position[tuple(w)]]

    def terms(self) -> dict[str, int]:
        return {self.basis.label(w): e for w, e in zip(self.basis.words, self.exponents) if e}

    def __str__(self):
        t = self.terms()
        return " * ".join(f"{k}^{v}" if v != 1 else k for k, v in t.items()) or "1"

    def to_json(self) -> dict:
        return {"cutoff": self.basis.cutoff, "exponents": list(self.exponents), "terms": self.terms()}


def collect_series(s: Series, basis: HallBasis) -> NilpotentElement:
    """Normal form of the group element with Magnus series s (peeling from the left)."""
    c = basis.cutoff
    exps = [0] * len(basis.words)
    rest = s
    for d in range(1, c + 1):
        part = {k: v for k, v in rest.items() if len(k) == d}
        if not part:
            continue
        # P(w) = w + lexicographically larger words, so solve in increasing lex order
        peel = _one()
        for i in basis.by_degree(d):
            w = basis.words[i]
            e = part.get(w, 0)
            if not e:
                continue
            exps[i] = e
            lie = {k: v for k, v in basis.series[i].items() if len(k) == d}
            for k, v in lie.items():
                part[k] = part.get(k, 0) - e * v
            peel = _mul(peel, _power(basis.series[i], e, c), c)
        if any(part.values()):
            raise ArithmeticError("degree piece is not a Lie element")
        rest = _mul(_inverse(peel, c), rest, c)
    return NilpotentElement(basis, tuple(exps))


def collect(w: Word, basis: HallBasis) -> NilpotentElement:
    if w.letters and max(abs(a) for a in w.letters) > basis.rank:
        raise IndexOutOfRange(f"{w} uses generators beyond rank {basis.rank}")
    return collect_series(magnus_series(w, basis.cutoff), basis)


# -- Johnson filtration --------------------------------------------------------

@dataclass(frozen=True)
class AtLeast:
    k: int

    def to_json(self) -> dict:
        return {"at_least": self.k}


def _perturbations(psi: Endomorphism, c: int) -> list[Series]:
    return [magnus_series(apply_endo(psi, gen(i)) * gen(i).inverse(), c) for i in range(1, psi.rank + 1)]


def johnson_depth(psi: Endomorphism, max_k: int) -> int | AtLeast:
    """Largest k with psi in J_k (trivial on N_k), certified by nontriviality on N_{k+1}."""
    if max_k < 0:
        raise InvalidParams("max_k must be nonnegative")
    lows = [lowest_degree(s) for s in _perturbations(psi, max_k + 1)]
    lows = [d for d in lows if d is not None]
    if not lows:
        return AtLeast(max_k)
    return min(lows) - 1


@dataclass(frozen=True)
class DepthWitness:
    depth: int
    generator: Word
    perturbation: NilpotentElement

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "generator": str(self.generator),
            "perturbation": self.perturbation.terms(),
        }


def central_perturbation_witness(psi: Endomorphism, max_k: int) -> DepthWitness:
    """A generator g with psi(g) = g z, z nontrivial and central in N_{k+1}."""
    k = johnson_depth(psi, max_k)
    if isinstance(k, AtLeast):
        raise NoWitness(f"psi is trivial on N_{max_k}")
    B = hall_basis(psi.rank, k + 1, max_degree=max(MAX_DEGREE, k + 1))
    for i in range(1, psi.rank + 1):
        z = collect(apply_endo(psi, gen(i)) * gen(i).inverse(), B)
        if not z.is_trivial():
            return DepthWitness(k + 1, gen(i), z)
    raise NoWitness("no generator is moved")  # unreachable for a certified depth


@dataclass(frozen=True)
class ShiftResult:
    found: bool
    g: Word | None = None
    iterates: tuple[NilpotentElement, ...] = ()

    def __bool__(self):
        return self.found

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "g": None if self.g is None else str(self.g),
            "iterates": [e.terms() for e in self.iterates],
        }


def _check_depth(psi: Endomorphism, k: int) -> None:
    d = johnson_depth(psi, k + 1)
    if isinstance(d, int) and d != k:
        raise DepthMismatch(f"psi has Johnson depth {d}, not {k}")


def _candidates(psi: Endomorphism, i: int, c: int) -> list[Word]:
    B = hall_basis(psi.rank, i, max_degree=max(MAX_DEGREE, c))
    base = [B.element_word(w) for w in B.words if len(w) == i]
    return base + [apply_endo(psi, g) for g in base]


def shift_witness(
    psi: Endomorphism, k: int, i: int, N: int, g: Word | None = None
) -> ShiftResult:
    """Search g in gamma_i whose iterates psi^0(g), ..., psi^N(g) are pairwise
    distinct modulo gamma_{i+k+1}.  A negative answer is a failed search only."""
    if i < 1 or N < 2 or k < 0:
        raise InvalidParams("need i >= 1, N >= 2, k >= 0")
    _check_depth(psi, k)
    c = i + k
    B = hall_basis(psi.rank, c, max_degree=max(MAX_DEGREE, c))
    images = endomorphism_images(psi, c)
    cands = [g] if g is not None else _candidates(psi, i, c)
    for cand in cands:
        s = magnus_series(cand, c)
        low = lowest_degree(s)
        if low is not None and low < i:
            if g is not None:
                raise InvalidParams(f"{g} is not in gamma_{i}")
            continue
        its = [collect_series(s, B)]
        for _ in range(N):
            s = substitute(s, images, c)
            its.append(collect_series(s, B))
        if len(set(its)) == N + 1:
            return ShiftResult(True, cand, tuple(its))
    return ShiftResult(False)


def nilpotent_cover_action_witness(psi: Endomorphism, k: int, i: int, N: int) -> ShiftResult:
    """Distinct iterates modulo gamma_{i+k+1}; for i >= k+1 this survives into the
    homology of the universal i-step nilpotent cover, since [gamma_i, gamma_i] lies in gamma_{2i}."""
    if i < k + 1:
        raise BadDegree(f"need i >= k + 1 = {k + 1}, got i = {i}")
    return shift_witness(psi, k, i, N)
