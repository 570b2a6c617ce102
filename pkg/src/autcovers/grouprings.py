"""Group rings of finitely generated abelian groups, characters and specialization.

The abelian group is described by its moduli ``(m_1, ..., m_r)``; a modulus of
0 stands for an infinite cyclic factor, so the integral Laurent ring in r
variables is the group ring with all moduli 0.  Group elements are residue
tuples, and the basis of Z[A] for finite A is the lexicographic order on
residue tuples.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AmbientMismatch, IndexOutOfRange, InfiniteGroup, ValidationError

Residue = tuple[int, ...]


def _reduce_residue(g: Iterable[int], moduli: Sequence[int]) -> Residue:
    return tuple(int(x) % m if m else int(x) for x, m in zip(g, moduli))


@dataclass(frozen=True)
class AbelianQuotientSpec:
    """Homomorphism from F_rank onto A = (+) Z/m_j given by generator images."""

    rank: int
    moduli: tuple[int, ...]
    images: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        problems = []
        if self.rank < 0:
            problems.append("rank must be nonnegative")
        if any(m < 0 for m in moduli):
            problems.append("moduli must be >= 0")
        if len(self.images) != self.rank:
            problems.append(f"{len(self.images)} image rows for rank {self.rank}")
        if any(len(row) != len(moduli) for row in self.images):
            problems.append("image rows must have one entry per modulus")
        if problems:
            raise ValidationError(problems)
        images = tuple(_reduce_residue(row, moduli) for row in self.images)
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "images", images)

    @classmethod
    def full_abelianization(cls, rank: int) -> "AbelianQuotientSpec":
        return cls(rank, (0,) * rank, tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank)))

    @classmethod
    def trivial(cls, rank: int) -> "AbelianQuotientSpec":
        return cls(rank, (), tuple(() for _ in range(rank)))

    @classmethod
    def cyclic(cls, rank: int, m: int, images: Sequence[int]) -> "AbelianQuotientSpec":
        return cls(rank, (m,), tuple((int(e),) for e in images))

    @property
    def is_finite(self) -> bool:
        return all(m > 0 for m in self.moduli)

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise InfiniteGroup("quotient has an infinite cyclic factor")
        return math.prod(self.moduli)

    @property
    def identity(self) -> Residue:
        return (0,) * len(self.moduli)

    def reduce(self, g: Iterable[int]) -> Residue:
        return _reduce_residue(g, self.moduli)

    def add(self, g: Residue, h: Residue, sign: int = 1) -> Residue:
        return tuple(
            (a + sign * b) % m if m else a + sign * b for a, b, m in zip(g, h, self.moduli)
        )

    def evaluate(self, word) -> Residue:
        acc = [0] * len(self.moduli)
        for a in word:
            if a == 0 or abs(a) > self.rank:
                raise IndexOutOfRange(f"letter {a} outside generators 1..{self.rank}")
            row = self.images[abs(a) - 1]
            s = 1 if a > 0 else -1
            for j, e in enumerate(row):
                acc[j] += s * e
        return self.reduce(acc)

    @cached_property
    def elements(self) -> list[Residue]:
        """All elements in lexicographic order (finite groups only)."""
        if not self.is_finite:
            raise InfiniteGroup("quotient has an infinite cyclic factor")
        return list(itertools.product(*(range(m) for m in self.moduli)))

    @cached_property
    def _index(self) -> dict[Residue, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def index_of(self, g: Residue) -> int:
        return self._index[self.reduce(g)]

    def is_surjective(self) -> bool:
        if not self.is_finite:
            # onto Z^r: the image rows must span Z^r
            from .linalg import smith_normal_form

            if self.rank == 0:
                return len(self.moduli) == 0
            diag = smith_normal_form(np.array(self.images, dtype=object).reshape(self.rank, len(self.moduli)))[0]
            d = [diag[i, i] for i in range(min(diag.shape))]
            return len(self.moduli) <= self.rank and all(abs(x) == 1 for x in d[: len(self.moduli)])
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for row in self.images:
                    h = self.add(g, row)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        return len(seen) == self.order

    def to_json(self) -> dict:
        return {"rank": self.rank, "moduli": list(self.moduli), "images": [list(r) for r in self.images]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "AbelianQuotientSpec":
        return cls(int(doc["rank"]), tuple(doc["moduli"]), tuple(tuple(r) for r in doc["images"]))


@dataclass(frozen=True, eq=False)
class GroupRingElement:
    """Element of Z[A]; ``terms`` maps residue tuples to nonzero integers."""

    moduli: tuple[int, ...]
    terms: Mapping[Residue, int] = field(default_factory=dict)

    def __post_init__(self):
        moduli = tuple(self.moduli)
        clean: dict[Residue, int] = {}
        for g, c in self.terms.items():
            g = _reduce_residue(g, moduli)
            clean[g] = clean.get(g, 0) + int(c)
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "terms", {g: c for g, c in clean.items() if c})

    @classmethod
    def zero(cls, moduli) -> "GroupRingElement":
        return cls(tuple(moduli), {})

    @classmethod
    def one(cls, moduli) -> "GroupRingElement":
        return cls(tuple(moduli), {(0,) * len(moduli): 1})

    @classmethod
    def monomial(cls, moduli, g: Iterable[int], coeff: int = 1) -> "GroupRingElement":
        return cls(tuple(moduli), {tuple(g): coeff})

    def _same(self, other: "GroupRingElement") -> None:
        if self.moduli != other.moduli:
            raise AmbientMismatch(f"ambient groups {self.moduli} and {other.moduli} differ")

    def _coerce(self, other):
        if isinstance(other, int):
            return type(self).one(self.moduli) * other if other else type(self).zero(self.moduli)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        self._same(other)
        return other

    def _new(self, terms):
        return type(self)(self.moduli, terms)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for g, c in other.terms.items():
            out[g] = out.get(g, 0) + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new({g: -c for g, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self._new({g: c * other for g, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Residue, int] = {}
        mod = self.moduli
        for g, a in self.terms.items():
            for h, b in other.terms.items():
                k = tuple((x + y) % m if m else x + y for x, y, m in zip(g, h, mod))
                out[k] = out.get(k, 0) + a * b
        return self._new(out)

    def __rmul__(self, other):
        return self * other

    def __eq__(self, other):
        if isinstance(other, int):
            other = self._coerce(other)
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.moduli == other.moduli and self.terms == other.terms

    def __hash__(self):
        return hash((self.moduli, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * len(self.moduli): 1}

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def coefficient(self, g: Iterable[int]) -> int:
        return self.terms.get(_reduce_residue(g, self.moduli), 0)

    def __repr__(self):
        return f"{type(self).__name__}({self.moduli}, {dict(sorted(self.terms.items()))})"

    def format(self, names: Sequence[str] | None = None) -> str:
        r = len(self.moduli)
        names = list(names) if names else ([f"t{j + 1}" for j in range(r)] if r > 1 else ["t"])
        if not self.terms:
            return "0"
        pieces = []
        for g in sorted(self.terms, key=lambda e: (sum(map(abs, e)), tuple(-x for x in e))):
            c = self.terms[g]
            mono = "*".join(
                names[j] if e == 1 else f"{names[j]}^{e}" for j, e in enumerate(g) if e
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            pieces.append(("-" if c < 0 else "+", body))
        text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for s, b in pieces[1:]:
            text += f" {s} {b}"
        return text

    def __str__(self):
        return self.format()

    def to_json(self) -> list[dict]:
        key = "exponents" if isinstance(self, LaurentPoly) else "residues"
        return [{key: list(g), "coeff": _json_int(c)} for g, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, moduli, doc: Sequence[Mapping]) -> "GroupRingElement":
        terms: dict = {}
        for item in doc:
            g = tuple(item.get("residues", item.get("exponents")))
            terms[g] = terms.get(g, 0) + int(item["coeff"])
        return cls(tuple(moduli), terms)


class LaurentPoly(GroupRingElement):
    """Integral Laurent polynomial: the group ring of Z^r."""

    def __init__(self, nvars_or_moduli, terms: Mapping | None = None):
        moduli = (0,) * nvars_or_moduli if isinstance(nvars_or_moduli, int) else tuple(nvars_or_moduli)
        if any(moduli):
            raise AmbientMismatch("Laurent polynomials live over free abelian groups")
        super().__init__(moduli, dict(terms or {}))

    @property
    def nvars(self) -> int:
        return len(self.moduli)

    @classmethod
    def var(cls, nvars: int, j: int) -> "LaurentPoly":
        return cls(nvars, {tuple(int(i == j) for i in range(nvars)): 1})

    @classmethod
    def from_json(cls, nvars, doc):
        return super().from_json((0,) * nvars, doc)


def _json_int(c: int):
    return c if abs(c) < 2**53 else str(c)


def as_laurent(a: GroupRingElement) -> LaurentPoly:
    return LaurentPoly(a.moduli, a.terms)


def group_ring(moduli, terms=None) -> GroupRingElement:
    moduli = tuple(moduli)
    if moduli and not any(moduli):
        return LaurentPoly(moduli, terms or {})
    return GroupRingElement(moduli, terms or {})


@dataclass(frozen=True)
class Character:
    """Character of (+) Z/m_j sending the j-th basis vector to exp(2 pi i a_j / m_j)."""

    moduli: tuple[int, ...]
    exponents: tuple[int, ...]

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if any(m <= 0 for m in moduli):
            raise InfiniteGroup("characters are defined on finite groups only")
        if len(self.exponents) != len(moduli):
            raise AmbientMismatch("one exponent per modulus")
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "exponents", tuple(int(a) % m for a, m in zip(self.exponents, moduli)))

    @property
    def is_trivial(self) -> bool:
        return not any(self.exponents)

    @property
    def order(self) -> int:
        return math.lcm(1, *(m // math.gcd(a, m) for a, m in zip(self.exponents, self.moduli)))

    def phase(self, g: Iterable[int]) -> int:
        """k with chi(g) = exp(2 pi i k / order)."""
        e = self.order
        return sum((a * e // m) * x for a, x, m in zip(self.exponents, g, self.moduli)) % e

    def __call__(self, g: Iterable[int]) -> complex:
        return cmath.exp(2j * math.pi * self.phase(g) / self.order)

    def power(self, k: int) -> "Character":
        return Character(self.moduli, tuple(a * k for a in self.exponents))

    def conjugate(self) -> "Character":
        return self.power(-1)


def all_characters(moduli) -> list[Character]:
    """Every character of the finite group, trivial one first (lexicographic)."""
    moduli = tuple(getattr(moduli, "moduli", moduli))
    if any(m <= 0 for m in moduli):
        raise InfiniteGroup("characters are defined on finite groups only")
    return [Character(moduli, a) for a in itertools.product(*(range(m) for m in moduli))]


def galois_orbits(moduli) -> list[list[Character]]:
    """Characters grouped into orbits {chi^k : gcd(k, ord chi) = 1}."""
    seen: set = set()
    orbits = []
    for chi in all_characters(moduli):
        if chi.exponents in seen:
            continue
        e = chi.order
        orbit = [chi.power(k) for k in range(1, e + 1) if math.gcd(k, e) == 1]
        seen.update(c.exponents for c in orbit)
        orbits.append(orbit)
    return orbits


def regular_rep(a: GroupRingElement, spec: AbelianQuotientSpec | None = None) -> np.ndarray:
    """Matrix of x -> a*x on Z[A], columns indexed by the lexicographic basis."""
    if any(m <= 0 for m in a.moduli):
        raise InfiniteGroup("regular representation needs a finite group")
    elements = list(itertools.product(*(range(m) for m in a.moduli)))
    index = {g: i for i, g in enumerate(elements)}
    size = len(elements)
    out = np.zeros((size, size), dtype=object)
    for col, g in enumerate(elements):
        for h, c in a.terms.items():
            k = tuple((x + y) % m for x, y, m in zip(g, h, a.moduli))
            out[index[k], col] += c
    return out


def _values(chi, moduli):
    if isinstance(chi, Character):
        if chi.moduli != tuple(moduli):
            raise AmbientMismatch(f"character on {chi.moduli} applied over {tuple(moduli)}")
        return chi
    vals = [complex(z) for z in chi]
    if len(vals) != len(moduli):
        raise AmbientMismatch(f"{len(vals)} values for {len(moduli)} variables")
    return vals


def _eval_element(a: GroupRingElement, chi) -> complex:
    if isinstance(chi, Character):
        return sum(c * chi(g) for g, c in a.terms.items()) + 0j
    total = 0j
    for g, c in a.terms.items():
        term = complex(c)
        for z, e in zip(chi, g):
            term *= z**e
        total += term
    return total


def specialize(obj, chi):
    """Evaluate a group-ring element or matrix at a character.

    ``chi`` is a :class:`Character` of the ambient finite group or, for
    Laurent data, one complex value (normally a root of unity) per variable.
    Matrices come back as complex numpy arrays.
    """
    if isinstance(obj, GroupRingElement):
        return _eval_element(obj, _values(chi, obj.moduli))
    rows = obj.rows if isinstance(obj, GroupRingMatrix) else obj
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    vals = _values(chi, rows[0][0].moduli)
    return np.array([[_eval_element(a, vals) for a in r] for r in rows], dtype=complex)


def specialize_exact(obj, chi: Character):
    """Integer-valued specialization for characters of order at most 2."""
    if chi.order > 2:
        raise ValueError("exact integer specialization needs a character of order <= 2")

    def ev(a):
        return sum(c * (-1 if chi.phase(g) else 1) for g, c in a.terms.items())

    if isinstance(obj, GroupRingElement):
        return ev(obj)
    rows = obj.rows if isinstance(obj, GroupRingMatrix) else obj
    return np.array([[ev(a) for a in r] for r in rows], dtype=object)


class GroupRingMatrix:
    """Square matrix over one group ring (row i, column j)."""

    def __init__(self, rows: Sequence[Sequence[GroupRingElement]]):
        self.rows = [list(r) for r in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("group ring matrices are square")
        moduli = {a.moduli for r in self.rows for a in r}
        if len(moduli) > 1:
            raise AmbientMismatch("entries over different groups")
        self.moduli = moduli.pop() if moduli else ()

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int, moduli) -> "GroupRingMatrix":
        one, zero = group_ring(moduli, {(0,) * len(moduli): 1}), group_ring(moduli)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        if self.moduli != other.moduli and self.size and other.size:
            raise AmbientMismatch("entries over different groups")
        n = self.size
        zero = group_ring(self.moduli)
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return GroupRingMatrix(out)

    def __eq__(self, other):
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        return self.rows == other.rows

    def is_identity(self) -> bool:
        return all(
            (a.is_one() if i == j else a.is_zero())
            for i, r in enumerate(self.rows)
            for j, a in enumerate(r)
        )

    def augmentation(self) -> np.ndarray:
        return np.array([[a.augmentation() for a in r] for r in self.rows], dtype=object).reshape(
            self.size, self.size
        )

    def format(self, names=None) -> list[list[str]]:
        return [[a.format(names) for a in r] for r in self.rows]

    def to_json(self) -> list[list[list[dict]]]:
        return [[a.to_json() for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, moduli, doc) -> "GroupRingMatrix":
        return cls([[_element_from_json(moduli, a) for a in r] for r in doc])

    def __repr__(self):
        return f"GroupRingMatrix({self.format()})"


def _element_from_json(moduli, doc):
    moduli = tuple(moduli)
    if moduli and not any(moduli):
        return LaurentPoly.from_json(len(moduli), doc)
    return GroupRingElement.from_json(moduli, doc)


def enumerate_p_quotients(rank: int, p: int, bound: int) -> list[AbelianQuotientSpec]:
    """All abelian quotients of F_rank of p-power order at most ``bound``.

    Each normal subgroup appears once: quotients are enumerated as sublattices
    of Z^rank in Hermite normal form, then read off through the Smith form.
    Sorted by order, then moduli, then image matrix.
    """
    from .linalg import smith_normal_form

    out = []
    exps = []
    k = 0
    while p**k <= bound:
        exps.append(k)
        k += 1
    for diag in itertools.product(range(len(exps)), repeat=rank):
        if p ** sum(diag) > bound:
            continue
        d = [p**e for e in diag]
        free = [(i, j) for j in range(rank) for i in range(j)]
        for vals in itertools.product(*(range(d[j]) for (i, j) in free)):
            h = np.zeros((rank, rank), dtype=object)
            for i in range(rank):
                h[i, i] = d[i]
            for (i, j), v in zip(free, vals):
                h[i, j] = v
            out.append(_quotient_from_lattice(h, smith_normal_form))
    if rank == 0:
        out = [AbelianQuotientSpec(0, (), ())]
    out.sort(key=lambda q: (q.order, q.moduli, q.images))
    return out


def _quotient_from_lattice(h: np.ndarray, snf) -> AbelianQuotientSpec:
    rank = h.shape[0]
    D, _U, V = snf(h)
    keep = [i for i in range(rank) if abs(D[i, i]) != 1]
    moduli = tuple(abs(int(D[i, i])) for i in keep)
    images = tuple(tuple(int(V[r, i]) for i in keep) for r in range(rank))
    return AbelianQuotientSpec(rank, moduli, images)
