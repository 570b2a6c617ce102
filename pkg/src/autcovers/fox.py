"""Fox calculus and the Magnus (Gassner-style) matrix of an endomorphism.

Row convention: row i of the matrix holds the abelianized Fox derivatives of
psi(x_i).  With ``compose(a, b) = a o b`` the chain rule then reads
``magnus_matrix(compose(a, b)) == magnus_matrix(b) @ magnus_matrix(a)``
whenever ``a`` is compatible with the quotient.
"""
from __future__ import annotations

from typing import Mapping

from .errors import IndexOutOfRange, NotCompatible, NotTorelli
from .grouprings import AbelianQuotientSpec, GroupRingElement, GroupRingMatrix, group_ring
from .words import Endomorphism, Word, gen, is_torelli_for


class FreeGroupRingSum:
    """Element of Z[F_n]: a finite integer combination of reduced words."""

    def __init__(self, terms: Mapping[Word, int] | None = None):
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def of(cls, w: Word, c: int = 1) -> "FreeGroupRingSum":
        return cls({w: c})

    def __add__(self, other: "FreeGroupRingSum") -> "FreeGroupRingSum":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return FreeGroupRingSum(out)

    def __neg__(self):
        return FreeGroupRingSum({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "FreeGroupRingSum") -> "FreeGroupRingSum":
        out: dict[Word, int] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                w = u * v
                out[w] = out.get(w, 0) + a * b
        return FreeGroupRingSum(out)

    def __eq__(self, other):
        return isinstance(other, FreeGroupRingSum) and self.terms == other.terms

    def push(self, phi: AbelianQuotientSpec) -> GroupRingElement:
        """Image under Z[F_n] -> Z[A]."""
        out: dict = {}
        for w, c in self.terms.items():
            g = phi.evaluate(w)
            out[g] = out.get(g, 0) + c
        return group_ring(phi.moduli, out)

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda wc: (len(wc[0]), wc[0].letters))
        return "FreeGroupRingSum(" + ", ".join(f"{c}*[{w}]" for w, c in items) + ")"


def fox_derivative(w: Word, j: int, rank: int | None = None) -> FreeGroupRingSum:
    """d w / d x_j by one left-to-right scan with a running prefix."""
    if j < 1 or (rank is not None and j > rank):
        raise IndexOutOfRange(f"generator {j} outside 1..{rank}")
    if rank is not None and w.rank > rank:
        raise IndexOutOfRange(f"word uses generators beyond {rank}")
    out: dict[Word, int] = {}
    prefix: list[int] = []
    for a in w.letters:
        if a == j:
            key = Word(tuple(prefix))
            out[key] = out.get(key, 0) + 1
        prefix.append(a)
        if a == -j:
            key = Word(tuple(prefix))
            out[key] = out.get(key, 0) - 1
    return FreeGroupRingSum(out)


def fox_fundamental_check(w: Word, rank: int | None = None) -> bool:
    """Check sum_j (dw/dx_j)(x_j - 1) == w - 1 in Z[F]."""
    rank = rank if rank is not None else w.rank
    one = Word(())
    lhs = FreeGroupRingSum()
    for j in range(1, rank + 1):
        lhs = lhs + fox_derivative(w, j) * FreeGroupRingSum({gen(j): 1, one: -1})
    return lhs == FreeGroupRingSum({w: 1}) - FreeGroupRingSum({one: 1})


def abelianized_jacobian_row(w: Word, phi: AbelianQuotientSpec) -> list[GroupRingElement]:
    """(phi(dw/dx_1), ..., phi(dw/dx_n)), accumulating the prefix image directly."""
    n = phi.rank
    terms: list[dict] = [dict() for _ in range(n)]
    pos = list(phi.identity)
    for a in w.letters:
        k = abs(a)
        if k > n:
            raise IndexOutOfRange(f"letter {a} outside generators 1..{n}")
        row = phi.images[k - 1]
        if a > 0:
            g = phi.reduce(pos)
            terms[k - 1][g] = terms[k - 1].get(g, 0) + 1
            pos = [x + y for x, y in zip(pos, row)]
        else:
            pos = [x - y for x, y in zip(pos, row)]
            g = phi.reduce(pos)
            terms[k - 1][g] = terms[k - 1].get(g, 0) - 1
    return [group_ring(phi.moduli, t) for t in terms]


def magnus_matrix(psi: Endomorphism, phi: AbelianQuotientSpec | None = None) -> GroupRingMatrix:
    """Matrix of abelianized Fox derivatives of psi(x_i), over Z[A].

    ``phi`` defaults to the full abelianization, where the entries are Laurent
    polynomials in t_1..t_n and no compatibility is required.  Quotients with a
    torsion factor must be preserved by psi.
    """
    if phi is None:
        phi = AbelianQuotientSpec.full_abelianization(psi.rank)
    if phi.rank != psi.rank:
        raise NotCompatible(f"quotient of rank {phi.rank} vs endomorphism of rank {psi.rank}")
    if any(m > 0 for m in phi.moduli) and not is_torelli_for(psi, phi):
        raise NotCompatible("psi does not commute with the deck group of this quotient")
    return GroupRingMatrix([abelianized_jacobian_row(w, phi) for w in psi.images])


def in_magnus_kernel(psi: Endomorphism) -> bool:
    if not psi.torelli:
        raise NotTorelli("psi acts nontrivially on the abelianization")
    return magnus_matrix(psi).is_identity()
