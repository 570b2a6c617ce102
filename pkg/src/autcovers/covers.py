"""Finite abelian covers of the rose: coset tables, Reidemeister-Schreier
rewriting, the lifted action on first homology, and isotypic decomposition.

Homology basis: the Schreier generators of the non-tree edges (coset a,
generator j), in lexicographic (coset, generator) order, cosets themselves
being numbered lexicographically by residue tuple.  Matrices act on row
vectors: row s is the class of psi(s).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AmbientMismatch, InfiniteGroup, NotCompatible, NotInKernel, NotSurjective
from .fox import magnus_matrix
from .grouprings import (
    AbelianQuotientSpec,
    Character,
    GroupRingMatrix,
    all_characters,
    regular_rep,
    specialize,
)
from .polynomials import IntPolynomial, cyclotomic, totient
from .words import Endomorphism, Word, apply_endo, gen, is_torelli_for


@dataclass(frozen=True, eq=False)
class SchreierData:
    phi: AbelianQuotientSpec
    transversal: tuple[Word, ...]
    tree_edges: frozenset
    generators: tuple[tuple[int, int], ...]

    @property
    def index(self) -> int:
        return len(self.transversal)

    @property
    def schreier_rank(self) -> int:
        return len(self.generators)

    @cached_property
    def generator_index(self) -> dict[tuple[int, int], int]:
        return {edge: i + 1 for i, edge in enumerate(self.generators)}

    @cached_property
    def _step(self) -> list[list[int]]:
        # _step[c][j-1] = coset reached from c along x_j
        phi = self.phi
        return [
            [phi.index_of(phi.add(g, phi.images[j])) for j in range(phi.rank)]
            for g in phi.elements
        ]

    @cached_property
    def _back(self) -> list[list[int]]:
        phi = self.phi
        return [
            [phi.index_of(phi.add(g, phi.images[j], -1)) for j in range(phi.rank)]
            for g in phi.elements
        ]

    def defining_word(self, s: int) -> Word:
        """Word t_a x_j t_b^-1 of the s-th Schreier generator (1-based)."""
        a, j = self.generators[s - 1]
        b = self._step[a][j - 1]
        return self.transversal[a] * gen(j) * self.transversal[b].inverse()

    def walk(self, w: Word, start: int = 0) -> tuple[int, list[int]]:
        """Trace w from coset ``start``; returns the end coset and signed Schreier letters."""
        c = start
        out = []
        gi = self.generator_index
        for a in w.letters:
            j = abs(a)
            if a > 0:
                s = gi.get((c, j))
                if s:
                    out.append(s)
                c = self._step[c][j - 1]
            else:
                c = self._back[c][j - 1]
                s = gi.get((c, j))
                if s:
                    out.append(-s)
        return c, out

    def homology_class(self, w: Word, start: int = 0) -> list[int]:
        end, letters = self.walk(w, start)
        if end != start:
            raise NotInKernel(f"{w} does not close up in the cover")
        vec = [0] * self.schreier_rank
        for s in letters:
            vec[abs(s) - 1] += 1 if s > 0 else -1
        return vec

    def basis_labels(self) -> list[str]:
        """Human-readable label ``g.[x_j]`` of each homology basis element."""
        return [f"{self.phi.elements[a]}.x{j}" for a, j in self.generators]

    def to_json(self) -> dict:
        return {
            "cover": self.phi.to_json(),
            "index": self.index,
            "schreier_rank": self.schreier_rank,
            "transversal": [w.tokens() for w in self.transversal],
            "generators": [
                {"coset": list(self.phi.elements[a]), "generator": j, "word": self.defining_word(i + 1).tokens()}
                for i, (a, j) in enumerate(self.generators)
            ],
        }


def coset_table(phi: AbelianQuotientSpec) -> SchreierData:
    """Shortlex breadth-first transversal over letters x1 < X1 < x2 < X2 < ..."""
    if not phi.is_finite:
        raise InfiniteGroup("covers need a finite deck group")
    elements = phi.elements
    n = phi.rank
    trans: dict[int, Word] = {0: Word(())}
    tree = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        g = elements[c]
        for j in range(1, n + 1):
            for sign in (1, -1):
                h = phi.index_of(phi.add(g, phi.images[j - 1], sign))
                if h in trans:
                    continue
                trans[h] = trans[c] * Word((sign * j,))
                tree.add((c, j) if sign > 0 else (h, j))
                queue.append(h)
    if len(trans) != len(elements):
        raise NotSurjective(f"image has {len(trans)} elements, group has {len(elements)}")
    gens = tuple(
        (a, j) for a in range(len(elements)) for j in range(1, n + 1) if (a, j) not in tree
    )
    return SchreierData(phi, tuple(trans[i] for i in range(len(elements))), frozenset(tree), gens)


def rewrite_in_schreier(w: Word, S: SchreierData) -> Word:
    """Reidemeister-Schreier rewriting of w in ker(phi) as a word in Schreier generators."""
    if S.phi.evaluate(w) != S.phi.identity:
        raise NotInKernel(f"{w} is not in the kernel of the quotient map")
    _, letters = S.walk(w)
    return Word(tuple(letters))


def expand_schreier_word(sw: Word, S: SchreierData) -> Word:
    """Substitute the defining words back; inverse of :func:`rewrite_in_schreier`."""
    out = Word(())
    for s in sw.letters:
        d = S.defining_word(abs(s))
        out = out * (d if s > 0 else d.inverse())
    return out


def _check_compatible(psi: Endomorphism, phi: AbelianQuotientSpec) -> None:
    if phi.rank != psi.rank:
        raise NotCompatible(f"quotient of rank {phi.rank} vs endomorphism of rank {psi.rank}")
    if not is_torelli_for(psi, phi):
        raise NotCompatible("psi does not preserve the kernel compatibly with the deck group")


def cover_homology_action(
    psi: Endomorphism, phi: AbelianQuotientSpec, S: SchreierData | None = None
) -> np.ndarray:
    """Integer matrix of the lift of psi fixing the base coset, on H_1 of the cover."""
    _check_compatible(psi, phi)
    S = S or coset_table(phi)
    rows = [S.homology_class(apply_endo(psi, S.defining_word(s))) for s in range(1, S.schreier_rank + 1)]
    return np.array(rows, dtype=object).reshape(S.schreier_rank, S.schreier_rank)


def deck_action(S: SchreierData, b) -> np.ndarray:
    """Matrix of the deck transformation by the group element b on H_1 of the cover."""
    start = S.phi.index_of(b)
    rows = [S.homology_class(S.defining_word(s), start) for s in range(1, S.schreier_rank + 1)]
    return np.array(rows, dtype=object).reshape(S.schreier_rank, S.schreier_rank)


def chain_map_matrix(J: GroupRingMatrix) -> np.ndarray:
    """Integer matrix of the lifted chain map on C_1 of the cover, built from regular reps.

    Basis of C_1 is edge (coset a, generator j) at position (j-1)*|A| + a.
    Its characteristic polynomial is that of the homology action times (t-1)^(|A|-1).
    """
    n = J.size
    blocks = [[regular_rep(J[i, j]).T for j in range(n)] for i in range(n)]
    if n == 0:
        return np.zeros((0, 0), dtype=object)
    return np.block(blocks).astype(object)


def _companion_powers(e: int) -> list[np.ndarray]:
    phi = cyclotomic(e)
    d = phi.degree
    C = np.zeros((d, d), dtype=object)
    for i in range(d - 1):
        C[i + 1, i] = 1
    for i in range(d):
        C[i, d - 1] = -phi.coeffs[i]
    out = [np.identity(d, dtype=int).astype(object)]
    for _ in range(1, e):
        out.append(C.dot(out[-1]))
    return out


def orbit_block_matrix(J: GroupRingMatrix, chi: Character) -> np.ndarray:
    """Integer matrix whose characteristic polynomial is the product over the
    Galois orbit of chi of det(tI - chi'(J)).

    Each entry chi(J_ij) lies in Z[zeta_e]; it is replaced by its
    multiplication matrix on the power basis of Z[zeta_e].
    """
    if chi.moduli != J.moduli:
        raise AmbientMismatch("character and matrix over different groups")
    e = chi.order
    powers = _companion_powers(e)
    d = totient(e)
    n = J.size

    def block(a):
        out = np.zeros((d, d), dtype=object)
        for g, c in a.terms.items():
            out = out + c * powers[chi.phase(g)]
        return out

    if n == 0:
        return np.zeros((0, 0), dtype=object)
    return np.block([[block(J[i, j]).T for j in range(n)] for i in range(n)]).astype(object)


@dataclass
class IsotypicReport:
    phi: AbelianQuotientSpec
    schreier_rank: int
    dims: dict[tuple[int, ...], int]
    generators: list[list[int]]
    actions: dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "cover": self.phi.to_json(),
            "schreier_rank": self.schreier_rank,
            "dims": [{"character": list(k), "dim": v} for k, v in self.dims.items()],
            "generators": self.generators,
        }


def _projection(decks: list[np.ndarray], elements, chi: Character) -> np.ndarray:
    total = sum(np.conj(chi(b)) * np.array(D, dtype=float) for b, D in zip(elements, decks))
    return total / len(elements)


def chevalley_weil_decompose(
    phi: AbelianQuotientSpec, psi: Endomorphism | None = None, seed: int = 0
) -> IsotypicReport:
    """Isotypic dimensions of H_1(cover; C) under the deck group, plus n-1 integral
    classes whose projections span every nontrivial isotypic piece.

    Dimensions come from the character formula applied to exact traces of the
    deck matrices.  When ``psi`` is given, its isotypic actions are included.
    """
    S = coset_table(phi)
    elements = phi.elements
    decks = [deck_action(S, b) for b in elements]
    traces = [int(sum(D[i, i] for i in range(S.schreier_rank))) for D in decks]
    chars = all_characters(phi.moduli)
    dims = {}
    for chi in chars:
        val = sum(np.conj(chi(b)) * tr for b, tr in zip(elements, traces)) / len(elements)
        dim = round(val.real)
        if abs(val - dim) > 1e-9:
            raise ArithmeticError(f"non-integral isotypic dimension {val}")
        dims[chi.exponents] = dim
    gens = _spanning_classes(S, decks, chars, dims, seed)
    report = IsotypicReport(phi, S.schreier_rank, dims, gens)
    if psi is not None:
        for chi in chars:
            report.actions[chi.exponents] = isotypic_action(psi, phi, chi)
    return report


def _spanning_classes(S, decks, chars, dims, seed) -> list[list[int]]:
    n = S.phi.rank
    need = n - 1
    if need <= 0 or S.phi.order == 1:
        return []
    projs = [(chi, _projection(decks, S.phi.elements, chi)) for chi in chars if not chi.is_trivial]
    rng = np.random.default_rng(seed)
    basis = np.identity(S.schreier_rank, dtype=int)
    candidates = [basis[i : i + need] for i in range(0, S.schreier_rank - need + 1)]
    for _ in range(200):
        candidates.append(rng.integers(-3, 4, size=(need, S.schreier_rank)))
    for cand in candidates:
        if all(np.linalg.matrix_rank(cand @ P, tol=1e-8) == dims[chi.exponents] for chi, P in projs):
            return [[int(x) for x in row] for row in cand]
    raise ArithmeticError("no spanning classes found")


def isotypic_action(psi: Endomorphism, phi: AbelianQuotientSpec, chi: Character) -> np.ndarray:
    """Action of psi on the chi-isotypic part of H_1(cover; C).

    Computed from the specialized Magnus matrix u -> u chi(J), restricted for
    nontrivial chi to the hyperplane sum_j u_j (chi(phi(x_j)) - 1) = 0, with
    basis e_j - (c_j / c_k) e_k (j != k, k the coordinate with largest |c_k|).
    """
    _check_compatible(psi, phi)
    if chi.moduli != phi.moduli:
        raise AmbientMismatch("character over a different group")
    J = specialize(magnus_matrix(psi, phi), chi)
    c = np.array([chi(row) - 1 for row in phi.images], dtype=complex)
    if np.all(np.abs(c) < 1e-12):
        return J
    k = int(np.argmax(np.abs(c)))
    keep = [j for j in range(len(c)) if j != k]
    basis = np.zeros((len(keep), len(c)), dtype=complex)
    for r, j in enumerate(keep):
        basis[r, j] = 1
        basis[r, k] = -c[j] / c[k]
    return (basis @ J)[:, keep]


def isotypic_action_from_cover(
    psi: Endomorphism, phi: AbelianQuotientSpec, chi: Character, S: SchreierData | None = None
) -> np.ndarray:
    """Same action, obtained by projecting the integral cover action (orthonormal basis)."""
    S = S or coset_table(phi)
    M = np.array(cover_homology_action(psi, phi, S), dtype=float)
    decks = [deck_action(S, b) for b in phi.elements]
    P = _projection(decks, phi.elements, chi)
    u, s, vh = np.linalg.svd(P)
    r = int(np.sum(s > 1e-8))
    B = vh[:r]
    return B @ M @ B.conj().T


def complex_charpoly(m: np.ndarray) -> np.ndarray:
    """Coefficients, low to high, of det(tI - m) for a complex matrix."""
    if m.shape[0] == 0:
        return np.ones(1, dtype=complex)
    return np.poly(m)[::-1]


def int_charpoly_poly(m: np.ndarray) -> IntPolynomial:
    from .linalg import charpoly

    return IntPolynomial(tuple(charpoly(m)))


def isotypic_charpoly_product(psi: Endomorphism, phi: AbelianQuotientSpec) -> IntPolynomial:
    """Exact product over all characters of the isotypic characteristic polynomials.

    Uses one integer matrix per Galois orbit; each nontrivial orbit of size d
    contributes its block polynomial divided by (t - 1)^d, the trivial
    character its specialized Magnus polynomial.
    """
    from .grouprings import galois_orbits

    J = magnus_matrix(psi, phi)
    out = IntPolynomial((1,))
    for orbit in galois_orbits(phi.moduli):
        poly = int_charpoly_poly(orbit_block_matrix(J, orbit[0]))
        if not orbit[0].is_trivial:
            poly = poly // (IntPolynomial((-1, 1)) ** len(orbit))
        out = out * poly
    return out


def index_of_element(phi: AbelianQuotientSpec, w: Word) -> int:
    return phi.index_of(phi.evaluate(w))


def deck_order(phi: AbelianQuotientSpec, w: Word) -> int:
    """Order of phi(w) in the deck group."""
    g = phi.evaluate(w)
    return math.lcm(1, *(m // math.gcd(x, m) for x, m in zip(g, phi.moduli)))
