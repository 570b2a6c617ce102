import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autcovers.covers import (
    chain_map_matrix,
    chevalley_weil_decompose,
    coset_table,
    cover_homology_action,
    deck_action,
    deck_order,
    expand_schreier_word,
    isotypic_action,
    isotypic_action_from_cover,
    isotypic_charpoly_product,
    rewrite_in_schreier,
)
from autcovers.errors import InfiniteGroup, NotCompatible, NotInKernel
from autcovers.fox import magnus_matrix
from autcovers.grouprings import AbelianQuotientSpec, Character, all_characters
from autcovers.linalg import identity, is_identity, mat_pow
from autcovers.polynomials import IntPolynomial
from autcovers.spectra import char_poly
from autcovers.words import Endomorphism, Word, apply_endo, commutator, compose, gen, inner, partial_conjugation

from conftest import random_cover, random_torelli, torelli_autos, words

PC_COVER = AbelianQuotientSpec(3, (3, 3), ((0, 0), (1, 0), (0, 1)))
Z2 = AbelianQuotientSpec.cyclic(2, 2, (1, 0))


def test_coset_table_examples():
    S = coset_table(AbelianQuotientSpec.trivial(2))
    assert S.index == 1 and S.schreier_rank == 2
    S = coset_table(Z2)
    assert S.index == 2 and S.schreier_rank == 3
    S = coset_table(PC_COVER)
    assert S.index == 9 and S.schreier_rank == 19
    assert S.transversal[0] == Word(())
    assert len(S.tree_edges) == 8
    with pytest.raises(InfiniteGroup):
        coset_table(AbelianQuotientSpec.full_abelianization(2))


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_schreier_invariants(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    phi = random_cover(rng, n) if n > 1 else AbelianQuotientSpec.cyclic(1, rng.randint(1, 9), (1,))
    S = coset_table(phi)
    assert S.schreier_rank == phi.order * (n - 1) + 1
    assert len(S.tree_edges) == phi.order - 1
    # shortlex: each representative is as short as the word metric allows, via BFS depth
    for i, t in enumerate(S.transversal):
        assert phi.index_of(phi.evaluate(t)) == i
        assert len(t) == 0 or len(S.transversal[phi.index_of(phi.evaluate(Word(t.letters[:-1])))]) == len(t) - 1
    for s in range(1, S.schreier_rank + 1):
        assert rewrite_in_schreier(S.defining_word(s), S) == Word((s,))


def test_rewrite_examples():
    S = coset_table(Z2)
    r = rewrite_in_schreier(Word((1, 1)), S)
    assert len(r) == 1
    S = coset_table(PC_COVER)
    c = commutator(gen(2), gen(3))
    r = rewrite_in_schreier(c, S)
    # with a breadth-first transversal three of the four edges lie in the tree
    assert len(r) == 1
    assert expand_schreier_word(r, S) == c
    cls = S.homology_class(c)
    (a,) = r.letters
    assert sum(map(abs, cls)) == 1 and cls[abs(a) - 1] == (1 if a > 0 else -1)
    with pytest.raises(NotInKernel):
        rewrite_in_schreier(gen(2), S)


@settings(max_examples=60)
@given(words(3, 16), st.integers(0, 10**6))
def test_rewrite_round_trip(w, seed):
    phi = random_cover(random.Random(seed), 3)
    S = coset_table(phi)
    # close w up inside the kernel
    k = S.transversal[phi.index_of(phi.evaluate(w))]
    u = w * k.inverse()
    assert expand_schreier_word(rewrite_in_schreier(u, S), S) == u


def test_cover_action_examples():
    assert is_identity(cover_homology_action(Endomorphism.identity(3), PC_COVER))
    M = cover_homology_action(partial_conjugation(3, 2, 1), PC_COVER)
    assert M.shape == (19, 19)
    assert abs(int(round(np.linalg.det(M.astype(float))))) == 1
    with pytest.raises(NotCompatible):
        cover_homology_action(Endomorphism(2, (gen(2), gen(1))), Z2)


@settings(max_examples=40, deadline=None)
@given(words(3, 6), st.integers(0, 10**6))
def test_inner_action_is_deck_action(g, seed):
    phi = random_cover(random.Random(seed), 3)
    S = coset_table(phi)
    M = cover_homology_action(inner(3, g), phi, S)
    # g loop g^-1 traces the loop from coset phi(g): the deck transformation by phi(g)
    assert (M == deck_action(S, phi.evaluate(g))).all()
    assert is_identity(mat_pow(M, deck_order(phi, g)))


@settings(max_examples=30, deadline=None)
@given(torelli_autos(3), st.integers(0, 10**6))
def test_functoriality(psi1, seed):
    rng = random.Random(seed)
    psi2 = random_torelli(rng, 3)
    phi = random_cover(rng, 3)
    S = coset_table(phi)
    lhs = cover_homology_action(compose(psi1, psi2), phi, S)
    # rows are images of basis classes, so composition reverses (same as the Fox cocycle)
    rhs = cover_homology_action(psi2, phi, S).dot(cover_homology_action(psi1, phi, S))
    assert (lhs == rhs).all()


def test_deck_actions_form_the_group():
    S = coset_table(PC_COVER)
    for g in PC_COVER.elements:
        for h in PC_COVER.elements:
            gh = PC_COVER.add(g, h)
            assert (deck_action(S, g).dot(deck_action(S, h)) == deck_action(S, gh)).all()


@pytest.mark.parametrize(
    "phi,dims",
    [
        (Z2, {(0,): 2, (1,): 1}),
        (AbelianQuotientSpec.cyclic(3, 3, (1, 0, 0)), {(0,): 3, (1,): 2, (2,): 2}),
        (AbelianQuotientSpec.trivial(3), {(): 3}),
    ],
)
def test_chevalley_weil_examples(phi, dims):
    rep = chevalley_weil_decompose(phi)
    assert rep.dims == dims
    assert sum(rep.dims.values()) == rep.schreier_rank


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_chevalley_weil_generators_span(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 4)
    phi = random_cover(rng, n)
    rep = chevalley_weil_decompose(phi, seed=seed)
    assert len(rep.generators) == n - 1
    S = coset_table(phi)
    decks = [np.array(deck_action(S, b), dtype=float) for b in phi.elements]
    G = np.array(rep.generators, dtype=float)
    for chi in all_characters(phi.moduli):
        if chi.is_trivial:
            continue
        P = sum(np.conj(chi(b)) * D for b, D in zip(phi.elements, decks)) / phi.order
        assert np.linalg.matrix_rank(G @ P, tol=1e-8) == n - 1 == np.linalg.matrix_rank(P, tol=1e-8)


def test_isotypic_examples():
    psi = partial_conjugation(3, 2, 1)
    triv = Character(PC_COVER.moduli, (0, 0))
    assert np.allclose(isotypic_action(psi, PC_COVER, triv), np.identity(3))
    for chi in all_characters(PC_COVER.moduli):
        assert np.allclose(isotypic_action(Endomorphism.identity(3), PC_COVER, chi), np.identity(2 if chi.exponents != (0, 0) else 3))
    jordan = 0
    for chi in all_characters(PC_COVER.moduli):
        if chi.exponents[0] == 0:
            continue
        X = isotypic_action(psi, PC_COVER, chi)
        assert X.shape == (2, 2)
        assert np.allclose(np.abs(np.linalg.eigvals(X)), 1)
        if not np.allclose(X, np.diag(np.diag(X))):
            jordan += 1
    assert jordan >= 1


@settings(max_examples=20, deadline=None)
@given(torelli_autos(), st.integers(0, 10**6))
def test_isotypic_routes_agree(psi, seed):
    phi = random_cover(random.Random(seed), psi.rank, groups=[(2,), (3,), (4,), (2, 2), (5,), (6,)])
    S = coset_table(phi)
    total = np.ones(1, dtype=complex)
    for chi in all_characters(phi.moduli):
        a = isotypic_action(psi, phi, chi)
        b = isotypic_action_from_cover(psi, phi, chi, S)
        assert np.allclose(np.poly(a), np.poly(b), atol=1e-6)
        total = np.convolve(total, np.poly(a))
    ref = char_poly(cover_homology_action(psi, phi, S))
    assert np.allclose(total[::-1].real, [float(c) for c in ref.coeffs], atol=1e-5 * max(1, max(abs(c) for c in ref.coeffs)))


@settings(max_examples=25, deadline=None)
@given(torelli_autos(), st.integers(0, 10**6))
def test_fox_schreier_oracle(psi, seed):
    phi = random_cover(random.Random(seed), psi.rank)
    p = char_poly(cover_homology_action(psi, phi))
    R = char_poly(chain_map_matrix(magnus_matrix(psi, phi)))
    assert p * IntPolynomial((-1, 1)) ** (phi.order - 1) == R
    assert p == isotypic_charpoly_product(psi, phi)
