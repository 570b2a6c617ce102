import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autcovers.covers import cover_homology_action
from autcovers.errors import IndexOutOfRange, NotCompatible, NotTorelli
from autcovers.fox import FreeGroupRingSum, fox_derivative, fox_fundamental_check, in_magnus_kernel, magnus_matrix
from autcovers.grouprings import AbelianQuotientSpec, GroupRingMatrix, LaurentPoly, all_characters, specialize
from autcovers.linalg import is_identity
from autcovers.words import Endomorphism, Word, commutator, compose, gen, inner, partial_conjugation

from conftest import random_cover, random_torelli, torelli_autos, words

ONE = Word(())


def naive_fox(w: Word, j: int) -> FreeGroupRingSum:
    """Product rule applied recursively: d(uv) = du + u dv."""
    if not w.letters:
        return FreeGroupRingSum()
    a = w.letters[0]
    rest = Word(w.letters[1:])
    if a == j:
        head = FreeGroupRingSum.of(ONE)
    elif a == -j:
        head = FreeGroupRingSum.of(Word((-j,)), -1)
    else:
        head = FreeGroupRingSum()
    return head + FreeGroupRingSum.of(Word((a,))) * naive_fox(rest, j)


def test_fox_axioms():
    assert fox_derivative(gen(1), 1) == FreeGroupRingSum.of(ONE)
    assert fox_derivative(Word((-1,)), 1) == FreeGroupRingSum.of(Word((-1,)), -1)
    w = Word((1, 2, -1))
    assert fox_derivative(w, 1) == FreeGroupRingSum({ONE: 1, w: -1})
    with pytest.raises(IndexOutOfRange):
        fox_derivative(w, 3, rank=2)


def test_fundamental_examples():
    assert fox_fundamental_check(gen(1))
    assert fox_fundamental_check(ONE)
    assert fox_fundamental_check(commutator(gen(1), gen(2)))


@settings(max_examples=200)
@given(words(4, 20), st.integers(1, 4))
def test_scan_agrees_with_product_rule(w, j):
    assert fox_derivative(w, j) == naive_fox(w, j)


@given(words(3, 25))
def test_fundamental_identity(w):
    assert fox_fundamental_check(w, 3)


def test_magnus_examples():
    t1, t2 = LaurentPoly.var(2, 0), LaurentPoly.var(2, 1)
    J = magnus_matrix(inner(2, gen(1)))
    assert J == GroupRingMatrix([[LaurentPoly(2, {(0, 0): 1}), LaurentPoly(2)], [1 - t2, t1]])
    J3 = magnus_matrix(partial_conjugation(3, 2, 1))
    s1, s2 = LaurentPoly.var(3, 0), LaurentPoly.var(3, 1)
    assert J3.rows[1] == [1 - s2, s1, LaurentPoly(3)]
    assert J3.rows[0] == [LaurentPoly(3, {(0, 0, 0): 1}), LaurentPoly(3), LaurentPoly(3)]
    assert magnus_matrix(Endomorphism.identity(3)).is_identity()


def test_magnus_compatibility():
    swap = Endomorphism(2, (gen(2), gen(1)))
    with pytest.raises(NotCompatible):
        magnus_matrix(swap, AbelianQuotientSpec.cyclic(2, 3, (1, 0)))
    magnus_matrix(swap)  # free abelianization needs no compatibility


def test_magnus_kernel_examples():
    assert in_magnus_kernel(Endomorphism.identity(2))
    assert not in_magnus_kernel(inner(2, gen(1)))
    assert not in_magnus_kernel(partial_conjugation(3, 2, 1))
    with pytest.raises(NotTorelli):
        in_magnus_kernel(Endomorphism(2, (gen(2), gen(1))))


@settings(max_examples=40, deadline=None)
@given(torelli_autos(), st.integers(0, 10**6))
def test_cocycle(psi1, seed):
    rng = random.Random(seed)
    psi2 = random_torelli(rng, psi1.rank)
    for phi in (None, random_cover(rng, psi1.rank)):
        lhs = magnus_matrix(compose(psi1, psi2), phi)
        # rows hold derivatives of psi(x_i), so the chain rule reverses the order
        assert lhs == magnus_matrix(psi2, phi) @ magnus_matrix(psi1, phi)


@settings(max_examples=40, deadline=None)
@given(torelli_autos(), st.integers(0, 10**6))
def test_augmentation_is_abelianization(psi, seed):
    phi = random_cover(random.Random(seed), psi.rank)
    J = magnus_matrix(psi, phi)
    assert (J.augmentation() == psi.abelianization).all()
    triv = all_characters(phi.moduli)[0]
    assert abs(specialize(J, triv) - psi.abelianization.astype(float)).max() < 1e-9
    # a Torelli-like psi has identity abelianization
    assert is_identity(psi.abelianization)


@settings(max_examples=25, deadline=None)
@given(torelli_autos(), st.integers(0, 10**6))
def test_magnus_kernel_acts_trivially_on_covers(psi, seed):
    rng = random.Random(seed)
    for candidate in (Endomorphism.identity(psi.rank), psi):
        M = cover_homology_action(candidate, random_cover(rng, psi.rank))
        if in_magnus_kernel(candidate):
            assert is_identity(M)
