"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import itertools
import random
import re
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from autcovers import reproduce
from autcovers.covers import (
    chain_map_matrix,
    chevalley_weil_decompose,
    coset_table,
    cover_homology_action,
    isotypic_charpoly_product,
)
from autcovers.errors import BadDegree
from autcovers.fox import fox_fundamental_check, magnus_matrix
from autcovers.gradient import CosetGraph, TowerSpec, cheeger_constant, largeness_report
from autcovers.grouprings import AbelianQuotientSpec, LaurentPoly, all_characters
from autcovers.nilpotent import AtLeast, central_perturbation_witness, johnson_depth, nilpotent_cover_action_witness, shift_witness
from autcovers.polynomials import IntPolynomial, cyclotomic_factorization
from autcovers.spectra import Infinite, alexander_polynomial, char_poly, finite_order_test, spectral_radius
from autcovers.words import Endomorphism, Word, commutator, gen, inner, partial_conjugation

from conftest import random_torelli, random_word

PC = partial_conjugation(3, 2, Word((-1,)))
C12 = commutator(gen(1), gen(2))
EXPRESSION = r"-[x_1]+x_2\cdot[x_1]-(x_3x_2)\cdot [x_1]+x_3\cdot [x_1]"


def parse_loop_expression(text, cover):
    """{deck element: coefficient} for a sum of terms +-g.[x_1]."""
    out = {}
    for sign, coeff in re.findall(r"([+-]?)\s*(?:\(?([x_0-9]*)\)?\s*\\cdot\s*)?\[x_1\]", text):
        g = Word.parse(" ".join(re.findall(r"x_?\d", coeff)).replace("_", ""), cover.rank) if coeff else Word(())
        key = cover.evaluate(g)
        out[key] = out.get(key, 0) + (-1 if sign == "-" else 1)
    return out


def abelian_groups(max_order):
    """Invariant factor lists d1 | d2 | ... with product <= max_order (trivial group included)."""
    out = [()]

    def extend(prefix, prod):
        for d in range(2, max_order // prod + 1):
            if not prefix or d % prefix[-1] == 0:
                out.append(prefix + (d,))
                extend(prefix + (d,), prod * d)

    extend((), 1)
    return out


def criterion3_instances():
    rng = random.Random(20240601)
    groups = [g for g in abelian_groups(12) if g]
    inst = []
    while len(inst) < 100:
        n = rng.randint(2, 4)
        psi = random_torelli(rng, n)
        mods = rng.choice([g for g in groups if len(g) <= n])
        images = tuple(tuple(rng.randrange(m) for m in mods) for _ in range(n))
        phi = AbelianQuotientSpec(n, mods, images)
        if phi.is_surjective():
            inst.append((psi, phi))
    return inst


INSTANCES = criterion3_instances()


def test_criterion_01_partial_conjugation(record_criterion):
    t0 = time.perf_counter()
    S = coset_table(reproduce.COVER)
    M = cover_homology_action(PC, reproduce.COVER, S)
    cp = char_poly(M)
    det = cp.coeffs[0] * (-1) ** cp.degree
    fo = finite_order_test(M)
    _, rest = cyclotomic_factorization(cp)
    expected = parse_loop_expression(EXPRESSION, reproduce.COVER)
    cls = reproduce.loop_class(PC, S)
    elapsed = time.perf_counter() - t0
    ok = (
        M.shape == (19, 19)
        and abs(det) == 1
        and isinstance(fo, Infinite)
        and rest.degree == 0
        and expected == reproduce.EXPECTED_LOOP_CLASS
        and cls == expected
        and elapsed < 1.0
    )
    record_criterion(1, ok, f"19x19 det {det}, {fo.reason}, loop class {cls == expected}, {elapsed:.3f}s")
    assert ok


def test_criterion_02_chevalley_weil(record_criterion):
    t0 = time.perf_counter()
    count, bad = 0, []
    for mods in abelian_groups(16):
        for n in (2, 3, 4):
            if len(mods) > n:
                continue
            images = tuple(tuple(int(i == j) for j in range(len(mods))) for i in range(n))
            phi = AbelianQuotientSpec(n, mods, images)
            rep = chevalley_weil_decompose(phi)
            want = {chi.exponents: (n if chi.is_trivial else n - 1) for chi in all_characters(mods)}
            count += 1
            if rep.dims != want or sum(rep.dims.values()) != phi.order * (n - 1) + 1:
                bad.append((mods, n))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 10.0
    record_criterion(2, ok, f"{count} (group, rank) pairs, {len(bad)} failures, {elapsed:.2f}s")
    assert ok, bad


def test_criterion_03_fox_vs_schreier(record_criterion):
    t0 = time.perf_counter()
    t_minus_1 = IntPolynomial((-1, 1))
    bad = []
    for k, (psi, phi) in enumerate(INSTANCES):
        p = char_poly(cover_homology_action(psi, phi))
        R = char_poly(chain_map_matrix(magnus_matrix(psi, phi)))
        if p * t_minus_1 ** (phi.order - 1) != R:
            bad.append(k)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60.0
    record_criterion(3, ok, f"{len(INSTANCES)} instances, {len(bad)} mismatches, {elapsed:.2f}s")
    assert ok, bad


def test_criterion_04_fox_fundamental_identity(record_criterion):
    rng = random.Random(4)
    results = []
    for _ in range(1000):
        n = rng.randint(2, 5)
        results.append(fox_fundamental_check(random_word(rng, n, 40), n))
    ok = all(results)
    record_criterion(4, ok, f"{sum(results)}/1000 words")
    assert ok


def test_criterion_05_johnson_depths(record_criterion):
    depth2 = Endomorphism(2, (gen(1), C12 * gen(2) * C12.inverse()))
    pc = partial_conjugation(3, 2, gen(1))  # x2 -> x1 x2 X1, so psi(x2) X2 = [x1,x2]
    depths = (johnson_depth(pc, 4), johnson_depth(depth2, 4), johnson_depth(Endomorphism.identity(3), 4))
    w1 = central_perturbation_witness(pc, 4)
    w2 = central_perturbation_witness(depth2, 4)
    ok = (
        depths == (1, 2, AtLeast(4))
        and (w1.depth, w1.generator, w1.perturbation.terms()) == (2, gen(2), {"[x1,x2]": 1})
        and (w2.depth, w2.generator, w2.perturbation.terms()) == (3, gen(2), {"[[x1,x2],x2]": 1})
    )
    record_criterion(5, ok, f"depths {depths[0]}, {depths[1]}, {depths[2]!r}; witnesses {w1.perturbation.terms()}, {w2.perturbation.terms()}")
    assert ok


def test_criterion_06_infinite_order_witnesses(record_criterion):
    t0 = time.perf_counter()
    s1 = shift_witness(PC, 1, 1, 10)
    s2 = shift_witness(PC, 1, 2, 10)
    nc = nilpotent_cover_action_witness(PC, 1, 2, 10)
    try:
        nilpotent_cover_action_witness(PC, 1, 1, 10)
        rejects = False
    except BadDegree:
        rejects = True
    elapsed = time.perf_counter() - t0
    ok = bool(s1) and bool(s2) and bool(nc) and rejects and elapsed < 30.0
    record_criterion(6, ok, f"shift i=1 {bool(s1)}, i=2 {bool(s2)}, cover {bool(nc)}, BadDegree {rejects}, {elapsed:.2f}s")
    assert ok


def test_criterion_07_gradient_and_cheeger(record_criterion):
    tower = TowerSpec(
        Endomorphism.identity(2), 2, [AbelianQuotientSpec.cyclic(2, 2**k, (1, 0)) for k in range(1, 5)]
    )
    rep = largeness_report(tower)
    ratios = [lv.ratio for lv in rep.levels]
    cheeger = [lv.cheeger.exact for lv in rep.levels]

    def brute(X):
        best = None
        for size in range(1, X.n_vertices // 2 + 1):
            for A in itertools.combinations(range(X.n_vertices), size):
                s = set(A)
                f = Fraction(sum((u in s) != (v in s) for u, v in X.edges), size)
                best = f if best is None or f < best else best
        return best

    brute_vals = [brute(CosetGraph.cycle(m)) for m in (4, 8, 16)]
    direct = [cheeger_constant(CosetGraph.cycle(m)).exact for m in (4, 8, 16)]
    ok = (
        ratios == [Fraction(m + 2, m) for m in (2, 4, 8, 16)]
        and all(r >= 1 for r in ratios)
        and rep.verdict == "CriterionMetOnSample"
        and cheeger[1:] == [Fraction(1), Fraction(1, 2), Fraction(1, 4)]
        and direct == brute_vals == [1, Fraction(1, 2), Fraction(1, 4)]
        and all(a > b for a, b in zip(cheeger, cheeger[1:]))
    )
    record_criterion(7, ok, f"ratios {[str(r) for r in ratios]}, cheeger {[str(c) for c in cheeger]}, {rep.verdict}")
    assert ok


def test_criterion_08_alexander(record_criterion):
    trefoil = Endomorphism.parse(2, ["x1 X2", "x1"])
    a = alexander_polynomial(trefoil, AbelianQuotientSpec.trivial(2))
    conj = inner(2, gen(1))
    t1, t2, one = LaurentPoly.var(2, 0), LaurentPoly.var(2, 1), LaurentPoly(2, {(0, 0): 1})
    J = magnus_matrix(conj)
    triangular = [[J[i, j] for j in range(2)] for i in range(2)] == [[one, LaurentPoly(2)], [one - t2, t1]]
    g = alexander_polynomial(conj)
    want = [t1, LaurentPoly(2) - one - t1, one]  # (t - 1)(t - t1), low to high
    ok = (
        [[int(x) for x in r] for r in trefoil.abelianization] == [[1, -1], [1, 0]]
        and a.as_int_polynomial() == IntPolynomial((1, -1, 1))
        and triangular
        and list(g.coeffs) == want
    )
    record_criterion(8, ok, f"trefoil {a.format()}; Gassner {g.format()}")
    assert ok


def test_criterion_09_per_character_product(record_criterion):
    bad = [k for k, (psi, phi) in enumerate(INSTANCES) if isotypic_charpoly_product(psi, phi) != char_poly(cover_homology_action(psi, phi))]
    ok = not bad
    record_criterion(9, ok, f"{len(INSTANCES)} instances, {len(bad)} mismatches")
    assert ok, bad


def test_criterion_10_spectral_sanity(record_criterion):
    rng = random.Random(10)
    mats = [cover_homology_action(psi, phi) for psi, phi in INSTANCES[:40]]
    mats.append(cover_homology_action(PC, reproduce.COVER))
    for _ in range(60):
        n = rng.randint(2, 6)
        m = np.array([[int(i == j) for j in range(n)] for i in range(n)], dtype=object)
        for _ in range(rng.randint(1, 12)):
            i, j = rng.sample(range(n), 2)
            e = np.array([[int(a == b) for b in range(n)] for a in range(n)], dtype=object)
            e[i, j] = rng.choice((-2, -1, 1, 2))
            m = m.dot(e)
        if rng.random() < 0.5:
            m[0, :] = -m[0, :]
        mats.append(m)
    dets_ok = all(abs(char_poly(m).coeffs[0]) == 1 for m in mats)
    radii = [spectral_radius(m) for m in mats]
    golden = spectral_radius(np.array([[2, 1], [1, 1]], dtype=object))
    ok = dets_ok and min(radii) >= 1 - 1e-9 and abs(golden - 2.618034) <= 1e-6
    record_criterion(10, ok, f"{len(mats)} unimodular matrices, min radius {min(radii):.12f}; [[2,1],[1,1]] -> {golden:.7f}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
