"""End-to-end reproduction of the partial-conjugation example on F_3.

Monodromy x2 -> x1^-1 x2 x1 (x1, x3 fixed), cover F_3 -> (Z/3)^2 with
x1 -> 0, x2 -> (1,0), x3 -> (0,1).  The lifted action on the rank-19 cover
has infinite order yet unit spectrum.
"""
from __future__ import annotations

from .covers import coset_table, cover_homology_action
from .grouprings import AbelianQuotientSpec
from .nilpotent import johnson_depth, shift_witness
from .spectra import char_poly, finite_order_test
from .polynomials import cyclotomic_factorization
from .words import Endomorphism, Word, apply_endo, commutator, gen, partial_conjugation

COVER = AbelianQuotientSpec(3, (3, 3), ((0, 0), (1, 0), (0, 1)))

# class of psi([x2,x3]) - [x2,x3] as a combination g.[x1] of the x1-loops at coset g
EXPECTED_LOOP_CLASS = {(0, 0): -1, (1, 0): 1, (1, 1): -1, (0, 1): 1}


def monodromy(left: bool = False) -> Endomorphism:
    """x2 -> X1 x2 x1, or x2 -> x1 x2 X1 when ``left``."""
    return partial_conjugation(3, 2, gen(1) if left else Word((-1,)))


def loop_class(psi: Endomorphism, S=None) -> dict:
    """Class of psi(c) c^-1 for c = [x2,x3], read in the x1-loop coordinates."""
    S = S or coset_table(COVER)
    c = commutator(gen(2), gen(3))
    diff = [a - b for a, b in zip(S.homology_class(apply_endo(psi, c)), S.homology_class(c))]
    out, other = {}, {}
    for (coset, j), v in zip(S.generators, diff):
        if v:
            (out if j == 1 else other)[COVER.elements[coset]] = v
    if other:
        raise ArithmeticError("difference is not supported on x1-loops")
    return out


def run() -> dict:
    S = coset_table(COVER)
    doc = {"cover": COVER.to_json(), "cosets": S.index, "schreier_rank": S.schreier_rank}
    for name, left in (("x2 -> X1 x2 x1", False), ("x2 -> x1 x2 X1", True)):
        psi = monodromy(left)
        M = cover_homology_action(psi, COVER, S)
        cp = char_poly(M)
        mult, rest = cyclotomic_factorization(cp)
        fo = finite_order_test(M)
        cls = loop_class(psi, S)
        doc[name] = {
            "shape": list(M.shape),
            "determinant": cp.coeffs[0] * (-1) ** cp.degree,
            "finite_order": fo.to_json(),
            "charpoly": cp.format(),
            "all_factors_cyclotomic": rest.degree == 0,
            "loop_class": {str(list(k)): v for k, v in sorted(cls.items())},
            "loop_class_matches_expected": cls == EXPECTED_LOOP_CLASS,
            "loop_class_is_negated_expected": cls == {k: -v for k, v in EXPECTED_LOOP_CLASS.items()},
            "johnson_depth": johnson_depth(psi, 4),
            "shift_witness_i1": bool(shift_witness(psi, 1, 1, 10)),
            "shift_witness_i2": bool(shift_witness(psi, 1, 2, 10)),
        }
    return doc


def check(doc: dict) -> list[str]:
    """Failed expectations (empty when the reproduction succeeds)."""
    bad = []
    if doc["schreier_rank"] != 19:
        bad.append("schreier rank")
    for key in ("x2 -> X1 x2 x1", "x2 -> x1 x2 X1"):
        r = doc[key]
        if abs(r["determinant"]) != 1:
            bad.append(f"{key}: determinant")
        if r["finite_order"]["finite_order"] != "infinite":
            bad.append(f"{key}: finite order")
        if not r["all_factors_cyclotomic"]:
            bad.append(f"{key}: non-cyclotomic factor")
        if r["johnson_depth"] != 1:
            bad.append(f"{key}: depth")
        if not (r["shift_witness_i1"] and r["shift_witness_i2"]):
            bad.append(f"{key}: shift witness")
    if not doc["x2 -> X1 x2 x1"]["loop_class_matches_expected"]:
        bad.append("loop class")
    if not doc["x2 -> x1 x2 X1"]["loop_class_is_negated_expected"]:
        bad.append("loop class (left conjugation)")
    return bad
