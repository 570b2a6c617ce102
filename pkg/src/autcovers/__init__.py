"""Homology of finite abelian covers under free-group automorphisms.

Fox calculus and Magnus matrices, Reidemeister-Schreier covers, exact
spectral tests, nilpotent quotients and homology-gradient towers.
"""
from .covers import (
    IsotypicReport,
    SchreierData,
    chevalley_weil_decompose,
    coset_table,
    cover_homology_action,
    deck_action,
    isotypic_action,
    rewrite_in_schreier,
)
from .errors import AutCoversError
from .fox import fox_derivative, fox_fundamental_check, in_magnus_kernel, magnus_matrix
from .gradient import (
    CosetGraph,
    GradientReport,
    TowerSpec,
    cheeger_constant,
    homology_gradient,
    largeness_report,
    mapping_torus_cover_rank,
)
from .grouprings import (
    AbelianQuotientSpec,
    Character,
    GroupRingElement,
    GroupRingMatrix,
    LaurentPoly,
    all_characters,
    regular_rep,
    specialize,
)
from .nilpotent import (
    AtLeast,
    DepthWitness,
    HallBasis,
    NilpotentElement,
    central_perturbation_witness,
    collect,
    hall_basis,
    johnson_depth,
    nilpotent_cover_action_witness,
    shift_witness,
)
from .polynomials import IntPolynomial
from .spectra import (
    DichotomyReport,
    Finite,
    Infinite,
    alexander_polynomial,
    char_poly,
    dichotomy_probe,
    finite_order_test,
    spectral_radius,
)
from .words import Endomorphism, Word, commutator, compose, gen, inner, is_torelli_for, partial_conjugation

__version__ = "0.1.0"
