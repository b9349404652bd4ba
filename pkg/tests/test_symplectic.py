import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rftorsion.chain_complex import BasedChainComplex
from rftorsion.errors import NonSquareDeterminantError, NotOmegaCompatibleError
from rftorsion.exact_linalg import OrderedBasis, RationalMatrix, pfaffian
from rftorsion.suite import s3xs3_symplectic
from rftorsion.symplectic import (
    SymplecticChainComplex,
    check_omega_compatible,
    compare_with_milnor,
    middle_root,
    omega_normalize,
    pairing_matrix,
    random_homology_reps,
    random_q2,
    standard_bases,
    standard_symplectic,
    symplectic_torsion,
    validate_symplectic,
)

seeds = st.integers(0, 10**6)


def test_s3xs3_closed_form_is_one():
    r = compare_with_milnor(s3xs3_symplectic())
    assert r.closed_form == 1
    assert abs(r.milnor) == 1


@given(seeds)
def test_random_q2_is_valid_and_in_normal_form(seed):
    s = random_q2(random.Random(seed))
    assert validate_symplectic(s)
    assert check_omega_compatible(s, standard_bases(s))


@given(seeds)
def test_closed_form_matches_milnor(seed):
    rng = random.Random(seed)
    s = random_q2(rng)
    r = compare_with_milnor(s, random_homology_reps(s, rng))
    assert r.abs_equal


def test_scaled_middle_class():
    # q = 2, zero boundaries, H_1 spanned by (2,0),(0,3): sqrt|det| = 6, exponent -1
    c = BasedChainComplex([1, 2, 1], [RationalMatrix.zeros(1, 2), RationalMatrix.zeros(2, 1)])
    s = SymplecticChainComplex(c, {0: RationalMatrix.identity(1), 1: standard_symplectic(1)})
    h = {1: [(2, 0), (0, 3)]}
    assert symplectic_torsion(s, h).value == Fraction(1, 6)
    assert compare_with_milnor(s, h).abs_equal


def test_verbatim_symmetric_form_is_never_met():
    s = s3xs3_symplectic()
    assert check_omega_compatible(s, standard_bases(s))
    assert not check_omega_compatible(s, standard_bases(s), verbatim=True)


@given(seeds)
def test_omega_normalize_produces_normal_form(seed):
    rng = random.Random(seed)
    s = random_q2(rng)
    bases = omega_normalize(s)
    assert check_omega_compatible(s, bases)
    m = s.complex.dim(1)
    scrambled = SymplecticChainComplex(s.complex, {0: s.pairings[0].scale(Fraction(2)), 1: s.pairings[1].scale(Fraction(2))})
    assert validate_symplectic(scrambled)
    assert not check_omega_compatible(scrambled, standard_bases(scrambled))
    nb = omega_normalize(scrambled)
    assert check_omega_compatible(scrambled, nb)
    assert pairing_matrix(scrambled, 1, nb[1], nb[1]) == standard_symplectic(m // 2)


def test_noncompatible_bases_refused():
    s = s3xs3_symplectic()
    bases = standard_bases(s)
    bases[3] = OrderedBasis(2, ((2, 0), (0, 1)))
    with pytest.raises(NotOmegaCompatibleError):
        symplectic_torsion(s, chain_bases=bases)


def test_wrong_length_is_invalid():
    c = BasedChainComplex([1, 1], [RationalMatrix.zeros(1, 1)])
    assert not validate_symplectic(SymplecticChainComplex(c, {0: RationalMatrix.identity(1)}))


def test_middle_root():
    assert middle_root(standard_symplectic(2).scale(Fraction(3))) == abs(pfaffian(standard_symplectic(2).scale(Fraction(3)))) == 9
    assert middle_root(RationalMatrix([[4, 0], [0, 9]], 2, 2)) == 6
    with pytest.raises(NonSquareDeterminantError):
        middle_root(RationalMatrix([[2, 0], [0, 1]], 2, 2))
