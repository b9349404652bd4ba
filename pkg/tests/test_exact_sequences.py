import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rftorsion.chain_complex import BasedChainComplex, homology
from rftorsion.errors import IncompatibleBasesError, NotExactError
from rftorsion.exact_linalg import RationalMatrix, rank
from rftorsion.exact_sequences import (
    ChainSES,
    build_long_exact_sequence,
    compatible_bases_check,
    connecting_homomorphism,
    corrective_term,
    direct_sum_ses,
    random_ses,
    validate_ses,
    verify_multiplicativity,
)
from rftorsion.models import octahedron_hemispheres, s3xs3, decompose_punctured

seeds = st.integers(0, 10**6)

POINT = BasedChainComplex([1, 0], [RationalMatrix.zeros(1, 0)])
INTERVAL = BasedChainComplex([2, 1], [[[-1], [1]]])
REL = BasedChainComplex([1, 1], [[[1]]])


def interval_ses():
    # point v0 inside the interval, quotient is the relative complex
    return ChainSES(POINT, INTERVAL, REL, [[[1], [0]], RationalMatrix.zeros(1, 0)], [[[0, 1]], [[1]]])


def test_interval_sequence_is_exact():
    assert validate_ses(interval_ses())
    assert compatible_bases_check(interval_ses()) == (1, 1)


def test_broken_sequence_reports_degree():
    s = ChainSES(POINT, INTERVAL, REL, [[[1], [0]], RationalMatrix.zeros(1, 0)], [[[1, 1]], [[1]]])
    r = validate_ses(s)
    assert not r and r.degree == 1 and "pi" in r.message


def test_broken_sequence_refused_by_les():
    s = ChainSES(POINT, INTERVAL, REL, [[[1], [1]], RationalMatrix.zeros(1, 0)], [[[0, 1]], [[1]]])
    with pytest.raises(NotExactError):
        build_long_exact_sequence(s)


def test_literal_signed_equality_fails_for_interval():
    r = verify_multiplicativity(interval_ses())
    assert (r.torsion_a, r.torsion_b, r.torsion_d, r.corrective) == (1, -1, 1, 1)
    assert r.abs_equal
    assert not r.signed_equal
    assert r.sign == -1 and r.sign_refined_equal


def test_hemisphere_connecting_map():
    d = octahedron_hemispheres()
    delta = connecting_homomorphism(d.ses, 2)
    assert delta.shape == (1, 1) and delta.row_list()[0][0] != 0


def test_les_lengths():
    les = build_long_exact_sequence(octahedron_hemispheres().ses)
    assert les.complex.length + 1 == 9  # slots 0..8 for a length-2 sequence
    assert les.tags[:3] == ((0, "D"), (0, "B"), (0, "A"))
    d, _ = decompose_punctured(s3xs3())
    les = build_long_exact_sequence(d.ses)
    assert les.complex.length + 1 == 3 * 7


def test_les_is_acyclic_for_hemispheres():
    les = build_long_exact_sequence(octahedron_hemispheres().ses)
    assert not any(homology(les.complex).betti_numbers)


@given(seeds)
def test_acyclic_sequences_have_trivial_corrective_term(seed):
    s = random_ses(random.Random(seed), acyclic=True)
    assert corrective_term(build_long_exact_sequence(s)).value == 1


@given(seeds)
def test_random_sequences_are_exact_and_compatible(seed):
    s = random_ses(random.Random(seed))
    assert validate_ses(s)
    assert all(x == 1 for x in compatible_bases_check(s, random.Random(seed)))


@given(seeds)
def test_multiplicativity_up_to_sign_and_refined(seed):
    r = verify_multiplicativity(random_ses(random.Random(seed)))
    assert r.abs_equal
    assert r.sign_refined_equal


@given(seeds)
def test_direct_sum_sequence(seed):
    rng = random.Random(seed)
    a, d = random_ses(rng).a, random_ses(rng).d
    s = direct_sum_ses(a, d)
    assert validate_ses(s)
    r = verify_multiplicativity(s)
    assert r.abs_equal and r.sign_refined_equal


def test_les_rank_exactness():
    s = random_ses(random.Random(7))
    les = build_long_exact_sequence(s).complex
    for p in range(les.length + 1):
        out_rank = rank(les.boundary(p)) if p >= 1 else 0
        in_rank = rank(les.boundary(p + 1)) if p < les.length else 0
        assert out_rank + in_rank == les.dim(p)


def test_incompatible_bases_raise():
    s = interval_ses()
    doubled = ChainSES(s.a, s.b, s.d, [m.scale(Fraction(2)) for m in s.i], s.pi)
    assert abs(compatible_bases_check(doubled)[0]) == 2
    with pytest.raises(IncompatibleBasesError):
        verify_multiplicativity(doubled)
