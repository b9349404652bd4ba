import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from rftorsion.chain_complex import homology, validate
from rftorsion.errors import UnknownModelError, UnsupportedDimensionError
from rftorsion.exact_linalg import RationalMatrix
from rftorsion.exact_sequences import validate_ses
from rftorsion.models import (
    assemble_connected_sum,
    cell_independence_check,
    collapse_to_minimal_sphere,
    connected_sum_s3xs3,
    decompose_punctured,
    disk,
    integral_primitive,
    intersection_torsion,
    manifold_torsion,
    octahedron_hemispheres,
    parse_model_spec,
    point,
    puncture,
    s3xs3,
    simplex_boundary,
    sphere_minimal,
    sphere_simplicial,
    verify_connected_sum_theorem,
    verify_prime_decomposition,
    verify_punctured_theorem,
)

nonzero = st.fractions(min_value=-20, max_value=20, max_denominator=9).filter(lambda x: x != 0)


def sympy_betti(c):
    ranks = [0] * (c.length + 2)
    for p in range(1, c.length + 1):
        d = c.boundary(p)
        if d.rows and d.cols:
            ranks[p] = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in d.row_list()]).rank()
    return tuple(c.dim(p) - ranks[p] - ranks[p + 1] for p in range(c.length + 1))


SPHERES = [sphere_minimal(n) for n in (1, 2, 3, 4)] + [sphere_simplicial(n) for n in (1, 2, 3)] + [simplex_boundary(n) for n in (1, 2, 3, 4)]


@pytest.mark.parametrize("m", SPHERES, ids=lambda m: m.name)
def test_sphere_inventory(m):
    assert validate(m.complex)
    expected = (1,) + (0,) * (m.dim - 1) + (1,)
    assert m.betti == expected == sympy_betti(m.complex)
    chi = sum((-1) ** p * d for p, d in enumerate(m.complex.dims))
    assert chi == (2 if m.dim % 2 == 0 else 0)


def test_face_counts():
    assert sphere_simplicial(2).complex.dims == (6, 12, 8)
    assert sphere_simplicial(3).complex.dims == (8, 24, 32, 16)
    assert simplex_boundary(2).complex.dims == (4, 6, 4)
    assert simplex_boundary(4).complex.dims == (6, 15, 20, 15, 6)


def test_s3xs3_inventory():
    for k in (1, 2, 3):
        m = connected_sum_s3xs3(k)
        assert m.betti == (1, 0, 0, 2 * k, 0, 0, 1)
        assert intersection_torsion(m) == 1


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 6])
def test_disks_are_contractible(n):
    m = disk(n)
    assert m.betti == (1,) + (0,) * n
    assert abs(manifold_torsion(m).value) == 1


def test_interval_torsion_sign():
    assert manifold_torsion(disk(1)).value == -1
    assert manifold_torsion(disk(4)).value == 1


def test_preferred_torsions():
    assert manifold_torsion(point()).value == 1
    assert manifold_torsion(sphere_simplicial(2)).value == -1
    assert manifold_torsion(simplex_boundary(2)).value == 1
    assert manifold_torsion(sphere_simplicial(1)).value == -1
    assert manifold_torsion(sphere_simplicial(3)).value == 1


@given(nonzero, nonzero)
def test_circle_unpaired_rescaling_is_ratio(a, b):
    # odd dimension, independent rescalings of h_0 and h_1: |T| = 1 fails
    m = sphere_minimal(1)
    assert manifold_torsion(m, {0: [(a,)], 1: [(b,)]}).value == a / b


@given(nonzero)
def test_odd_sphere_paired_rescaling_is_one(lam):
    m = sphere_minimal(3)
    assert abs(manifold_torsion(m, {0: [(lam,)], 3: [(lam,)]}).value) == 1


@given(nonzero, nonzero)
def test_even_sphere_intersection_torsion(a, b):
    m = sphere_minimal(2)
    t = manifold_torsion(m, {0: [(a,)], 2: [(b,)]}).value
    assert t == a * b
    assert intersection_torsion(m, {0: [(a,)], 2: [(b,)]}) == abs(a * b)


def test_cell_independence_simplicial_vs_minimal():
    for n in (1, 2, 3):
        for m in (sphere_simplicial(n), simplex_boundary(n)):
            r = cell_independence_check(m, sphere_minimal(n), chain_map=collapse_to_minimal_sphere(m))
            assert r.agree


def test_cell_independence_by_correspondence():
    r = cell_independence_check(sphere_minimal(2), sphere_minimal(2), correspondence={0: RationalMatrix([[2]], 1, 1), 2: RationalMatrix([[3]], 1, 1)})
    assert r.torsion_second == 6 and r.predicted_second == 6
    assert not r.agree


def test_puncture_kills_top_homology():
    pc = puncture(s3xs3().complex)
    assert pc.complex.dims == (1, 0, 0, 2, 0, 1, 1)
    assert homology(pc.complex).betti_numbers == (1, 0, 0, 2, 0, 0, 0)


def test_puncture_needs_dimension_two():
    with pytest.raises(UnsupportedDimensionError):
        puncture(sphere_minimal(1).complex)


def test_connected_sum_assembly():
    d = assemble_connected_sum(s3xs3(), s3xs3())
    assert validate_ses(d.ses)
    assert d.whole.complex.dims == (1, 0, 0, 4, 0, 1, 2)
    assert d.whole.betti == (1, 0, 0, 4, 0, 0, 1)
    with pytest.raises(UnsupportedDimensionError):
        assemble_connected_sum(sphere_minimal(3), sphere_minimal(3))


def test_hemispheres():
    d = octahedron_hemispheres()
    assert validate_ses(d.ses)
    assert d.seam.dims == (4, 4, 0)


@pytest.mark.parametrize("d", [octahedron_hemispheres(), assemble_connected_sum(s3xs3(), s3xs3())], ids=["octahedron", "s3xs3#s3xs3"])
def test_connected_sum_theorem(d):
    r = verify_connected_sum_theorem(d)
    assert r.ok
    assert r.corrective == 1
    assert abs(r.torsion_whole) == abs(r.torsion_left * r.torsion_right / r.torsion_seam)


@pytest.mark.parametrize("m", [sphere_simplicial(2), s3xs3(), sphere_minimal(2), connected_sum_s3xs3(2)], ids=lambda m: m.name)
def test_punctured_theorem(m):
    r = verify_punctured_theorem(m)
    assert r.ok
    assert r.torsion_disk == 1


def test_punctured_theorem_with_rescaled_bases():
    m = s3xs3()
    h = homology(m.complex, {0: [(3,)], 3: [(2, 1), (0, 5)], 6: [(Fraction(1, 7),)]})
    assert verify_punctured_theorem(m, h).ok


@pytest.mark.parametrize("k", [1, 2, 3])
def test_prime_decomposition(k):
    r = verify_prime_decomposition(k)
    assert r.ok
    assert len(r.summand_torsions) == k + 1
    assert abs(r.torsion_whole) == r.product


@pytest.mark.parametrize("k", [0, 5])
def test_prime_decomposition_range(k):
    with pytest.raises(UnsupportedDimensionError):
        verify_prime_decomposition(k)


def test_decompose_odd_refused():
    with pytest.raises(UnsupportedDimensionError):
        decompose_punctured(sphere_minimal(3))


def test_model_spec_parsing():
    assert parse_model_spec("disk(4)").name == "disk(4)"
    assert parse_model_spec(" point ").dim == 0
    assert parse_model_spec("connected_sum_s3xs3(2)").betti[3] == 4
    for bad in ("torus", "disk(", "disk(x)", "disk", "point(1)", "sphere_simplicial(5)"):
        with pytest.raises(UnknownModelError):
            parse_model_spec(bad)


def test_integral_primitive():
    assert integral_primitive([Fraction(-1, 2), Fraction(1, 3)]) == (3, -2)
    assert integral_primitive([0, 4, 6]) == (0, 2, 3)
    with pytest.raises(ValueError):
        integral_primitive([0, 0])


def test_random_rescalings_even_dimension():
    rng = random.Random(3)
    m = s3xs3()
    for _ in range(5):
        reps = {0: [(rng.randint(1, 5),)], 3: [(rng.randint(1, 4), 1), (1, rng.randint(2, 6))], 6: [(Fraction(1, rng.randint(1, 5)),)]}
        assert intersection_torsion(m, reps) == abs(manifold_torsion(m, reps).value)
