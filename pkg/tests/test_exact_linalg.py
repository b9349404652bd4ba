import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from rftorsion.errors import DimensionMismatchError, NotExpressibleError
from rftorsion.exact_linalg import (
    OrderedBasis,
    RationalMatrix,
    coordinates,
    determinant,
    image_basis,
    inverse,
    kernel_basis,
    pfaffian,
    random_invertible,
    random_unimodular,
    rank,
    rref,
    solve,
    to_fraction,
    transition_determinant,
)

small_ints = st.integers(-4, 4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(0, max_rows).flatmap(
        lambda r: st.integers(0, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: RationalMatrix(rows, r, c)
            )
        )
    )


def square(max_n=5):
    return st.integers(0, max_n).flatmap(
        lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n).map(
            lambda rows: RationalMatrix(rows, n, n)
        )
    )


def leibniz(m):
    n = m.rows
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= m[i, perm[i]]
        total += term
    return total


def to_sympy(m):
    return sympy.Matrix(m.rows, m.cols, [sympy.Rational(x.numerator, x.denominator) for r in m.row_list() for x in r])


def test_frozen_determinants():
    assert determinant(RationalMatrix([[1, 2], [3, 4]])) == -2
    assert determinant(RationalMatrix.zeros(0, 0)) == 1
    assert determinant(RationalMatrix([["1/2", 0], [0, "2/3"]])) == Fraction(1, 3)


@given(square(5))
def test_determinant_matches_leibniz(m):
    assert determinant(m) == leibniz(m)


@given(square(6))
@settings(max_examples=40)
def test_determinant_matches_sympy(m):
    if m.rows:
        assert determinant(m) == Fraction(str(to_sympy(m).det()))


@given(matrices())
def test_rank_matches_sympy(m):
    expected = to_sympy(m).rank() if m.rows and m.cols else 0
    assert rank(m) == expected


@given(matrices())
def test_kernel_is_kernel_and_has_right_size(m):
    k = kernel_basis(m)
    assert len(k) == m.cols - rank(m)
    for v in k:
        assert all(x == 0 for x in m.apply(v))
    assert k.is_independent()


@given(matrices())
def test_image_basis_spans_column_space(m):
    b, pivots = image_basis(m)
    assert len(b) == rank(m) == len(pivots)
    if len(b):
        coordinates(b, m.column_list())  # raises if a column is outside the span


def test_rref_known_matrix():
    r, pivots, rk = rref(RationalMatrix([[2, 4, 1], [1, 2, 0]]))
    assert pivots == [0, 2] and rk == 2
    assert r == RationalMatrix([[1, 2, 0], [0, 0, 1]])


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_inverse_roundtrip(n, seed):
    m = random_invertible(n, random.Random(seed))
    assert m @ inverse(m) == RationalMatrix.identity(n)
    assert inverse(m) @ m == RationalMatrix.identity(n)


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_random_unimodular_has_unit_determinant(n, seed):
    assert abs(determinant(random_unimodular(n, random.Random(seed)))) == 1


def test_solve_and_not_expressible():
    m = RationalMatrix([[1, 0], [0, 0]])
    assert solve(m, [3, 0]) == (3, 0)
    with pytest.raises(NotExpressibleError):
        solve(m, [0, 1])


def test_inverse_of_singular_raises():
    with pytest.raises(NotExpressibleError):
        inverse(RationalMatrix([[1, 2], [2, 4]]))


def test_transition_determinant_full_and_partial_paths():
    f = OrderedBasis(2, ((1, 1), (0, 1)))
    e = OrderedBasis(2, ((2, 2), (1, 3)))
    # e_0 = 2 f_0, e_1 = f_0 + 2 f_1
    assert transition_determinant(e, f) == 4
    # same family inside a 3-dimensional ambient space takes the coordinate path
    f3 = OrderedBasis(3, ((1, 1, 0), (0, 1, 0)))
    e3 = OrderedBasis(3, ((2, 2, 0), (1, 3, 0)))
    assert transition_determinant(e3, f3) == 4
    assert transition_determinant(OrderedBasis(3, ()), OrderedBasis(3, ())) == 1


@given(st.integers(1, 4), st.integers(0, 10**6))
def test_transition_determinant_is_multiplicative(n, seed):
    rng = random.Random(seed)
    a, b, c = (OrderedBasis.from_matrix_rows(random_invertible(n, rng)) for _ in range(3))
    assert transition_determinant(a, c) == transition_determinant(a, b) * transition_determinant(b, c)


def matching_pfaffian(m, idx=None):
    # expansion along the first index over all partners
    idx = list(range(m.rows)) if idx is None else idx
    if not idx:
        return Fraction(1)
    first, rest = idx[0], idx[1:]
    total = Fraction(0)
    for k, j in enumerate(rest):
        total += (-1) ** k * m[first, j] * matching_pfaffian(m, rest[:k] + rest[k + 1 :])
    return total


def test_pfaffian_of_standard_form():
    # Pf [[0, I_l], [-I_l, 0]] = (-1) ** (l (l - 1) / 2)
    j = RationalMatrix([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    assert pfaffian(j) == -1 == matching_pfaffian(j)
    assert pfaffian(RationalMatrix([[0, 3], [-3, 0]])) == 3


@given(st.integers(0, 3), st.integers(0, 10**6))
def test_pfaffian_squared_is_determinant(half, seed):
    rng = random.Random(seed)
    n = 2 * half
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            a[i][j] = rng.randint(-3, 3)
            a[j][i] = -a[i][j]
    m = RationalMatrix(a, n, n)
    assert pfaffian(m) ** 2 == determinant(m)
    assert pfaffian(m) == matching_pfaffian(m)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        to_fraction(0.5)
    assert to_fraction("-3/4") == Fraction(-3, 4)


def test_zero_extent_shapes_are_distinct():
    assert RationalMatrix.zeros(0, 3) != RationalMatrix.zeros(3, 0)
    assert (RationalMatrix.zeros(2, 0) @ RationalMatrix.zeros(0, 3)) == RationalMatrix.zeros(2, 3)
    assert RationalMatrix.zeros(0, 3).T.shape == (3, 0)


def test_shape_errors():
    with pytest.raises(DimensionMismatchError):
        RationalMatrix([[1, 2], [3]])
    with pytest.raises(DimensionMismatchError):
        RationalMatrix([[1, 2]]) @ RationalMatrix([[1, 2]])
