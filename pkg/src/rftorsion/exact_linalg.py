"""Dense linear algebra over the rationals.

Everything here works with :class:`fractions.Fraction` entries and never
rounds.  Matrices are immutable; every operation returns a new value, so the
functions are safe to call concurrently on shared inputs.

Vectors are plain tuples of ``Fraction``.  An ordered basis stores its vectors
as rows, and the transition determinant follows the convention
``e_i = sum_j a_ij f_j``, ``[e -> f] = det(a_ij)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatchError, NonSquareError, NotExpressibleError

Vector = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(x) -> Fraction:
    """Coerce ints, strings like ``"-3/4"`` and Fractions; refuse floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, float):
        raise TypeError(f"refusing float entry {x!r}; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


def vec(entries: Iterable) -> Vector:
    return tuple(to_fraction(x) for x in entries)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class RationalMatrix:
    """An immutable ``rows x cols`` matrix of exact rationals.

    Shapes with a zero extent are legal and carry their other extent, so a
    ``0 x 3`` matrix and a ``3 x 0`` matrix are different values.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable] = (), rows: int | None = None, cols: int | None = None):
        grid = tuple(vec(r) for r in data)
        if rows is None:
            rows = len(grid)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        if len(grid) != rows:
            if grid or rows and cols:
                raise DimensionMismatchError(f"expected {rows} rows, got {len(grid)}")
            grid = tuple(() for _ in range(rows))
        for r in grid:
            if len(r) != cols:
                raise DimensionMismatchError(f"ragged row: expected {cols} entries, got {len(r)}")
        self.rows = rows
        self.cols = cols
        self._data = grid

    @classmethod
    def _trusted(cls, grid: tuple, rows: int, cols: int) -> "RationalMatrix":
        # grid is a tuple of Fraction tuples of the right shape
        m = object.__new__(cls)
        m.rows, m.cols, m._data = rows, cols, grid
        return m

    # construction -----------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(((ZERO,) * cols for _ in range(rows)), rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(((ONE if i == j else ZERO for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def diagonal(cls, entries: Sequence) -> "RationalMatrix":
        d = vec(entries)
        n = len(d)
        return cls(((d[i] if i == j else ZERO for j in range(n)) for i in range(n)), n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RationalMatrix":
        columns = [vec(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise DimensionMismatchError(f"column of length {len(c)} in a {rows}-row matrix")
        return cls(((c[i] for c in columns) for i in range(rows)), rows, len(columns))

    @classmethod
    def from_rows(cls, row_vectors: Sequence[Sequence], cols: int) -> "RationalMatrix":
        return cls(row_vectors, len(row_vectors), cols)

    # access -----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._data)

    def row_list(self) -> list[Vector]:
        return list(self._data)

    def column_list(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    # algebra ----------------------------------------------------------------

    @property
    def T(self) -> "RationalMatrix":
        grid = tuple(zip(*self._data)) if self.rows else tuple(() for _ in range(self.cols))
        return RationalMatrix._trusted(grid, self.cols, self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = other.column_list()
        grid = tuple(tuple(sum((a * b for a, b in zip(r, c) if a and b), ZERO) for c in ocols) for r in self._data)
        return RationalMatrix._trusted(grid, self.rows, other.cols)

    def apply(self, v: Sequence) -> Vector:
        """Matrix-vector product ``self @ v``."""
        v = vec(v)
        if len(v) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(v)} for a {self.shape} matrix")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), ZERO) for r in self._data)

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatchError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        grid = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data))
        return RationalMatrix._trusted(grid, self.rows, self.cols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        grid = tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data))
        return RationalMatrix._trusted(grid, self.rows, self.cols)

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix._trusted(tuple(tuple(c * a for a in r) for r in self._data), self.rows, self.cols)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "RationalMatrix":
        rows = range(self.rows) if rows is None else list(rows)
        cols = range(self.cols) if cols is None else list(cols)
        return RationalMatrix(((self._data[i][j] for j in cols) for i in rows), len(rows), len(cols))

    @staticmethod
    def hstack(*blocks: "RationalMatrix") -> "RationalMatrix":
        if not blocks:
            raise DimensionMismatchError("hstack needs at least one block")
        rows = blocks[0].rows
        for b in blocks:
            if b.rows != rows:
                raise DimensionMismatchError("hstack blocks differ in row count")
        return RationalMatrix(
            (sum((b._data[i] for b in blocks), ()) for i in range(rows)), rows, sum(b.cols for b in blocks)
        )

    @staticmethod
    def vstack(*blocks: "RationalMatrix") -> "RationalMatrix":
        if not blocks:
            raise DimensionMismatchError("vstack needs at least one block")
        cols = blocks[0].cols
        for b in blocks:
            if b.cols != cols:
                raise DimensionMismatchError("vstack blocks differ in column count")
        return RationalMatrix((r for b in blocks for r in b._data), sum(b.rows for b in blocks), cols)

    @staticmethod
    def block_diag(*blocks: "RationalMatrix") -> "RationalMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = []
        left = 0
        for b in blocks:
            for r in b._data:
                out.append((ZERO,) * left + r + (ZERO,) * (cols - left - b.cols))
            left += b.cols
        return RationalMatrix(out, rows, cols)

    # protocol ---------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._data))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_fraction(x) for x in r) for r in self._data)
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"


@dataclass(frozen=True)
class OrderedBasis:
    """Ordered list of coordinate vectors in ``Q^ambient_dim``.

    Linear independence is not enforced at construction (bases are built in
    hot loops); call :meth:`is_independent` to certify it.
    """

    ambient_dim: int
    vectors: tuple = ()
    labels: tuple | None = None

    def __post_init__(self):
        vs = tuple(vec(v) for v in self.vectors)
        for v in vs:
            if len(v) != self.ambient_dim:
                raise DimensionMismatchError(
                    f"basis vector of length {len(v)} in ambient dimension {self.ambient_dim}"
                )
        object.__setattr__(self, "vectors", vs)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(vs):
                raise DimensionMismatchError("label count differs from vector count")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def standard(cls, n: int) -> "OrderedBasis":
        return cls(n, tuple(RationalMatrix.identity(n).row_list()))

    @classmethod
    def from_matrix_rows(cls, m: RationalMatrix) -> "OrderedBasis":
        return cls(m.cols, tuple(m.row_list()))

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def as_matrix(self) -> RationalMatrix:
        """Vectors as the rows of a ``len x ambient_dim`` matrix."""
        return RationalMatrix(self.vectors, len(self.vectors), self.ambient_dim)

    def is_independent(self) -> bool:
        return rank(self.as_matrix()) == len(self.vectors)

    def concat(self, *others: "OrderedBasis") -> "OrderedBasis":
        vs = list(self.vectors)
        for o in others:
            if o.ambient_dim != self.ambient_dim:
                raise DimensionMismatchError("cannot concatenate bases of different ambient spaces")
            vs.extend(o.vectors)
        return OrderedBasis(self.ambient_dim, tuple(vs))

    def transformed(self, coeffs: RationalMatrix) -> "OrderedBasis":
        """New basis whose i-th vector is ``sum_j coeffs[i, j] * self[j]``."""
        return OrderedBasis(self.ambient_dim, tuple((coeffs @ self.as_matrix()).row_list()))


# reduction ------------------------------------------------------------------


def _rref_rows(rows: list[list[Fraction]], ncols: int, stop_col: int | None = None):
    """In-place reduced row echelon form; pivots only searched before ``stop_col``."""
    limit = ncols if stop_col is None else stop_col
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(limit):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if inv != 1:
            rows[r] = pr = [x * inv for x in pr]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f != 0:
                    ri = rows[i]
                    rows[i] = [a - f * b if b else a for a, b in zip(ri, pr)]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: RationalMatrix) -> tuple[RationalMatrix, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    rows = m.tolist()
    pivots = _rref_rows(rows, m.cols)
    return RationalMatrix._trusted(tuple(map(tuple, rows)), m.rows, m.cols), pivots, len(pivots)


def rank(m: RationalMatrix) -> int:
    return rref(m)[2]


def kernel_basis(m: RationalMatrix) -> OrderedBasis:
    """Basis of the null space, one vector per free column in index order."""
    reduced, pivots, _ = rref(m)
    pivset = set(pivots)
    out = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = [ZERO] * m.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -reduced[i, f]
        out.append(tuple(v))
    return OrderedBasis(m.cols, tuple(out))


def image_basis(m: RationalMatrix) -> tuple[OrderedBasis, list[int]]:
    """Columns of ``m`` at its pivot positions, with those column indices.

    Each returned vector is the image of the standard basis vector whose index
    is recorded, which is what lets sections be read off without a solve.
    """
    _, pivots, _ = rref(m)
    return OrderedBasis(m.rows, tuple(m.column(j) for j in pivots)), pivots


def determinant(m: RationalMatrix) -> Fraction:
    if not m.is_square():
        raise NonSquareError(f"determinant of a non-square {m.shape} matrix")
    n = m.rows
    rows = m.tolist()
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            det = -det
        pr = rows[c]
        p = pr[c]
        det *= p
        for i in range(c + 1, n):
            f = rows[i][c]
            if f != 0:
                f = f / p
                ri = rows[i]
                rows[i] = [a - f * b if b else a for a, b in zip(ri, pr)]
    return det


def solve_columns(m: RationalMatrix, rhs: RationalMatrix) -> RationalMatrix:
    """One solution ``X`` of ``m @ X = rhs`` (free variables set to zero).

    Raises NotExpressibleError naming the first right-hand column outside the
    column space of ``m``.
    """
    if rhs.rows != m.rows:
        raise DimensionMismatchError(f"right-hand side has {rhs.rows} rows, matrix has {m.rows}")
    aug = RationalMatrix.hstack(m, rhs).tolist() if m.rows else []
    pivots = _rref_rows(aug, m.cols + rhs.cols, stop_col=m.cols)
    r = len(pivots)
    for i in range(r, m.rows):
        for k in range(rhs.cols):
            if aug[i][m.cols + k] != 0:
                raise NotExpressibleError(f"right-hand column {k} is not in the column space")
    out = [[ZERO] * rhs.cols for _ in range(m.cols)]
    for i, p in enumerate(pivots):
        for k in range(rhs.cols):
            out[p][k] = aug[i][m.cols + k]
    return RationalMatrix._trusted(tuple(map(tuple, out)), m.cols, rhs.cols)


def solve(m: RationalMatrix, b: Sequence) -> Vector:
    """One solution ``x`` of ``m x = b``."""
    b = vec(b)
    x = solve_columns(m, RationalMatrix.from_columns([b], m.rows))
    return x.column(0)


def inverse(m: RationalMatrix) -> RationalMatrix:
    if not m.is_square():
        raise NonSquareError(f"inverse of a non-square {m.shape} matrix")
    try:
        return solve_columns(m, RationalMatrix.identity(m.rows))
    except NotExpressibleError:
        raise NotExpressibleError("matrix is singular") from None


def coordinates(basis: OrderedBasis, vectors: Sequence[Sequence]) -> RationalMatrix:
    """Matrix ``a`` with ``vectors[i] = sum_j a[i, j] basis[j]``.

    Requires ``basis`` to be independent; raises NotExpressibleError if some
    vector is outside its span.
    """
    vs = [vec(v) for v in vectors]
    for v in vs:
        if len(v) != basis.ambient_dim:
            raise DimensionMismatchError("vector and basis live in different ambient spaces")
    if not vs:
        return RationalMatrix.zeros(0, len(basis))
    ft = basis.as_matrix().T
    rhs = RationalMatrix.from_columns(vs, basis.ambient_dim)
    return solve_columns(ft, rhs).T


def transition_determinant(e: OrderedBasis, f: OrderedBasis) -> Fraction:
    """``[e -> f] = det(a)`` where ``e_i = sum_j a_ij f_j``.

    Both bases must span the same subspace.  Two empty bases give 1.
    """
    if e.ambient_dim != f.ambient_dim:
        raise DimensionMismatchError("bases live in different ambient spaces")
    if len(e) != len(f):
        raise DimensionMismatchError(f"bases have {len(e)} and {len(f)} vectors")
    if not len(e):
        return ONE
    if len(f) == f.ambient_dim:
        # full bases: e = a f gives det(e) = det(a) det(f)
        df = determinant(f.as_matrix())
        if df == 0:
            raise NotExpressibleError("target family is not linearly independent")
        return determinant(e.as_matrix()) / df
    if not f.is_independent():
        raise NotExpressibleError("target family is not linearly independent")
    a = coordinates(f, e.vectors)
    d = determinant(a)
    if d == 0:
        raise NotExpressibleError("source family is not a basis of the target span")
    return d


def pfaffian(m: RationalMatrix) -> Fraction:
    """Pfaffian of an antisymmetric matrix by skew-symmetric elimination."""
    if not m.is_square():
        raise NonSquareError(f"pfaffian of a non-square {m.shape} matrix")
    n = m.rows
    a = m.tolist()
    for i in range(n):
        for j in range(n):
            if a[i][j] != -a[j][i]:
                raise ValueError("pfaffian needs an antisymmetric matrix")
    if n % 2:
        return ZERO
    pf = ONE
    for k in range(0, n, 2):
        piv = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
        if piv is None:
            return ZERO
        if piv != k + 1:
            # congruence by a transposition flips the sign of the pfaffian
            a[k + 1], a[piv] = a[piv], a[k + 1]
            for r in a:
                r[k + 1], r[piv] = r[piv], r[k + 1]
            pf = -pf
        p = a[k][k + 1]
        pf *= p
        for i in range(k + 2, n):
            # clear a[k][i] with column k+1 and a[k+1][i] with column k,
            # applying each column operation together with its row twin
            f = a[k][i] / p
            if f != 0:
                for r in range(n):
                    a[r][i] -= f * a[r][k + 1]
                for c in range(n):
                    a[i][c] -= f * a[k + 1][c]
            g = a[k + 1][i] / a[k + 1][k]
            if g != 0:
                for r in range(n):
                    a[r][i] -= g * a[r][k]
                for c in range(n):
                    a[i][c] -= g * a[k][c]
    return pf


# random helpers used by generators and randomized checks --------------------


def random_unimodular(n: int, rng: random.Random, steps: int | None = None, spread: int = 2) -> RationalMatrix:
    """Integer matrix with determinant exactly 1, from elementary row additions."""
    rows = RationalMatrix.identity(n).tolist()
    if n < 2:
        return RationalMatrix(rows, n, n)
    for _ in range(steps if steps is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        k = rng.randint(-spread, spread)
        if k:
            rows[i] = [a + k * b for a, b in zip(rows[i], rows[j])]
    return RationalMatrix(rows, n, n)


def random_invertible(n: int, rng: random.Random, scales: Sequence[int] = (1, -1, 2, -2, 3)) -> RationalMatrix:
    """Unimodular matrix times a random diagonal of small nonzero integers."""
    d = RationalMatrix.diagonal([rng.choice(scales) for _ in range(n)])
    return random_unimodular(n, rng) @ d @ random_unimodular(n, rng)
