"""Symplectic chain complexes and their torsion computed from pairings.

A symplectic chain complex of length ``q = 2 mod 4`` carries nondegenerate
pairings ``w_p : C_p x C_{q-p} -> Q``.  Only ``p <= q/2`` is stored; the rest
follow from ``w_p(a, b) = (-1)**(p(q-p)) w_{q-p}(b, a)``, i.e. as matrices
``W_p = (-1)**p W_{q-p}^T``.  Compatibility with the boundary reads

    d_{p+1}^T W_p = (-1)**(p+1) W_{p+1} d_{q-p}

and at ``p = q/2`` (odd) the pairing is antisymmetric.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Mapping

from .chain_complex import OK, BasedChainComplex, HomologyData, ValidationReport, homology, is_cycle, validate
from .errors import (
    DimensionMismatchError,
    InconsistentHomologyDataError,
    NonSquareDeterminantError,
    NotOmegaCompatibleError,
)
from .exact_linalg import (
    ONE,
    OrderedBasis,
    RationalMatrix,
    determinant,
    inverse,
    pfaffian,
    random_invertible,
    rank,
)
from .torsion import TorsionValue, reidemeister_torsion


def standard_symplectic(l: int) -> RationalMatrix:
    """``[[0, I], [-I, 0]]`` of size ``2l``."""
    z, i = RationalMatrix.zeros(l, l), RationalMatrix.identity(l)
    return RationalMatrix.vstack(RationalMatrix.hstack(z, i), RationalMatrix.hstack(-i, z))


def hyperbolic_symmetric(l: int) -> RationalMatrix:
    """``[[0, I], [I, 0]]`` of size ``2l``."""
    z, i = RationalMatrix.zeros(l, l), RationalMatrix.identity(l)
    return RationalMatrix.vstack(RationalMatrix.hstack(z, i), RationalMatrix.hstack(i, z))


class SymplecticChainComplex:
    def __init__(self, complex: BasedChainComplex, pairings: Mapping[int, RationalMatrix]):
        self.complex = complex
        self.q = complex.length
        self.pairings = {int(p): m if isinstance(m, RationalMatrix) else RationalMatrix(m, complex.dim(p), complex.dim(self.q - p)) for p, m in pairings.items()}

    @property
    def middle(self) -> int:
        return self.q // 2

    def pairing(self, p: int) -> RationalMatrix:
        """Matrix of ``w_p`` (rows: basis of ``C_p``, columns: basis of ``C_{q-p}``)."""
        if p <= self.middle:
            if p not in self.pairings:
                raise DimensionMismatchError(f"no pairing stored for degree {p}")
            return self.pairings[p]
        m = self.pairing(self.q - p).T
        return m if p % 2 == 0 else -m


def validate_symplectic(s: SymplecticChainComplex) -> ValidationReport:
    c, q = s.complex, s.q
    r = validate(c)
    if not r:
        return r
    if q % 4 != 2:
        return ValidationReport(False, None, f"length {q} is not 2 mod 4")
    for p in range(s.middle + 1):
        if p not in s.pairings:
            return ValidationReport(False, p, "pairing missing")
        m = s.pairings[p]
        if m.shape != (c.dim(p), c.dim(q - p)):
            return ValidationReport(False, p, f"pairing has shape {m.shape}, expected {(c.dim(p), c.dim(q - p))}")
    mid = s.pairing(s.middle)
    if mid != -mid.T:
        return ValidationReport(False, s.middle, "middle pairing is not antisymmetric")
    for p in range(s.middle + 1):
        m = s.pairings[p]
        if not m.is_square() or rank(m) != m.rows:
            return ValidationReport(False, p, "pairing is degenerate")
    for p in range(q):
        lhs = c.boundary(p + 1).T @ s.pairing(p)
        rhs = s.pairing(p + 1) @ c.boundary(q - p)
        if lhs != (rhs if (p + 1) % 2 == 0 else -rhs):
            return ValidationReport(False, p, f"pairing is not compatible with the boundary at degree {p}")
    return OK


def pairing_matrix(s: SymplecticChainComplex, p: int, left: OrderedBasis, right: OrderedBasis) -> RationalMatrix:
    """``[w_p(left_i, right_j)]``."""
    if left.ambient_dim != s.complex.dim(p) or right.ambient_dim != s.complex.dim(s.q - p):
        raise DimensionMismatchError(f"degree {p}: bases do not match the chain dimensions")
    return left.as_matrix() @ s.pairing(p) @ right.as_matrix().T


def normal_form(s: SymplecticChainComplex, p: int, verbatim: bool = False) -> RationalMatrix:
    k = s.complex.dim(p)
    if p != s.middle:
        return RationalMatrix.identity(k)
    return hyperbolic_symmetric(k // 2) if verbatim else standard_symplectic(k // 2)


def check_omega_compatible(s: SymplecticChainComplex, bases: Mapping[int, OrderedBasis], verbatim: bool = False) -> bool:
    """True iff every pairing ``p <= q/2`` is in normal form in ``bases``.

    The normal form is the identity off the middle and ``[[0, I], [-I, 0]]``
    at the middle; ``verbatim=True`` asks for the symmetric block
    ``[[0, I], [I, 0]]`` instead, which an antisymmetric pairing of nonzero
    rank can never match.
    """
    for p in range(s.middle + 1):
        for d in (p, s.q - p):
            if d not in bases:
                raise DimensionMismatchError(f"no basis given for degree {d}")
            if len(bases[d]) != s.complex.dim(d) or bases[d].ambient_dim != s.complex.dim(d):
                raise DimensionMismatchError(f"basis for degree {d} has the wrong size")
        if pairing_matrix(s, p, bases[p], bases[s.q - p]) != normal_form(s, p, verbatim):
            return False
    return True


def standard_bases(s: SymplecticChainComplex) -> dict:
    return {p: OrderedBasis.standard(s.complex.dim(p)) for p in range(s.q + 1)}


def _symplectic_basis(omega: RationalMatrix) -> RationalMatrix:
    """Rows ``e_1..e_l, f_1..f_l`` with ``E omega E^T = [[0, I], [-I, 0]]``."""
    n = omega.rows
    form = lambda u, v: sum((a * x for a, x in zip(u, omega.apply(v))), Fraction(0))
    pool = RationalMatrix.identity(n).row_list()
    es, fs = [], []
    while pool:
        v = pool.pop(0)
        if all(x == 0 for x in v):
            continue
        j = next((j for j, w in enumerate(pool) if form(v, w) != 0), None)
        if j is None:
            raise NotOmegaCompatibleError("pairing is degenerate")
        w = pool.pop(j)
        c = form(v, w)
        w = tuple(x / c for x in w)
        es.append(v)
        fs.append(w)
        pool = [
            tuple(a - form(u, w) * x + form(u, v) * y for a, x, y in zip(u, v, w))
            for u in pool
        ]
    return RationalMatrix(es + fs, n, n)


def omega_normalize(s: SymplecticChainComplex) -> dict:
    """Bases in which every pairing takes its normal form.

    Below the middle ``C_p`` keeps its standard basis and ``C_{q-p}`` gets the
    dual basis; the middle degree gets a symplectic basis.
    """
    bases = {}
    for p in range(s.middle):
        w = s.pairing(p)
        bases[p] = OrderedBasis.standard(s.complex.dim(p))
        bases[s.q - p] = OrderedBasis.from_matrix_rows(inverse(w).T)
    bases[s.middle] = OrderedBasis.from_matrix_rows(_symplectic_basis(s.pairing(s.middle)))
    return bases


def induced_homology_pairing(s: SymplecticChainComplex, p: int, hp: OrderedBasis, hq: OrderedBasis) -> RationalMatrix:
    """Pairing of homology representatives in degrees ``p`` and ``q - p``."""
    for d, h in ((p, hp), (s.q - p, hq)):
        for v in h:
            if not is_cycle(s.complex, d, v):
                raise InconsistentHomologyDataError(f"degree {d}: {v} is not a cycle")
    return pairing_matrix(s, p, hp, hq)


def _rational_sqrt(x: Fraction) -> Fraction:
    if x < 0:
        raise NonSquareDeterminantError(f"{x} is negative")
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise NonSquareDeterminantError(f"{x} is not the square of a rational")
    return Fraction(rn, rd)


def middle_root(m: RationalMatrix) -> Fraction:
    """``sqrt|det m|``: the absolute Pfaffian for antisymmetric ``m``, else a rational root."""
    if m == -m.T:
        return abs(pfaffian(m))
    return _rational_sqrt(abs(determinant(m)))


@dataclass(frozen=True)
class SymplecticTorsionReport:
    closed_form: Fraction
    milnor: Fraction
    factors: tuple  # (degree, value, exponent) for each term of the closed form

    @property
    def abs_equal(self) -> bool:
        return abs(self.closed_form) == abs(self.milnor)


def _homology_data(s: SymplecticChainComplex, h) -> HomologyData:
    if h is None:
        return homology(s.complex)
    if isinstance(h, HomologyData):
        return h
    return homology(s.complex, h)


def symplectic_torsion(
    s: SymplecticChainComplex,
    h: HomologyData | Mapping | None = None,
    chain_bases: Mapping[int, OrderedBasis] | None = None,
    verbatim: bool = False,
) -> TorsionValue:
    """Absolute torsion from the pairings on homology:

        prod_{p < q/2} |det [w_p on h]| ** (-1)**p  *  sqrt|det [w_{q/2} on h]| ** (-1)**(q/2)
    """
    return TorsionValue(_closed_form(s, _homology_data(s, h), chain_bases, verbatim)[0])


def _closed_form(s, hd, chain_bases, verbatim):
    r = validate_symplectic(s)
    if not r:
        raise NotOmegaCompatibleError(f"not a symplectic complex: {r.message}")
    bases = chain_bases or standard_bases(s)
    if not check_omega_compatible(s, bases, verbatim):
        raise NotOmegaCompatibleError("chain bases are not in normal form for the pairings")
    value = ONE
    factors = []
    for p in range(s.middle):
        d = abs(determinant(induced_homology_pairing(s, p, hd.reps[p], hd.reps[s.q - p])))
        if d == 0:
            raise NotOmegaCompatibleError(f"homology pairing in degree {p} is degenerate")
        factors.append((p, d, 1 if p % 2 == 0 else -1))
        value = value * d if p % 2 == 0 else value / d
    mid = s.middle
    root = middle_root(induced_homology_pairing(s, mid, hd.reps[mid], hd.reps[mid]))
    if root == 0:
        raise NotOmegaCompatibleError("middle homology pairing is degenerate")
    factors.append((mid, root, 1 if mid % 2 == 0 else -1))
    value = value * root if mid % 2 == 0 else value / root
    return value, tuple(factors)


def compare_with_milnor(
    s: SymplecticChainComplex,
    h: HomologyData | Mapping | None = None,
    chain_bases: Mapping[int, OrderedBasis] | None = None,
) -> SymplecticTorsionReport:
    hd = _homology_data(s, h)
    value, factors = _closed_form(s, hd, chain_bases, False)
    milnor = reidemeister_torsion(s.complex, hd, chain_bases=chain_bases).value
    return SymplecticTorsionReport(value, milnor, factors)


def _random_symplectic_matrix(l: int, rng: random.Random) -> RationalMatrix:
    """Product of shears ``[[I, S], [0, I]]`` and ``[[I, 0], [S, I]]`` with symmetric ``S``."""
    p = RationalMatrix.identity(2 * l)
    for k in range(3):
        sm = [[0] * l for _ in range(l)]
        for i in range(l):
            for j in range(i, l):
                sm[i][j] = sm[j][i] = rng.randint(-2, 2)
        s = RationalMatrix(sm, l, l)
        i, z = RationalMatrix.identity(l), RationalMatrix.zeros(l, l)
        shear = (
            RationalMatrix.vstack(RationalMatrix.hstack(i, s), RationalMatrix.hstack(z, i))
            if k % 2 == 0
            else RationalMatrix.vstack(RationalMatrix.hstack(i, z), RationalMatrix.hstack(s, i))
        )
        p = p @ shear
    return p


def random_q2(rng: random.Random, max_k: int = 3, max_l: int = 3) -> SymplecticChainComplex:
    """Random q = 2 complex ``Q^k <- Q^2l <- Q^k`` whose standard bases are in normal form.

    ``d_1`` has isotropic rows for the standard symplectic form and
    ``d_2 = J d_1^T``, which makes the pairings boundary-compatible.
    """
    k = rng.randint(1, max_k)
    l = rng.randint(1, max_l)
    r = rng.randint(0, min(k, l))
    j = standard_symplectic(l)
    sel = [[1 if (row == col and row < r) else 0 for col in range(2 * l)] for row in range(k)]
    d1 = random_invertible(k, rng) @ RationalMatrix(sel, k, 2 * l) @ _random_symplectic_matrix(l, rng)
    d2 = j @ d1.T
    c = BasedChainComplex([k, 2 * l, k], [d1, d2])
    return SymplecticChainComplex(c, {0: RationalMatrix.identity(k), 1: j})


def random_homology_reps(s: SymplecticChainComplex, rng: random.Random) -> dict:
    """Random representatives: invertible recombinations of the defaults plus boundaries."""
    hd = homology(s.complex)
    reps = {}
    for p in range(s.q + 1):
        h = hd.reps[p]
        if not len(h):
            reps[p] = h
            continue
        moved = h.transformed(random_invertible(len(h), rng))
        bs = hd.boundaries[p]
        vs = []
        for v in moved:
            for b in bs:
                k = rng.randint(-2, 2)
                v = tuple(a + k * x for a, x in zip(v, b))
            vs.append(v)
        reps[p] = OrderedBasis(h.ambient_dim, tuple(vs))
    return reps
