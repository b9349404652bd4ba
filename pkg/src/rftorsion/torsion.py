"""Reidemeister-Franz torsion of a based chain complex and the change-of-basis law.

With ``N_p`` the combined basis ``b_p, l_p(h_p), s_p(b_{p-1})`` of ``C_p``,

    T(C, c, h) = prod_p [c_p -> N_p] ** (-1) ** (p + 1)

where ``[e -> f]`` is the determinant of the matrix expressing ``e`` in ``f``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .chain_complex import BasedChainComplex, HomologyData, HomologySplitting, class_matrix, homology, split
from .errors import DimensionMismatchError, NotExpressibleError, TorsionError
from .exact_linalg import ONE, OrderedBasis, coordinates, determinant, rank, transition_determinant


@dataclass(frozen=True)
class TorsionValue:
    value: Fraction
    factors: tuple = ()  # [c_p -> N_p] for p = 0..n, before the alternating exponent

    def __post_init__(self):
        if self.value == 0:
            raise TorsionError("torsion must be nonzero")

    @property
    def absolute(self) -> Fraction:
        return abs(self.value)

    def __str__(self) -> str:
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def alternating_product(factors: Sequence[Fraction], shift: int = 1) -> Fraction:
    """``prod_p factors[p] ** (-1) ** (p + shift)``."""
    out = ONE
    for p, f in enumerate(factors):
        out = out * f if (p + shift) % 2 == 0 else out / f
    return out


def reidemeister_torsion(
    c: BasedChainComplex,
    h: HomologyData | None = None,
    *,
    splitting: HomologySplitting | None = None,
    rng: random.Random | None = None,
    chain_bases: Mapping[int, OrderedBasis] | None = None,
) -> TorsionValue:
    """Torsion of ``c`` with homology representatives ``h``.

    ``chain_bases`` replaces the standard preferred basis in selected degrees;
    ``rng`` draws a random splitting, which must not change the result.
    """
    if h is None:
        h = homology(c)
    if splitting is None:
        splitting = split(c, h, rng)
    factors = []
    for p in range(c.length + 1):
        cp = (chain_bases or {}).get(p) or OrderedBasis.standard(c.dim(p))
        factors.append(transition_determinant(cp, splitting.combined[p]))
    return TorsionValue(alternating_product(factors), tuple(factors))


def change_of_basis(
    t: TorsionValue | Fraction,
    old_c: Mapping[int, OrderedBasis] | Sequence[OrderedBasis],
    new_c: Mapping[int, OrderedBasis] | Sequence[OrderedBasis],
    old_h: Mapping[int, OrderedBasis] | Sequence[OrderedBasis],
    new_h: Mapping[int, OrderedBasis] | Sequence[OrderedBasis],
    *,
    complex: BasedChainComplex | None = None,
    hdata: HomologyData | None = None,
) -> TorsionValue:
    """Torsion after replacing chain bases ``c`` by ``c'`` and homology bases ``h`` by ``h'``:

        T' = T * prod_p ([c_p -> c'_p] / [h_p -> h'_p]) ** (-1) ** p

    Homology bases are cycle representatives.  Without ``complex`` the two
    families must span the same subspace; with ``complex`` (and optionally its
    ``hdata``) they are compared as homology classes, so representatives may
    differ by boundaries.  Degrees absent from a mapping are left unchanged.
    """
    value = t.value if isinstance(t, TorsionValue) else Fraction(t)
    old_c, new_c, old_h, new_h = (
        dict(x.items()) if isinstance(x, Mapping) else dict(enumerate(x)) for x in (old_c, new_c, old_h, new_h)
    )
    if set(old_c) != set(new_c) or set(old_h) != set(new_h):
        raise TorsionError("old and new bases must be given for the same degrees")
    if complex is not None and hdata is None:
        hdata = homology(complex)
    for p in old_c:
        f = transition_determinant(old_c[p], new_c[p])
        value = value * f if p % 2 == 0 else value / f
    for p in old_h:
        if complex is None:
            f = transition_determinant(old_h[p], new_h[p])
        else:
            f = homology_transition(complex, hdata, p, old_h[p], new_h[p])
        value = value / f if p % 2 == 0 else value * f
    return TorsionValue(value)


def homology_transition(c: BasedChainComplex, h: HomologyData, p: int, old: Sequence, new: Sequence) -> Fraction:
    """``[old -> new]`` for two families of cycles, computed on homology classes."""
    old = list(old)
    new = list(new)
    if len(old) != len(new):
        raise DimensionMismatchError(f"degree {p}: {len(old)} and {len(new)} classes")
    if not old:
        return ONE
    a = class_matrix(c, h, p, old).T  # rows: classes of old in the reference basis
    b = class_matrix(c, h, p, new).T
    coeffs = coordinates(OrderedBasis(b.cols, tuple(b.row_list())), a.row_list())
    d = determinant(coeffs)
    if d == 0:
        raise NotExpressibleError(f"degree {p}: old classes are not a basis")
    return d


def direct_sum_sign(a: BasedChainComplex, ha: HomologyData, d: BasedChainComplex, hd: HomologyData) -> int:
    """Sign ``T(a + d) / (T(a) T(d))`` for concatenated bases.

    In degree ``p`` the combined basis of the sum lists ``b_a b_d h_a h_d s_a s_d``
    while the product uses ``b_a h_a s_a b_d h_d s_d``; the sign is the parity
    of that shuffle, ``beta_d (eta_a + sigma_a) + eta_d sigma_a`` summed over ``p``
    (``beta`` = rank of the incoming boundary, ``eta`` = Betti number,
    ``sigma`` = rank of the outgoing boundary).
    """
    n = max(a.length, d.length)
    a, d = a.padded(n), d.padded(n)
    ra = [rank(a.boundary(p)) for p in range(n + 2)]
    rd = [rank(d.boundary(p)) for p in range(n + 2)]
    parity = 0
    for p in range(n + 1):
        parity += rd[p + 1] * (ha.betti(p) + ra[p]) + hd.betti(p) * ra[p]
    return -1 if parity % 2 else 1
