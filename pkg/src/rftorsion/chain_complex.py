"""Finite based chain complexes over Q, their homology and splittings.

A complex ``0 -> C_n -> ... -> C_0 -> 0`` is stored by its dimensions
``m_0..m_n`` and the matrices of ``d_p : C_p -> C_{p-1}`` (shape
``m_{p-1} x m_p``, columns are images of basis vectors).  The preferred basis
in every degree is the standard coordinate basis.  Degrees outside ``0..n``
are zero spaces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionMismatchError, InconsistentHomologyDataError, InvalidComplexError
from .exact_linalg import (
    ZERO,
    OrderedBasis,
    RationalMatrix,
    coordinates,
    image_basis,
    inverse,
    kernel_basis,
    random_invertible,
    rank,
    vec,
)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    degree: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


OK = ValidationReport(True)


class BasedChainComplex:
    """Chain complex with the standard basis as preferred basis in each degree."""

    def __init__(self, dims: Sequence[int], boundaries: Sequence, cell_labels: Sequence | None = None):
        dims = tuple(int(m) for m in dims)
        if not dims:
            raise InvalidComplexError("a complex needs at least degree 0")
        if any(m < 0 for m in dims):
            raise InvalidComplexError("negative dimension")
        bds = []
        for p, b in enumerate(boundaries, start=1):
            if not isinstance(b, RationalMatrix):
                rows = dims[p - 1] if p - 1 < len(dims) else 0
                cols = dims[p] if p < len(dims) else 0
                b = RationalMatrix(b, rows, cols)
            bds.append(b)
        if len(bds) != len(dims) - 1:
            raise InvalidComplexError(f"{len(dims)} degrees need {len(dims) - 1} boundary matrices, got {len(bds)}")
        self.dims = dims
        self.boundaries = tuple(bds)
        if cell_labels is not None:
            cell_labels = tuple(tuple(str(x) for x in labels) for labels in cell_labels)
            if len(cell_labels) != len(dims) or any(len(l) != m for l, m in zip(cell_labels, dims)):
                raise InvalidComplexError("cell labels do not match the dimensions")
        self.cell_labels = cell_labels

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def dim(self, p: int) -> int:
        return self.dims[p] if 0 <= p < len(self.dims) else 0

    def boundary(self, p: int) -> RationalMatrix:
        """``d_p : C_p -> C_{p-1}``; a zero matrix outside ``1..n``."""
        if 1 <= p <= self.length:
            return self.boundaries[p - 1]
        return RationalMatrix.zeros(self.dim(p - 1), self.dim(p))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BasedChainComplex):
            return NotImplemented
        return self.dims == other.dims and self.boundaries == other.boundaries

    def __hash__(self) -> int:
        return hash((self.dims, self.boundaries))

    def __repr__(self) -> str:
        return f"BasedChainComplex(dims={self.dims})"

    def padded(self, length: int) -> "BasedChainComplex":
        """Same complex with zero spaces appended up to ``length``."""
        if length < self.length:
            raise DimensionMismatchError("cannot pad a complex to a shorter length")
        extra = length - self.length
        dims = self.dims + (0,) * extra
        bds = list(self.boundaries) + [RationalMatrix.zeros(dims[p - 1], 0) for p in range(self.length + 1, length + 1)]
        labels = None if self.cell_labels is None else self.cell_labels + ((),) * extra
        return BasedChainComplex(dims, bds, labels)


def validate(c: BasedChainComplex) -> ValidationReport:
    """Check shapes and ``d_p d_{p+1} = 0``; the first failure is reported."""
    for p in range(1, c.length + 1):
        b = c.boundary(p)
        if b.shape != (c.dim(p - 1), c.dim(p)):
            return ValidationReport(False, p, f"d_{p} has shape {b.shape}, expected {(c.dim(p - 1), c.dim(p))}")
    for p in range(1, c.length):
        if not (c.boundary(p) @ c.boundary(p + 1)).is_zero():
            return ValidationReport(False, p, f"d_{p} d_{p + 1} is not zero")
    return OK


def require_valid(c: BasedChainComplex) -> None:
    report = validate(c)
    if not report:
        raise InvalidComplexError(report.message)


def is_cycle(c: BasedChainComplex, p: int, v: Sequence) -> bool:
    return all(x == 0 for x in c.boundary(p).apply(v))


@dataclass(frozen=True)
class HomologyData:
    """Per degree: cycles, boundary basis (with preimage columns) and homology representatives."""

    cycles: tuple
    boundaries: tuple
    boundary_preimages: tuple
    reps: tuple

    @property
    def length(self) -> int:
        return len(self.reps) - 1

    def betti(self, p: int) -> int:
        return len(self.reps[p]) if 0 <= p < len(self.reps) else 0

    @property
    def betti_numbers(self) -> tuple:
        return tuple(len(h) for h in self.reps)

    def with_reps(self, reps: Mapping[int, Sequence] | Sequence) -> "HomologyData":
        """Copy with some or all homology representatives replaced (unchecked)."""
        new = list(self.reps)
        items = reps.items() if isinstance(reps, Mapping) else enumerate(reps)
        for p, h in items:
            new[p] = h if isinstance(h, OrderedBasis) else OrderedBasis(self.cycles[p].ambient_dim, tuple(h))
        return HomologyData(self.cycles, self.boundaries, self.boundary_preimages, tuple(new))


def _complete(base: OrderedBasis, candidates: OrderedBasis) -> list:
    """Greedily pick candidates that stay independent of ``base`` and of each other."""
    chosen = []
    current = base.as_matrix()
    r = rank(current)
    for v in candidates:
        trial = RationalMatrix.vstack(current, RationalMatrix([v], 1, base.ambient_dim))
        rt = rank(trial)
        if rt > r:
            chosen.append(v)
            current, r = trial, rt
    return chosen


def check_reps(c: BasedChainComplex, p: int, boundary_basis: OrderedBasis, betti: int, reps: OrderedBasis) -> None:
    if reps.ambient_dim != c.dim(p):
        raise InconsistentHomologyDataError(f"degree {p}: representatives live in dimension {reps.ambient_dim}, expected {c.dim(p)}")
    if len(reps) != betti:
        raise InconsistentHomologyDataError(f"degree {p}: {len(reps)} representatives for betti number {betti}")
    for v in reps:
        if not is_cycle(c, p, v):
            raise InconsistentHomologyDataError(f"degree {p}: representative {v} is not a cycle")
    if rank(boundary_basis.concat(reps).as_matrix()) != len(boundary_basis) + betti:
        raise InconsistentHomologyDataError(f"degree {p}: representatives are dependent modulo boundaries")


def homology(c: BasedChainComplex, reps: Mapping[int, Sequence] | Sequence | None = None) -> HomologyData:
    """Homology with explicit representatives.

    Default representatives complete the boundary basis to a cycle basis using
    kernel-basis vectors in index order.  ``reps`` overrides chosen degrees
    (a mapping degree -> vectors, or a full per-degree list) and is checked.
    """
    require_valid(c)
    n = c.length
    override = {}
    if reps is not None:
        override = dict(reps.items()) if isinstance(reps, Mapping) else dict(enumerate(reps))
    cycles, bounds, pre, hs = [], [], [], []
    for p in range(n + 1):
        z = kernel_basis(c.boundary(p))
        b, cols = image_basis(c.boundary(p + 1))
        betti = len(z) - len(b)
        if p in override and override[p] is not None:
            h = override[p]
            h = h if isinstance(h, OrderedBasis) else OrderedBasis(c.dim(p), tuple(h))
            check_reps(c, p, b, betti, h)
        else:
            h = OrderedBasis(c.dim(p), tuple(_complete(b, z)))
        cycles.append(z)
        bounds.append(b)
        pre.append(tuple(cols))
        hs.append(h)
    for p in override:
        if not 0 <= p <= n:
            raise InconsistentHomologyDataError(f"representatives given for degree {p} outside 0..{n}")
    return HomologyData(tuple(cycles), tuple(bounds), tuple(pre), tuple(hs))


def check_homology_data(c: BasedChainComplex, h: HomologyData) -> None:
    if h.length != c.length:
        raise InconsistentHomologyDataError(f"homology data of length {h.length} for a complex of length {c.length}")
    for p in range(c.length + 1):
        b = h.boundaries[p]
        betti = len(h.cycles[p]) - len(b)
        check_reps(c, p, b, betti, h.reps[p])


def homology_coordinates(c: BasedChainComplex, h: HomologyData, p: int, cycle: Sequence) -> tuple:
    """Coordinates of the class of ``cycle`` in the representatives ``h.reps[p]``."""
    cycle = vec(cycle)
    if not is_cycle(c, p, cycle):
        raise InconsistentHomologyDataError(f"degree {p}: vector {cycle} is not a cycle")
    basis = h.reps[p].concat(h.boundaries[p])
    row = coordinates(basis, [cycle]).row(0) if len(basis) else ()
    return row[: len(h.reps[p])]


def class_matrix(c: BasedChainComplex, h: HomologyData, p: int, cycles: Sequence) -> RationalMatrix:
    """Matrix whose columns are the homology coordinates of ``cycles``."""
    cols = [homology_coordinates(c, h, p, z) for z in cycles]
    return RationalMatrix.from_columns(cols, h.betti(p))


@dataclass(frozen=True)
class HomologySplitting:
    """Per degree the decomposition ``C_p = b_p + l_p(h_p) + s_p(b_{p-1})``."""

    boundary_bases: tuple
    lifted_homology: tuple
    sections: tuple
    combined: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self,
            "combined",
            tuple(b.concat(h, s) for b, h, s in zip(self.boundary_bases, self.lifted_homology, self.sections)),
        )


def _random_cycle(z: OrderedBasis, rng: random.Random) -> tuple:
    out = [ZERO] * z.ambient_dim
    for v in z:
        k = rng.randint(-3, 3)
        if k:
            out = [a + k * x for a, x in zip(out, v)]
    return tuple(out)


def split(c: BasedChainComplex, h: HomologyData, rng: random.Random | None = None) -> HomologySplitting:
    """Realize the three-way splitting of every chain space.

    Sections send each boundary basis vector to its recorded preimage column.
    With ``rng`` the boundary bases are replaced by random invertible
    recombinations, sections are shifted by random cycles and the homology
    representatives by random boundaries; the torsion must not notice.
    """
    check_homology_data(c, h)
    n = c.length
    bases = list(h.boundaries)
    secs = []
    for p in range(n + 1):
        # sections in degree p cover the boundary basis of degree p-1
        if p == 0:
            secs.append(OrderedBasis(c.dim(0), ()))
            continue
        cols = h.boundary_preimages[p - 1]
        secs.append(OrderedBasis(c.dim(p), tuple(tuple(Fraction(int(i == j)) for i in range(c.dim(p))) for j in cols)))
    reps = list(h.reps)
    if rng is not None:
        for p in range(n + 1):
            k = len(bases[p])
            if k:
                g = random_invertible(k, rng)
                bases[p] = bases[p].transformed(g)
                moved = secs[p + 1].transformed(g)
                z = h.cycles[p + 1]
                secs[p + 1] = OrderedBasis(
                    c.dim(p + 1),
                    tuple(tuple(a + x for a, x in zip(v, _random_cycle(z, rng))) for v in moved),
                )
            if len(reps[p]) and len(h.boundaries[p]):
                reps[p] = OrderedBasis(
                    c.dim(p),
                    tuple(tuple(a + x for a, x in zip(v, _random_cycle(h.boundaries[p], rng))) for v in reps[p]),
                )
    for p in range(1, n + 1):
        d = c.boundary(p)
        for s, b in zip(secs[p], bases[p - 1]):
            if d.apply(s) != b:
                raise InconsistentHomologyDataError(f"degree {p}: section does not map onto its boundary vector")
    return HomologySplitting(tuple(bases), tuple(reps), tuple(secs))


def direct_sum(a: BasedChainComplex, d: BasedChainComplex) -> BasedChainComplex:
    """Block-diagonal sum; the shorter complex is padded with zero degrees."""
    n = max(a.length, d.length)
    a, d = a.padded(n), d.padded(n)
    dims = tuple(x + y for x, y in zip(a.dims, d.dims))
    bds = [RationalMatrix.block_diag(a.boundary(p), d.boundary(p)) for p in range(1, n + 1)]
    return BasedChainComplex(dims, bds)


def direct_sum_homology(a: BasedChainComplex, ha: HomologyData, d: BasedChainComplex, hd: HomologyData) -> dict:
    """Representatives of ``H(a + d)`` as the concatenation ``ha`` then ``hd``."""
    n = max(a.length, d.length)
    reps = {}
    for p in range(n + 1):
        ma, md = a.dim(p), d.dim(p)
        va = ha.reps[p].vectors if p <= a.length else ()
        vd = hd.reps[p].vectors if p <= d.length else ()
        reps[p] = [tuple(v) + (ZERO,) * md for v in va] + [(ZERO,) * ma + tuple(v) for v in vd]
    return reps


def is_chain_map(src: BasedChainComplex, tgt: BasedChainComplex, maps: Sequence[RationalMatrix]) -> ValidationReport:
    """``maps[p] : src_p -> tgt_p`` commutes with the boundaries."""
    n = max(src.length, tgt.length)
    for p in range(n + 1):
        f = maps[p]
        if f.shape != (tgt.dim(p), src.dim(p)):
            return ValidationReport(False, p, f"map in degree {p} has shape {f.shape}")
    for p in range(1, n + 1):
        if tgt.boundary(p) @ maps[p] != maps[p - 1] @ src.boundary(p):
            return ValidationReport(False, p, f"map does not commute with d_{p}")
    return OK


def random_complex(
    rng: random.Random,
    max_length: int = 4,
    max_dim: int = 6,
    acyclic: bool = False,
    length: int | None = None,
) -> BasedChainComplex:
    """Random valid complex with small rational entries.

    Built in split normal form (a boundary part, a homology part and a section
    part in each degree) and then conjugated by random invertible matrices.
    """
    n = rng.randint(1, max_length) if length is None else length
    ranks = [0] * (n + 2)  # ranks[p] = rank of d_p
    dims = []
    for p in range(n + 1):
        room = max_dim - ranks[p]
        r_next = rng.randint(0, room) if p < n else 0
        extra = 0 if acyclic else rng.randint(0, room - r_next)
        ranks[p + 1] = r_next
        dims.append(ranks[p] + r_next + extra)
    # normal form: in degree p the basis is [b (ranks[p+1]) | h | s (ranks[p])]
    bds = []
    for p in range(1, n + 1):
        rows, cols = dims[p - 1], dims[p]
        r = ranks[p]
        m = [[ZERO] * cols for _ in range(rows)]
        for k in range(r):
            m[k][cols - r + k] = Fraction(rng.choice([1, -1, 2, -3, 3]))
            if k + 1 < r and rng.random() < 0.5:
                m[k + 1][cols - r + k] = Fraction(rng.randint(-2, 2))
        bds.append(RationalMatrix(m, rows, cols))
    gs = [random_invertible(m, rng) for m in dims]
    conj = [gs[p - 1] @ bds[p - 1] @ inverse(gs[p]) for p in range(1, n + 1)]
    return BasedChainComplex(dims, conj)
