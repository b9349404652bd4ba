"""Short exact sequences of based complexes and their long exact homology sequences.

For ``0 -> A -> B -> D -> 0`` the long exact sequence is stored as an acyclic
based complex ``H`` of length ``3n + 2`` with

    H_{3p} = H_p(D),  H_{3p+1} = H_p(B),  H_{3p+2} = H_p(A)

and boundaries ``i_* : H_{3p+2} -> H_{3p+1}``, ``pi_* : H_{3p+1} -> H_{3p}`` and
the connecting map ``delta_p : H_{3p} -> H_{3p-1}``, so every arrow lowers
the slot index by one.  The chain bases of ``H`` are the homology bases of
``A``, ``B`` and ``D``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chain_complex import (
    OK,
    BasedChainComplex,
    HomologyData,
    ValidationReport,
    class_matrix,
    direct_sum,
    homology,
    is_chain_map,
    random_complex,
    require_valid,
    validate,
)
from .errors import (
    DimensionMismatchError,
    IncompatibleBasesError,
    InconsistentHomologyDataError,
    LiftFailureError,
    NotExactError,
    NotExpressibleError,
)
from .exact_linalg import (
    ONE,
    OrderedBasis,
    RationalMatrix,
    determinant,
    inverse,
    kernel_basis,
    random_unimodular,
    rank,
    solve_columns,
)
from .torsion import TorsionValue, reidemeister_torsion

__all__ = [
    "ChainSES",
    "LongExactSequence",
    "MultiplicativityReport",
    "build_long_exact_sequence",
    "compatible_bases_check",
    "connecting_homomorphism",
    "corrective_term",
    "direct_sum",
    "direct_sum_ses",
    "induced_map",
    "multiplicativity_sign",
    "random_ses",
    "validate_ses",
    "verify_multiplicativity",
]


class ChainSES:
    """``0 -> a --i--> b --pi--> d -> 0`` with per-degree matrices ``i[p]``, ``pi[p]``."""

    def __init__(self, a: BasedChainComplex, b: BasedChainComplex, d: BasedChainComplex, i: Sequence, pi: Sequence):
        n = max(a.length, b.length, d.length)
        self.a, self.b, self.d = a.padded(n), b.padded(n), d.padded(n)
        self.i = tuple(self._mat(m, self.b.dim(p), self.a.dim(p)) for p, m in enumerate(i))
        self.pi = tuple(self._mat(m, self.d.dim(p), self.b.dim(p)) for p, m in enumerate(pi))
        if len(self.i) != n + 1 or len(self.pi) != n + 1:
            raise DimensionMismatchError(f"need {n + 1} matrices for i and for pi")

    @staticmethod
    def _mat(m, rows, cols):
        return m if isinstance(m, RationalMatrix) else RationalMatrix(m, rows, cols)

    @property
    def length(self) -> int:
        return self.b.length


def validate_ses(s: ChainSES) -> ValidationReport:
    """Chain-map and exactness checks, degree by degree."""
    for name, c in (("A", s.a), ("B", s.b), ("D", s.d)):
        r = validate(c)
        if not r:
            return ValidationReport(False, r.degree, f"complex {name}: {r.message}")
    r = is_chain_map(s.a, s.b, s.i)
    if not r:
        return ValidationReport(False, r.degree, f"i: {r.message}")
    r = is_chain_map(s.b, s.d, s.pi)
    if not r:
        return ValidationReport(False, r.degree, f"pi: {r.message}")
    for p in range(s.length + 1):
        i, pi = s.i[p], s.pi[p]
        if rank(i) != s.a.dim(p):
            return ValidationReport(False, p, "i is not injective")
        if rank(pi) != s.d.dim(p):
            return ValidationReport(False, p, "pi is not surjective")
        if not (pi @ i).is_zero():
            return ValidationReport(False, p, "pi i is not zero")
        if s.b.dim(p) != s.a.dim(p) + s.d.dim(p):
            return ValidationReport(False, p, "ker pi is larger than im i")
    return OK


def require_ses(s: ChainSES) -> None:
    r = validate_ses(s)
    if not r:
        raise NotExactError(f"degree {r.degree}: {r.message}")


def _lift_matrix(s: ChainSES, p: int, targets: RationalMatrix, rng: random.Random | None = None) -> RationalMatrix:
    """Columns are preimages under ``pi_p`` of the columns of ``targets``."""
    try:
        x = solve_columns(s.pi[p], targets)
    except NotExpressibleError as exc:
        raise LiftFailureError(f"degree {p}: {exc}") from None
    if rng is not None and s.a.dim(p):
        # shift every lift by a random element of ker pi = im i
        r = RationalMatrix([[rng.randint(-3, 3) for _ in range(targets.cols)] for _ in range(s.a.dim(p))], s.a.dim(p), targets.cols)
        x = x + s.i[p] @ r
    return x


def compatible_bases_check(s: ChainSES, rng: random.Random | None = None) -> tuple:
    """Per degree ``[i(c^A) + lift(c^D) -> c^B]``; compatible iff every value is +1 or -1."""
    require_ses(s)
    out = []
    for p in range(s.length + 1):
        if s.b.dim(p) == 0:
            out.append(ONE)
            continue
        lifts = _lift_matrix(s, p, RationalMatrix.identity(s.d.dim(p)), rng)
        cols = RationalMatrix.hstack(s.i[p], lifts)
        out.append(determinant(cols.T))
    return tuple(out)


def induced_map(
    src: BasedChainComplex, hs: HomologyData, tgt: BasedChainComplex, ht: HomologyData, maps: Sequence, p: int
) -> RationalMatrix:
    """Matrix of ``f_* : H_p(src) -> H_p(tgt)`` in the given representatives."""
    f = maps[p]
    images = [f.apply(v) for v in hs.reps[p]]
    return class_matrix(tgt, ht, p, images)


def connecting_homomorphism(
    s: ChainSES,
    p: int,
    hA: HomologyData | None = None,
    hD: HomologyData | None = None,
    rng: random.Random | None = None,
) -> RationalMatrix:
    """``delta_p : H_p(D) -> H_{p-1}(A)``, ``[d] -> [i^{-1}(d_B(lift d))]``."""
    require_ses(s)
    hA = hA or homology(s.a)
    hD = hD or homology(s.d)
    reps = hD.reps[p] if 0 <= p <= s.length else OrderedBasis(0, ())
    rows = hA.betti(p - 1)
    if p <= 0 or not len(reps):
        return RationalMatrix.zeros(rows, len(reps))
    lifts = _lift_matrix(s, p, RationalMatrix.from_columns(reps.vectors, s.d.dim(p)), rng)
    pushed = s.b.boundary(p) @ lifts
    try:
        pulled = solve_columns(s.i[p - 1], pushed)
    except NotExpressibleError:
        raise NotExactError(f"degree {p}: boundary of a lift is not in the image of i") from None
    return class_matrix(s.a, hA, p - 1, pulled.column_list())


@dataclass(frozen=True)
class LongExactSequence:
    complex: BasedChainComplex
    tags: tuple  # tags[k] = (p, "D" | "B" | "A") for slot k


def build_long_exact_sequence(
    s: ChainSES,
    hA: HomologyData | None = None,
    hB: HomologyData | None = None,
    hD: HomologyData | None = None,
) -> LongExactSequence:
    require_ses(s)
    hA = hA or homology(s.a)
    hB = hB or homology(s.b)
    hD = hD or homology(s.d)
    for name, c, h in (("A", s.a, hA), ("B", s.b, hB), ("D", s.d, hD)):
        if h.length != c.length:
            raise InconsistentHomologyDataError(f"homology data for {name} has the wrong length")
    n = s.length
    slots = []
    for p in range(n + 1):
        slots += [(p, "D"), (p, "B"), (p, "A")]
    betti = {"A": hA.betti, "B": hB.betti, "D": hD.betti}
    dims = [betti[w](p) for p, w in slots]
    bds = []
    for k in range(1, 3 * n + 3):
        p, which = slots[k]
        if which == "A":
            bds.append(induced_map(s.a, hA, s.b, hB, s.i, p))
        elif which == "B":
            bds.append(induced_map(s.b, hB, s.d, hD, s.pi, p))
        else:
            bds.append(connecting_homomorphism(s, p, hA, hD))
    return LongExactSequence(BasedChainComplex(dims, bds), tuple(slots))


def corrective_term(les: LongExactSequence) -> TorsionValue:
    """Torsion of the long exact sequence viewed as an acyclic based complex."""
    require_valid(les.complex)
    h = homology(les.complex)
    if any(h.betti_numbers):
        raise NotExactError(f"long sequence is not exact: betti numbers {h.betti_numbers}")
    return reidemeister_torsion(les.complex, h)


def _cumulative(values: Sequence[int], upto: int) -> list:
    out, total = [], 0
    for p in range(upto + 1):
        total += values[p] if p < len(values) else 0
        out.append(total)
    return out


def multiplicativity_sign(s: ChainSES, hA: HomologyData, hB: HomologyData, hD: HomologyData) -> int:
    """Sign ``(-1)**eps`` relating ``T(B)`` and ``T(A) T(D) T(H)`` for +1-compatible bases.

    ``eps`` depends only on the cumulative dimensions ``a_i = sum_{j<=i} dim C_j``
    and cumulative Betti numbers ``b_i`` of the three complexes:

        eps = sum_{i<n} b_i(A) + b_i(D) + a_i(A) a_{i+1}(D) + b_i(A) b_{i+1}(D)
                        + a_i(A) (b_i(A) + b_i(B)) + a_i(D) (b_i(B) + b_i(D))
                        + b_i(B) (b_i(A) + b_i(D))     (mod 2)

    The expression was identified by solving for the sign bit over GF(2) on
    a random corpus and is checked, not proved: the test-suite confirms it on
    fresh seeds and on every structured sequence in the library.
    """
    n = s.length
    aA, aD = _cumulative(s.a.dims, n), _cumulative(s.d.dims, n)
    bA, bB, bD = (_cumulative(h.betti_numbers, n) for h in (hA, hB, hD))
    eps = 0
    for i in range(n):
        eps += bA[i] + bD[i] + aA[i] * aD[i + 1] + bA[i] * bD[i + 1]
        eps += aA[i] * (bA[i] + bB[i]) + aD[i] * (bB[i] + bD[i]) + bB[i] * (bA[i] + bD[i])
    return -1 if eps % 2 else 1


@dataclass(frozen=True)
class MultiplicativityReport:
    torsion_a: Fraction
    torsion_b: Fraction
    torsion_d: Fraction
    corrective: Fraction
    compatibility: tuple
    sign: int = 1  # multiplicativity_sign for the sequence

    @property
    def lhs(self) -> Fraction:
        return self.torsion_b

    @property
    def rhs(self) -> Fraction:
        return self.torsion_a * self.torsion_d * self.corrective

    @property
    def abs_equal(self) -> bool:
        return abs(self.lhs) == abs(self.rhs)

    @property
    def signed_equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def sign_ratio(self) -> Fraction:
        return self.lhs / self.rhs

    @property
    def sign_refined_equal(self) -> bool:
        """``T(B) = sign * T(A) T(D) T(H)``, each -1 compatibility determinant flipping the sign once."""
        compat = ONE
        for x in self.compatibility:
            compat *= x
        return self.lhs == self.sign * compat * self.rhs

    @property
    def equal(self) -> bool:
        """Equality in ``Q* / {+1, -1}``, the group where the product formula lives."""
        return self.abs_equal

    def as_dict(self) -> dict:
        f = lambda x: str(x)
        return {
            "torsion_A": f(self.torsion_a),
            "torsion_B": f(self.torsion_b),
            "torsion_D": f(self.torsion_d),
            "corrective_term": f(self.corrective),
            "lhs": f(self.lhs),
            "rhs": f(self.rhs),
            "compatibility": [f(x) for x in self.compatibility],
            "abs_equal": self.abs_equal,
            "signed_equal": self.signed_equal,
            "sign_ratio": f(self.sign_ratio),
            "dimension_sign": self.sign,
            "sign_refined_equal": self.sign_refined_equal,
            "equal": self.equal,
        }


def verify_multiplicativity(
    s: ChainSES,
    hA: HomologyData | None = None,
    hB: HomologyData | None = None,
    hD: HomologyData | None = None,
) -> MultiplicativityReport:
    """Evaluate ``T(B)`` against ``T(A) T(D) T(H)`` for compatible bases."""
    compat = compatible_bases_check(s)
    bad = [p for p, x in enumerate(compat) if abs(x) != 1]
    if bad:
        raise IncompatibleBasesError(f"chain bases are not compatible in degrees {bad}: {[str(compat[p]) for p in bad]}")
    hA = hA or homology(s.a)
    hB = hB or homology(s.b)
    hD = hD or homology(s.d)
    les = build_long_exact_sequence(s, hA, hB, hD)
    return MultiplicativityReport(
        reidemeister_torsion(s.a, hA).value,
        reidemeister_torsion(s.b, hB).value,
        reidemeister_torsion(s.d, hD).value,
        corrective_term(les).value,
        compat,
        multiplicativity_sign(s, hA, hB, hD),
    )


def direct_sum_ses(a: BasedChainComplex, d: BasedChainComplex) -> ChainSES:
    """``0 -> a -> a + d -> d -> 0`` with the canonical inclusion and projection."""
    n = max(a.length, d.length)
    a, d = a.padded(n), d.padded(n)
    b = direct_sum(a, d)
    i, pi = [], []
    for p in range(n + 1):
        ma, md = a.dim(p), d.dim(p)
        i.append(RationalMatrix.vstack(RationalMatrix.identity(ma), RationalMatrix.zeros(md, ma)))
        pi.append(RationalMatrix.hstack(RationalMatrix.zeros(md, ma), RationalMatrix.identity(md)))
    return ChainSES(a, b, d, i, pi)


def _random_int_matrix(rng: random.Random, rows: int, cols: int, spread: int = 2) -> RationalMatrix:
    return RationalMatrix([[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)], rows, cols)


def random_ses(rng: random.Random, max_length: int = 4, max_dim: int = 6, acyclic: bool = False) -> ChainSES:
    """Random exact sequence with +1-compatible standard bases.

    ``B`` is ``A + D`` as graded spaces with boundary ``[[d_A, K], [0, d_D]]``
    where ``K_p = d_A X_p - X_{p-1} d_D + Z R Q`` (``Z`` cycles of ``A``, ``Q``
    rows annihilating boundaries of ``D``), so ``d_B d_B = 0`` by
    construction and the extension is usually not split.  A determinant-one
    base change of ``B`` then hides the block structure.
    """
    n = rng.randint(1, max_length)
    half = max(max_dim // 2, 1)
    a = random_complex(rng, max_dim=half, acyclic=acyclic, length=n)
    d = random_complex(rng, max_dim=max_dim - half, acyclic=acyclic, length=n)
    xs = [_random_int_matrix(rng, a.dim(p), d.dim(p)) for p in range(n + 1)]
    blocks = []
    for p in range(1, n + 1):
        k = a.boundary(p) @ xs[p] - xs[p - 1] @ d.boundary(p)
        z = kernel_basis(a.boundary(p - 1))  # cycles of A_{p-1}
        q = kernel_basis(d.boundary(p + 1).T)  # functionals on D_p killing boundaries
        if len(z) and len(q):
            r = _random_int_matrix(rng, len(z), len(q))
            k = k + z.as_matrix().T @ r @ q.as_matrix()
        blocks.append(k)
    bds = []
    for p in range(1, n + 1):
        top = RationalMatrix.hstack(a.boundary(p), blocks[p - 1])
        bottom = RationalMatrix.hstack(RationalMatrix.zeros(d.dim(p - 1), a.dim(p)), d.boundary(p))
        bds.append(RationalMatrix.vstack(top, bottom))
    dims = [a.dim(p) + d.dim(p) for p in range(n + 1)]
    vs = [random_unimodular(m, rng) for m in dims]
    vinv = [inverse(v) for v in vs]
    b = BasedChainComplex(dims, [vs[p - 1] @ bds[p - 1] @ vinv[p] for p in range(1, n + 1)])
    base = direct_sum_ses(a, d)
    i = [vs[p] @ base.i[p] for p in range(n + 1)]
    pi = [base.pi[p] @ vinv[p] for p in range(n + 1)]
    return ChainSES(a, b, d, i, pi)
