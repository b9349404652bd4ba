"""The twelve acceptance checks, runnable from the CLI and from the tests.

Each check returns a :class:`CriterionResult` whose ``details`` carry exact
values as ``p/q`` strings so a failure can be diagnosed from the report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .chain_complex import direct_sum, direct_sum_homology, homology, random_complex
from .exact_linalg import OrderedBasis, RationalMatrix, random_invertible
from .exact_sequences import random_ses, verify_multiplicativity
from .models import (
    cell_independence_check,
    collapse_to_minimal_sphere,
    connected_sum_s3xs3,
    disk,
    intersection_torsion,
    manifold_torsion,
    point,
    s3xs3,
    simplex_boundary,
    sphere_minimal,
    sphere_simplicial,
    transported_pairings,
    verify_connected_sum_theorem,
    verify_prime_decomposition,
    verify_punctured_theorem,
    assemble_connected_sum,
)
from .symplectic import SymplecticChainComplex, compare_with_milnor, random_homology_reps, random_q2, standard_symplectic
from .torsion import change_of_basis, direct_sum_sign, reidemeister_torsion

DEFAULT_SEED = 42


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"

    def as_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed, "details": self.details}


def _s(x) -> str:
    return str(Fraction(x))


def _random_scalar(rng: random.Random) -> Fraction:
    num = rng.choice([-1, 1]) * rng.randint(1, 9)
    return Fraction(num, rng.randint(1, 9))


def _rescaled(m, factors: dict):
    """Representatives of ``m.preferred_h`` with ``h_p[k]`` multiplied by ``factors[(p, k)]``."""
    reps = {}
    for p, basis in enumerate(m.preferred_h.reps):
        reps[p] = [tuple(factors.get((p, k), 1) * x for x in v) for k, v in enumerate(basis)]
    return homology(m.complex, reps)


def _paired_factors(m, rng: random.Random) -> dict:
    """One random scalar per Poincare-dual pair ``(h_p[k], h_{n-p}[k])``."""
    n = m.dim
    out = {}
    for p in range(n // 2 + 1):
        q = n - p
        for k in range(m.preferred_h.betti(p)):
            lam = _random_scalar(rng)
            out[(p, k)] = lam
            if q != p:
                out[(q, k)] = lam
    return out


def criterion_1(seed: int = DEFAULT_SEED) -> CriterionResult:
    values = {"point": manifold_torsion(point()).value}
    for n in (1, 2, 3):
        m = disk(2 * n)
        # h_0 is the image of the point's class under the inclusion of the base vertex
        values[m.name] = manifold_torsion(m).value
    ok = all(v == 1 for v in values.values())
    return CriterionResult(1, "point and disk torsion equal 1", ok, {k: _s(v) for k, v in values.items()})


def criterion_2(seed: int = DEFAULT_SEED) -> CriterionResult:
    rng = random.Random(seed)
    odd = [sphere_minimal(n) for n in (1, 3, 5)] + [sphere_simplicial(1), sphere_simplicial(3), simplex_boundary(1), simplex_boundary(3)]
    details = {}
    ok = True
    for m in odd:
        t = manifold_torsion(m).value
        details[m.name] = _s(t)
        ok &= abs(t) == 1
    for m in (sphere_minimal(2), sphere_simplicial(2), simplex_boundary(2)):
        for _ in range(5):
            alpha, beta = _random_scalar(rng), _random_scalar(rng)
            h = _rescaled(m, {(0, 0): alpha, (2, 0): beta})
            t = manifold_torsion(m, h).value
            det = transported_pairings(m, h)[0]
            expected = abs(det[0, 0])
            ok &= abs(t) == expected
        details[m.name] = f"|T| = |det D_0,2| on 5 rescaled bases, last {_s(t)} vs {_s(expected)}"
    return CriterionResult(2, "sphere torsion: odd |T| = 1, S^2 |T| = |det D_0,2|", ok, details)


def criterion_3(seed: int = DEFAULT_SEED, complexes: int = 20, splittings: int = 100) -> CriterionResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(complexes):
        c = random_complex(rng, max_length=4, max_dim=6)
        h = homology(c)
        ref = reidemeister_torsion(c, h).value
        for _ in range(splittings):
            if reidemeister_torsion(c, h, rng=rng).value != ref:
                bad += 1
    return CriterionResult(3, "torsion independent of section and boundary choices", bad == 0, {"complexes": complexes, "splittings_each": splittings, "mismatches": bad})


def _random_rep_change(c, h, p, rng):
    basis = h.reps[p]
    if not len(basis):
        return basis
    moved = basis.transformed(random_invertible(len(basis), rng))
    bs = h.boundaries[p]
    out = []
    for v in moved:
        for b in bs:
            k = rng.randint(-2, 2)
            v = tuple(x + k * y for x, y in zip(v, b))
        out.append(v)
    return OrderedBasis(c.dim(p), tuple(out))


def criterion_4(seed: int = DEFAULT_SEED, cases: int = 200) -> CriterionResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(cases):
        c = random_complex(rng, max_length=4, max_dim=5)
        h = homology(c)
        t = reidemeister_torsion(c, h)
        old_c = {p: OrderedBasis.standard(c.dim(p)) for p in range(c.length + 1)}
        new_c = {p: OrderedBasis.standard(c.dim(p)).transformed(random_invertible(c.dim(p), rng)) for p in range(c.length + 1)}
        new_h = {p: _random_rep_change(c, h, p, rng) for p in range(c.length + 1)}
        old_h = dict(enumerate(h.reps))
        predicted = change_of_basis(t, old_c, new_c, old_h, new_h, complex=c, hdata=h).value
        direct = reidemeister_torsion(c, homology(c, new_h), chain_bases=new_c).value
        bad += predicted != direct
    return CriterionResult(4, "base-change law matches recomputation", bad == 0, {"cases": cases, "mismatches": bad})


def criterion_5(seed: int = DEFAULT_SEED, cases: int = 500) -> CriterionResult:
    rng = random.Random(seed)
    counts = {"cases": cases, "acyclic": 0, "abs_failures": 0, "sign_refined_failures": 0, "corrective_not_1_acyclic": 0, "literal_signed_failures": 0, "not_plus_one_compatible": 0}
    for k in range(cases):
        acyclic = k % 5 == 0
        s = random_ses(rng, max_length=4, max_dim=6, acyclic=acyclic)
        r = verify_multiplicativity(s)
        counts["not_plus_one_compatible"] += any(x != 1 for x in r.compatibility)
        counts["abs_failures"] += not r.abs_equal
        counts["sign_refined_failures"] += not r.sign_refined_equal
        counts["literal_signed_failures"] += not r.signed_equal
        if acyclic:
            counts["acyclic"] += 1
            counts["corrective_not_1_acyclic"] += r.corrective != 1
    ok = (
        counts["abs_failures"] == 0
        and counts["sign_refined_failures"] == 0
        and counts["corrective_not_1_acyclic"] == 0
        and counts["not_plus_one_compatible"] == 0
    )
    return CriterionResult(5, "multiplicativity on random exact sequences", ok, counts)


def criterion_6(seed: int = DEFAULT_SEED, cases: int = 100) -> CriterionResult:
    rng = random.Random(seed)
    abs_bad = refined_bad = literal_bad = 0
    for _ in range(cases):
        a, d = random_complex(rng), random_complex(rng)
        ha, hd = homology(a), homology(d)
        s = direct_sum(a, d)
        t = reidemeister_torsion(s, homology(s, direct_sum_homology(a, ha, d, hd)), rng=rng).value
        prod = reidemeister_torsion(a, ha).value * reidemeister_torsion(d, hd).value
        abs_bad += abs(t) != abs(prod)
        refined_bad += t != direct_sum_sign(a, ha, d, hd) * prod
        literal_bad += t != prod
    ok = abs_bad == 0 and refined_bad == 0
    return CriterionResult(6, "direct-sum law", ok, {"cases": cases, "abs_failures": abs_bad, "sign_refined_failures": refined_bad, "literal_signed_failures": literal_bad})


def s3xs3_symplectic() -> SymplecticChainComplex:
    c = s3xs3().complex
    return SymplecticChainComplex(c, {0: RationalMatrix([[1]], 1, 1), 1: RationalMatrix.zeros(0, 0), 2: RationalMatrix.zeros(0, 0), 3: standard_symplectic(1)})


def criterion_7(seed: int = DEFAULT_SEED, cases: int = 50) -> CriterionResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(cases):
        s = random_q2(rng)
        r = compare_with_milnor(s, random_homology_reps(s, rng))
        bad += not r.abs_equal
    big = compare_with_milnor(s3xs3_symplectic())
    ok = bad == 0 and big.abs_equal and big.closed_form == 1
    return CriterionResult(7, "symplectic closed form equals |Milnor torsion|", ok, {"cases": cases, "mismatches": bad, "s3xs3_closed_form": _s(big.closed_form), "s3xs3_milnor": _s(big.milnor)})


def criterion_8(seed: int = DEFAULT_SEED, rescalings: int = 20) -> CriterionResult:
    rng = random.Random(seed)
    even = [point(), sphere_minimal(2), sphere_minimal(4), sphere_simplicial(2), simplex_boundary(2), s3xs3(), connected_sum_s3xs3(2)]
    odd = [sphere_minimal(1), sphere_minimal(3), sphere_minimal(5), sphere_simplicial(1), sphere_simplicial(3), simplex_boundary(1), simplex_boundary(3)]
    details = {}
    ok = True
    for m in even:
        t, it = manifold_torsion(m).value, intersection_torsion(m)
        good = abs(t) == it
        for _ in range(rescalings):
            h = _rescaled(m, {(p, k): _random_scalar(rng) for p in range(m.dim + 1) for k in range(m.preferred_h.betti(p))})
            good &= abs(manifold_torsion(m, h).value) == intersection_torsion(m, h)
        details[m.name] = {"torsion": _s(t), "intersection": _s(it), "agree": good}
        ok &= good
    for m in odd:
        good = True
        for _ in range(rescalings):
            h = _rescaled(m, _paired_factors(m, rng))
            good &= abs(manifold_torsion(m, h).value) == 1 and intersection_torsion(m, h) == 1
        details[m.name] = {"abs_torsion_1_under_paired_rescalings": good}
        ok &= good
    return CriterionResult(8, "intersection-pairing torsion", ok, details)


def criterion_9(seed: int = DEFAULT_SEED) -> CriterionResult:
    mn, octa, tet = sphere_minimal(2), sphere_simplicial(2), simplex_boundary(2)
    checks = {
        "octahedron->minimal (collapse map)": cell_independence_check(octa, mn, chain_map=collapse_to_minimal_sphere(octa)),
        "tetrahedron->minimal (collapse map)": cell_independence_check(tet, mn, chain_map=collapse_to_minimal_sphere(tet)),
        "octahedron->tetrahedron (class correspondence)": cell_independence_check(octa, tet, correspondence={}),
    }
    rng = random.Random(seed)
    alpha, beta = _random_scalar(rng), _random_scalar(rng)
    h = _rescaled(octa, {(0, 0): alpha, (2, 0): beta})
    checks["octahedron->minimal rescaled"] = cell_independence_check(octa, mn, chain_map=collapse_to_minimal_sphere(octa), h1=h)
    ok = all(r.agree for r in checks.values())
    details = {k: {"first": _s(r.torsion_first), "second": _s(r.torsion_second), "predicted": _s(r.predicted_second), "agree": r.agree} for k, r in checks.items()}
    return CriterionResult(9, "cell-decomposition independence for S^2", ok, details)


def criterion_10(seed: int = DEFAULT_SEED) -> CriterionResult:
    mn = sphere_minimal(2)
    r1 = verify_connected_sum_theorem(assemble_connected_sum(mn, mn))
    r2 = verify_connected_sum_theorem(assemble_connected_sum(s3xs3(), s3xs3()))
    return CriterionResult(10, "connected-sum formula with corrective term 1", r1.ok and r2.ok, {"S2#S2": r1.as_dict(), "s3xs3#s3xs3": r2.as_dict()})


def criterion_11(seed: int = DEFAULT_SEED) -> CriterionResult:
    reports = {m.name: verify_punctured_theorem(m) for m in (sphere_simplicial(2), s3xs3())}
    ok = all(r.ok for r in reports.values())
    return CriterionResult(11, "punctured-manifold formula with disk torsion 1", ok, {k: r.as_dict() for k, r in reports.items()})


def criterion_12(seed: int = DEFAULT_SEED) -> CriterionResult:
    reports = {k: verify_prime_decomposition(k) for k in (1, 2, 3)}
    ok = all(r.ok for r in reports.values())
    return CriterionResult(12, "prime decomposition |T(W_k)| = prod |T(M_j)|", ok, {str(k): r.as_dict() for k, r in reports.items()})


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
    criterion_11,
    criterion_12,
)


def run_suite(seed: int = DEFAULT_SEED, cases: int | None = None) -> list:
    """Run all criteria; ``cases`` overrides the size of the multiplicativity corpus."""
    out = []
    for fn in CRITERIA:
        if fn is criterion_5 and cases is not None:
            out.append(fn(seed, cases))
        else:
            out.append(fn(seed))
    return out


__all__ = ["CriterionResult", "CRITERIA", "run_suite", "s3xs3_symplectic"]
