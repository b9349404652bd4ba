"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .chain_complex import HomologyData, homology
from .document import (
    homology_from_document,
    pairings_from_document,
    parse_bases,
    parse_complex_document,
    parse_ses,
    serialize_complex,
)
from .errors import DocumentSemanticError, TorsionError
from .exact_linalg import format_fraction
from .exact_sequences import verify_multiplicativity
from .models import intersection_torsion, manifold_torsion, parse_model_spec
from .suite import DEFAULT_SEED, run_suite
from .symplectic import SymplecticChainComplex, compare_with_milnor
from .torsion import reidemeister_torsion

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _q(x) -> str:
    return format_fraction(Fraction(x))


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _emit(report: dict, as_json: bool, text_lines: list, out) -> None:
    if as_json:
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text_lines) + "\n")


def _bases_override(args, section=None) -> dict | None:
    if not getattr(args, "bases", None):
        return None
    found = parse_bases(_read(args.bases))
    return found.get(section, {})


def _complex_with_homology(args):
    doc = parse_complex_document(_read(args.file))
    c = doc.to_complex()
    h = homology_from_document(doc, c)
    extra = _bases_override(args)
    if extra:
        merged = {p: list(h.reps[p]) for p in range(c.length + 1)}
        merged.update(extra)
        try:
            h = homology(c, merged)
        except TorsionError as e:
            raise DocumentSemanticError(f"bases file: {e}") from None
    return doc, c, h


def _reps_json(h: HomologyData) -> dict:
    return {str(p): [[_q(x) for x in v] for v in basis] for p, basis in enumerate(h.reps)}


def cmd_torsion(args, out) -> int:
    _, c, h = _complex_with_homology(args)
    t = reidemeister_torsion(c, h)
    report = {
        "dims": list(c.dims),
        "betti": list(h.betti_numbers),
        "torsion": _q(t.value),
        "abs_torsion": _q(t.absolute),
        "factors": [_q(f) for f in t.factors],
    }
    lines = [
        f"dims = {' '.join(map(str, c.dims))}",
        f"betti = {' '.join(map(str, h.betti_numbers))}",
        f"torsion = {_q(t.value)}",
        f"|torsion| = {_q(t.absolute)}",
        "factors [c_p -> N_p] = " + " ".join(_q(f) for f in t.factors),
    ]
    _emit(report, args.json, lines, out)
    return EXIT_OK


def cmd_homology(args, out) -> int:
    _, c, h = _complex_with_homology(args)
    report = {"dims": list(c.dims), "betti": list(h.betti_numbers), "representatives": _reps_json(h)}
    lines = [f"betti = {' '.join(map(str, h.betti_numbers))}"]
    for p, basis in enumerate(h.reps):
        for v in basis:
            lines.append(f"h_{p}: " + " ".join(_q(x) for x in v))
    _emit(report, args.json, lines, out)
    return EXIT_OK


def cmd_ses_verify(args, out) -> int:
    doc = parse_ses(_read(args.file))
    s, hs = doc.ses, dict(doc.homology)
    if args.bases:
        found = parse_bases(_read(args.bases))
        for name, c in (("A", s.a), ("B", s.b), ("D", s.d)):
            if name in found:
                merged = {p: list(hs[name].reps[p]) for p in range(c.length + 1)}
                merged.update(found[name])
                try:
                    hs[name] = homology(c, merged)
                except TorsionError as e:
                    raise DocumentSemanticError(f"bases file [{name}]: {e}") from None
    r = verify_multiplicativity(s, hs["A"], hs["B"], hs["D"])
    report = r.as_dict()
    ok = r.abs_equal and r.sign_refined_equal
    report["ok"] = ok
    lines = [
        f"T(A) = {_q(r.torsion_a)}",
        f"T(B) = {_q(r.torsion_b)}",
        f"T(D) = {_q(r.torsion_d)}",
        f"corrective term = {_q(r.corrective)}",
        f"compatibility = {' '.join(_q(x) for x in r.compatibility)}",
        f"T(B) vs T(A) T(D) T(H): {_q(r.lhs)} vs {_q(r.rhs)}",
        f"absolute equality: {r.abs_equal}",
        f"signed equality: {r.signed_equal}",
        f"sign-refined equality (dimension sign {r.sign}): {r.sign_refined_equal}",
        "OK" if ok else "FAILED",
    ]
    _emit(report, args.json, lines, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_symplectic(args, out) -> int:
    doc, c, h = _complex_with_homology(args)
    s = SymplecticChainComplex(c, pairings_from_document(doc, c))
    r = compare_with_milnor(s, h)
    report = {
        "closed_form": _q(r.closed_form),
        "milnor": _q(r.milnor),
        "factors": [[p, _q(v), e] for p, v, e in r.factors],
        "abs_equal": r.abs_equal,
    }
    lines = [
        f"closed form = {_q(r.closed_form)}",
        f"Milnor torsion = {_q(r.milnor)}",
        f"absolute equality: {r.abs_equal}",
    ]
    _emit(report, args.json, lines, out)
    return EXIT_OK if r.abs_equal else EXIT_FAIL


def cmd_model(args, out) -> int:
    m = parse_model_spec(args.name)
    h = m.preferred_h
    extra = _bases_override(args)
    if extra:
        merged = {p: list(h.reps[p]) for p in range(m.complex.length + 1)}
        merged.update(extra)
        try:
            h = homology(m.complex, merged)
        except TorsionError as e:
            raise DocumentSemanticError(f"bases file: {e}") from None
    t = manifold_torsion(m, h)
    report = {
        "name": m.name,
        "dim": m.dim,
        "dims": list(m.complex.dims),
        "betti": list(h.betti_numbers),
        "torsion": _q(t.value),
        "abs_torsion": _q(t.absolute),
        "factors": [_q(f) for f in t.factors],
    }
    lines = [
        f"model {m.name} (dimension {m.dim})",
        f"dims = {' '.join(map(str, m.complex.dims))}",
        f"betti = {' '.join(map(str, h.betti_numbers))}",
        f"torsion = {_q(t.value)}",
        f"|torsion| = {_q(t.absolute)}",
    ]
    if m.pairings is not None or m.dim % 2:
        it = intersection_torsion(m, h)
        report["intersection_torsion"] = _q(it)
        lines.append(f"intersection torsion = {_q(it)}")
    if args.document:
        report["document"] = serialize_complex(m.complex, h)
        lines += ["", serialize_complex(m.complex, h).rstrip("\n")]
    _emit(report, args.json, lines, out)
    return EXIT_OK


def cmd_verify_suite(args, out) -> int:
    results = run_suite(args.seed, args.cases)
    ok = all(r.passed for r in results)
    report = {"seed": args.seed, "passed": ok, "criteria": [r.as_dict() for r in sorted(results, key=lambda r: r.number)]}
    lines = [r.line() for r in results] + [f"{sum(r.passed for r in results)}/{len(results)} criteria passed"]
    _emit(report, args.json, lines, out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rftorsion", description="Exact Reidemeister-Franz torsion of based chain complexes.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable report")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("torsion", parents=[common], help="torsion of a complex document")
    p.add_argument("file")
    p.add_argument("--bases", help="homology-basis override document")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("homology", parents=[common], help="Betti numbers and representatives")
    p.add_argument("file")
    p.add_argument("--bases")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("ses-verify", parents=[common], help="multiplicativity check for an exact sequence document")
    p.add_argument("file")
    p.add_argument("--bases")
    p.set_defaults(func=cmd_ses_verify)

    p = sub.add_parser("symplectic", parents=[common], help="closed-form torsion of a symplectic complex")
    p.add_argument("file")
    p.add_argument("--bases")
    p.set_defaults(func=cmd_symplectic)

    p = sub.add_parser("model", parents=[common], help="built-in manifold model, e.g. point, disk(4), s3xs3")
    p.add_argument("name")
    p.add_argument("--bases")
    p.add_argument("--document", action="store_true", help="also print the model as a complex document")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("verify-suite", parents=[common], help="run every acceptance check")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--cases", type=int, default=None, help="size of the multiplicativity corpus")
    p.set_defaults(func=cmd_verify_suite)
    return parser


def run(argv: list | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, TorsionError) as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
