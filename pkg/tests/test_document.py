import random
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rftorsion.chain_complex import homology, random_complex
from rftorsion.document import (
    homology_from_document,
    pairings_from_document,
    parse_bases,
    parse_complex,
    parse_complex_document,
    parse_ses,
    serialize_complex,
    serialize_ses,
)
from rftorsion.errors import DocumentSemanticError, DocumentSyntaxError
from rftorsion.exact_sequences import random_ses
from rftorsion.models import s3xs3, sphere_simplicial
from rftorsion.suite import s3xs3_symplectic
from rftorsion.symplectic import SymplecticChainComplex, validate_symplectic
from rftorsion.torsion import reidemeister_torsion

DATA = Path(__file__).resolve().parent.parent / "data"
seeds = st.integers(0, 10**6)


@given(seeds)
def test_complex_round_trip(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    h = homology(c)
    doc = parse_complex_document(serialize_complex(c, h))
    back = doc.to_complex()
    assert back.dims == c.dims
    assert all(back.boundary(p) == c.boundary(p) for p in range(1, c.length + 1))
    hb = homology_from_document(doc, back)
    assert [tuple(b) for b in hb.reps] == [tuple(b) for b in h.reps]
    assert reidemeister_torsion(back, hb) == reidemeister_torsion(c, h)


@given(seeds)
def test_ses_round_trip(seed):
    s = random_ses(random.Random(seed))
    doc = parse_ses(serialize_ses(s))
    t = doc.ses
    assert t.b.dims == s.b.dims
    assert all(t.i[p] == s.i[p] and t.pi[p] == s.pi[p] for p in range(s.length + 1))


def test_octahedron_document():
    m = sphere_simplicial(2)
    c = parse_complex(serialize_complex(m.complex))
    assert homology(c).betti_numbers == (1, 0, 1)


def test_sphere3_file():
    c = parse_complex((DATA / "sphere3.rft").read_text())
    assert c.dims == (1, 0, 0, 1)
    assert c.cell_labels == (("e0",), (), (), ("e3",))


def test_scaled_sphere_file():
    doc = parse_complex_document((DATA / "sphere2_scaled.rft").read_text())
    c = doc.to_complex()
    assert str(reidemeister_torsion(c, homology_from_document(doc, c))) == "15/2"


def test_pairings_round_trip():
    s = s3xs3_symplectic()
    doc = parse_complex_document(serialize_complex(s.complex, pairings=s.pairings))
    c = doc.to_complex()
    assert validate_symplectic(SymplecticChainComplex(c, pairings_from_document(doc, c)))


def test_syntax_error_has_line_number():
    with pytest.raises(DocumentSyntaxError) as e:
        parse_complex((DATA / "bad.rft").read_text())
    assert e.value.line == 4


@pytest.mark.parametrize(
    "text, line",
    [
        ("rftorsion complex 2\ndims 1\n", 1),
        ("hello\n", 1),
        ("rftorsion complex 1\ndims 1 1\nboundary 1\n 2\n", 3),
        ("rftorsion complex 1\ndims 1 -1\n", 2),
        ("rftorsion complex 1\ndims 1\nfrobnicate 3\n", 3),
        ("rftorsion complex 1\ndims 1\n# comment\nboundary z\n1\nend\n", 4),
    ],
)
def test_syntax_errors(text, line):
    with pytest.raises(DocumentSyntaxError) as e:
        parse_complex(text)
    assert e.value.line == line


def test_semantic_error_has_degree():
    with pytest.raises(DocumentSemanticError) as e:
        parse_complex((DATA / "dd_nonzero.rft").read_text())
    assert e.value.degree == 1


def test_wrong_shape_is_semantic():
    with pytest.raises(DocumentSemanticError) as e:
        parse_complex("rftorsion complex 1\ndims 1 2\nboundary 1\n 1\nend\n")
    assert e.value.degree == 1


def test_bad_homology_is_semantic():
    text = "rftorsion complex 1\ndims 1 0 1\nhomology 2\n 0\nend\n"
    doc = parse_complex_document(text)
    with pytest.raises(DocumentSemanticError):
        homology_from_document(doc, doc.to_complex())


def test_interval_ses_file():
    doc = parse_ses((DATA / "interval.ses").read_text())
    assert doc.ses.b.dims == (2, 1)
    assert doc.homology["B"].betti_numbers == (1, 0)


def test_ses_missing_section():
    with pytest.raises(DocumentSyntaxError):
        parse_ses("rftorsion ses 1\n[A]\ndims 1\n[B]\ndims 1\n[maps]\n")


def test_bases_documents():
    plain = parse_bases("rftorsion bases 1\nhomology 0\n 3\nend\n")
    assert list(plain) == [None] and plain[None][0] == [(3,)]
    sectioned = parse_bases("rftorsion bases 1\n[B]\nhomology 0\n 1 0\nend\n[D]\nhomology 1\n 2\nend\n")
    assert set(sectioned) == {"B", "D"}
    with pytest.raises(DocumentSyntaxError):
        parse_bases("rftorsion bases 1\nboundary 1\n1\nend\n")


def test_serialized_s3xs3_is_stable():
    text = serialize_complex(s3xs3().complex)
    assert text == serialize_complex(parse_complex(text))
