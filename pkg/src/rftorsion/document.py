"""Plain-text documents for complexes, short exact sequences and homology bases.

A complex document::

    rftorsion complex 1
    dims 1 0 1
    boundary 2
    end
    homology 2
      2
    end
    labels 0 e0

Lines are whitespace separated; ``#`` starts a comment.  Matrix blocks list
one row per line between ``<keyword> <degree>`` and ``end``; entries are
integers or ``p/q`` strings.  Missing boundary blocks are zero.  ``homology p``
lists one representative per line, ``pairing p`` is a chain-level pairing
``C_p x C_{q-p}`` for symplectic complexes.

A sequence document has header ``rftorsion ses 1`` and sections ``[A]``,
``[B]``, ``[D]`` (each a complex body without the header line) followed by
``[maps]`` with blocks ``i p`` and ``pi p``.  A bases document (header
``rftorsion bases 1``) carries only ``homology`` blocks, optionally under
``[A]``/``[B]``/``[D]`` sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chain_complex import BasedChainComplex, HomologyData, homology, validate
from .errors import DocumentSemanticError, DocumentSyntaxError, TorsionError
from .exact_linalg import RationalMatrix, format_fraction
from .exact_sequences import ChainSES, validate_ses

VERSION = 1
MATRIX_BLOCKS = ("boundary", "homology", "pairing")


@dataclass
class ComplexDocument:
    version: int = VERSION
    dims: tuple = ()
    boundaries: dict = field(default_factory=dict)  # degree -> rows
    homology: dict = field(default_factory=dict)  # degree -> list of vectors
    pairings: dict = field(default_factory=dict)  # degree -> rows
    labels: dict = field(default_factory=dict)  # degree -> list of names

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def to_complex(self) -> BasedChainComplex:
        return _build_complex(self)


def _entry(token: str, line: int) -> Fraction:
    try:
        if "/" in token:
            num, den = token.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(token))
    except (ValueError, ZeroDivisionError):
        raise DocumentSyntaxError(f"bad rational entry {token!r} (use integers or p/q)", line) from None


def _int(token: str, line: int, what: str) -> int:
    try:
        v = int(token)
    except ValueError:
        raise DocumentSyntaxError(f"{what} must be an integer, got {token!r}", line) from None
    if v < 0:
        raise DocumentSyntaxError(f"{what} must be nonnegative", line)
    return v


def _tokenize(text: str):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


class _Cursor:
    def __init__(self, lines):
        self.lines = list(lines)
        self.pos = 0

    def next(self):
        if self.pos >= len(self.lines):
            return None
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None


def _read_block(cur: _Cursor, start_line: int, keyword: str) -> list:
    rows = []
    while True:
        item = cur.next()
        if item is None:
            raise DocumentSyntaxError(f"{keyword} block is missing 'end'", start_line)
        n, toks = item
        if toks == ["end"]:
            return rows
        rows.append((n, [_entry(t, n) for t in toks]))


def _header(cur: _Cursor, kind: str) -> int:
    item = cur.next()
    if item is None:
        raise DocumentSyntaxError("empty document", 1)
    n, toks = item
    if len(toks) != 3 or toks[0] != "rftorsion" or toks[1] != kind:
        raise DocumentSyntaxError(f"expected header 'rftorsion {kind} {VERSION}'", n)
    version = _int(toks[2], n, "version")
    if version != VERSION:
        raise DocumentSyntaxError(f"unsupported version {version}", n)
    return version


def _parse_body(cur: _Cursor, stop_at_section: bool = True, need_dims: bool = True) -> ComplexDocument:
    doc = ComplexDocument()
    dims_line = None
    while True:
        item = cur.peek()
        if item is None:
            break
        n, toks = item
        if stop_at_section and toks[0].startswith("["):
            break
        cur.next()
        key = toks[0]
        if key == "dims":
            if dims_line is not None:
                raise DocumentSyntaxError("dims given twice", n)
            if len(toks) < 2:
                raise DocumentSyntaxError("dims needs at least one entry", n)
            doc.dims = tuple(_int(t, n, "dimension") for t in toks[1:])
            dims_line = n
        elif key in MATRIX_BLOCKS:
            if len(toks) != 2:
                raise DocumentSyntaxError(f"expected '{key} <degree>'", n)
            p = _int(toks[1], n, "degree")
            target = {"boundary": doc.boundaries, "homology": doc.homology, "pairing": doc.pairings}[key]
            if p in target:
                raise DocumentSyntaxError(f"{key} {p} given twice", n)
            target[p] = _read_block(cur, n, key)
        elif key == "labels":
            if len(toks) < 2:
                raise DocumentSyntaxError("expected 'labels <degree> names...'", n)
            doc.labels[_int(toks[1], n, "degree")] = toks[2:]
        else:
            raise DocumentSyntaxError(f"unknown keyword {key!r}", n)
    if need_dims and dims_line is None:
        raise DocumentSyntaxError("missing dims line", cur.lines[-1][0] if cur.lines else 1)
    return doc


def _matrix(rows, nrows: int, ncols: int, what: str, degree: int) -> RationalMatrix:
    if not rows:
        if nrows == 0 or ncols == 0:
            return RationalMatrix.zeros(nrows, ncols)
        raise DocumentSemanticError(f"{what}: expected {nrows} rows, got 0", degree)
    if len(rows) != nrows:
        raise DocumentSemanticError(f"{what}: expected {nrows} rows, got {len(rows)} (line {rows[0][0]})", degree)
    for n, r in rows:
        if len(r) != ncols:
            raise DocumentSemanticError(f"{what}: line {n} has {len(r)} entries, expected {ncols}", degree)
    return RationalMatrix([r for _, r in rows], nrows, ncols)


def _build_complex(doc: ComplexDocument) -> BasedChainComplex:
    dims, n = doc.dims, doc.length
    for p in doc.boundaries:
        if not 1 <= p <= n:
            raise DocumentSemanticError(f"boundary {p} outside degrees 1..{n}", p)
    bds = []
    for p in range(1, n + 1):
        rows = doc.boundaries.get(p, [])
        if not rows:
            bds.append(RationalMatrix.zeros(dims[p - 1], dims[p]))
        else:
            bds.append(_matrix(rows, dims[p - 1], dims[p], f"boundary {p}", p))
    labels = None
    if doc.labels:
        labels = []
        for p in range(n + 1):
            names = doc.labels.get(p)
            if names is None:
                names = [f"c{p}_{k}" for k in range(dims[p])]
            if len(names) != dims[p]:
                raise DocumentSemanticError(f"labels {p}: {len(names)} names for {dims[p]} cells", p)
            labels.append(list(names))
    try:
        c = BasedChainComplex(dims, bds, labels)
    except TorsionError as e:
        raise DocumentSemanticError(str(e)) from None
    report = validate(c)
    if not report:
        raise DocumentSemanticError(report.message, report.degree)
    return c


def homology_overrides(doc: ComplexDocument, c: BasedChainComplex) -> dict:
    out = {}
    for p, rows in doc.homology.items():
        if not 0 <= p <= c.length:
            raise DocumentSemanticError(f"homology {p} outside degrees 0..{c.length}", p)
        for n, r in rows:
            if len(r) != c.dim(p):
                raise DocumentSemanticError(f"homology {p}: line {n} has {len(r)} entries, expected {c.dim(p)}", p)
        out[p] = [tuple(r) for _, r in rows]
    return out


def homology_from_document(doc: ComplexDocument, c: BasedChainComplex) -> HomologyData:
    try:
        return homology(c, homology_overrides(doc, c))
    except DocumentSemanticError:
        raise
    except TorsionError as e:
        raise DocumentSemanticError(f"homology bases: {e}") from None


def pairings_from_document(doc: ComplexDocument, c: BasedChainComplex) -> dict:
    q = c.length
    out = {}
    for p, rows in doc.pairings.items():
        if not 0 <= p <= q // 2:
            raise DocumentSemanticError(f"pairing {p} outside degrees 0..{q // 2}", p)
        out[p] = _matrix(rows, c.dim(p), c.dim(q - p), f"pairing {p}", p)
    return out


def parse_complex_document(text: str) -> ComplexDocument:
    cur = _Cursor(_tokenize(text))
    version = _header(cur, "complex")
    doc = _parse_body(cur, stop_at_section=False)
    doc.version = version
    doc.to_complex()  # validate eagerly
    return doc


def parse_complex(text: str) -> BasedChainComplex:
    return parse_complex_document(text).to_complex()


def _matrix_lines(keyword: str, p: int, rows) -> list:
    out = [f"{keyword} {p}"]
    out += ["  " + " ".join(format_fraction(x) for x in r) for r in rows]
    out.append("end")
    return out


def _body_lines(c: BasedChainComplex, h=None, pairings=None) -> list:
    lines = ["dims " + " ".join(str(d) for d in c.dims)]
    for p in range(1, c.length + 1):
        m = c.boundary(p)
        if m.rows and m.cols and not m.is_zero():
            lines += _matrix_lines("boundary", p, m.row_list())
    if h is not None:
        reps = h.reps if isinstance(h, HomologyData) else None
        items = enumerate(reps) if reps is not None else sorted(h.items())
        for p, vs in items:
            vs = list(vs)
            if vs:
                lines += _matrix_lines("homology", p, vs)
    for p, m in sorted((pairings or {}).items()):
        lines += _matrix_lines("pairing", p, m.row_list())
    if c.cell_labels is not None:
        for p, names in enumerate(c.cell_labels):
            if names:
                lines.append(f"labels {p} " + " ".join(names))
    return lines


def serialize_complex(c: BasedChainComplex, h=None, pairings=None) -> str:
    """Text form of ``c``; ``h`` (HomologyData or degree -> vectors) and chain pairings are optional."""
    return "\n".join([f"rftorsion complex {VERSION}"] + _body_lines(c, h, pairings)) + "\n"


@dataclass
class SESDocument:
    ses: ChainSES
    homology: dict  # "A"/"B"/"D" -> HomologyData


def parse_ses(text: str) -> SESDocument:
    cur = _Cursor(_tokenize(text))
    _header(cur, "ses")
    parts = {}
    maps = {"i": {}, "pi": {}}
    seen_maps = False
    while cur.peek() is not None:
        n, toks = cur.next()
        if toks[0] in ("[A]", "[B]", "[D]"):
            name = toks[0][1]
            if name in parts:
                raise DocumentSyntaxError(f"section {toks[0]} given twice", n)
            parts[name] = (n, _parse_body(cur))
        elif toks[0] == "[maps]":
            seen_maps = True
            while cur.peek() is not None and not cur.peek()[1][0].startswith("["):
                m, mt = cur.next()
                if len(mt) != 2 or mt[0] not in maps:
                    raise DocumentSyntaxError("expected 'i <degree>' or 'pi <degree>'", m)
                p = _int(mt[1], m, "degree")
                maps[mt[0]][p] = _read_block(cur, m, mt[0])
        else:
            raise DocumentSyntaxError(f"expected a section header, got {toks[0]!r}", n)
    for name in "ABD":
        if name not in parts:
            raise DocumentSyntaxError(f"missing section [{name}]", None)
    if not seen_maps:
        raise DocumentSyntaxError("missing section [maps]", None)
    complexes = {}
    for name, (n, doc) in parts.items():
        try:
            complexes[name] = doc.to_complex()
        except DocumentSemanticError as e:
            raise DocumentSemanticError(f"[{name}] {e}", e.degree) from None
    a, b, d = complexes["A"], complexes["B"], complexes["D"]
    length = max(a.length, b.length, d.length)
    i_m, pi_m = [], []
    for p in range(length + 1):
        i_m.append(_matrix(maps["i"].get(p, []), b.dim(p), a.dim(p), f"i {p}", p))
        pi_m.append(_matrix(maps["pi"].get(p, []), d.dim(p), b.dim(p), f"pi {p}", p))
    try:
        ses = ChainSES(a, b, d, i_m, pi_m)
    except TorsionError as e:
        raise DocumentSemanticError(str(e)) from None
    report = validate_ses(ses)
    if not report:
        raise DocumentSemanticError(report.message, report.degree)
    hs = {}
    for name, c in (("A", ses.a), ("B", ses.b), ("D", ses.d)):
        try:
            hs[name] = homology(c, homology_overrides(parts[name][1], c))
        except DocumentSemanticError:
            raise
        except TorsionError as e:
            raise DocumentSemanticError(f"[{name}] homology bases: {e}") from None
    return SESDocument(ses, hs)


def serialize_ses(s: ChainSES, homologies: dict | None = None) -> str:
    lines = [f"rftorsion ses {VERSION}"]
    for name, c in (("A", s.a), ("B", s.b), ("D", s.d)):
        lines.append(f"[{name}]")
        lines += _body_lines(c, (homologies or {}).get(name))
    lines.append("[maps]")
    for p in range(s.length + 1):
        for key, m in (("i", s.i[p]), ("pi", s.pi[p])):
            if m.rows and m.cols and not m.is_zero():
                lines += _matrix_lines(key, p, m.row_list())
    return "\n".join(lines) + "\n"


def parse_bases(text: str) -> dict:
    """Homology overrides: ``{None: {p: vectors}}`` or ``{"A": {...}, ...}`` when sectioned."""
    cur = _Cursor(_tokenize(text))
    _header(cur, "bases")
    out = {}
    section = None
    while cur.peek() is not None:
        n, toks = cur.peek()
        if toks[0] in ("[A]", "[B]", "[D]"):
            cur.next()
            section = toks[0][1]
            continue
        if toks[0] != "homology" or len(toks) != 2:
            raise DocumentSyntaxError("bases documents contain only 'homology <degree>' blocks", n)
        cur.next()
        p = _int(toks[1], n, "degree")
        out.setdefault(section, {})[p] = [tuple(r) for _, r in _read_block(cur, n, "homology")]
    return out
