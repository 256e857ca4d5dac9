"""The ``.crn`` text format.

Grammar (one statement per line, ``#`` starts a comment)::

    document   := { statement }
    statement  := "network" NAME
                | "species" NAME { "," NAME }
                | "kinetics" "=" ("mass_action" | "power_law")
                | "param" NAME "=" number
                | reaction
    reaction   := complex ("->" | "<->") complex { ";" annotation }
    complex    := "0" | term { "+" term }
    term       := [ number ] NAME
    annotation := "k" "=" (value | "[" value "," value "]")
                | "F" "=" (row | "[" row "," row "]")
                | "label" "=" NAME
    row        := "[" number { "," number } "]"
    value      := number | NAME          (a NAME refers to a param)
    number     := ["-"] digits [ "." digits ] [ exponent ] [ "/" digits ]

Kinetic-order rows are listed in species order: the ``species`` line when
present, otherwise order of first appearance.
"""

from __future__ import annotations

import re
from importlib.resources import files
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .errors import CRNError
from .kinetics import PowerLawKinetics
from .network import ReactionNetwork

Number = Union[Fraction, float]
Value = Union[Fraction, float, str]


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_col: int


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "syntax" or "semantic"
    message: str
    span: Span
    expected: tuple[str, ...] = ()

    def format(self, source: str = "<input>") -> str:
        s = f"{source}:{self.span.line}:{self.span.col}: {self.kind} error: {self.message}"
        if self.expected:
            s += f" (expected one of: {', '.join(self.expected)})"
        return s


class DSLError(CRNError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(d.format() for d in self.diagnostics))


class CRNSyntaxError(DSLError):
    pass


class CRNSemanticError(DSLError):
    pass


@dataclass(frozen=True)
class Term:
    coefficient: Number
    species: str
    span: Span | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ReactionStatement:
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]
    reversible: bool = False
    k: tuple[Value, ...] = ()
    F: tuple[tuple[Fraction, ...], ...] | None = None
    label: str | None = None
    span: Span | None = field(default=None, compare=False)
    k_span: Span | None = field(default=None, compare=False)
    F_span: Span | None = field(default=None, compare=False)


@dataclass
class NetworkDocument:
    reactions: list[ReactionStatement]
    species: tuple[str, ...] | None = None
    name: str | None = None
    kinetics: str = "power_law"
    params: dict[str, Number] = field(default_factory=dict)
    comments: list[str] = field(default_factory=list, compare=False)

    def species_order(self) -> tuple[str, ...]:
        if self.species is not None:
            return self.species
        seen: dict[str, None] = {}
        for rx in self.reactions:
            for t in rx.lhs + rx.rhs:
                seen.setdefault(t.species, None)
        return tuple(seen)


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<rev><->)
  | (?P<arrow>->)
  | (?P<number>-?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[+;=\[\],])
    """,
    re.VERBOSE,
)


_VOCABULARY = ("name", "number", "->", "<->", "+", ";", "=", "[", "]", ",")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    span: Span


class _LineError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def _tokenize(line: str, lineno: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            span = Span(lineno, pos + 1, pos + 2)
            raise _LineError(Diagnostic("syntax", f"unexpected character {line[pos]!r}", span, _VOCABULARY))
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            toks.append(_Tok(text if kind == "punct" else kind, text, Span(lineno, pos + 1, m.end() + 1)))
        pos = m.end()
    return toks


def _parse_number(text: str) -> Number:
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ZeroDivisionError
        return Fraction(num) / int(den) if not re.search(r"[.eE]", num) else Fraction(float(num)) / int(den)
    if re.search(r"[.eE]", text):
        return float(text)
    return Fraction(int(text))


class _LineParser:
    def __init__(self, toks: list[_Tok], lineno: int, width: int):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.width = width

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, expected: tuple[str, ...], message: str | None = None):
        tok = self.peek()
        if tok is None:
            span = Span(self.lineno, self.width + 1, self.width + 2)
            found = "end of line"
        else:
            span, found = tok.span, repr(tok.text)
        raise _LineError(Diagnostic("syntax", message or f"unexpected {found}", span, expected))

    def expect(self, *kinds: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.kind not in kinds:
            self.error(kinds)
        self.i += 1
        return tok

    def accept(self, kind: str) -> _Tok | None:
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.i += 1
            return tok
        return None

    def end(self):
        if self.peek() is not None:
            self.error(("end of line",))

    def number(self) -> tuple[Number, Span]:
        tok = self.expect("number")
        try:
            return _parse_number(tok.text), tok.span
        except ZeroDivisionError:
            raise _LineError(Diagnostic("syntax", "zero denominator", tok.span, ("number",)))

    def complex(self) -> tuple[Term, ...]:
        tok = self.peek()
        if tok is not None and tok.kind == "number" and tok.text == "0":
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
            if nxt is None or nxt.kind != "name":
                self.i += 1
                return ()
        terms = [self.term()]
        while self.accept("+"):
            terms.append(self.term())
        return tuple(terms)

    def term(self) -> Term:
        tok = self.peek()
        if tok is not None and tok.kind == "number":
            coef, span = self.number()
            name = self.expect("name")
            return Term(coef, name.text, Span(self.lineno, span.col, name.span.end_col))
        if tok is None or tok.kind != "name":
            self.error(("number", "name"))
        self.i += 1
        return Term(Fraction(1), tok.text, tok.span)

    def value(self) -> Value:
        tok = self.peek()
        if tok is not None and tok.kind == "name":
            self.i += 1
            return tok.text
        return self.number()[0]

    def row(self) -> tuple[Fraction, ...]:
        self.expect("[")
        entries = [self.number()[0]]
        while self.accept(","):
            entries.append(self.number()[0])
        self.expect("]")
        return tuple(Fraction(e) for e in entries)

    def reaction(self) -> ReactionStatement:
        first = self.peek()
        lhs = self.complex()
        arrow = self.expect("arrow", "rev")
        rhs = self.complex()
        k: tuple[Value, ...] = ()
        F = None
        label = None
        k_span = F_span = None
        seen: set[str] = set()
        while self.accept(";"):
            key = self.expect("name")
            if key.text not in ("k", "F", "label"):
                raise _LineError(Diagnostic("syntax", f"unknown annotation {key.text!r}", key.span, ("k", "F", "label")))
            if key.text in seen:
                raise _LineError(Diagnostic("syntax", f"duplicate annotation {key.text!r}", key.span))
            seen.add(key.text)
            self.expect("=")
            start = self.peek()
            if key.text == "k":
                if self.accept("["):
                    k = (self.value(),)
                    while self.accept(","):
                        k += (self.value(),)
                    self.expect("]")
                else:
                    k = (self.value(),)
                k_span = self._span_from(start)
            elif key.text == "F":
                nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
                if nxt is not None and nxt.kind == "[":
                    self.expect("[")
                    rows = [self.row()]
                    while self.accept(","):
                        rows.append(self.row())
                    self.expect("]")
                    F = tuple(rows)
                else:
                    F = (self.row(),)
                F_span = self._span_from(start)
            else:
                label = self.expect("name", "number").text
        self.end()
        last = self.toks[-1]
        return ReactionStatement(
            lhs, rhs, arrow.kind == "rev", k, F, label,
            Span(self.lineno, first.span.col, last.span.end_col), k_span, F_span,
        )

    def _span_from(self, start: _Tok) -> Span:
        return Span(self.lineno, start.span.col, self.toks[self.i - 1].span.end_col)


def parse(text: str) -> NetworkDocument:
    """Parse ``.crn`` text; raises CRNSyntaxError or CRNSemanticError with all diagnostics."""
    doc = NetworkDocument(reactions=[])
    diags: list[Diagnostic] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code, _, comment = raw.partition("#")
        if comment:
            doc.comments.append(comment.strip())
        if not code.strip():
            continue
        try:
            toks = _tokenize(code, lineno)
            _statement(_LineParser(toks, lineno, len(code.rstrip())), doc)
        except _LineError as e:
            diags.append(e.diag)
    if any(d.kind == "syntax" for d in diags):
        raise CRNSyntaxError(diags)
    diags += check(doc)
    if diags:
        raise CRNSemanticError(diags)
    return doc


def _statement(p: _LineParser, doc: NetworkDocument) -> None:
    head = p.peek()
    nxt = p.toks[1] if len(p.toks) > 1 else None
    keyword = head.kind == "name" and (nxt is None or nxt.kind in ("name", "=")) and head.text in (
        "network", "species", "kinetics", "param",
    )
    if not keyword:
        doc.reactions.append(p.reaction())
        return
    p.i += 1
    if head.text == "network":
        doc.name = p.expect("name").text
    elif head.text == "species":
        names = [p.expect("name").text]
        while p.accept(","):
            names.append(p.expect("name").text)
        if len(set(names)) != len(names):
            raise _LineError(Diagnostic("semantic", "duplicate species in declaration", head.span))
        doc.species = (doc.species or ()) + tuple(names)
    elif head.text == "kinetics":
        p.expect("=")
        tok = p.expect("name")
        if tok.text not in ("mass_action", "power_law"):
            raise _LineError(Diagnostic("syntax", f"unknown kinetics {tok.text!r}", tok.span, ("mass_action", "power_law")))
        doc.kinetics = tok.text
    else:
        name = p.expect("name").text
        p.expect("=")
        doc.params[name] = p.number()[0]
    p.end()


def _resolve(v: Value, params: Mapping[str, Number]) -> Number | None:
    if isinstance(v, str):
        return params.get(v)
    return v


def check(doc: NetworkDocument, params: Mapping[str, Number] | None = None) -> list[Diagnostic]:
    """Semantic diagnostics for a syntactically valid document."""
    params = {**doc.params, **(params or {})}
    species = doc.species_order()
    declared = set(species)
    m = len(species)
    diags = []
    for rx in doc.reactions:
        span = rx.span or Span(0, 0, 0)
        for t in rx.lhs + rx.rhs:
            if t.coefficient < 0:
                diags.append(Diagnostic("semantic", f"negative stoichiometric coefficient for {t.species}", t.span or span))
            if t.species not in declared:
                diags.append(Diagnostic("semantic", f"undeclared species {t.species}", t.span or span))
        if _vector(rx.lhs, species) == _vector(rx.rhs, species):
            diags.append(Diagnostic("semantic", "self-loop reaction y -> y", span))
        want = 2 if rx.reversible else 1
        if len(rx.k) != want:
            diags.append(Diagnostic("semantic", f"expected {want} rate constant(s), got {len(rx.k)}", rx.k_span or span))
        for v in rx.k:
            val = _resolve(v, params)
            if val is None:
                diags.append(Diagnostic("semantic", f"undefined parameter {v}", rx.k_span or span))
            elif not val > 0:
                diags.append(Diagnostic("semantic", f"non-positive rate constant {val}", rx.k_span or span))
        if doc.kinetics == "mass_action":
            if rx.F is not None:
                diags.append(Diagnostic("semantic", "F given under mass_action kinetics", rx.F_span or span))
        elif rx.F is None:
            diags.append(Diagnostic("semantic", "missing kinetic-order row F", span))
        else:
            if len(rx.F) != want:
                diags.append(Diagnostic("semantic", f"expected {want} F row(s), got {len(rx.F)}", rx.F_span or span))
            for row in rx.F:
                if len(row) != m:
                    diags.append(
                        Diagnostic("semantic", f"F row has length {len(row)}, expected {m}", rx.F_span or span)
                    )
    return diags


def _vector(terms: tuple[Term, ...], species: tuple[str, ...]) -> tuple[Fraction, ...]:
    v = dict.fromkeys(species, Fraction(0))
    for t in terms:
        v[t.species] = v.get(t.species, Fraction(0)) + Fraction(t.coefficient)
    return tuple(v.values())


def _expand(doc: NetworkDocument) -> Iterator[tuple[ReactionStatement, tuple, tuple, Value, tuple | None, str | None]]:
    species = doc.species_order()
    for rx in doc.reactions:
        a, b = _vector(rx.lhs, species), _vector(rx.rhs, species)
        F = rx.F or (None, None)
        if rx.reversible:
            yield rx, a, b, rx.k[0], F[0], rx.label and f"{rx.label}_f"
            yield rx, b, a, rx.k[1], F[1], rx.label and f"{rx.label}_r"
        else:
            yield rx, a, b, rx.k[0], F[0], rx.label


def to_model(
    doc: NetworkDocument, params: Mapping[str, Number] | None = None
) -> tuple[ReactionNetwork, PowerLawKinetics]:
    """Build the network and kinetics; ``params`` override document params."""
    unknown = set(params or {}) - set(doc.params)
    if unknown:
        raise KeyError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
    diags = check(doc, params)
    if diags:
        raise CRNSemanticError(diags)
    values = {**doc.params, **(params or {})}
    species = doc.species_order()
    pairs, F, k, labels = [], [], [], []
    for _, a, b, kv, row, label in _expand(doc):
        pairs.append((dict(zip(species, a)), dict(zip(species, b))))
        F.append(a if doc.kinetics == "mass_action" else row)
        k.append(float(_resolve(kv, values)))
        labels.append(label)
    use_labels = labels if all(labels) else None
    net = ReactionNetwork.from_reactions(species, pairs, use_labels)
    return net, PowerLawKinetics(tuple(F), tuple(k))


def _fmt_number(x: Number) -> str:
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fmt_value(v: Value) -> str:
    return v if isinstance(v, str) else _fmt_number(v)


def _fmt_complex(terms: tuple[Term, ...]) -> str:
    if not terms:
        return "0"
    out = []
    for t in terms:
        coef = t.coefficient
        out.append(t.species if coef == 1 and not isinstance(coef, float) else f"{_fmt_number(coef)} {t.species}")
    return " + ".join(out)


def _fmt_row(row) -> str:
    return "[" + ", ".join(_fmt_number(x) for x in row) + "]"


def format_document(doc: NetworkDocument) -> str:
    """Print a document so that ``parse(format_document(doc)) == doc``."""
    lines = []
    if doc.name:
        lines.append(f"network {doc.name}")
    if doc.species is not None:
        lines.append("species " + ", ".join(doc.species))
    if doc.kinetics != "power_law":
        lines.append(f"kinetics = {doc.kinetics}")
    for name, val in doc.params.items():
        lines.append(f"param {name} = {_fmt_number(val)}")
    for rx in doc.reactions:
        parts = [f"{_fmt_complex(rx.lhs)} {'<->' if rx.reversible else '->'} {_fmt_complex(rx.rhs)}"]
        if rx.k:
            ks = ", ".join(_fmt_value(v) for v in rx.k)
            parts.append(f"k=[{ks}]" if rx.reversible or len(rx.k) > 1 else f"k={ks}")
        if rx.F is not None:
            rows = ", ".join(_fmt_row(r) for r in rx.F)
            parts.append(f"F=[{rows}]" if rx.reversible or len(rx.F) > 1 else f"F={rows}")
        if rx.label is not None:
            parts.append(f"label={rx.label}")
        lines.append(" ; ".join(parts))
    return "\n".join(lines) + "\n"


def load(path, params: Mapping[str, Number] | None = None) -> tuple[ReactionNetwork, PowerLawKinetics]:
    with open(path, encoding="utf-8") as fh:
        return to_model(parse(fh.read()), params)


EXAMPLES = ("jose", "horn_jackson", "log_pair", "composite", "acr_plp")


def example_text(name: str) -> str:
    """Source of a bundled example network (see ``EXAMPLES``)."""
    return files("plkcrn").joinpath("data", f"{name}.crn").read_text(encoding="utf-8")


def load_example(name: str, params: Mapping[str, Number] | None = None) -> tuple[ReactionNetwork, PowerLawKinetics]:
    return to_model(parse(example_text(name)), params)
