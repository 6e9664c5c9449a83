"""Turtle (subset) parsing and N-Triples serialization.

Supported Turtle: ``@prefix`` directives, ``<absolute IRIs>``, prefixed
names, ``a``, double-quoted strings with ``@lang`` or ``^^datatype``,
integer and decimal shorthand, ``_:labels``, and the ``;`` ``,`` ``.``
punctuation. Anything else is rejected with a :class:`ParseError`.
"""

from __future__ import annotations

from typing import Iterable

from ._lexer import Token, TokenStream, tokenize, unescape_string
from .errors import ParseError
from .terms import (
    IRI,
    RDF_TYPE,
    XSD_DECIMAL,
    XSD_INTEGER,
    BNode,
    Literal,
    Term,
    TermError,
    Triple,
)

PrefixMap = dict


def _iri(tok: Token, value: str) -> IRI:
    try:
        return IRI(value)
    except TermError as exc:
        raise ParseError(tok.line, tok.column, str(exc)) from None


def expand_pname(tok: Token, prefixes: PrefixMap) -> IRI:
    prefix, _, local = tok.text.partition(":")
    if prefix not in prefixes:
        raise ParseError(tok.line, tok.column, f"unbound prefix '{prefix}:'")
    return _iri(tok, prefixes[prefix] + local)


def _unsupported(stream: TokenStream, tok: Token) -> ParseError | None:
    if tok.is_op("["):
        return stream.error("anonymous blank node property lists are not supported", tok)
    if tok.is_op("("):
        return stream.error("collections are not supported", tok)
    if tok.kind == "LONGSTRING":
        return stream.error("long string literals are not supported", tok)
    if tok.kind == "SQSTRING":
        return stream.error("single-quoted string literals are not supported", tok)
    if tok.kind == "DOUBLE":
        return stream.error("double literals are not supported", tok)
    if tok.kind == "NAME" and tok.text in ("true", "false"):
        return stream.error("boolean literals are not supported", tok)
    return None


class _TurtleParser:
    def __init__(self, text: str) -> None:
        self.stream = TokenStream(tokenize(text))
        self.prefixes: PrefixMap = {}
        self.triples: list[Triple] = []

    def parse(self) -> tuple[list[Triple], PrefixMap]:
        s = self.stream
        while s.peek.kind != "EOF":
            tok = s.peek
            if tok.kind == "LANGTAG" and tok.text == "@prefix":
                self.prefix_directive()
            elif tok.kind == "LANGTAG" and tok.text == "@base" or tok.is_keyword("BASE"):
                raise s.error("base directives are not supported")
            elif tok.is_keyword("PREFIX"):
                raise s.error("SPARQL-style PREFIX directives are not supported; use @prefix")
            else:
                self.triples_statement()
        return self.triples, dict(self.prefixes)

    def prefix_directive(self) -> None:
        s = self.stream
        s.next()
        name = s.next()
        if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
            raise s.error("expected prefix name such as 'ex:'", name)
        iri = s.next()
        if iri.kind != "IRIREF":
            raise s.error("expected <IRI> in @prefix directive", iri)
        self.prefixes[name.text[:-1]] = _iri(iri, iri.text[1:-1]).value
        s.expect_op(".")

    def triples_statement(self) -> None:
        s = self.stream
        subject = self.subject()
        while True:
            predicate = self.verb()
            while True:
                obj = self.object()
                self.triples.append(Triple(subject, predicate, obj))
                if s.peek.is_op(","):
                    s.next()
                    continue
                break
            if s.peek.is_op(";"):
                while s.peek.is_op(";"):
                    s.next()
                if s.peek.is_op("."):
                    break
                continue
            break
        s.expect_op(".")

    def iri_or_bnode(self, tok: Token) -> Term | None:
        if tok.kind == "IRIREF":
            return _iri(tok, tok.text[1:-1])
        if tok.kind == "PNAME":
            return expand_pname(tok, self.prefixes)
        if tok.kind == "BNODE":
            return BNode(tok.text[2:])
        return None

    def subject(self) -> Term:
        s = self.stream
        tok = s.peek
        err = _unsupported(s, tok)
        if err:
            raise err
        term = self.iri_or_bnode(tok)
        if term is None:
            if tok.kind in ("STRING", "INTEGER", "DECIMAL"):
                raise s.error("literal in subject position", tok)
            raise s.error(f"expected subject, found {tok.text or 'end of input'!r}", tok)
        s.next()
        return term

    def verb(self) -> IRI:
        s = self.stream
        tok = s.peek
        if tok.kind == "NAME" and tok.text == "a":
            s.next()
            return RDF_TYPE
        if tok.kind in ("IRIREF", "PNAME"):
            s.next()
            return self.iri_or_bnode(tok)
        raise s.error(f"expected predicate, found {tok.text or 'end of input'!r}", tok)

    def object(self) -> Term:
        s = self.stream
        tok = s.peek
        err = _unsupported(s, tok)
        if err:
            raise err
        term = self.iri_or_bnode(tok)
        if term is not None:
            s.next()
            return term
        if tok.kind == "STRING":
            s.next()
            lexical = unescape_string(tok)
            if s.peek.kind == "LANGTAG":
                return Literal(lexical, lang=s.next().text[1:])
            if s.peek.is_op("^^"):
                s.next()
                dt = s.next()
                if dt.kind == "IRIREF":
                    return Literal(lexical, _iri(dt, dt.text[1:-1]).value)
                if dt.kind == "PNAME":
                    return Literal(lexical, expand_pname(dt, self.prefixes).value)
                raise s.error("expected datatype IRI after '^^'", dt)
            return Literal(lexical)
        if tok.kind == "INTEGER":
            s.next()
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            s.next()
            return Literal(tok.text, XSD_DECIMAL)
        raise s.error(f"expected object, found {tok.text or 'end of input'!r}", tok)


def parse_turtle(text: str) -> tuple[list[Triple], PrefixMap]:
    """Parse a Turtle-subset document into triples (document order) and prefixes."""
    return _TurtleParser(text).parse()


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    lines = sorted({t.n3() for t in triples})
    return "".join(line + "\n" for line in lines)


def parse_ntriples_line(line: str, line_number: int = 1) -> Triple | None:
    if not line.strip() or line.lstrip().startswith("#"):
        return None
    try:
        triples, _ = parse_turtle(line)
    except ParseError as exc:
        d = exc.diagnostic
        raise ParseError(line_number, d.column, d.message) from None
    if len(triples) != 1:
        raise ParseError(line_number, 1, "expected exactly one statement per line")
    return triples[0]


def parse_ntriples(text: str) -> list[Triple]:
    out = []
    for i, line in enumerate(text.splitlines()):
        t = parse_ntriples_line(line, i + 1)
        if t is not None:
            out.append(t)
    return out
