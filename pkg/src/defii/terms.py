"""RDF terms and statements.

Terms are immutable value objects with structural equality, so they can be
used directly as dictionary keys and set members by the store and reasoner.
"""

from __future__ import annotations

import re
from decimal import Decimal
from dataclasses import dataclass
from typing import Union

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
TOOL = "http://defii.org/tool#"
DEFII = "http://defii.org/ns#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_BOOLEAN = XSD + "boolean"
RDF_LANGSTRING = RDF + "langString"

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BAD_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')


class TermError(ValueError):
    """A term or triple violates the RDF data model."""


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME.match(self.value):
            raise TermError(f"relative IRI not allowed: {self.value!r}")
        if _BAD_IRI_CHARS.search(self.value):
            raise TermError(f"illegal character in IRI: {self.value!r}")

    def n3(self) -> str:
        return f"<{self.value}>"

    @property
    def local_name(self) -> str:
        return local_name(self.value)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BNode:
    label: str

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self) -> str:
        return self.n3()


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.lang is not None:
            object.__setattr__(self, "lang", self.lang.lower())
            object.__setattr__(self, "datatype", RDF_LANGSTRING)

    def n3(self) -> str:
        text = '"' + escape_string(self.lexical) + '"'
        if self.lang is not None:
            return f"{text}@{self.lang}"
        if self.datatype != XSD_STRING:
            return f"{text}^^<{self.datatype}>"
        return text

    def __str__(self) -> str:
        return self.lexical


Term = Union[IRI, BNode, Literal]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise TermError("literal in subject position")
        if not isinstance(self.subject, (IRI, BNode)):
            raise TermError(f"not a term: {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise TermError("predicate must be an IRI")
        if not isinstance(self.object, (IRI, BNode, Literal)):
            raise TermError(f"not a term: {self.object!r}")

    def __iter__(self):
        yield self.subject
        yield self.predicate
        yield self.object

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def local_name(iri: str) -> str:
    """Fragment after ``#``, else the segment after the last ``/``."""
    if "#" in iri:
        return iri.rsplit("#", 1)[1]
    return iri.rstrip("/").rsplit("/", 1)[-1]


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def sort_key(term: Term | None) -> str:
    return "" if term is None else term.n3()


# frequently used vocabulary
RDF_TYPE = IRI(RDF + "type")
RDFS_SUBCLASSOF = IRI(RDFS + "subClassOf")
RDFS_SUBPROPERTYOF = IRI(RDFS + "subPropertyOf")
RDFS_DOMAIN = IRI(RDFS + "domain")
RDFS_RANGE = IRI(RDFS + "range")
OWL_CLASS = IRI(OWL + "Class")
OWL_OBJECTPROPERTY = IRI(OWL + "ObjectProperty")
OWL_DATATYPEPROPERTY = IRI(OWL + "DatatypeProperty")
OWL_INVERSEOF = IRI(OWL + "inverseOf")
OWL_SAMEAS = IRI(OWL + "sameAs")
OWL_TRANSITIVE = IRI(OWL + "TransitiveProperty")
OWL_SYMMETRIC = IRI(OWL + "SymmetricProperty")
OWL_FUNCTIONAL = IRI(OWL + "FunctionalProperty")
OWL_INVERSEFUNCTIONAL = IRI(OWL + "InverseFunctionalProperty")


def to_literal(value) -> Literal:
    """Python scalar to typed literal: str, int, float and Decimal are supported."""
    if isinstance(value, bool):
        raise TermError("boolean values are not supported")
    if isinstance(value, str):
        return Literal(value)
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, float):
        value = Decimal(repr(value))
    if isinstance(value, Decimal):
        text = str(value)
        if "E" in text or "e" in text:
            text = format(value, "f")
        return Literal(text, XSD_DECIMAL)
    raise TermError(f"unsupported value {value!r}")


def from_literal(term: Term):
    """Typed literal back to a Python scalar (Decimal for xsd:decimal)."""
    if not isinstance(term, Literal):
        return term.n3()
    if term.datatype == XSD_INTEGER:
        return int(term.lexical)
    if term.datatype == XSD_DECIMAL:
        return Decimal(term.lexical)
    return term.lexical
