"""Controlled vocabulary and RDFS-Plus axioms extracted from ontology documents."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ValidationError
from .terms import (
    IRI,
    OWL_CLASS,
    OWL_DATATYPEPROPERTY,
    OWL_FUNCTIONAL,
    OWL_INVERSEFUNCTIONAL,
    OWL_INVERSEOF,
    OWL_OBJECTPROPERTY,
    OWL_SYMMETRIC,
    OWL_TRANSITIVE,
    RDF_TYPE,
    RDFS,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    XSD,
    Triple,
    local_name,
)

_PROPERTY_TYPES = {OWL_OBJECTPROPERTY, OWL_DATATYPEPROPERTY}
_CHARACTERISTICS = {
    OWL_TRANSITIVE: "transitive_properties",
    OWL_SYMMETRIC: "symmetric_properties",
    OWL_FUNCTIONAL: "functional_properties",
    OWL_INVERSEFUNCTIONAL: "inverse_functional_properties",
}


def _is_datatype(iri: IRI) -> bool:
    return iri.value.startswith(XSD) or iri.value == RDFS + "Literal"


@dataclass
class OntologyCatalog:
    classes: set[IRI] = field(default_factory=set)
    properties: set[IRI] = field(default_factory=set)
    subclass_axioms: set[tuple[IRI, IRI]] = field(default_factory=set)
    subproperty_axioms: set[tuple[IRI, IRI]] = field(default_factory=set)
    domain_axioms: set[tuple[IRI, IRI]] = field(default_factory=set)
    range_axioms: set[tuple[IRI, IRI]] = field(default_factory=set)
    inverse_axioms: set[tuple[IRI, IRI]] = field(default_factory=set)
    transitive_properties: set[IRI] = field(default_factory=set)
    symmetric_properties: set[IRI] = field(default_factory=set)
    functional_properties: set[IRI] = field(default_factory=set)
    inverse_functional_properties: set[IRI] = field(default_factory=set)
    label_index: dict[str, IRI] = field(default_factory=dict)
    property_index: dict[str, IRI] = field(default_factory=dict)

    def class_for_name(self, name: str) -> IRI | None:
        """Exact, case-sensitive lookup of a class by local name."""
        return self.label_index.get(name)

    def property_for_name(self, name: str) -> IRI | None:
        return self.property_index.get(name)

    def axiom_triples(self) -> set[Triple]:
        """The catalog's axioms rendered back as RDF statements."""
        out = set()
        for pairs, pred in (
            (self.subclass_axioms, RDFS_SUBCLASSOF),
            (self.subproperty_axioms, RDFS_SUBPROPERTYOF),
            (self.domain_axioms, RDFS_DOMAIN),
            (self.range_axioms, RDFS_RANGE),
            (self.inverse_axioms, OWL_INVERSEOF),
        ):
            out.update(Triple(a, pred, b) for a, b in pairs)
        for kind, attr in _CHARACTERISTICS.items():
            out.update(Triple(p, RDF_TYPE, kind) for p in getattr(self, attr))
        return out


def load_catalog(documents: Iterable[Iterable[Triple]]) -> OntologyCatalog:
    cat = OntologyCatalog()
    for doc in documents:
        for t in doc:
            s, p, o = t
            if not isinstance(s, IRI):
                continue
            if p == RDF_TYPE and isinstance(o, IRI):
                if o == OWL_CLASS:
                    cat.classes.add(s)
                elif o in _PROPERTY_TYPES:
                    cat.properties.add(s)
                elif o in _CHARACTERISTICS:
                    cat.properties.add(s)
                    getattr(cat, _CHARACTERISTICS[o]).add(s)
            elif not isinstance(o, IRI):
                continue
            elif p == RDFS_SUBCLASSOF:
                cat.subclass_axioms.add((s, o))
                cat.classes.update((s, o))
            elif p == RDFS_SUBPROPERTYOF:
                cat.subproperty_axioms.add((s, o))
                cat.properties.update((s, o))
            elif p == OWL_INVERSEOF:
                cat.inverse_axioms.add((s, o))
                cat.properties.update((s, o))
            elif p in (RDFS_DOMAIN, RDFS_RANGE):
                (cat.domain_axioms if p == RDFS_DOMAIN else cat.range_axioms).add((s, o))
                cat.properties.add(s)
                if not _is_datatype(o):
                    cat.classes.add(o)

    cat.label_index = _index(cat.classes, "class")
    cat.property_index = _index(cat.properties, "property")
    return cat


def _index(iris: set[IRI], what: str) -> dict[str, IRI]:
    index: dict[str, IRI] = {}
    collisions: dict[str, set[IRI]] = {}
    for iri in sorted(iris, key=lambda i: i.value):
        name = local_name(iri.value)
        if name in index:
            collisions.setdefault(name, {index[name]}).add(iri)
        else:
            index[name] = iri
    if collisions:
        detail = "; ".join(
            f"{name}: {', '.join(sorted(i.value for i in iris))}"
            for name, iris in sorted(collisions.items())
        )
        raise ValidationError(
            f"duplicate {what} local names: {detail}",
            code="label-collision",
            offenders=sorted(collisions),
        )
    return index
