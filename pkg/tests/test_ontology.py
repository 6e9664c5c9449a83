import pytest

from defii.errors import ValidationError
from defii.ontology import load_catalog
from defii.rdfio import parse_turtle

CCO = "http://www.ontologyrepository.com/CommonCoreOntologies/"
TEST = "http://testontology.org/cyber#"


def test_lookup_by_local_name(catalog):
    assert catalog.class_for_name("LaptopComputer").value == TEST + "LaptopComputer"
    assert catalog.class_for_name("DirectiveInformationContentEntity").value == CCO + "DirectiveInformationContentEntity"
    assert catalog.class_for_name("laptopcomputer") is None  # case-sensitive
    assert catalog.class_for_name("Gadget") is None
    assert catalog.property_for_name("av").value == TEST + "av"
    assert catalog.property_for_name("designated_by").value == CCO + "designated_by"


def test_axioms_extracted(catalog):
    names = lambda pairs: {(a.local_name, b.local_name) for a, b in pairs}  # noqa: E731
    assert ("LaptopComputer", "Computer") in names(catalog.subclass_axioms)
    assert ("av", "cvss_metric") in names(catalog.subproperty_axioms)
    assert ("part_of", "has_part") in names(catalog.inverse_axioms)
    assert {p.local_name for p in catalog.transitive_properties} == {"part_of", "has_part"}
    assert {p.local_name for p in catalog.inverse_functional_properties} == {"designated_by"}
    assert {p.local_name for p in catalog.symmetric_properties} == {"connected_to"}


def test_range_to_datatype_is_not_a_class():
    ts, _ = parse_turtle(
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
        "<http://a/p> rdfs:range <http://www.w3.org/2001/XMLSchema#string> .\n"
        "<http://a/q> rdfs:range <http://a/Thing> ."
    )
    cat = load_catalog([ts])
    assert cat.class_for_name("string") is None
    assert cat.class_for_name("Thing") is not None


def test_label_collision_rejected():
    ts, _ = parse_turtle(
        "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
        "<http://a/X> a owl:Class .\n<http://b/X> a owl:Class ."
    )
    with pytest.raises(ValidationError) as info:
        load_catalog([ts])
    assert info.value.code == "label-collision"
    assert info.value.offenders == ["X"]
