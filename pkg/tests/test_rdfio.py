import pytest
from hypothesis import given
from hypothesis import strategies as st

from defii.errors import ParseError
from defii.rdfio import parse_ntriples, parse_turtle, serialize_ntriples
from defii.terms import IRI, XSD_DECIMAL, XSD_INTEGER, BNode, Literal, Triple

EX = "http://example.org/"

text_chars = st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00")
iris = st.sampled_from([IRI(EX + n) for n in ("a", "b", "c", "p", "q")] + [IRI("urn:x:y")])
literals = st.one_of(
    st.builds(Literal, st.text(text_chars, max_size=12)),
    st.builds(lambda n: Literal(str(n), XSD_INTEGER), st.integers(-10**6, 10**6)),
    st.builds(Literal, st.text(text_chars, max_size=5), st.just(None), st.sampled_from(["en", "de-ch"])),
)
nodes = st.one_of(iris, st.builds(BNode, st.sampled_from(["b0", "n1"])))
triples = st.builds(Triple, nodes, iris, st.one_of(nodes, literals))


@given(st.lists(triples, max_size=25))
def test_ntriples_round_trip(ts):
    text = serialize_ntriples(ts)
    assert set(parse_ntriples(text)) == set(ts)
    assert serialize_ntriples(parse_ntriples(text)) == text


def test_serialization_sorted_unique():
    t = Triple(IRI(EX + "b"), IRI(EX + "p"), Literal("x"))
    u = Triple(IRI(EX + "a"), IRI(EX + "p"), Literal("x"))
    text = serialize_ntriples([t, u, t])
    assert text.splitlines() == sorted({t.n3(), u.n3()})
    assert text.endswith("\n")
    assert serialize_ntriples([]) == ""


def test_turtle_subset():
    ttl = """
    @prefix ex: <http://example.org/> .
    # comment
    ex:a a ex:C ; ex:p ex:b , ex:c ;
         ex:n 42 ; ex:d 1.5 ; ex:s "hi\\n"@EN ; ex:t "x"^^ex:dt .
    _:x ex:p <http://example.org/abs> .
    """
    ts, prefixes = parse_turtle(ttl)
    assert prefixes["ex"] == EX
    objs = {t.object for t in ts}
    assert Literal("42", XSD_INTEGER) in objs
    assert Literal("1.5", XSD_DECIMAL) in objs
    assert Literal("hi\n", lang="en") in objs
    assert Literal("x", EX + "dt") in objs
    assert Triple(BNode("x"), IRI(EX + "p"), IRI(EX + "abs")) in ts
    assert len(ts) == 8


def test_missing_dot_reports_position():
    with pytest.raises(ParseError) as info:
        parse_turtle("@prefix ex: <http://example.org/> .\nex:a ex:p ex:b")
    assert str(info.value) == "line 2, column 15: expected '.', found end of input"
    assert info.value.diagnostic.line == 2


@pytest.mark.parametrize(
    "ttl",
    [
        "<http://a/s> <http://a/p> [ <http://a/q> 1 ] .",
        "<http://a/s> <http://a/p> ( 1 2 ) .",
        "<http://a/s> <http://a/p> true .",
        "<http://a/s> <http://a/p> 1e3 .",
        "@base <http://a/> .",
        "<http://a/s> nope:p <http://a/o> .",
        '"lit" <http://a/p> <http://a/o> .',
    ],
)
def test_rejections(ttl):
    with pytest.raises(ParseError):
        parse_turtle(ttl)


def test_bundled_ontology_parses():
    from defii.config import data_path

    ts, _ = parse_turtle(data_path("mini_cco.ttl").read_text())
    assert len(ts) > 50
