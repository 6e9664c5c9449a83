from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from defii.store import EXPLICIT, INFERRED, MAPPED, Repository, RepositoryStats, RWLock
from defii.terms import (
    IRI,
    XSD_DECIMAL,
    XSD_INTEGER,
    BNode,
    Literal,
    TermError,
    Triple,
    from_literal,
    local_name,
    to_literal,
)

EX = "http://example.org/"
subjects = st.sampled_from([IRI(EX + c) for c in "abcd"] + [BNode("b1")])
predicates = st.sampled_from([IRI(EX + p) for p in ("p", "q", "r")])
objects = st.one_of(subjects, st.sampled_from([Literal("x"), Literal("1", XSD_INTEGER), Literal("hi", lang="EN")]))
triples = st.builds(Triple, subjects, predicates, objects)


def test_iri_must_be_absolute():
    with pytest.raises(TermError, match="relative"):
        IRI("foo/bar")
    with pytest.raises(TermError, match="illegal"):
        IRI("http://x/a b")


def test_triple_position_rules():
    with pytest.raises(TermError, match="literal in subject position"):
        Triple(Literal("x"), IRI(EX + "p"), IRI(EX + "o"))
    with pytest.raises(TermError, match="predicate must be an IRI"):
        Triple(IRI(EX + "s"), BNode("p"), IRI(EX + "o"))


def test_literal_lang_normalised():
    lit = Literal("chat", lang="FR")
    assert lit.lang == "fr" and lit == Literal("chat", lang="fr")
    assert lit.n3() == '"chat"@fr'


def test_local_name():
    assert local_name("http://a/b#C") == "C"
    assert local_name("http://a/b/C") == "C"


@pytest.mark.parametrize(
    "value, lexical, dt",
    [(5, "5", XSD_INTEGER), (1.6, "1.6", XSD_DECIMAL), (Decimal("0.0"), "0.0", XSD_DECIMAL), (1e-7, "0.0000001", XSD_DECIMAL)],
)
def test_to_literal(value, lexical, dt):
    lit = to_literal(value)
    assert (lit.lexical, lit.datatype) == (lexical, dt)


def test_to_literal_rejects_bool():
    with pytest.raises(TermError):
        to_literal(True)


def test_from_literal():
    assert from_literal(Literal("7", XSD_INTEGER)) == 7
    assert from_literal(Literal("1.6", XSD_DECIMAL)) == Decimal("1.6")
    assert from_literal(Literal("High")) == "High"


def test_set_semantics_and_provenance_upgrade():
    repo = Repository()
    t = Triple(IRI(EX + "s"), IRI(EX + "p"), IRI(EX + "o"))
    assert repo.insert(MAPPED, t, INFERRED)
    assert not repo.insert(MAPPED, t, INFERRED)
    assert repo.provenance(MAPPED, t) is INFERRED
    repo.insert(MAPPED, t, EXPLICIT)  # explicit wins
    assert repo.provenance(MAPPED, t) is EXPLICIT
    repo.insert(MAPPED, t, INFERRED)  # never downgraded
    assert repo.provenance(MAPPED, t) is EXPLICIT
    assert len(repo.graph(MAPPED)) == 1


@given(st.lists(triples, max_size=40), st.lists(triples, max_size=20))
def test_index_coherence(added, removed):
    repo = Repository()
    for t in added:
        repo.insert(MAPPED, t)
    for t in removed:
        repo.remove(MAPPED, t)
    expected = set(added) - set(removed)
    g = repo.graph(MAPPED)
    assert set(g.records) == expected
    for t in expected:
        for pattern in [(t.subject, None, None), (None, t.predicate, None), (None, None, t.object),
                        (t.subject, t.predicate, None), (None, t.predicate, t.object), (t.subject, None, t.object)]:
            brute = {x for x in expected if all(q is None or q == v for q, v in zip(pattern, x))}
            for index in ("s", "p", "o", None):
                assert set(g.find(*pattern, index=index)) == brute


@given(st.lists(triples, max_size=30))
def test_match_sorted_and_deterministic(ts):
    repo = Repository()
    for t in ts:
        repo.insert(MAPPED, t)
    keys = [tuple(x.n3() for x in r.triple) for r in repo.match(MAPPED)]
    assert keys == sorted(keys)
    assert [r.triple for r in repo.match(MAPPED)] == [r.triple for r in repo.match(MAPPED)]


def test_stats_and_ratio():
    assert RepositoryStats(0, 0).expansion_ratio is None
    assert RepositoryStats(0, 0).to_json() == {"explicit": 0, "inferred": 0, "total": 0, "expansionRatio": None}
    assert RepositoryStats(10, 0).expansion_ratio == 1.0
    assert RepositoryStats(19720, 36674).to_json()["expansionRatio"] == 2.86


def test_clear_inferred_keeps_explicit():
    repo = Repository()
    a = Triple(IRI(EX + "a"), IRI(EX + "p"), IRI(EX + "b"))
    b = Triple(IRI(EX + "b"), IRI(EX + "p"), IRI(EX + "c"))
    repo.insert(MAPPED, a)
    repo.insert(MAPPED, b, INFERRED)
    assert repo.clear_inferred(MAPPED) == 1
    assert set(repo.graph(MAPPED).records) == {a}


@given(st.lists(st.tuples(triples, st.booleans()), max_size=30))
def test_snapshot_round_trip(tmp_path_factory, items):
    repo = Repository()
    for t, inferred in items:
        repo.insert(MAPPED, t, INFERRED if inferred else EXPLICIT)
    d = tmp_path_factory.mktemp("snap")
    repo.save(d)
    again = Repository.load(d)
    assert again.graph(MAPPED).records == repo.graph(MAPPED).records


def test_rwlock_excludes_writers():
    import threading

    lock = RWLock()
    seen = []

    def writer():
        with lock.write():
            seen.append("w")

    with lock.read():
        th = threading.Thread(target=writer)
        th.start()
        th.join(0.1)
        assert seen == []  # blocked while a reader holds the lock
    th.join(2)
    assert seen == ["w"]
