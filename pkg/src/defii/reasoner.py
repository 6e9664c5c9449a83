"""RDFS-Plus forward-chaining materialization.

Rules (all conclusions are stored with ``inferred`` provenance):

    R1  a subClassOf b, b subClassOf c            -> a subClassOf c
    R2  x type a, a subClassOf b                  -> x type b
    R3  p subPropertyOf q, q subPropertyOf r      -> p subPropertyOf r
    R4  x p y, p subPropertyOf q                  -> x q y
    R5  x p y, p domain c                         -> x type c
    R6  x p y, p range c                          -> y type c
    R7  p inverseOf q, x p y                      -> y q x   (and x q y -> y p x)
    R8  p type Symmetric, x p y                   -> y p x
    R9  p type Transitive, x p y, y p z           -> x p z
    R10 p type Functional, x p y1, x p y2         -> y1 sameAs y2
    R11 p type InverseFunctional, x1 p y, x2 p y  -> x1 sameAs x2
    R12 sameAs symmetry and transitivity, and substitution of sameAs
        terms in subject/object position of every non-sameAs statement

Conclusions that would put a literal in subject position are skipped.
Evaluation is semi-naive: each round only joins the previous round's new
statements against everything known so far.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable

from .ontology import OntologyCatalog
from .store import EXPLICIT, INFERRED, Repository, RepositoryStats
from .terms import (
    IRI,
    OWL_FUNCTIONAL,
    OWL_INVERSEFUNCTIONAL,
    OWL_INVERSEOF,
    OWL_SAMEAS,
    OWL_SYMMETRIC,
    OWL_TRANSITIVE,
    RDF_TYPE,
    RDFS_DOMAIN,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    Literal,
    Term,
    Triple,
)

TYPE, SC, SP = RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF
DOM, RNG, INV, SAME = RDFS_DOMAIN, RDFS_RANGE, OWL_INVERSEOF, OWL_SAMEAS


@dataclass(frozen=True)
class RuleTrace:
    rule_id: str
    premises: tuple[Triple, ...]
    conclusion: Triple

    def verify(self) -> bool:
        """Re-apply the named rule to the premises alone."""
        return self.conclusion in RULES[self.rule_id](set(self.premises))


def _triple(s: Term, p: Term, o: Term) -> Triple | None:
    if isinstance(s, Literal) or not isinstance(p, IRI):
        return None
    return Triple(s, p, o)


class _Index:
    def __init__(self) -> None:
        self.all: set[Triple] = set()
        self.by_p: dict[Term, set[tuple[Term, Term]]] = defaultdict(set)
        self.sp: dict[tuple[Term, Term], set[Term]] = defaultdict(set)
        self.po: dict[tuple[Term, Term], set[Term]] = defaultdict(set)
        self.by_s: dict[Term, set[tuple[Term, Term]]] = defaultdict(set)
        self.by_o: dict[Term, set[tuple[Term, Term]]] = defaultdict(set)

    def add(self, t: Triple) -> bool:
        if t in self.all:
            return False
        s, p, o = t
        self.all.add(t)
        self.by_p[p].add((s, o))
        self.sp[(s, p)].add(o)
        self.po[(p, o)].add(s)
        self.by_s[s].add((p, o))
        self.by_o[o].add((s, p))
        return True

    def has(self, s: Term, p: Term, o: Term) -> bool:
        return o in self.sp.get((s, p), ())

    def objects(self, s: Term, p: Term) -> set[Term]:
        return self.sp.get((s, p), set())

    def subjects(self, p: Term, o: Term) -> set[Term]:
        return self.po.get((p, o), set())

    def pairs(self, p: Term) -> set[tuple[Term, Term]]:
        return self.by_p.get(p, set())


def _fire(t: Triple, ix: _Index, emit: Callable[[str, Triple | None, tuple], None]) -> None:
    """All conclusions obtainable with ``t`` as one of the premises."""
    s, p, o = t

    # schema-position premises
    if p == SC:
        for c in list(ix.objects(o, SC)):
            emit("R1", _triple(s, SC, c), (t, Triple(o, SC, c)))
        for a in list(ix.subjects(SC, s)):
            emit("R1", _triple(a, SC, o), (Triple(a, SC, s), t))
        for x in list(ix.subjects(TYPE, s)):
            emit("R2", _triple(x, TYPE, o), (Triple(x, TYPE, s), t))
    elif p == SP:
        for r in list(ix.objects(o, SP)):
            emit("R3", _triple(s, SP, r), (t, Triple(o, SP, r)))
        for a in list(ix.subjects(SP, s)):
            emit("R3", _triple(a, SP, o), (Triple(a, SP, s), t))
        for x, y in list(ix.pairs(s)):
            emit("R4", _triple(x, o, y), (Triple(x, s, y), t))
    elif p == DOM:
        for x, y in list(ix.pairs(s)):
            emit("R5", _triple(x, TYPE, o), (Triple(x, s, y), t))
    elif p == RNG:
        for x, y in list(ix.pairs(s)):
            emit("R6", _triple(y, TYPE, o), (Triple(x, s, y), t))
    elif p == INV:
        for x, y in list(ix.pairs(s)):
            emit("R7", _triple(y, o, x), (t, Triple(x, s, y)))
        for x, y in list(ix.pairs(o)):
            emit("R7", _triple(y, s, x), (t, Triple(x, o, y)))
    elif p == TYPE and o in (OWL_SYMMETRIC, OWL_TRANSITIVE, OWL_FUNCTIONAL, OWL_INVERSEFUNCTIONAL):
        for x, y in list(ix.pairs(s)):
            _fire_characteristic(o, s, Triple(x, s, y), t, ix, emit)

    if p == TYPE:
        for b in list(ix.objects(o, SC)):
            emit("R2", _triple(s, TYPE, b), (t, Triple(o, SC, b)))

    if p == SAME:
        for z in list(ix.objects(o, SAME)):
            emit("R12", _triple(s, SAME, z), (t, Triple(o, SAME, z)))
        for a in list(ix.subjects(SAME, s)):
            emit("R12", _triple(a, SAME, o), (Triple(a, SAME, s), t))
        emit("R12", _triple(o, SAME, s), (t,))
        for p2, o2 in list(ix.by_s.get(s, ())):
            if p2 != SAME:
                emit("R12", _triple(o, p2, o2), (t, Triple(s, p2, o2)))
        for s2, p2 in list(ix.by_o.get(s, ())):
            if p2 != SAME:
                emit("R12", _triple(s2, p2, o), (t, Triple(s2, p2, s)))
    else:
        for y in list(ix.objects(s, SAME)):
            emit("R12", _triple(y, p, o), (Triple(s, SAME, y), t))
        for y in list(ix.objects(o, SAME)):
            emit("R12", _triple(s, p, y), (Triple(o, SAME, y), t))

    # t as the instance-level premise
    for q in list(ix.objects(p, SP)):
        emit("R4", _triple(s, q, o), (t, Triple(p, SP, q)))
    for c in list(ix.objects(p, DOM)):
        emit("R5", _triple(s, TYPE, c), (t, Triple(p, DOM, c)))
    for c in list(ix.objects(p, RNG)):
        emit("R6", _triple(o, TYPE, c), (t, Triple(p, RNG, c)))
    for q in list(ix.objects(p, INV)):
        emit("R7", _triple(o, q, s), (Triple(p, INV, q), t))
    for q in list(ix.subjects(INV, p)):
        emit("R7", _triple(o, q, s), (Triple(q, INV, p), t))
    for kind in (OWL_SYMMETRIC, OWL_TRANSITIVE, OWL_FUNCTIONAL, OWL_INVERSEFUNCTIONAL):
        if ix.has(p, TYPE, kind):
            _fire_characteristic(kind, p, t, Triple(p, TYPE, kind), ix, emit)


def _fire_characteristic(kind, p, t: Triple, decl: Triple, ix: _Index, emit) -> None:
    s, _, o = t
    if kind == OWL_SYMMETRIC:
        emit("R8", _triple(o, p, s), (decl, t))
    elif kind == OWL_TRANSITIVE:
        for z in list(ix.objects(o, p)):
            emit("R9", _triple(s, p, z), (decl, t, Triple(o, p, z)))
        for a in list(ix.subjects(p, s)):
            emit("R9", _triple(a, p, o), (decl, Triple(a, p, s), t))
    elif kind == OWL_FUNCTIONAL:
        if isinstance(o, Literal):
            return
        for y2 in list(ix.objects(s, p)):
            if y2 != o and not isinstance(y2, Literal):
                emit("R10", _triple(o, SAME, y2), (decl, t, Triple(s, p, y2)))
                emit("R10", _triple(y2, SAME, o), (decl, Triple(s, p, y2), t))
    elif kind == OWL_INVERSEFUNCTIONAL:
        for x2 in list(ix.subjects(p, o)):
            if x2 != s:
                emit("R11", _triple(s, SAME, x2), (decl, t, Triple(x2, p, o)))
                emit("R11", _triple(x2, SAME, s), (decl, Triple(x2, p, o), t))


def materialize(
    repo: Repository,
    graph: str,
    catalog: OntologyCatalog,
    traces: dict[Triple, RuleTrace] | None = None,
) -> int:
    """Run the rule set to fixpoint over ``graph`` plus the catalog axioms.

    Returns the number of statements newly inserted as inferred. When
    ``traces`` is given, it receives one derivation per new statement.
    """
    g = repo.graph(graph)
    ix = _Index()
    for t in g.records:
        ix.add(t)
    for t in catalog.axiom_triples():
        ix.add(t)
    delta = list(ix.all)
    added = 0
    while delta:
        fresh: dict[Triple, RuleTrace] = {}

        def emit(rule: str, conclusion: Triple | None, premises: tuple) -> None:
            if conclusion is None or conclusion in ix.all or conclusion in fresh:
                return
            fresh[conclusion] = RuleTrace(rule, premises, conclusion)

        for t in delta:
            _fire(t, ix, emit)
        delta = []
        for t, trace in fresh.items():
            ix.add(t)
            delta.append(t)
            if g.add(t, INFERRED):
                added += 1
                if traces is not None:
                    traces[t] = trace
    return added


def rematerialize(repo: Repository, graph: str, catalog: OntologyCatalog | None) -> RepositoryStats:
    """Drop inferred statements and rebuild them; ``catalog=None`` leaves reasoning off."""
    repo.clear_inferred(graph)
    if catalog is not None:
        materialize(repo, graph, catalog)
    return repo.stats(graph)


# Single-rule application over an arbitrary premise set, used to re-check traces.


def _rule_closure(rule: str) -> Callable[[set[Triple]], set[Triple]]:
    def apply(premises: set[Triple]) -> set[Triple]:
        ix = _Index()
        for t in premises:
            ix.add(t)
        out: set[Triple] = set()

        def emit(rule_id: str, conclusion: Triple | None, _premises: tuple) -> None:
            if rule_id == rule and conclusion is not None:
                out.add(conclusion)

        for t in premises:
            _fire(t, ix, emit)
        return out

    return apply


RULES = {f"R{i}": _rule_closure(f"R{i}") for i in range(1, 13)}


def explicit_statements(repo: Repository, graph: str) -> Iterable[Triple]:
    g = repo.graph(graph)
    return [t for t, prov in g.records.items() if prov is EXPLICIT]
