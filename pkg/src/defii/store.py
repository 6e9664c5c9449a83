"""In-memory named-graph triple store with per-statement provenance."""

from __future__ import annotations

import enum
import threading
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .terms import Term, Triple, sort_key

SOURCE = "source"
MAPPED = "mapped"


class Provenance(str, enum.Enum):
    EXPLICIT = "explicit"
    INFERRED = "inferred"


EXPLICIT = Provenance.EXPLICIT
INFERRED = Provenance.INFERRED


class StatementRecord(NamedTuple):
    triple: Triple
    graph: str
    provenance: Provenance


@dataclass(frozen=True)
class RepositoryStats:
    explicit_count: int
    inferred_count: int

    @property
    def total(self) -> int:
        return self.explicit_count + self.inferred_count

    @property
    def expansion_ratio(self) -> float | None:
        # GraphDB convention: all statements over explicit ones
        if self.explicit_count == 0:
            return None
        return self.total / self.explicit_count

    def to_json(self) -> dict:
        ratio = self.expansion_ratio
        return {
            "explicit": self.explicit_count,
            "inferred": self.inferred_count,
            "total": self.total,
            "expansionRatio": None if ratio is None else round(ratio, 2),
        }


class RWLock:
    """Writer-preferring readers/writer lock."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    @contextmanager
    def read(self) -> Iterator[None]:
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1
        try:
            yield
        finally:
            with self._cond:
                self._readers -= 1
                if self._readers == 0:
                    self._cond.notify_all()

    @contextmanager
    def write(self) -> Iterator[None]:
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True
        try:
            yield
        finally:
            with self._cond:
                self._writer = False
                self._cond.notify_all()


class Graph:
    def __init__(self, name: str) -> None:
        self.name = name
        self.records: dict[Triple, Provenance] = {}
        self.by_subject: dict[Term, set[Triple]] = defaultdict(set)
        self.by_predicate: dict[Term, set[Triple]] = defaultdict(set)
        self.by_object: dict[Term, set[Triple]] = defaultdict(set)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self.records

    def add(self, triple: Triple, provenance: Provenance) -> bool:
        current = self.records.get(triple)
        if current is not None:
            if current is INFERRED and provenance is EXPLICIT:
                self.records[triple] = EXPLICIT
            return False
        self.records[triple] = provenance
        self.by_subject[triple.subject].add(triple)
        self.by_predicate[triple.predicate].add(triple)
        self.by_object[triple.object].add(triple)
        return True

    def discard(self, triple: Triple) -> bool:
        if triple not in self.records:
            return False
        del self.records[triple]
        for index, key in (
            (self.by_subject, triple.subject),
            (self.by_predicate, triple.predicate),
            (self.by_object, triple.object),
        ):
            bucket = index[key]
            bucket.discard(triple)
            if not bucket:
                del index[key]
        return True

    def find(self, s=None, p=None, o=None, *, index: str | None = None) -> Iterable[Triple]:
        """Unordered triples matching the pattern; ``None`` is a wildcard.

        ``index`` forces the lookup through ``"subject"``, ``"predicate"`` or
        ``"object"`` (falling back to a scan if that position is unbound);
        by default the smallest candidate bucket is used.
        """
        if s is not None and p is not None and o is not None:
            t = Triple(s, p, o)
            return (t,) if t in self.records else ()
        buckets = {}
        if s is not None:
            buckets["subject"] = self.by_subject.get(s, ())
        if p is not None:
            buckets["predicate"] = self.by_predicate.get(p, ())
        if o is not None:
            buckets["object"] = self.by_object.get(o, ())
        if index is not None:
            candidates = buckets.get(index, self.records)
        elif buckets:
            candidates = min(buckets.values(), key=len)
        else:
            candidates = self.records
        return [
            t
            for t in candidates
            if (s is None or t.subject == s)
            and (p is None or t.predicate == p)
            and (o is None or t.object == o)
        ]


class Repository:
    """Named graphs plus the lock that guards them.

    Methods here do not take the lock themselves; callers that share a
    repository across threads wrap batches in ``with repo.lock.read()`` or
    ``with repo.lock.write()``.
    """

    def __init__(self) -> None:
        self.graphs: dict[str, Graph] = {SOURCE: Graph(SOURCE), MAPPED: Graph(MAPPED)}
        self.lock = RWLock()

    def graph(self, name: str) -> Graph:
        g = self.graphs.get(name)
        if g is None:
            g = self.graphs[name] = Graph(name)
        return g

    def insert(self, graph: str, triple: Triple | tuple, provenance: Provenance = EXPLICIT) -> bool:
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        return self.graph(graph).add(triple, Provenance(provenance))

    def remove(self, graph: str, triple: Triple) -> bool:
        g = self.graphs.get(graph)
        return g.discard(triple) if g is not None else False

    def provenance(self, graph: str, triple: Triple) -> Provenance | None:
        g = self.graphs.get(graph)
        return None if g is None else g.records.get(triple)

    def match(
        self,
        graph: str | None = None,
        s: Term | None = None,
        p: Term | None = None,
        o: Term | None = None,
        *,
        include_inferred: bool = True,
        index: str | None = None,
    ) -> list[StatementRecord]:
        names = sorted(self.graphs) if graph is None else [graph]
        out = []
        for name in names:
            g = self.graphs.get(name)
            if g is None:
                continue
            rows = []
            for t in g.find(s, p, o, index=index):
                prov = g.records[t]
                if include_inferred or prov is EXPLICIT:
                    rows.append(StatementRecord(t, name, prov))
            rows.sort(key=lambda r: (sort_key(r.triple.subject), sort_key(r.triple.predicate), sort_key(r.triple.object)))
            out.extend(rows)
        return out

    def values(self, graph: str, s: Term, p: Term) -> list[Term]:
        g = self.graphs.get(graph)
        if g is None:
            return []
        return sorted((t.object for t in g.find(s, p, None)), key=sort_key)

    def stats(self, graph: str) -> RepositoryStats:
        g = self.graphs.get(graph)
        if g is None:
            return RepositoryStats(0, 0)
        inferred = sum(1 for prov in g.records.values() if prov is INFERRED)
        return RepositoryStats(len(g.records) - inferred, inferred)

    def clear_inferred(self, graph: str) -> int:
        g = self.graphs.get(graph)
        if g is None:
            return 0
        doomed = [t for t, prov in g.records.items() if prov is INFERRED]
        for t in doomed:
            g.discard(t)
        return len(doomed)

    # snapshot persistence

    def save(self, directory: str | Path) -> None:
        from .rdfio import serialize_ntriples

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, g in self.graphs.items():
            text = serialize_ntriples(g.records)
            ordinals = []
            if text:
                inferred = {t.n3() for t, prov in g.records.items() if prov is INFERRED}
                ordinals = [i for i, line in enumerate(text.splitlines()) if line in inferred]
            (directory / f"{name}.nt").write_text(text, encoding="utf-8")
            (directory / f"{name}.inferred").write_text(
                "".join(f"{i}\n" for i in ordinals), encoding="utf-8"
            )

    @classmethod
    def load(cls, directory: str | Path) -> "Repository":
        from .rdfio import parse_ntriples_line

        directory = Path(directory)
        repo = cls()
        for path in sorted(directory.glob("*.nt")):
            name = path.stem
            sidecar = path.with_suffix(".inferred")
            inferred = set()
            if sidecar.exists():
                inferred = {int(x) for x in sidecar.read_text(encoding="utf-8").split()}
            g = repo.graph(name)
            for i, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
                triple = parse_ntriples_line(line, line_number=i + 1)
                if triple is not None:
                    g.add(triple, INFERRED if i in inferred else EXPLICIT)
        return repo
