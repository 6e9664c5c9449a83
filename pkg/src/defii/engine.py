"""The engine ties the repository, ontology catalog and model registry together.

Every public method takes the repository lock. Writers rematerialize before
releasing it, so readers never observe unreasoned data.
"""

from __future__ import annotations

import json
import logging
from decimal import Decimal
from pathlib import Path

from . import mapping, specified
from .config import EngineConfig
from .errors import ValidationError
from .ontology import OntologyCatalog, load_catalog
from .rdfio import parse_turtle
from .reasoner import rematerialize
from .sparql import SolutionTable, evaluate, parse_query
from .store import EXPLICIT, MAPPED, SOURCE, Repository, RepositoryStats
from .terms import Triple

log = logging.getLogger(__name__)


def load_ontology(paths) -> tuple[OntologyCatalog, list[Triple]]:
    documents = []
    for path in paths:
        triples, _ = parse_turtle(Path(path).read_text(encoding="utf-8"))
        documents.append(triples)
    return load_catalog(documents), [t for doc in documents for t in doc]


class Engine:
    def __init__(self, config: EngineConfig, repo: Repository | None = None) -> None:
        self.config = config
        self.base = config.base_iri
        self.catalog, ontology_triples = load_ontology(config.ontology)
        self.repo = repo if repo is not None else Repository()
        self.registry = specified.ModelRegistry(self.base)
        with self.repo.lock.write():
            for t in ontology_triples:
                self.repo.insert(MAPPED, t, EXPLICIT)
            self.registry.restore(self.repo)
            self._reason()

    @property
    def reasoning_catalog(self) -> OntologyCatalog | None:
        return self.catalog if self.config.reasoning else None

    def _reason(self) -> RepositoryStats:
        return rematerialize(self.repo, MAPPED, self.reasoning_catalog)

    # persistence

    @classmethod
    def open(cls, config: EngineConfig, state: str | Path | None) -> "Engine":
        if state is not None and (Path(state) / f"{MAPPED}.nt").exists():
            return cls(config, Repository.load(state))
        return cls(config)

    def save(self, state: str | Path) -> None:
        with self.repo.lock.read():
            self.repo.save(state)

    # mapping interface

    def ingest(self, doc: mapping.ModelDocument | dict) -> int:
        if isinstance(doc, dict):
            doc = mapping.parse_document(doc)
        specs = [specified.parse_misd(m) for m in doc.misds]
        with self.repo.lock.write():
            for spec in specs:
                self.registry.register(spec, self.repo)
            count = mapping.ingest(doc, self.repo, self.base)
            self._reason()
        log.info("ingested %s: %d source statements", doc.model_name, count)
        return count

    def ingest_file(self, path: str | Path) -> int:
        return self.ingest(mapping.load_document(path))

    def map(self) -> mapping.MappingReport:
        with self.repo.lock.write():
            report = mapping.run_mapping(self.repo, self.catalog, self.base)
            self._reason()
        return report

    def export_document(self, model_name: str) -> dict:
        with self.repo.lock.read():
            return mapping.export_document(self.repo, self.base, model_name)

    def register_misd(self, data: dict) -> str:
        with self.repo.lock.write():
            name = self.registry.register(data, self.repo)
            self._reason()
        return name

    # direct interface

    def query(self, text: str) -> SolutionTable:
        ast = parse_query(text)
        with self.repo.lock.read():
            return evaluate(self.repo, MAPPED, ast)

    def stats(self) -> RepositoryStats:
        with self.repo.lock.read():
            return self.repo.stats(MAPPED)

    # specified model interface

    def instantiate(self, model_name: str) -> str:
        with self.repo.lock.write():
            ind = specified.instantiate(self.registry, model_name, self.repo)
            self._reason()
        return ind.value

    def _view(self, model_name: str, ind_id: str) -> specified.ModelView:
        ind = specified.lookup_individual(self.registry, model_name, ind_id, self.repo)
        return specified.resolve(self.registry, model_name, ind, self.repo, self.catalog)

    def view(self, model_name: str, ind_id: str) -> specified.ModelView:
        with self.repo.lock.read():
            return self._view(model_name, ind_id)

    def render(self, model_name: str, ind_id: str, fmt: str = "json") -> str:
        if fmt not in ("json", "csv"):
            raise ValidationError(f"unknown format {fmt!r}", code="bad-format")
        spec = self.registry.get(model_name)
        view = self.view(model_name, ind_id)
        if fmt == "csv":
            return specified.concretize_csv(view, spec)
        return specified.concretize_json(view, spec)

    def update(self, model_name: str, ind_id: str, updates: dict) -> specified.ModelView:
        with self.repo.lock.write():
            ind = specified.lookup_individual(self.registry, model_name, ind_id, self.repo)
            specified.write_back(self.registry, model_name, ind, updates, self.repo, self.catalog)
            self._reason()
            return specified.resolve(self.registry, model_name, ind, self.repo, self.catalog)


def decode_json(body: bytes | str):
    """JSON with decimals kept exact."""
    if isinstance(body, bytes):
        body = body.decode("utf-8")
    try:
        return json.loads(body, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}", code="bad-json") from exc


__all__ = ["Engine", "decode_json", "load_ontology", "SOURCE", "MAPPED"]
