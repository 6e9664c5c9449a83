"""Model-exchange ingestion and stereotype-driven mapping to ontology-aligned data.

A model document is ingested verbatim into the ``source`` graph under a small
tool vocabulary. Mapping then looks up every applied stereotype in the
ontology catalog; hits produce an ``_entity`` individual typed by the class,
a ``_spec`` directive that prescribes it, and a back-link to the source
element. Misses are reported, not silently dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from urllib.parse import quote

from .errors import NotFoundError, ValidationError
from .ontology import OntologyCatalog
from .sparql import select
from .store import EXPLICIT, MAPPED, SOURCE, Repository
from .terms import (
    DEFII,
    IRI,
    RDF_TYPE,
    TOOL,
    Literal,
    Term,
    Triple,
    from_literal,
    local_name,
    to_literal,
)

KINDS = ("Block", "InstanceSpecification", "Enumeration")

HAS_NAME = IRI(TOOL + "hasName")
HAS_KIND = IRI(TOOL + "hasKind")
APPLIED_STEREOTYPE = IRI(TOOL + "appliedStereotype")
HAS_SLOT = IRI(TOOL + "hasSlot")
SLOT_PROPERTY = IRI(TOOL + "slotProperty")
SLOT_VALUE = IRI(TOOL + "slotValue")
HAS_PART = IRI(TOOL + "hasPart")
CLASSIFIED_BY = IRI(TOOL + "classifiedBy")
HAS_VALUE_PROPERTY = IRI(TOOL + "hasValueProperty")
PROPERTY_NAME = IRI(TOOL + "propertyName")
TYPE_NAME = IRI(TOOL + "typeName")
ORDINAL = IRI(TOOL + "ordinal")
IN_MODEL = IRI(TOOL + "inModel")
TOOL_NAME = IRI(TOOL + "toolName")
MISD_SOURCE = IRI(TOOL + "misd")

MAPPED_FROM = IRI(DEFII + "mappedFrom")

STEREOTYPE_QUERY = """
PREFIX tool: <http://defii.org/tool#>
SELECT ?class ?elementName ?name
WHERE {
  ?class tool:appliedStereotype ?name .
  ?class tool:hasName ?elementName .
}
"""


@dataclass
class ModelElement:
    id: str
    kind: str
    name: str
    stereotypes: list[str] = field(default_factory=list)
    value_properties: list[tuple[str, str]] = field(default_factory=list)
    slots: list[tuple[str, object]] = field(default_factory=list)
    classifier: str | None = None
    parts: list[str] = field(default_factory=list)


@dataclass
class ModelDocument:
    tool: str
    model_name: str
    elements: list[ModelElement] = field(default_factory=list)
    misds: list[dict] = field(default_factory=list)


@dataclass
class MappingReport:
    mapped_elements: int = 0
    discarded: list[tuple[str, str]] = field(default_factory=list)
    triples_added: int = 0
    back_links: int = 0
    discarded_slots: list[tuple[str, str]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mappedElements": self.mapped_elements,
            "discarded": [{"element": e, "stereotype": s} for e, s in self.discarded],
            "triplesAdded": self.triples_added,
            "backLinks": self.back_links,
            "discardedSlots": [{"element": e, "property": p} for e, p in self.discarded_slots],
        }


# ------------------------------------------------------------------ document I/O

_TOP_KEYS = {"tool", "model", "elements", "misds"}
_ELEMENT_KEYS = {"id", "kind", "name", "stereotypes", "value_properties", "slots", "classifier", "parts"}


def parse_document(data: dict) -> ModelDocument:
    """Build and validate a document from its decoded JSON form."""
    problems: list[str] = []
    if not isinstance(data, dict):
        raise ValidationError("model document must be a JSON object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        problems.extend(f"unknown key {k!r}" for k in unknown)
    for key in ("tool", "model", "elements"):
        if key not in data:
            problems.append(f"missing key {key!r}")
    if problems:
        raise ValidationError("invalid model document: " + "; ".join(problems), offenders=problems)
    if not isinstance(data["tool"], str) or not isinstance(data["model"], str) or not data["model"]:
        raise ValidationError("'tool' and 'model' must be non-empty strings")
    if not isinstance(data["elements"], list) or not isinstance(data.get("misds", []), list):
        raise ValidationError("'elements' and 'misds' must be arrays")

    elements = []
    for i, raw in enumerate(data["elements"]):
        where = f"elements[{i}]"
        if not isinstance(raw, dict):
            problems.append(f"{where} is not an object")
            continue
        bad = sorted(set(raw) - _ELEMENT_KEYS)
        if bad:
            problems.extend(f"{where}: unknown key {k!r}" for k in bad)
        if not all(isinstance(raw.get(k), str) and raw.get(k) for k in ("id", "kind", "name")):
            problems.append(f"{where}: 'id', 'kind' and 'name' must be non-empty strings")
            continue
        if raw["kind"] not in KINDS:
            problems.append(f"{raw['id']}: unknown kind {raw['kind']!r}")
            continue
        try:
            elements.append(
                ModelElement(
                    id=raw["id"],
                    kind=raw["kind"],
                    name=raw["name"],
                    stereotypes=[str(s) for s in raw.get("stereotypes", [])],
                    value_properties=[(vp["name"], vp["type_name"]) for vp in raw.get("value_properties", [])],
                    slots=[(sl["property"], sl["value"]) for sl in raw.get("slots", [])],
                    classifier=raw.get("classifier"),
                    parts=list(raw.get("parts", [])),
                )
            )
        except (KeyError, TypeError) as exc:
            problems.append(f"{raw['id']}: malformed entry ({exc})")
    if problems:
        raise ValidationError("invalid model document: " + "; ".join(problems), offenders=problems)
    doc = ModelDocument(data["tool"], data["model"], elements, list(data.get("misds", [])))
    validate_document(doc)
    return doc


def load_document(path: str | Path) -> ModelDocument:
    text = Path(path).read_text(encoding="utf-8")
    return parse_document(json.loads(text, parse_float=Decimal))


def validate_document(doc: ModelDocument) -> None:
    offenders: list[str] = []
    by_id: dict[str, ModelElement] = {}
    for el in doc.elements:
        if el.id in by_id:
            offenders.append(f"duplicate id {el.id!r}")
        by_id[el.id] = el
    for el in doc.elements:
        for part in el.parts:
            if part not in by_id:
                offenders.append(f"{el.id}: dangling part reference {part!r}")
        if el.kind == "InstanceSpecification":
            if el.classifier is None or el.classifier not in by_id:
                offenders.append(f"{el.id}: dangling classifier reference {el.classifier!r}")
                continue
            declared = _declared_properties(el.classifier, by_id)
            for prop, value in el.slots:
                if prop not in declared:
                    offenders.append(f"{el.id}: slot {prop!r} is not a declared value property")
                if isinstance(value, bool) or not isinstance(value, (str, int, float, Decimal)):
                    offenders.append(f"{el.id}: slot {prop!r} has unsupported value {value!r}")
        elif el.classifier is not None and el.classifier not in by_id:
            offenders.append(f"{el.id}: dangling classifier reference {el.classifier!r}")
    if offenders:
        raise ValidationError("invalid model document: " + "; ".join(offenders), offenders=offenders)


def _declared_properties(block_id: str, by_id: dict[str, ModelElement]) -> dict[str, str]:
    """Value properties of a block and of every block reachable through its parts."""
    out: dict[str, str] = {}
    seen = set()
    stack = [block_id]
    while stack:
        current = stack.pop()
        if current in seen or current not in by_id:
            continue
        seen.add(current)
        el = by_id[current]
        for name, type_name in el.value_properties:
            out.setdefault(name, type_name)
        stack.extend(reversed(el.parts))
    return out


# ------------------------------------------------------------------ IRIs


def model_iri(base: str, model_name: str) -> IRI:
    return IRI(f"{base.rstrip('/')}/source/{quote(model_name, safe='')}")


def element_iri(base: str, model_name: str, element_id: str) -> IRI:
    return IRI(f"{model_iri(base, model_name).value}/{quote(element_id, safe='')}")


def entity_iri(source: IRI) -> IRI:
    return IRI(source.value + "_entity")


def spec_iri(source: IRI) -> IRI:
    return IRI(source.value + "_spec")


# ------------------------------------------------------------------ ingest


def _remove_subjects(repo: Repository, graph: str, prefix: str) -> int:
    g = repo.graph(graph)
    doomed = [
        t for t in g.records
        if isinstance(t.subject, IRI) and (t.subject.value == prefix or t.subject.value.startswith(prefix + "/"))
    ]
    for t in doomed:
        g.discard(t)
    return len(doomed)


def ingest(doc: ModelDocument, repo: Repository, base: str) -> int:
    """Write the document into the source graph, replacing a previous copy of the same model."""
    validate_document(doc)
    model = model_iri(base, doc.model_name)
    _remove_subjects(repo, SOURCE, model.value)
    if not doc.elements and not doc.misds:
        return 0
    triples: list[Triple] = [
        Triple(model, HAS_NAME, Literal(doc.model_name)),
        Triple(model, TOOL_NAME, Literal(doc.tool)),
    ]
    for misd in doc.misds:
        triples.append(Triple(model, MISD_SOURCE, Literal(json.dumps(misd, sort_keys=True, default=_json_default))))
    for n, el in enumerate(doc.elements):
        e = element_iri(base, doc.model_name, el.id)
        triples += [
            Triple(e, IN_MODEL, model),
            Triple(e, HAS_NAME, Literal(el.name)),
            Triple(e, HAS_KIND, Literal(el.kind)),
            Triple(e, ORDINAL, to_literal(n)),
        ]
        triples += [Triple(e, APPLIED_STEREOTYPE, Literal(s)) for s in el.stereotypes]
        for k, (name, type_name) in enumerate(el.value_properties):
            vp = IRI(f"{e.value}/vp/{quote(name, safe='')}")
            triples += [
                Triple(e, HAS_VALUE_PROPERTY, vp),
                Triple(vp, PROPERTY_NAME, Literal(name)),
                Triple(vp, TYPE_NAME, Literal(type_name)),
                Triple(vp, ORDINAL, to_literal(k)),
            ]
        for k, (prop, value) in enumerate(el.slots):
            slot = IRI(f"{e.value}/slot/{quote(prop, safe='')}")
            triples += [
                Triple(e, HAS_SLOT, slot),
                Triple(slot, SLOT_PROPERTY, Literal(prop)),
                Triple(slot, SLOT_VALUE, to_literal(value)),
                Triple(slot, ORDINAL, to_literal(k)),
            ]
        for k, part in enumerate(el.parts):
            triples.append(Triple(e, HAS_PART, element_iri(base, doc.model_name, part)))
        if el.classifier is not None:
            triples.append(Triple(e, CLASSIFIED_BY, element_iri(base, doc.model_name, el.classifier)))
    return sum(1 for t in triples if repo.insert(SOURCE, t, EXPLICIT))


def _json_default(value):
    if isinstance(value, Decimal):
        return float(value)
    raise TypeError(f"not JSON serializable: {value!r}")


# ------------------------------------------------------------------ mapping


def _one(repo: Repository, graph: str, s: Term, p: IRI) -> Term | None:
    values = repo.values(graph, s, p)
    return values[0] if values else None


def run_mapping(repo: Repository, catalog: OntologyCatalog, base: str) -> MappingReport:
    """Map stereotyped source elements (and instances of them) into the mapped graph."""
    report = MappingReport()
    _remove_subjects(repo, MAPPED, f"{base.rstrip('/')}/source")
    directive = catalog.class_for_name("DirectiveInformationContentEntity")
    prescribes = catalog.property_for_name("prescribes")
    if directive is None or prescribes is None:
        raise ValidationError(
            "ontology must define DirectiveInformationContentEntity and prescribes for mapping",
            code="incomplete-ontology",
        )

    def put(s, p, o) -> None:
        if repo.insert(MAPPED, Triple(s, p, o), EXPLICIT):
            report.triples_added += 1

    def back_link(source: IRI) -> None:
        if repo.insert(MAPPED, Triple(entity_iri(source), MAPPED_FROM, source), EXPLICIT):
            report.triples_added += 1
            report.back_links += 1

    # stereotype discovery over raw tool data
    rows = select(repo, SOURCE, STEREOTYPE_QUERY, include_inferred=False)
    classes_of: dict[IRI, list[IRI]] = {}
    for row in rows.dicts():
        source, element_name, stereotype = row["class"], row["elementName"].lexical, row["name"].lexical
        cls = catalog.class_for_name(stereotype)
        if cls is None:
            report.discarded.append((element_name, stereotype))
            continue
        report.mapped_elements += 1
        classes_of.setdefault(source, []).append(cls)
        entity, spec = entity_iri(source), spec_iri(source)
        put(entity, RDF_TYPE, cls)
        put(spec, RDF_TYPE, directive)
        put(spec, prescribes, entity)
        back_link(source)

    # instances of mapped classifiers carry their slot values across
    src = repo.graph(SOURCE)
    instances = sorted(
        (t.subject for t in src.find(None, HAS_KIND, Literal("InstanceSpecification"))),
        key=lambda i: i.value,
    )
    designated_by = catalog.property_for_name("designated_by")
    has_value = catalog.property_for_name("has_value")
    for inst in instances:
        classifier = _one(repo, SOURCE, inst, CLASSIFIED_BY)
        inherited = classes_of.get(classifier, [])
        if inst not in classes_of and not inherited:
            continue
        entity = entity_iri(inst)
        for cls in inherited:
            put(entity, RDF_TYPE, cls)
        back_link(inst)
        name = _one(repo, SOURCE, inst, HAS_NAME).lexical
        declared = _source_value_properties(repo, classifier)
        for slot in repo.values(SOURCE, inst, HAS_SLOT):
            prop = _one(repo, SOURCE, slot, SLOT_PROPERTY).lexical
            value = _one(repo, SOURCE, slot, SLOT_VALUE)
            designator_class = catalog.class_for_name(declared.get(prop, ""))
            if designator_class is not None and designated_by is not None and has_value is not None:
                desig = IRI(f"{inst.value}_{quote(prop, safe='')}_designator")
                put(entity, designated_by, desig)
                put(desig, RDF_TYPE, designator_class)
                put(desig, has_value, value)
                continue
            target = catalog.property_for_name(prop)
            if target is None:
                report.discarded_slots.append((name, prop))
                continue
            put(entity, target, value)

    # block composition
    part_of = catalog.property_for_name("part_of")
    if part_of is not None:
        for whole in sorted(classes_of, key=lambda i: i.value):
            for part in repo.values(SOURCE, whole, HAS_PART):
                if part in classes_of:
                    put(entity_iri(part), part_of, entity_iri(whole))
    return report


def _source_value_properties(repo: Repository, block: Term | None) -> dict[str, str]:
    out: dict[str, str] = {}
    seen = set()
    stack = [block] if block is not None else []
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        for vp in repo.values(SOURCE, current, HAS_VALUE_PROPERTY):
            out.setdefault(
                _one(repo, SOURCE, vp, PROPERTY_NAME).lexical, _one(repo, SOURCE, vp, TYPE_NAME).lexical
            )
        stack.extend(repo.values(SOURCE, current, HAS_PART))
    return out


def source_of(repo: Repository, individual: IRI) -> IRI | None:
    value = _one(repo, MAPPED, individual, MAPPED_FROM)
    return value if isinstance(value, IRI) else None


def find_instance(repo: Repository, name: str) -> IRI:
    """Mapped individual for the source element with this name (instances preferred)."""
    candidates = [t.subject for t in repo.graph(SOURCE).find(None, HAS_NAME, Literal(name))]
    instances = [
        c for c in candidates
        if Triple(c, HAS_KIND, Literal("InstanceSpecification")) in repo.graph(SOURCE)
    ]
    pool = instances or [c for c in candidates if Triple(c, HAS_KIND, Literal("Block")) in repo.graph(SOURCE)]
    mapped = [c for c in pool if Triple(entity_iri(c), MAPPED_FROM, c) in repo.graph(MAPPED)]
    if not mapped:
        raise NotFoundError(f"no mapped element named {name!r}", code="unresolvable-binding")
    if len(mapped) > 1:
        raise ValidationError(f"element name {name!r} is ambiguous", code="unresolvable-binding")
    return entity_iri(mapped[0])


def push_back(repo: Repository, individual: IRI, prop: IRI, new_value: Term) -> int:
    """Rewrite the source slot behind a mapped individual; returns statements changed."""
    source = source_of(repo, individual)
    if source is None:
        raise NotFoundError(f"unmapped individual {individual.value}", code="unmapped-individual")
    name = local_name(prop.value)
    for slot in repo.values(SOURCE, source, HAS_SLOT):
        if _one(repo, SOURCE, slot, SLOT_PROPERTY) == Literal(name):
            old = repo.values(SOURCE, slot, SLOT_VALUE)
            if old == [new_value]:
                return 0
            for value in old:
                repo.remove(SOURCE, Triple(slot, SLOT_VALUE, value))
            repo.insert(SOURCE, Triple(slot, SLOT_VALUE, new_value), EXPLICIT)
            return 1
    raise ValidationError(
        f"property {prop.value} has no source slot on {source.value}", code="no-source-slot"
    )


# ------------------------------------------------------------------ export


def _ordered(repo: Repository, subject: IRI, predicate: IRI) -> list[IRI]:
    items = repo.values(SOURCE, subject, predicate)

    def ordinal(x):
        v = _one(repo, SOURCE, x, ORDINAL)
        return (0, from_literal(v)) if v is not None else (1, x.value)

    return sorted(items, key=ordinal)


def export_document(repo: Repository, base: str, model_name: str) -> dict:
    """Regenerate a model document (JSON-ready) from the current source graph."""
    model = model_iri(base, model_name)
    tool = _one(repo, SOURCE, model, TOOL_NAME)
    if tool is None:
        raise NotFoundError(f"model {model_name!r} not ingested", code="unknown-model")
    elements = []
    members = _ordered_members(repo, model)
    ids = {m: m.value.rsplit("/", 1)[1] for m in members}
    from urllib.parse import unquote

    for m in members:
        kind = _one(repo, SOURCE, m, HAS_KIND).lexical
        el: dict = {
            "id": unquote(ids[m]),
            "kind": kind,
            "name": _one(repo, SOURCE, m, HAS_NAME).lexical,
            "stereotypes": sorted(x.lexical for x in repo.values(SOURCE, m, APPLIED_STEREOTYPE)),
        }
        vps = _ordered(repo, m, HAS_VALUE_PROPERTY)
        if vps:
            el["value_properties"] = [
                {
                    "name": _one(repo, SOURCE, vp, PROPERTY_NAME).lexical,
                    "type_name": _one(repo, SOURCE, vp, TYPE_NAME).lexical,
                }
                for vp in vps
            ]
        slots = _ordered(repo, m, HAS_SLOT)
        if slots:
            el["slots"] = [
                {
                    "property": _one(repo, SOURCE, sl, SLOT_PROPERTY).lexical,
                    "value": from_literal(_one(repo, SOURCE, sl, SLOT_VALUE)),
                }
                for sl in slots
            ]
        parts = _ordered_by_member(repo, repo.values(SOURCE, m, HAS_PART))
        if parts:
            el["parts"] = [unquote(p.value.rsplit("/", 1)[1]) for p in parts]
        classifier = _one(repo, SOURCE, m, CLASSIFIED_BY)
        if classifier is not None:
            el["classifier"] = unquote(classifier.value.rsplit("/", 1)[1])
        elements.append(el)
    misds = [json.loads(x.lexical, parse_float=Decimal) for x in repo.values(SOURCE, model, MISD_SOURCE)]
    return {"tool": tool.lexical, "model": model_name, "elements": elements, "misds": misds}


def _ordered_members(repo: Repository, model: IRI) -> list[IRI]:
    members = [t.subject for t in repo.graph(SOURCE).find(None, IN_MODEL, model)]
    return _ordered_by_member(repo, members)


def _ordered_by_member(repo: Repository, members: list) -> list:
    return sorted(members, key=lambda m: from_literal(_one(repo, SOURCE, m, ORDINAL)))


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, default=_json_default) + "\n"
