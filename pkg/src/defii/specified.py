"""Model interface specifications (MISDs): registration, instantiation and views.

A MISD names a model of interest and its ports. In-ports pull values out of
the mapped graph through bindings; out-ports are written by an external tool
and, when bound, pushed back to the source model.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from dataclasses import dataclass, field
from decimal import Decimal
from urllib.parse import quote

from . import mapping
from .errors import NotFoundError, ValidationError
from .ontology import OntologyCatalog
from .store import EXPLICIT, MAPPED, Repository
from .terms import DEFII, IRI, RDF_TYPE, Literal, Term, Triple, from_literal, to_literal

MODEL_SPECIFICATION = IRI(DEFII + "ModelSpecification")
MODEL_INSTANCE = IRI(DEFII + "ModelInstance")
MODEL_NAME = IRI(DEFII + "modelName")
MISD_SOURCE = IRI(DEFII + "misdSource")
HAS_PORT = IRI(DEFII + "hasPort")
PORT_NAME = IRI(DEFII + "portName")
INSTANCE_OF = IRI(DEFII + "instanceOf")

DIRECTIONS = ("in", "out")
DATATYPES = ("string", "decimal", "integer")
MULTIPLICITIES = ("one", "many")


@dataclass(frozen=True)
class Binding:
    instance: str
    property: str


@dataclass(frozen=True)
class Port:
    name: str
    direction: str
    datatype: str
    multiplicity: str
    bindings: tuple[Binding, ...] = ()


@dataclass(frozen=True)
class MISDSpec:
    model_name: str
    ports: tuple[Port, ...]

    def port(self, name: str) -> Port | None:
        return next((p for p in self.ports if p.name == name), None)

    def to_json(self) -> dict:
        return {
            "modelName": self.model_name,
            "ports": [
                {
                    "name": p.name,
                    "direction": p.direction,
                    "datatype": p.datatype,
                    "multiplicity": p.multiplicity,
                    "bindings": [{"instance": b.instance, "property": b.property} for b in p.bindings],
                }
                for p in self.ports
            ],
        }


@dataclass
class ModelView:
    individual: IRI
    model_name: str
    values: dict = field(default_factory=dict)


def parse_misd(data: dict) -> MISDSpec:
    if not isinstance(data, dict) or set(data) != {"modelName", "ports"}:
        raise ValidationError("MISD must have exactly the keys 'modelName' and 'ports'", code="invalid-misd")
    name = data["modelName"]
    if not isinstance(name, str) or not name:
        raise ValidationError("MISD modelName must be a non-empty string", code="invalid-misd")
    ports = []
    seen = set()
    for raw in data["ports"]:
        try:
            pname = raw["name"]
            port = Port(
                name=pname,
                direction=raw["direction"],
                datatype=raw["datatype"],
                multiplicity=raw["multiplicity"],
                bindings=tuple(Binding(b["instance"], b["property"]) for b in raw.get("bindings", [])),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed port in {name}: {exc}", code="invalid-misd") from exc
        problem = _port_problem(port)
        if pname in seen:
            problem = "duplicate port name"
        if problem:
            raise ValidationError(f"port {pname!r} of {name}: {problem}", code="invalid-misd", offenders=[pname])
        seen.add(pname)
        ports.append(port)
    return MISDSpec(name, tuple(ports))


def _port_problem(port: Port) -> str | None:
    if port.direction not in DIRECTIONS:
        return f"unknown direction {port.direction!r}"
    if port.datatype not in DATATYPES:
        return f"unknown datatype {port.datatype!r}"
    if port.multiplicity not in MULTIPLICITIES:
        return f"unknown multiplicity {port.multiplicity!r}"
    n = len(port.bindings)
    if port.direction == "in":
        if n == 0:
            return "an in-port needs at least one binding"
        if port.multiplicity == "one" and n != 1:
            return f"multiplicity one needs exactly 1 binding, got {n}"
    elif n > 1:
        return f"an out-port takes at most one binding, got {n}"
    return None


# ------------------------------------------------------------------ IRIs


def spec_iri(base: str, model_name: str) -> IRI:
    return IRI(f"{base.rstrip('/')}/models/{quote(model_name, safe='')}")


def port_iri(base: str, model_name: str, port: str) -> IRI:
    return IRI(f"{spec_iri(base, model_name).value}/port/{quote(port, safe='')}")


def individual_iri(base: str, model_name: str, individual_id: str) -> IRI:
    return IRI(f"{spec_iri(base, model_name).value}/{quote(individual_id, safe='')}")


def individual_id(individual: IRI) -> str:
    return individual.value.rsplit("/", 1)[1]


# ------------------------------------------------------------------ registry


class ModelRegistry:
    """Registered MISDs by model name; mirrored into the mapped graph."""

    def __init__(self, base: str) -> None:
        self.base = base
        self._specs: dict[str, MISDSpec] = {}
        self._lock = threading.Lock()

    def __contains__(self, name: str) -> bool:
        with self._lock:
            return name in self._specs

    def names(self) -> list[str]:
        with self._lock:
            return sorted(self._specs)

    def get(self, name: str) -> MISDSpec:
        with self._lock:
            spec = self._specs.get(name)
        if spec is None:
            raise NotFoundError(f"unknown model {name!r}", code="unknown-model")
        return spec

    def register(self, spec: MISDSpec | dict, repo: Repository) -> str:
        """Register a spec; re-registering an identical spec is a no-op."""
        if isinstance(spec, dict):
            spec = parse_misd(spec)
        with self._lock:
            existing = self._specs.get(spec.model_name)
            if existing is not None:
                if existing == spec:
                    return spec.model_name
                raise ValidationError(f"model {spec.model_name!r} already registered", code="duplicate-model")
            self._specs[spec.model_name] = spec
        node = spec_iri(self.base, spec.model_name)
        repo.insert(MAPPED, Triple(node, RDF_TYPE, MODEL_SPECIFICATION))
        repo.insert(MAPPED, Triple(node, MODEL_NAME, Literal(spec.model_name)))
        repo.insert(MAPPED, Triple(node, MISD_SOURCE, Literal(json.dumps(spec.to_json(), sort_keys=True))))
        for p in spec.ports:
            pnode = port_iri(self.base, spec.model_name, p.name)
            repo.insert(MAPPED, Triple(node, HAS_PORT, pnode))
            repo.insert(MAPPED, Triple(pnode, PORT_NAME, Literal(p.name)))
        return spec.model_name

    def restore(self, repo: Repository) -> None:
        """Rebuild the registry from model specifications stored in the mapped graph."""
        for t in repo.match(MAPPED, None, MISD_SOURCE, None, include_inferred=False):
            spec = parse_misd(json.loads(t.triple.object.lexical))
            with self._lock:
                self._specs[spec.model_name] = spec


def instantiate(registry: ModelRegistry, model_name: str, repo: Repository) -> IRI:
    registry.get(model_name)
    ind = individual_iri(registry.base, model_name, f"{uuid.uuid4().hex}_entity")
    repo.insert(MAPPED, Triple(ind, RDF_TYPE, MODEL_INSTANCE))
    repo.insert(MAPPED, Triple(ind, INSTANCE_OF, spec_iri(registry.base, model_name)))
    return ind


def lookup_individual(registry: ModelRegistry, model_name: str, ind_id: str, repo: Repository) -> IRI:
    registry.get(model_name)
    try:
        ind = individual_iri(registry.base, model_name, ind_id)
    except ValueError:
        ind = None
    if ind is None or Triple(ind, INSTANCE_OF, spec_iri(registry.base, model_name)) not in repo.graph(MAPPED):
        raise NotFoundError(f"unknown individual {ind_id!r} of {model_name}", code="unknown-individual")
    return ind


# ------------------------------------------------------------------ resolve


def _python_value(term: Term, datatype: str):
    value = from_literal(term)
    if datatype == "string":
        return term.lexical if isinstance(term, Literal) else value
    return value


def _bound_property(catalog: OntologyCatalog, port: str, b: Binding) -> IRI:
    prop = catalog.property_for_name(b.property)
    if prop is None:
        raise ValidationError(
            f"unresolvable binding for port {port!r}: instance {b.instance!r}, property {b.property!r}",
            code="unresolvable-binding",
        )
    return prop


def _binding_target(repo: Repository, catalog: OntologyCatalog, port: str, b: Binding) -> tuple[IRI, IRI]:
    try:
        entity = mapping.find_instance(repo, b.instance)
    except (NotFoundError, ValidationError) as exc:
        raise ValidationError(
            f"unresolvable binding for port {port!r}: instance {b.instance!r}, property {b.property!r} ({exc})",
            code="unresolvable-binding",
        ) from exc
    return entity, _bound_property(catalog, port, b)


def resolve(
    registry: ModelRegistry, model_name: str, individual: IRI, repo: Repository, catalog: OntologyCatalog
) -> ModelView:
    spec = registry.get(model_name)
    view = ModelView(individual, model_name)
    for port in spec.ports:
        if port.direction == "out":
            current = repo.values(MAPPED, individual, port_iri(registry.base, model_name, port.name))
            if current:
                view.values[port.name] = _python_value(current[0], port.datatype)
            continue
        collected = []
        for b in port.bindings:
            entity, prop = _binding_target(repo, catalog, port.name, b)
            found = [v for v in repo.values(MAPPED, entity, prop) if isinstance(v, Literal)]
            if not found:
                raise ValidationError(
                    f"no value for port {port.name!r}: instance {b.instance!r}, property {b.property!r}",
                    code="missing-value",
                )
            collected.append(_python_value(found[0], port.datatype))
        view.values[port.name] = collected if port.multiplicity == "many" else collected[0]
    return view


# ------------------------------------------------------------------ write back


def _check_value(port: Port, value):
    if port.multiplicity == "many":
        raise ValidationError(f"port {port.name!r} is many-valued and cannot be written", code="type-mismatch")
    ok = {
        "string": isinstance(value, str),
        "integer": isinstance(value, int) and not isinstance(value, bool),
        "decimal": isinstance(value, (int, float, Decimal)) and not isinstance(value, bool),
    }[port.datatype]
    if not ok:
        raise ValidationError(
            f"type mismatch on port {port.name!r}: expected {port.datatype}, got {value!r}", code="type-mismatch"
        )
    if port.datatype == "decimal" and not isinstance(value, Decimal):
        value = Decimal(repr(value)) if isinstance(value, float) else Decimal(value)
    return to_literal(value)


def write_back(
    registry: ModelRegistry,
    model_name: str,
    individual: IRI,
    updates: dict,
    repo: Repository,
    catalog: OntologyCatalog,
) -> int:
    """Store out-port values; bound ports are also pushed to mapped and source data.

    All updates are validated before anything is written. Returns the number
    of source statements changed by push-back.
    """
    spec = registry.get(model_name)
    if not isinstance(updates, dict):
        raise ValidationError("update body must be a JSON object", code="type-mismatch")
    staged = []
    for name, value in updates.items():
        port = spec.port(name)
        if port is None:
            raise ValidationError(f"unknown port {name!r} on {model_name}", code="unknown-port")
        if port.direction != "out":
            raise ValidationError(f"read-only port {name!r}", code="read-only-port")
        literal = _check_value(port, value)
        target = _binding_target(repo, catalog, name, port.bindings[0]) if port.bindings else None
        staged.append((port, literal, target))

    changed = 0
    for port, literal, target in staged:
        pred = port_iri(registry.base, model_name, port.name)
        _replace(repo, individual, pred, literal)
        if target is not None:
            entity, prop = target
            _replace(repo, entity, prop, literal)
            changed += mapping.push_back(repo, entity, prop, literal)
    return changed


def _replace(repo: Repository, s: IRI, p: IRI, value: Term) -> None:
    for rec in repo.match(MAPPED, s, p, None, include_inferred=False):
        repo.remove(MAPPED, rec.triple)
    repo.insert(MAPPED, Triple(s, p, value), EXPLICIT)


# ------------------------------------------------------------------ concretization


def _jsonable(value):
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    if isinstance(value, Decimal):
        return float(value)
    return value


def concretize_json(view: ModelView, spec: MISDSpec) -> str:
    body = {p.name: _jsonable(view.values[p.name]) for p in spec.ports if p.name in view.values}
    return json.dumps({"individual": view.individual.value, view.model_name: body}, indent=2) + "\n"


def _cell_text(value) -> str:
    value = _jsonable(value)
    return str(value)


def _quote(text: str, force: bool = False) -> str:
    if force or any(ch in text for ch in ',"\r\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def concretize_csv(view: ModelView, spec: MISDSpec) -> str:
    header = ["individual"] + [p.name for p in spec.ports]
    row = [_quote(view.individual.value)]
    for p in spec.ports:
        if p.name not in view.values:
            row.append("")
        elif isinstance(view.values[p.name], list):
            row.append(_quote("|".join(_cell_text(v) for v in view.values[p.name]), force=True))
        else:
            row.append(_quote(_cell_text(view.values[p.name])))
    out = io.StringIO()
    out.write(",".join(_quote(h) for h in header) + "\r\n")
    out.write(",".join(row) + "\r\n")
    return out.getvalue()


def view_values_from_json(text: str) -> list[str]:
    """Flattened value strings of a JSON concretization (for agreement checks)."""
    doc = json.loads(text)
    model = next(k for k in doc if k != "individual")
    values = []
    for v in doc[model].values():
        if isinstance(v, list):
            values.extend(_cell_text(x) for x in v)
        elif v != "":
            values.append(_cell_text(v))
    return values


def view_values_from_csv(text: str, spec: MISDSpec) -> list[str]:
    import csv

    rows = list(csv.reader(io.StringIO(text)))
    header, data = rows[0], rows[1]
    many = {p.name for p in spec.ports if p.multiplicity == "many"}
    values = []
    for name, cell in zip(header[1:], data[1:]):
        if cell == "":
            continue
        values.extend(cell.split("|") if name in many else [cell])
    return values
