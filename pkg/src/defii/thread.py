"""The five-step digital thread, run against a live local service.

1. ingest, map and reason over the fixture model
2. find the seeded browser vulnerability through the query endpoint
3. create a model individual and let the analysis client read it
4. score the system and write score and vector back (pushed to source data)
5. a second consumer reads the same endpoint as JSON and CSV; values must agree
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable

from . import analysis, mapping
from .config import EngineConfig
from .cvss import CvssResult
from .engine import Engine
from .service import RunningService
from .specified import view_values_from_csv, view_values_from_json
from .store import SOURCE
from .terms import Literal

MODEL = "CVSS_Model"


class StepFailed(Exception):
    def __init__(self, step: int, message: str) -> None:
        super().__init__(f"step {step} failed: {message}")
        self.step = step
        self.message = message


@dataclass
class ThreadReport:
    lines: list[str] = field(default_factory=list)
    failed_step: int | None = None
    result: CvssResult | None = None
    individual: str | None = None
    endpoint: str | None = None
    engine: Engine | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.failed_step is None

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def run_thread(
    config: EngineConfig,
    version: int = 100,
    patch: int = 104,
    strategy: str = "worst-case",
    echo: Callable[[str], None] | None = None,
) -> ThreadReport:
    report = ThreadReport()

    def say(step: int, text: str) -> None:
        line = f"[{step}] {text}"
        report.lines.append(line)
        if echo is not None:
            echo(line)

    step = 1
    try:
        engine = report.engine = Engine(config)
        if config.fixture is None:
            raise StepFailed(1, "no fixture configured")
        doc = mapping.load_document(config.fixture)
        count = engine.ingest(doc)
        mapped = engine.map()
        stats = engine.stats()
        say(1, f"mapped {doc.model_name}: {count} source statements, {mapped.mapped_elements} elements mapped, "
               f"{len(mapped.discarded)} discarded, reasoning {'on' if config.reasoning else 'off'}")
        say(1, f"statements: explicit={stats.explicit_count} inferred={stats.inferred_count} "
               f"total={stats.total} ratio={stats.to_json()['expansionRatio']}")

        with RunningService(engine, config.bind, 0) as service:
            url = report.endpoint = service.url
            step = 2
            hits = analysis.find_seeded_vulnerability(url, version, patch)
            if len(hits) != 1:
                raise StepFailed(2, f"expected 1 vulnerable browser for version {version} patch {patch}, found {len(hits)}")
            browser, v, p = hits[0]
            say(2, f"vulnerable browser {browser} (version {v}, patch {p})")

            step = 3
            ind = report.individual = analysis.instantiate_model(url, MODEL)
            view = analysis.get_view(url, MODEL, ind)
            say(3, f"analysis client read {MODEL}/{ind} with {len(view)} ports")

            step = 4
            result = report.result = analysis.run_analysis_client(url, MODEL, ind, strategy)
            analysis_view = analysis.get_view_text(url, MODEL, ind)
            written = json.loads(analysis_view, parse_float=Decimal)[MODEL]
            if written.get("score") != result.base_score or written.get("vs") != result.vector_string:
                raise StepFailed(4, "written values not visible on re-read")
            source_score = _source_score(engine)
            if source_score != result.base_score:
                raise StepFailed(4, f"source score slot holds {source_score}, expected {result.base_score}")
            say(4, f"score {result.base_score} vector {result.vector_string} ({strategy}); source slot updated")

            step = 5
            dashboard = analysis.get_view_text(url, MODEL, ind)
            csv_text = analysis.get_view_text(url, MODEL, ind, "csv")
            if dashboard != analysis_view:
                raise StepFailed(5, "dashboard view differs from the analysis client's view")
            spec = engine.registry.get(MODEL)
            if sorted(view_values_from_json(dashboard)) != sorted(view_values_from_csv(csv_text, spec)):
                raise StepFailed(5, "JSON and CSV views carry different values")
            say(5, f"dashboard JSON and CSV agree with the analysis view ({len(view_values_from_json(dashboard))} values)")
    except StepFailed as exc:
        report.failed_step = exc.step
        report.lines.append(f"[{exc.step}] FAILED: {exc.message}")
    except Exception as exc:  # any other failure is attributed to the running step
        report.failed_step = step
        report.lines.append(f"[{step}] FAILED: {type(exc).__name__}: {exc}")
    if echo is not None and not report.ok:
        echo(report.lines[-1])
    return report


def _source_score(engine: Engine) -> Decimal | None:
    """Current value of the ``score`` slot behind the system-level binding."""
    spec = engine.registry.get(MODEL)
    binding = spec.port("score").bindings[0]
    with engine.repo.lock.read():
        entity = mapping.find_instance(engine.repo, binding.instance)
        source = mapping.source_of(engine.repo, entity)
        for slot in engine.repo.values(SOURCE, source, mapping.HAS_SLOT):
            if engine.repo.values(SOURCE, slot, mapping.SLOT_PROPERTY) == [Literal(binding.property)]:
                value = engine.repo.values(SOURCE, slot, mapping.SLOT_VALUE)[0]
                return Decimal(value.lexical)
    return None
