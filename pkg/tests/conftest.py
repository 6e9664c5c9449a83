import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from defii.config import EngineConfig, data_path, load_config  # noqa: E402
from defii.engine import Engine  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

GOLDEN = Path(__file__).parent / "golden"
BASE = "http://testontology.org"


def golden(name):
    path = GOLDEN / name
    return json.loads(path.read_text()) if path.suffix == ".json" else path.read_text()


@pytest.fixture
def config() -> EngineConfig:
    return load_config()


@pytest.fixture
def engine(config) -> Engine:
    """Engine with the cyber fixture ingested and mapped."""
    e = Engine(config)
    e.ingest_file(data_path("cyber_system.json"))
    e.map()
    return e


@pytest.fixture
def catalog(config):
    return Engine(config).catalog


ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
