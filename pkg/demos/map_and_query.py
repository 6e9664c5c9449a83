"""Map the bundled cyber-system model and look for the seeded browser.

Run with ``python demos/map_and_query.py``.
"""

from defii.analysis import seeded_query
from defii.config import data_path, load_config
from defii.engine import Engine

engine = Engine(load_config())

# The model document arrives as tool data; ingest stores it verbatim.
n = engine.ingest_file(data_path("cyber_system.json"))
print(f"source graph: {n} statements")

# Mapping turns every stereotype the ontology knows into typed individuals.
report = engine.map()
print(f"mapped {report.mapped_elements} stereotype applications, discarded {report.discarded}")

stats = engine.stats()
print(f"mapped graph: {stats.explicit_count} explicit + {stats.inferred_count} inferred "
      f"(ratio {stats.expansion_ratio:.2f})")

# The browser instance is typed with a subclass; reasoning lifts it to the
# class the query asks for.
for version, patch in ((100, 104), (100, 105)):
    rows = engine.query(seeded_query(version, patch)).dicts()
    print(f"version {version} patch {patch}: {len(rows)} match(es)")
    for row in rows:
        print("   ", row["browser"].value)
