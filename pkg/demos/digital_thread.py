"""Drive the five-step thread by hand: service, query, analysis, dashboard.

Run with ``python demos/digital_thread.py``.
"""

import json

from defii import analysis
from defii.config import data_path, load_config
from defii.engine import Engine
from defii.service import RunningService

engine = Engine(load_config())
engine.ingest_file(data_path("cyber_system.json"))
engine.map()

with RunningService(engine) as svc:
    print("service at", svc.url)
    print("vulnerable:", analysis.find_seeded_vulnerability(svc.url, 100, 104))

    ind = analysis.instantiate_model(svc.url, "CVSS_Model")
    view = analysis.get_view(svc.url, "CVSS_Model", ind)
    print("s_inherited before analysis:", view["s_inherited"])

    result = analysis.run_analysis_client(svc.url, "CVSS_Model", ind)
    print("analysis wrote", result.to_json())

    # A second consumer sees the same values through the same endpoint.
    doc = json.loads(analysis.get_view_text(svc.url, "CVSS_Model", ind))
    print("dashboard sees score", doc["CVSS_Model"]["score"])
    print(analysis.get_view_text(svc.url, "CVSS_Model", ind, "csv"))
