"""Analysis client: talks to the service over HTTP only.

It plays the external analysis tool of the digital thread. It reads a
CVSS model view, rolls the per-element metrics up to one system vector,
scores it, and writes ``score`` and ``vs`` back.
"""

from __future__ import annotations

import json
import re
import urllib.error
import urllib.request
from decimal import Decimal

from .config import data_path
from .cvss import METRICS, CvssResult, roll_up
from .errors import DefiiError, ValidationError


class ClientError(DefiiError):
    """Non-2xx response from the service (or no response at all)."""

    def __init__(self, status: int | None, code: str, message: str) -> None:
        super().__init__(f"{status or 'no response'} {code}: {message}")
        self.status = status
        self.code = code
        self.message = message


def request(method: str, url: str, body: bytes | None = None, content_type: str = "application/json") -> str:
    req = urllib.request.Request(url, data=body, method=method)
    if body is not None:
        req.add_header("Content-Type", content_type)
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            return resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        text = exc.read().decode("utf-8", "replace")
        try:
            err = json.loads(text)
            raise ClientError(exc.code, err.get("code", "http-error"), err.get("message", text)) from None
        except (json.JSONDecodeError, AttributeError):
            raise ClientError(exc.code, "http-error", text) from None
    except urllib.error.URLError as exc:
        raise ClientError(None, "connection-error", str(exc.reason)) from None


def _model_url(endpoint: str, model: str, individual: str) -> str:
    from urllib.parse import quote

    return f"{endpoint.rstrip('/')}/api/models/{quote(model, safe='')}/{quote(individual, safe='')}"


def get_view_text(endpoint: str, model: str, individual: str, fmt: str = "json") -> str:
    return request("GET", _model_url(endpoint, model, individual) + f"?format={fmt}")


def get_view(endpoint: str, model: str, individual: str) -> dict:
    doc = json.loads(get_view_text(endpoint, model, individual), parse_float=Decimal)
    return doc[model]


def metric_arrays(view: dict) -> dict[str, list[str]]:
    """Pick the ``<metric>_inherited`` in-ports out of a model view."""
    arrays = {}
    for metric in METRICS:
        key = f"{metric.lower()}_inherited"
        if key not in view:
            raise ValidationError(f"model view lacks in-port {key!r}", code="missing-in-port")
        arrays[key] = view[key]
    return arrays


def analyze(view: dict, strategy: str = "worst-case") -> CvssResult:
    return roll_up(metric_arrays(view), strategy)


def run_analysis_client(endpoint: str, model: str, individual: str, strategy: str = "worst-case") -> CvssResult:
    """GET the view, score it, PUT ``{score, vs}`` back. Nothing is written if any step before the PUT fails."""
    result = analyze(get_view(endpoint, model, individual), strategy)
    payload = json.dumps({"score": float(result.base_score), "vs": result.vector_string}).encode("utf-8")
    request("PUT", _model_url(endpoint, model, individual), payload)
    return result


def instantiate_model(endpoint: str, model: str) -> str:
    """POST a new model individual; returns its id (last IRI segment)."""
    from urllib.parse import quote

    body = json.loads(request("POST", f"{endpoint.rstrip('/')}/api/models/{quote(model, safe='')}", b""))
    return body["individual"].rsplit("/", 1)[1]


# ------------------------------------------------------------------ direct interface

_BIND_RE = {
    "cyberVersion": re.compile(r"BIND\(\s*\d+\s+AS\s+\?cyberVersion\s*\)"),
    "cyberPatch": re.compile(r"BIND\(\s*\d+\s+AS\s+\?cyberPatch\s*\)"),
}


def seeded_query(version: int, patch: int) -> str:
    """The bundled seeded-vulnerability query with the two BIND constants replaced."""
    for label, value in (("version", version), ("patch", patch)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{label} must be an integer, got {value!r}", code="bad-argument")
    text = data_path("seeded_vulnerability.rq").read_text(encoding="utf-8")
    text = _BIND_RE["cyberVersion"].sub(f"BIND({version} AS ?cyberVersion)", text)
    return _BIND_RE["cyberPatch"].sub(f"BIND({patch} AS ?cyberPatch)", text)


def sparql(endpoint: str, query: str) -> dict:
    return json.loads(request("POST", f"{endpoint.rstrip('/')}/api/sparql", query.encode("utf-8"), "application/sparql-query"))


def find_seeded_vulnerability(endpoint: str, version: int, patch: int) -> list[tuple[str, int, int]]:
    results = sparql(endpoint, seeded_query(version, patch))
    return [
        (b["browser"]["value"], int(b["versionValue"]["value"]), int(b["patchValue"]["value"]))
        for b in results["results"]["bindings"]
    ]
