"""HTTP facade over an :class:`Engine`.

Routes::

    POST /api/models/{model}                 instantiate -> 201 {"individual": iri}
    GET  /api/models/{model}/{id}?format=    json (default) or csv view
    PUT  /api/models/{model}/{id}            write out-ports, returns refreshed view
    POST /api/sparql                         query text in body -> SPARQL JSON results
    GET  /api/stats                          statement accounting for the mapped graph
    POST /api/ingest                         model document -> {"sourceTriples": n}
    POST /api/map                            run mapping -> mapping report

Every error response is ``{"status", "code", "message"}``.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, unquote, urlsplit

from .engine import Engine, decode_json
from .errors import DefiiError, NotFoundError, ParseError, ValidationError
from .specified import concretize_json

log = logging.getLogger(__name__)

_NOT_FOUND_CODES = {"unknown-model", "unknown-individual"}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status, self.code, self.message = status, code, message

    def to_json(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


def _api_error(exc: Exception) -> ApiError:
    if isinstance(exc, ApiError):
        return exc
    if isinstance(exc, ParseError):
        return ApiError(400, exc.code, str(exc))
    if isinstance(exc, NotFoundError) or getattr(exc, "code", None) in _NOT_FOUND_CODES:
        return ApiError(404, exc.code, str(exc))
    if isinstance(exc, (ValidationError, DefiiError)):
        return ApiError(400, exc.code, str(exc))
    log.exception("internal error")
    return ApiError(500, "internal-error", f"{type(exc).__name__}: {exc}")


class Handler(BaseHTTPRequestHandler):
    server_version = "defii/0.1"
    protocol_version = "HTTP/1.1"
    engine: Engine  # set on the subclass created by make_server

    def log_message(self, fmt, *args) -> None:  # route through logging, not stderr
        log.debug("%s - %s", self.address_string(), fmt % args)

    # plumbing

    def _body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length else b""

    def _send(self, status: int, body: str, content_type: str = "application/json") -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", f"{content_type}; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _json(self, status: int, payload) -> None:
        self._send(status, json.dumps(payload, indent=2) + "\n")

    def _dispatch(self, method: str) -> None:
        url = urlsplit(self.path)
        parts = [unquote(p) for p in url.path.strip("/").split("/")]
        query = parse_qs(url.query)
        try:
            if parts[:1] != ["api"]:
                raise ApiError(404, "no-route", f"no route for {url.path}")
            self._route(method, parts[1:], query)
        except Exception as exc:  # every failure becomes an ApiError body
            err = _api_error(exc)
            self._json(err.status, err.to_json())

    def _route(self, method: str, parts: list[str], query: dict) -> None:
        engine = self.engine
        match (method, parts):
            case ("POST", ["models", model]):
                self._body()
                self._json(201, {"individual": engine.instantiate(model)})
            case ("GET", ["models", model, ind]):
                fmt = query.get("format", ["json"])[0]
                if fmt not in ("json", "csv"):
                    raise ApiError(400, "bad-format", f"unknown format {fmt!r}")
                body = engine.render(model, ind, fmt)
                self._send(200, body, "text/csv" if fmt == "csv" else "application/json")
            case ("PUT", ["models", model, ind]):
                updates = decode_json(self._body())
                view = engine.update(model, ind, updates)
                self._send(200, concretize_json(view, engine.registry.get(model)))
            case ("POST", ["sparql"]):
                table = engine.query(self._body().decode("utf-8"))
                self._json(200, table.to_json())
            case ("GET", ["stats"]):
                self._json(200, engine.stats().to_json())
            case ("POST", ["ingest"]):
                count = engine.ingest(decode_json(self._body()))
                self._json(200, {"sourceTriples": count})
            case ("POST", ["map"]):
                self._body()
                self._json(200, engine.map().to_json())
            case _:
                raise ApiError(404 if method == "GET" else 405, "no-route", f"no route for {method} {self.path}")

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_PUT(self) -> None:
        self._dispatch("PUT")


def make_server(engine: Engine, host: str = "127.0.0.1", port: int = 8642) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (Handler,), {"engine": engine})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


class RunningService:
    """A server on a background thread; usable as a context manager."""

    def __init__(self, engine: Engine, host: str = "127.0.0.1", port: int = 0) -> None:
        self.server = make_server(engine, host, port)
        self.thread = threading.Thread(
            target=self.server.serve_forever, kwargs={"poll_interval": 0.05}, name="defii-service", daemon=True
        )
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)

    def __enter__(self) -> "RunningService":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


__all__ = ["ApiError", "RunningService", "make_server"]
