"""Command line entry point.

State persists between invocations as a snapshot directory (``--state``),
so ``defii ingest model.json && defii map && defii stats`` works as a
pipeline. Exit codes: 0 success, 1 validation error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, mapping
from .config import load_config
from .cvss import STRATEGIES
from .engine import Engine
from .errors import DefiiError
from .service import make_server
from .thread import run_thread

DEFAULT_STATE = ".defii-state"


def _engine(args) -> Engine:
    return Engine.open(_config(args), args.state)


def _config(args):
    cfg = load_config(args.config).with_overrides(
        ontology=args.ontology, base_iri=args.base_iri, reasoning=args.reasoning,
        bind=args.bind, port=args.port, fixture=args.fixture,
    )
    return cfg.validate()


def _save(engine: Engine, args) -> None:
    engine.save(args.state)


def cmd_ingest(args) -> int:
    engine = _engine(args)
    count = engine.ingest_file(args.path)
    _save(engine, args)
    print(f"ingested {count} source statements")
    return 0


def cmd_map(args) -> int:
    engine = _engine(args)
    report = engine.map()
    _save(engine, args)
    print(json.dumps(report.to_json(), indent=2))
    return 0


def cmd_query(args) -> int:
    engine = _engine(args)
    text = Path(args.path).read_text(encoding="utf-8")
    print(json.dumps(engine.query(text).to_json(), indent=2))
    return 0


def cmd_stats(args) -> int:
    s = _engine(args).stats()
    ratio = s.to_json()["expansionRatio"]
    print(f"explicit={s.explicit_count} inferred={s.inferred_count} total={s.total} "
          f"ratio={'n/a' if ratio is None else f'{ratio:.2f}'}")
    return 0


def cmd_instantiate(args) -> int:
    engine = _engine(args)
    iri = engine.instantiate(args.model)
    _save(engine, args)
    print(iri.rsplit("/", 1)[1])
    return 0


def cmd_export(args) -> int:
    engine = _engine(args)
    if args.individual:
        text = engine.render(args.model, args.individual, args.format)
    else:
        text = mapping.dumps_document(engine.export_document(args.model))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    engine = _engine(args)
    server = make_server(engine, engine.config.bind, engine.config.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        if args.state:
            _save(engine, args)
    return 0


def cmd_analyze(args) -> int:
    result = analysis.run_analysis_client(args.endpoint, args.model, args.individual, args.strategy)
    print(f"score={result.base_score} vs={result.vector_string}")
    return 0


def cmd_thread_run(args) -> int:
    config = _config(args)
    report = run_thread(config, args.seed_version, args.seed_patch, args.strategy, echo=print)
    if report.ok:
        print("thread complete: all 5 steps passed")
        return 0
    return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("engine options")
    g.add_argument("--config", help="key=value config file (default: bundled)")
    g.add_argument("--state", default=os.environ.get("DEFII_STATE", DEFAULT_STATE),
                   help="snapshot directory carried between commands (default: %(default)s)")
    g.add_argument("--ontology", help="comma-separated Turtle files")
    g.add_argument("--base-iri", dest="base_iri")
    g.add_argument("--reasoning", help="rdfs-plus or none")
    g.add_argument("--bind")
    g.add_argument("--port")
    g.add_argument("--fixture")
    g.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="defii", description="Ontology-aligned engineering data engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="load a model document into the source graph")
    p.add_argument("path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("map", parents=[common], help="map stereotyped elements and reason")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("query", parents=[common], help="run a SPARQL file against the mapped graph")
    p.add_argument("path")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", parents=[common], help="explicit/inferred statement counts")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("instantiate", parents=[common], help="create a model individual, print its id")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_instantiate)

    p = sub.add_parser("export", parents=[common],
                       help="write a model view (with --individual) or the regenerated model document")
    p.add_argument("--model", required=True)
    p.add_argument("--individual")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("analyze", help="run the CVSS analysis client against a service")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--model", default="CVSS_Model")
    p.add_argument("--individual", required=True)
    p.add_argument("--strategy", choices=STRATEGIES, default="worst-case")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("thread", help="digital thread demonstration")
    tsub = p.add_subparsers(dest="thread_command", required=True)
    r = tsub.add_parser("run", parents=[common], help="run all five steps against a live local service")
    r.add_argument("--version", dest="seed_version", type=int, default=100, help="seeded browser version")
    r.add_argument("--patch", dest="seed_patch", type=int, default=104, help="seeded browser patch")
    r.add_argument("--strategy", choices=STRATEGIES, default="worst-case")
    r.set_defaults(func=cmd_thread_run)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DefiiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if exc.code == "internal-error" else 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
