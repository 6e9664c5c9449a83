"""Flat ``key=value`` engine configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .errors import ValidationError
from .terms import IRI, TermError

KEYS = ("ontology", "base_iri", "reasoning", "bind", "port", "fixture")
REASONING_ON = {"rdfs-plus", "on", "true", "yes"}
REASONING_OFF = {"none", "off", "false", "no"}


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(str(resources.files("defii") / "data" / name))


@dataclass(frozen=True)
class EngineConfig:
    ontology: tuple[Path, ...] = field(default_factory=lambda: (data_path("mini_cco.ttl"),))
    base_iri: str = "http://testontology.org"
    reasoning: bool = True
    bind: str = "127.0.0.1"
    port: int = 8642
    fixture: Path | None = field(default_factory=lambda: data_path("cyber_system.json"))

    def validate(self) -> "EngineConfig":
        try:
            IRI(self.base_iri)
        except TermError as exc:
            raise ValidationError(f"base_iri must be an absolute IRI: {exc}", code="bad-config") from exc
        missing = [str(p) for p in self.ontology if not p.is_file()]
        if self.fixture is not None and not self.fixture.is_file():
            missing.append(str(self.fixture))
        if missing:
            raise ValidationError("missing file(s): " + ", ".join(missing), code="bad-config", offenders=missing)
        if not 0 <= self.port <= 65535:
            raise ValidationError(f"port out of range: {self.port}", code="bad-config")
        return self

    def with_overrides(self, **values) -> "EngineConfig":
        """Apply raw string overrides (as from the command line); None values are skipped."""
        parsed = _parse_values({k: v for k, v in values.items() if v is not None}, Path.cwd())
        return replace(self, **parsed)


def _parse_values(raw: dict[str, str], root: Path) -> dict:
    out: dict = {}
    for key, value in raw.items():
        if key == "ontology":
            out[key] = tuple(_path(root, v.strip()) for v in value.split(",") if v.strip())
        elif key == "fixture":
            out[key] = _path(root, value) if value else None
        elif key == "reasoning":
            flag = value.strip().lower()
            if flag not in REASONING_ON | REASONING_OFF:
                raise ValidationError(f"reasoning must be rdfs-plus or none, not {value!r}", code="bad-config")
            out[key] = flag in REASONING_ON
        elif key == "port":
            try:
                out[key] = int(value)
            except ValueError:
                raise ValidationError(f"port must be an integer, not {value!r}", code="bad-config") from None
        elif key in ("base_iri", "bind"):
            out[key] = value
        else:
            raise ValidationError(f"unknown config key {key!r}", code="bad-config")
    return out


def _path(root: Path, value: str) -> Path:
    p = Path(value).expanduser()
    return p if p.is_absolute() else root / p


def parse_config(text: str, root: Path) -> EngineConfig:
    raw: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"config line {n}: expected key=value", code="bad-config")
        raw[key.strip()] = value.strip()
    return replace(EngineConfig(), **_parse_values(raw, root))


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Read a config file (the bundled default when ``path`` is None)."""
    path = Path(path) if path is not None else data_path("defii.conf")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}", code="bad-config") from exc
    return parse_config(text, path.resolve().parent)
