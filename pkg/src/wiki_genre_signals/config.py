"""Pipeline configuration loader."""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import orjson

from wiki_genre_signals.constants import (
    DEFAULT_ACCEPTED_VALUES,
    DEFAULT_MAX_REDIRECT_HOPS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_PROJECTS,
    DEFAULT_PROPERTIES,
    DEFAULT_TOP_K,
    DEFAULT_UNION_NAME,
    DEFAULT_WORKERS,
    ERROR_CONFIG_FIELD_MISSING,
    ERROR_CONFIG_INVALID,
    ERROR_CONFIG_MISSING,
    ERROR_DUMP_NOT_FOUND,
    ERROR_PROJECT_INVALID,
    INTERWIKI_PREFIXES,
    PID_PATTERN,
)
from wiki_genre_signals.dump_ingest import DumpSource
from wiki_genre_signals.seedset import RequiredParam, WikiProjectSpec
from wiki_genre_signals.wikitext import NAMESPACES, namespace_table

REQUIRED_FIELDS = [
    "articles_dump",
]

_PID_RE = re.compile(PID_PATTERN)


@dataclass(frozen=True)
class PipelineConfig:
    """Typed pipeline configuration."""

    articles_dump: DumpSource
    talk_dump: DumpSource
    projects: tuple[WikiProjectSpec, ...]
    wikidata_dump: Path | None = None
    properties: tuple[str, ...] = DEFAULT_PROPERTIES
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    top_k: Mapping[str, int] = field(default_factory=lambda: {"default": DEFAULT_TOP_K})
    strict: bool = True
    workers: int = DEFAULT_WORKERS
    union_name: str = DEFAULT_UNION_NAME
    max_redirect_hops: int = DEFAULT_MAX_REDIRECT_HOPS
    namespaces: Mapping[str, int] = field(default_factory=lambda: NAMESPACES)
    interwiki_prefixes: frozenset[str] = INTERWIKI_PREFIXES

    def top_k_for(self, kind: str) -> int:
        return self.top_k.get(kind, self.top_k.get("default", DEFAULT_TOP_K))


def _invalid(field_name: str, reason: str) -> ValueError:
    return ValueError(ERROR_CONFIG_INVALID.format(field=field_name, reason=reason))


def _existing_path(config_dir: Path, raw: str) -> Path:
    path = (config_dir / raw).resolve()
    if not path.exists():
        raise FileNotFoundError(ERROR_DUMP_NOT_FOUND.format(path=path))
    return path


def _dump_source(config_dir: Path, data: Mapping[str, Any], key: str, index_key: str) -> DumpSource:
    path = _existing_path(config_dir, data[key])
    raw_index = data.get(index_key)
    index_path = _existing_path(config_dir, raw_index) if raw_index else None
    try:
        return DumpSource.from_path(path, index_path)
    except ValueError as exc:
        raise _invalid(index_key, str(exc)) from exc


def _positive_int(data: Mapping[str, Any], key: str, default: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise _invalid(key, f"expected an integer >= 1, got {value!r}")
    return value


def _parse_top_k(value: Any) -> dict[str, int]:
    table = value if isinstance(value, dict) else {"default": value}
    table.setdefault("default", DEFAULT_TOP_K)
    for kind, k in table.items():
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise _invalid("top_k", f"{kind} must be an integer >= 1, got {k!r}")
    return dict(table)


def parse_project(index: int, raw: Any) -> WikiProjectSpec:
    """Build one ``WikiProjectSpec`` from its config object."""
    if not isinstance(raw, dict):
        raise ValueError(ERROR_PROJECT_INVALID.format(index=index, reason="not an object"))
    set_name = raw.get("set_name")
    banners = raw.get("banner_templates")
    if not isinstance(set_name, str) or not set_name.strip():
        raise ValueError(ERROR_PROJECT_INVALID.format(index=index, reason="missing set_name"))
    if not isinstance(banners, list) or not all(isinstance(b, str) for b in banners):
        raise ValueError(
            ERROR_PROJECT_INVALID.format(index=index, reason="banner_templates must be a list")
        )

    required: RequiredParam | None = None
    raw_required = raw.get("required_param")
    if raw_required is not None:
        if not isinstance(raw_required, dict) or not raw_required.get("key"):
            raise ValueError(
                ERROR_PROJECT_INVALID.format(index=index, reason="required_param needs a key")
            )
        accepted = raw_required.get("accepted_values")
        values = (
            frozenset(str(v).strip().casefold() for v in accepted)
            if accepted
            else DEFAULT_ACCEPTED_VALUES
        )
        required = RequiredParam(str(raw_required["key"]).strip().casefold(), values)

    try:
        return WikiProjectSpec.create(set_name.strip(), banners, required)
    except ValueError as exc:
        raise ValueError(ERROR_PROJECT_INVALID.format(index=index, reason=exc)) from exc


def _parse_projects(raw: Any) -> tuple[WikiProjectSpec, ...]:
    if not isinstance(raw, list | tuple):
        raise _invalid("projects", "expected a list")
    projects = tuple(parse_project(index, item) for index, item in enumerate(raw, start=1))
    names = [project.set_name for project in projects]
    if len(set(names)) != len(names):
        raise _invalid("projects", "set names must be unique")
    return projects


def _parse_properties(raw: Any) -> tuple[str, ...]:
    if not isinstance(raw, list) or not raw:
        raise _invalid("properties", "expected a non-empty list")
    for pid in raw:
        if not isinstance(pid, str) or not _PID_RE.match(pid):
            raise _invalid("properties", f"not a property id: {pid!r}")
    return tuple(dict.fromkeys(raw))


def load_config(path: Path) -> PipelineConfig:
    """Load and validate pipeline configuration from a JSON file."""
    if not path.exists():
        raise FileNotFoundError(ERROR_CONFIG_MISSING.format(path=path))

    try:
        data = orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as exc:
        raise _invalid("file", str(exc)) from exc
    if not isinstance(data, dict):
        raise _invalid("file", "expected a JSON object")

    for field_name in REQUIRED_FIELDS:
        if field_name not in data:
            raise ValueError(ERROR_CONFIG_FIELD_MISSING.format(field=field_name))

    config_dir = path.resolve().parent

    articles = _dump_source(config_dir, data, "articles_dump", "articles_index")
    if data.get("talk_dump"):
        talk = _dump_source(config_dir, data, "talk_dump", "talk_index")
    else:
        talk = articles

    raw_wikidata = data.get("wikidata_dump")
    wikidata = _existing_path(config_dir, raw_wikidata) if raw_wikidata else None

    aliases = data.get("namespace_aliases", {})
    if not isinstance(aliases, dict) or not all(isinstance(v, int) for v in aliases.values()):
        raise _invalid("namespace_aliases", "expected an object of prefix -> namespace number")
    interwiki = data.get("interwiki_prefixes", [])
    if not isinstance(interwiki, list):
        raise _invalid("interwiki_prefixes", "expected a list")

    union_name = data.get("union_name", DEFAULT_UNION_NAME)
    if not isinstance(union_name, str) or not union_name.strip():
        raise _invalid("union_name", "expected a non-empty string")

    strict = data.get("strict", True)
    if not isinstance(strict, bool):
        raise _invalid("strict", f"expected true or false, got {strict!r}")

    return PipelineConfig(
        articles_dump=articles,
        talk_dump=talk,
        projects=_parse_projects(data.get("projects", list(DEFAULT_PROJECTS))),
        wikidata_dump=wikidata,
        properties=_parse_properties(data.get("properties", list(DEFAULT_PROPERTIES))),
        output_dir=(config_dir / data.get("output_dir", DEFAULT_OUTPUT_DIR)).resolve(),
        top_k=_parse_top_k(data.get("top_k", DEFAULT_TOP_K)),
        strict=strict,
        workers=_positive_int(data, "workers", DEFAULT_WORKERS),
        union_name=union_name.strip(),
        max_redirect_hops=_positive_int(data, "max_redirect_hops", DEFAULT_MAX_REDIRECT_HOPS),
        namespaces=namespace_table(aliases),
        interwiki_prefixes=INTERWIKI_PREFIXES | {str(p).casefold() for p in interwiki},
    )
