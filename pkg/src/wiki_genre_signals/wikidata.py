"""Stream the Wikidata JSON entity dump and align items with enwiki articles."""

from __future__ import annotations

import bz2
import gzip
import logging
import re
from collections import Counter
from collections.abc import Collection, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any

import orjson

from wiki_genre_signals.constants import (
    DEFAULT_PROPERTIES,
    DEPRECATED_RANK,
    ERROR_DUMP_NOT_FOUND,
    ERROR_MALFORMED_JSON,
    INSTANCE_OF,
    QID_PATTERN,
)
from wiki_genre_signals.diagnostics import Diagnostics, WarningKind
from wiki_genre_signals.errors import EmptyTitleError, MalformedJsonError
from wiki_genre_signals.seedset import SeedSet
from wiki_genre_signals.signals import FrequencyTable, SignalKind, TableBuilder
from wiki_genre_signals.wikitext import Title, normalize_title

logger = logging.getLogger(__name__)

_QID_RE = re.compile(QID_PATTERN)


@dataclass(frozen=True)
class EntityRecord:
    """The parts of a Wikidata item this pipeline uses."""

    qid: str
    enwiki_title: Title | None = None
    p31_values: tuple[str, ...] = ()
    extra_claims: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _QID_RE.match(self.qid):
            raise ValueError(f"Not a QID: {self.qid!r}")
        if len(set(self.p31_values)) != len(self.p31_values):
            raise ValueError(f"Duplicate P31 values on {self.qid}")

    def values(self, property_id: str) -> tuple[str, ...]:
        if property_id == INSTANCE_OF:
            return self.p31_values
        return self.extra_claims.get(property_id, ())


@dataclass(frozen=True)
class AlignmentRow:
    """How much of a set is covered by Wikidata: items found, items per property."""

    set_name: str
    size: int
    with_item: int
    with_property: Mapping[str, int]


def _strip_line(line: str) -> str:
    text = line.strip()
    if text.startswith("["):
        text = text[1:].strip()
    if text.endswith("]"):
        text = text[:-1].strip()
    return text.strip(",").strip()


def _item_id(snak: Mapping[str, Any]) -> str | None:
    if snak.get("snaktype", "value") != "value":
        return None
    datavalue = snak.get("datavalue") or {}
    if datavalue.get("type") != "wikibase-entityid":
        return None
    value = datavalue.get("value") or {}
    if value.get("entity-type", "item") != "item":
        return None
    qid = value.get("id")
    if qid is None and value.get("numeric-id") is not None:
        qid = f"Q{value['numeric-id']}"
    if not isinstance(qid, str) or not _QID_RE.match(qid):
        return None
    return qid


def _claim_values(statements: Iterable[Mapping[str, Any]]) -> tuple[str, ...]:
    values: dict[str, None] = {}
    for statement in statements:
        if statement.get("rank") == DEPRECATED_RANK:
            continue
        qid = _item_id(statement.get("mainsnak") or {})
        if qid is not None:
            values.setdefault(qid)
    return tuple(values)


def _enwiki_title(data: Mapping[str, Any]) -> Title | None:
    sitelink = (data.get("sitelinks") or {}).get("enwiki")
    if not sitelink or not isinstance(sitelink.get("title"), str):
        return None
    try:
        return normalize_title(sitelink["title"])
    except EmptyTitleError:
        return None


def parse_entity_line(
    line: str | bytes,
    properties: Sequence[str] = DEFAULT_PROPERTIES,
    line_number: int | None = None,
) -> EntityRecord | None:
    """Parse one line of the JSON array dump.

    Array brackets and the separating comma are tolerated. Returns ``None`` for blank
    lines and for non-item entities such as properties and lexemes.
    """
    try:
        raw = line.decode("utf-8") if isinstance(line, bytes) else line
    except UnicodeDecodeError as exc:
        raise MalformedJsonError(
            ERROR_MALFORMED_JSON.format(line_number=line_number, reason=exc), line_number
        ) from exc
    text = _strip_line(raw)
    if not text:
        return None
    try:
        data = orjson.loads(text)
    except orjson.JSONDecodeError as exc:
        raise MalformedJsonError(
            ERROR_MALFORMED_JSON.format(line_number=line_number, reason=exc), line_number
        ) from exc
    if not isinstance(data, dict):
        raise MalformedJsonError(
            ERROR_MALFORMED_JSON.format(line_number=line_number, reason="not an object"),
            line_number,
        )
    if data.get("type", "item") != "item":
        return None
    qid = data.get("id")
    if not isinstance(qid, str) or not _QID_RE.match(qid):
        raise MalformedJsonError(
            ERROR_MALFORMED_JSON.format(line_number=line_number, reason=f"bad id {qid!r}"),
            line_number,
        )
    claims = data.get("claims") or {}
    try:
        p31 = _claim_values(claims.get(INSTANCE_OF, ())) if INSTANCE_OF in properties else ()
        extra = {
            pid: _claim_values(claims.get(pid, ())) for pid in properties if pid != INSTANCE_OF
        }
        title = _enwiki_title(data)
    except (AttributeError, TypeError) as exc:
        raise MalformedJsonError(
            ERROR_MALFORMED_JSON.format(line_number=line_number, reason=f"bad structure: {exc}"),
            line_number,
        ) from exc
    return EntityRecord(qid, title, p31, extra)


def iter_entity_lines(
    path: Path,
    *,
    strict: bool = True,
    diagnostics: Diagnostics | None = None,
) -> Iterator[tuple[int, bytes]]:
    """Yield (line number, raw line) from a plain, ``.bz2`` or ``.gz`` dump.

    A truncated or corrupt compressed stream raises :class:`MalformedJsonError` in
    strict mode. Otherwise it is counted as one malformed line and reading stops there.
    """
    if not path.exists():
        raise FileNotFoundError(ERROR_DUMP_NOT_FOUND.format(path=path))
    handle: IO[bytes]
    if path.suffix == ".bz2":
        handle = bz2.open(path, "rb")
    elif path.suffix == ".gz":
        handle = gzip.open(path, "rb")
    else:
        handle = path.open("rb")
    line_number = 0
    with handle:
        try:
            for line_number, line in enumerate(handle, start=1):
                yield line_number, line
        except (EOFError, OSError) as exc:
            error = MalformedJsonError(
                ERROR_MALFORMED_JSON.format(line_number=line_number + 1, reason=exc),
                line_number + 1,
            )
            if strict:
                raise error from exc
            if diagnostics is not None:
                diagnostics.warn(WarningKind.MALFORMED_JSON, "%s", error)


def parse_entity_batch(
    batch: Sequence[tuple[int, bytes]],
    properties: Sequence[str] = DEFAULT_PROPERTIES,
    strict: bool = True,
) -> tuple[list[EntityRecord], Counter[str]]:
    """Parse a batch of lines; in lenient mode malformed lines are counted and skipped."""
    records: list[EntityRecord] = []
    diagnostics = Diagnostics()
    for line_number, line in batch:
        try:
            record = parse_entity_line(line, properties, line_number)
        except MalformedJsonError as exc:
            if strict:
                raise
            diagnostics.warn(WarningKind.MALFORMED_JSON, "%s", exc)
            continue
        if record is not None:
            records.append(record)
    return records, diagnostics.counts


def iter_entities(
    path: Path,
    properties: Sequence[str] = DEFAULT_PROPERTIES,
    *,
    strict: bool = True,
    diagnostics: Diagnostics | None = None,
) -> Iterator[EntityRecord]:
    for line_number, line in iter_entity_lines(path, strict=strict, diagnostics=diagnostics):
        try:
            record = parse_entity_line(line, properties, line_number)
        except MalformedJsonError as exc:
            if strict:
                raise
            if diagnostics is not None:
                diagnostics.warn(WarningKind.MALFORMED_JSON, "%s", exc)
            continue
        if record is not None:
            yield record


class SitelinkIndex:
    """enwiki title -> entity, first sitelink in stream order wins.

    When ``wanted`` is given only those titles keep their record, but duplicates are
    detected across every sitelink seen.
    """

    def __init__(self, wanted: Collection[Title] | None = None) -> None:
        self.entries: dict[Title, EntityRecord] = {}
        self.duplicates = 0
        self._wanted = wanted
        self._seen: set[Title] = set()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, title: object) -> bool:
        return title in self.entries

    def get(self, title: Title) -> EntityRecord | None:
        return self.entries.get(title)

    def add(self, record: EntityRecord, diagnostics: Diagnostics | None = None) -> bool:
        """Index *record*; returns False when it has no sitelink or lost to an earlier one."""
        title = record.enwiki_title
        if title is None:
            return False
        if title in self._seen:
            self.duplicates += 1
            if diagnostics is not None:
                diagnostics.warn(
                    WarningKind.DUPLICATE_SITELINK,
                    "Duplicate enwiki sitelink %s on %s (kept the earlier item)",
                    title,
                    record.qid,
                )
            return False
        self._seen.add(title)
        if self._wanted is None or title in self._wanted:
            self.entries[title] = record
        return True


def build_sitelink_index(
    entities: Iterable[EntityRecord],
    wanted: Collection[Title] | None = None,
    diagnostics: Diagnostics | None = None,
) -> SitelinkIndex:
    index = SitelinkIndex(wanted)
    for record in entities:
        index.add(record, diagnostics)
    logger.debug("Indexed %d sitelinks (%d duplicates)", len(index), index.duplicates)
    return index


def table_kind(property_id: str) -> tuple[SignalKind, str | None]:
    """Signal kind and table property id for a configured property."""
    if property_id == INSTANCE_OF:
        return SignalKind.P31, None
    return SignalKind.CLAIM, property_id


def property_distribution(
    seed_set: SeedSet,
    index: SitelinkIndex,
    property_id: str,
) -> FrequencyTable:
    """Share of the set's articles carrying each value of *property_id*.

    Members without an item stay in the denominator.
    """
    kind, table_property = table_kind(property_id)
    builder = TableBuilder(kind, seed_set.name, seed_set, property_id=table_property)
    for title in sorted(seed_set.members):
        record = index.get(title)
        if record is not None:
            builder.add(title, record.values(property_id))
    return builder.build()


def p31_distribution(seed_set: SeedSet, index: SitelinkIndex) -> FrequencyTable:
    return property_distribution(seed_set, index, INSTANCE_OF)


def alignment_summary(
    seed_set: SeedSet,
    index: SitelinkIndex,
    properties: Sequence[str] = DEFAULT_PROPERTIES,
) -> AlignmentRow:
    with_item = 0
    with_property: Counter[str] = Counter({pid: 0 for pid in properties})
    for title in seed_set.members:
        record = index.get(title)
        if record is None:
            continue
        with_item += 1
        for pid in properties:
            if record.values(pid):
                with_property[pid] += 1
    return AlignmentRow(seed_set.name, len(seed_set), with_item, dict(with_property))


def write_alignment_tsv(
    path: Path,
    rows: Iterable[AlignmentRow],
    properties: Sequence[str] = DEFAULT_PROPERTIES,
) -> None:
    header = "\t".join(["set_name", "size", "with_item", *(f"with_{p}" for p in properties)])
    lines = [header]
    for row in rows:
        cells = [row.set_name, str(row.size), str(row.with_item)]
        cells.extend(str(row.with_property.get(pid, 0)) for pid in properties)
        lines.append("\t".join(cells))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
