"""Frequency tables and coverage statistics over seed sets, with mergeable partials."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from pathlib import Path
from typing import Any

import orjson

from wiki_genre_signals.constants import (
    ERROR_DUPLICATE_ARTICLE,
    ERROR_KIND_MISMATCH,
    ERROR_TABLE_FORMAT,
    ERROR_TABLE_MISSING,
    ERROR_TOP_K,
    GLOBAL_TABLE_STEM,
)
from wiki_genre_signals.diagnostics import Diagnostics, WarningKind
from wiki_genre_signals.errors import DuplicateArticleError, KindMismatchError
from wiki_genre_signals.seedset import SeedSet
from wiki_genre_signals.wikitext import Title

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


class SignalKind(StrEnum):
    LEAD_LINK = "lead_link"
    CATEGORY = "category"
    P31 = "p31"
    CLAIM = "claim"


@dataclass(frozen=True)
class FrequencyTable:
    """Article counts per key for one set; ``denominator`` is the number of articles."""

    signal_kind: SignalKind
    set_name: str
    denominator: int
    counts: Mapping[str, int] = field(default_factory=dict)
    property_id: str | None = None

    def __post_init__(self) -> None:
        if self.denominator < 0:
            raise ValueError(f"Negative denominator in {self.label}")
        for key, count in self.counts.items():
            if not 0 <= count <= self.denominator:
                raise ValueError(
                    f"Count {count} for {key!r} outside 0..{self.denominator} in {self.label}"
                )
        object.__setattr__(self, "counts", dict(self.counts))

    @property
    def label(self) -> str:
        kind = self.signal_kind.value
        if self.property_id:
            kind = f"{kind}:{self.property_id}"
        return f"{kind}/{self.set_name}"

    def padded_to(self, set_size: int) -> FrequencyTable:
        """Account for set members that never appeared in the stream."""
        missing = set_size - self.denominator
        if missing < 0:
            raise ValueError(f"{self.label} covers more articles than its set ({set_size})")
        filler = FrequencyTable(self.signal_kind, self.set_name, missing, {}, self.property_id)
        return merge(self, filler)


@dataclass(frozen=True)
class CoverageStat:
    """How many of the articles carrying ``key`` belong to the set."""

    key: str
    in_set: int
    global_count: int

    def __post_init__(self) -> None:
        if not 0 <= self.in_set <= self.global_count:
            raise ValueError(
                f"Coverage for {self.key!r} needs 0 <= in_set <= global, "
                f"got {self.in_set}/{self.global_count}"
            )

    @property
    def ratio(self) -> Fraction | None:
        if self.global_count == 0:
            return None
        return Fraction(self.in_set, self.global_count)


@dataclass(frozen=True)
class TopEntry:
    key: str
    count: int
    share: str


class TableBuilder:
    """Incremental ``tally``: offer articles one at a time, then ``build``.

    With ``members=None`` every offered article belongs to the set (global table).
    """

    def __init__(
        self,
        kind: SignalKind,
        set_name: str,
        members: SeedSet | None,
        *,
        strict: bool = True,
        diagnostics: Diagnostics | None = None,
        property_id: str | None = None,
    ) -> None:
        self._kind = kind
        self._set_name = set_name
        self._members = members
        self._strict = strict
        self._diagnostics = diagnostics
        self._property_id = property_id
        self._seen: set[Title] = set()
        self._counts: Counter[str] = Counter()

    def add(self, title: Title, keys: Iterable[str]) -> None:
        if self._members is not None and title not in self._members:
            return
        if title in self._seen:
            message = ERROR_DUPLICATE_ARTICLE.format(set_name=self._set_name, title=title)
            if self._strict:
                raise DuplicateArticleError(message)
            if self._diagnostics is not None:
                self._diagnostics.warn(WarningKind.DUPLICATE_ARTICLE, message)
            return
        self._seen.add(title)
        self._counts.update(set(keys))

    def build(self, *, partial: bool = False) -> FrequencyTable:
        """Finish the table; a partial table's denominator counts only the articles seen."""
        if partial or self._members is None:
            denominator = len(self._seen)
        else:
            denominator = len(self._members)
        return FrequencyTable(
            self._kind, self._set_name, denominator, dict(self._counts), self._property_id
        )


def tally(
    seed_set: SeedSet | None,
    per_article_keys: Iterable[tuple[Title, Sequence[str]]],
    kind: SignalKind,
    *,
    set_name: str | None = None,
    strict: bool = True,
    diagnostics: Diagnostics | None = None,
    partial: bool = False,
    property_id: str | None = None,
) -> FrequencyTable:
    """Count, per key, the set members whose key list contains it.

    Keys are deduplicated within each article. ``seed_set=None`` tallies every article
    offered, which is how global tables are produced.
    """
    name = set_name or (seed_set.name if seed_set is not None else GLOBAL_TABLE_STEM)
    builder = TableBuilder(
        kind,
        name,
        seed_set,
        strict=strict,
        diagnostics=diagnostics,
        property_id=property_id,
    )
    for title, keys in per_article_keys:
        builder.add(title, keys)
    return builder.build(partial=partial)


def _check_compatible(a: FrequencyTable, b: FrequencyTable, *, same_set: bool = True) -> None:
    compatible = a.signal_kind == b.signal_kind and a.property_id == b.property_id
    if same_set:
        compatible = compatible and a.set_name == b.set_name
    if not compatible:
        raise KindMismatchError(ERROR_KIND_MISMATCH.format(left=a.label, right=b.label))


def merge(a: FrequencyTable, b: FrequencyTable) -> FrequencyTable:
    """Combine tables over disjoint article partitions: counts and denominators add."""
    _check_compatible(a, b)
    counts: Counter[str] = Counter(a.counts)
    counts.update(b.counts)
    return FrequencyTable(
        a.signal_kind, a.set_name, a.denominator + b.denominator, dict(counts), a.property_id
    )


def coverage(key: str, set_table: FrequencyTable, global_table: FrequencyTable) -> CoverageStat:
    """In-set vs. global article counts for *key*; ratio is ``None`` when global is 0."""
    _check_compatible(set_table, global_table, same_set=False)
    return CoverageStat(key, set_table.counts.get(key, 0), global_table.counts.get(key, 0))


def share(count: int, denominator: int) -> Fraction:
    return Fraction(count, denominator) if denominator else Fraction(0)


def format_share(value: Fraction) -> str:
    """Render a ratio as a percentage with 2 decimals, rounded half-up exactly."""
    hundredths = math.floor(value * 10_000 + Fraction(1, 2))
    return f"{hundredths // 100}.{hundredths % 100:02d}%"


def format_ratio(value: Fraction | None) -> str:
    return "null" if value is None else format_share(value)


def top_k(table: FrequencyTable, k: int) -> list[TopEntry]:
    """The k most frequent keys; ties broken by ascending key."""
    if k < 1:
        raise ValueError(ERROR_TOP_K.format(value=k))
    ranked = sorted(table.counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return [
        TopEntry(key, count, format_share(share(count, table.denominator)))
        for key, count in ranked
    ]


def _write_lines(path: Path, header: str, rows: Iterable[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = header + "\n" + "".join(f"{row}\n" for row in rows)
    path.write_text(text, encoding="utf-8", newline="\n")


def write_table_tsv(path: Path, table: FrequencyTable) -> None:
    entries = top_k(table, len(table.counts)) if table.counts else []
    _write_lines(
        path,
        "key\tcount\tshare",
        (f"{entry.key}\t{entry.count}\t{entry.share}" for entry in entries),
    )


def table_to_json(table: FrequencyTable) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "signal_kind": table.signal_kind.value,
        "set_name": table.set_name,
        "denominator": table.denominator,
        "counts": dict(table.counts),
    }
    if table.property_id:
        payload["property_id"] = table.property_id
    return payload


def write_table_json(path: Path, table: FrequencyTable) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(table_to_json(table), option=_JSON_OPTIONS) + b"\n")


def read_table(path: Path) -> FrequencyTable:
    """Load a table written by ``write_table_json``."""
    if not path.exists():
        raise FileNotFoundError(ERROR_TABLE_MISSING.format(path=path))
    try:
        data = orjson.loads(path.read_bytes())
        return FrequencyTable(
            signal_kind=SignalKind(data["signal_kind"]),
            set_name=data["set_name"],
            denominator=int(data["denominator"]),
            counts={str(key): int(value) for key, value in data["counts"].items()},
            property_id=data.get("property_id"),
        )
    except (orjson.JSONDecodeError, KeyError, TypeError, AttributeError) as exc:
        raise ValueError(ERROR_TABLE_FORMAT.format(path=path)) from exc


def read_table_rows(path: Path) -> list[TopEntry]:
    """Load ``key, count, share`` rows from a table TSV, re-ranked deterministically."""
    if not path.exists():
        raise FileNotFoundError(ERROR_TABLE_MISSING.format(path=path))
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "key\tcount\tshare":
        raise ValueError(ERROR_TABLE_FORMAT.format(path=path))
    entries: list[TopEntry] = []
    for line in lines[1:]:
        try:
            key, count, share_text = line.split("\t")
            entries.append(TopEntry(key, int(count), share_text))
        except ValueError as exc:
            raise ValueError(ERROR_TABLE_FORMAT.format(path=path)) from exc
    return sorted(entries, key=lambda entry: (-entry.count, entry.key))


def write_coverage_tsv(path: Path, stats: Iterable[CoverageStat]) -> None:
    _write_lines(
        path,
        "key\tin_set\tglobal\tratio",
        (
            f"{stat.key}\t{stat.in_set}\t{stat.global_count}\t{format_ratio(stat.ratio)}"
            for stat in stats
        ),
    )


def write_plotdata(path: Path, entries: Iterable[TopEntry]) -> None:
    """Columnar top-k rows for external plotting; share is a bare percentage number."""
    _write_lines(
        path,
        "key\tcount\tshare",
        (f"{entry.key}\t{entry.count}\t{entry.share.rstrip('%')}" for entry in entries),
    )
