"""Stream pages out of MediaWiki XML export dumps (plain, bz2 or bz2 multistream)."""

from __future__ import annotations

import bz2
import io
import logging
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from types import TracebackType
from typing import IO, NamedTuple

from lxml import etree

from wiki_genre_signals.constants import (
    ERROR_BAD_PAGE,
    ERROR_DUMP_NOT_FOUND,
    ERROR_HISTORY_DUMP,
    ERROR_INDEX_NOT_SORTED,
    ERROR_INDEX_WITHOUT_BZ2,
    ERROR_MALFORMED_INDEX_LINE,
    ERROR_MALFORMED_XML,
    ERROR_NOT_MEDIAWIKI,
    ERROR_UNDECLARED_NAMESPACE,
    ERROR_UNSUPPORTED_SCHEMA,
    EXPORT_ROOT_TAG,
    READ_BLOCK_SIZE,
    SUPPORTED_SCHEMA_VERSIONS,
)
from wiki_genre_signals.errors import (
    MalformedIndexLineError,
    MalformedXmlError,
    UnsupportedSchemaError,
)
from wiki_genre_signals.wikitext import redirect_target_text

logger = logging.getLogger(__name__)

_SCHEMA_FROM_NS_RE = re.compile(r"/export-(\d+\.\d+)/?$")
_INDEX_LINE_RE = re.compile(r"^(\d+):(\d+):(.+)$")
_ROOT_CLOSE = b"</" + EXPORT_ROOT_TAG.encode() + b">"


class Compression(StrEnum):
    NONE = "none"
    BZ2 = "bz2"
    BZ2_MULTISTREAM = "bz2-multistream"


@dataclass(frozen=True)
class DumpSource:
    """Location and compression of one dump file."""

    path: Path
    compression: Compression = Compression.NONE
    index_path: Path | None = None

    def __post_init__(self) -> None:
        multistream = self.compression is Compression.BZ2_MULTISTREAM
        if multistream != (self.index_path is not None):
            raise ValueError(ERROR_INDEX_WITHOUT_BZ2.format(path=self.path))

    @classmethod
    def from_path(cls, path: Path, index_path: Path | None = None) -> DumpSource:
        """Infer compression from the file suffix; an index implies multistream."""
        if index_path is not None:
            if path.suffix != ".bz2":
                raise ValueError(ERROR_INDEX_WITHOUT_BZ2.format(path=path))
            return cls(path, Compression.BZ2_MULTISTREAM, index_path)
        if path.suffix == ".bz2":
            return cls(path, Compression.BZ2)
        return cls(path)


@dataclass(frozen=True)
class PageRecord:
    """One page of the dump with the text of its single revision. Titles are raw."""

    page_id: int
    namespace: int
    title: str
    redirect_target: str | None
    wikitext: str


@dataclass(frozen=True)
class DumpHeader:
    """Schema version and declared namespaces, read once from a multistream header."""

    schema_version: str
    namespaces: frozenset[int] | None


class IndexEntry(NamedTuple):
    offset: int
    page_id: int
    title: str


@dataclass(frozen=True, order=True)
class StreamChunk:
    """Byte range ``[start, end)`` holding one or more bz2 streams of pages."""

    start: int
    end: int


def _local(tag: str) -> str:
    return tag.rpartition("}")[2]


def _schema_version(root: etree._Element) -> str | None:
    version = root.get("version")
    if version:
        return version
    match = _SCHEMA_FROM_NS_RE.search(etree.QName(root).namespace or "")
    return match.group(1) if match else None


def _release(elem: etree._Element) -> None:
    elem.clear(keep_tail=True)
    parent = elem.getparent()
    if parent is None:
        return
    while elem.getprevious() is not None:
        del parent[0]


class PageStream:
    """Pull-based page iterator over one export document.

    Memory stays proportional to the largest page: each ``<page>`` element is
    released as soon as its record is built.
    """

    def __init__(
        self,
        fileobj: IO[bytes],
        name: str,
        namespaces: frozenset[int] | None = None,
    ) -> None:
        self._file = fileobj
        self._name = name
        self._events = etree.iterparse(
            fileobj, events=("start", "end"), huge_tree=True, remove_comments=True
        )
        self.namespaces = namespaces
        self.schema_version = ""
        self._read_root()
        self._pages = self._iter_pages()

    def __iter__(self) -> Iterator[PageRecord]:
        return self._pages

    def __enter__(self) -> PageStream:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()

    def close(self) -> None:
        self._file.close()

    def next_page(self) -> PageRecord | None:
        """Return the next page, or ``None`` at end of stream."""
        return next(self._pages, None)

    def _malformed(self, exc: Exception) -> MalformedXmlError:
        return MalformedXmlError(ERROR_MALFORMED_XML.format(path=self._name, reason=exc))

    def _read_root(self) -> None:
        try:
            _, root = next(self._events)
        except (etree.XMLSyntaxError, EOFError, OSError) as exc:
            raise self._malformed(exc) from exc
        except StopIteration as exc:
            raise self._malformed(exc) from exc
        tag = _local(root.tag)
        if tag != EXPORT_ROOT_TAG:
            raise MalformedXmlError(ERROR_NOT_MEDIAWIKI.format(tag=tag, path=self._name))
        version = _schema_version(root)
        if version is None or version not in SUPPORTED_SCHEMA_VERSIONS:
            raise UnsupportedSchemaError(
                ERROR_UNSUPPORTED_SCHEMA.format(version=version, path=self._name)
            )
        self.schema_version = version

    def _iter_pages(self) -> Iterator[PageRecord]:
        try:
            for event, elem in self._events:
                if event != "end":
                    continue
                tag = _local(elem.tag)
                if tag == "page":
                    record = self._page_record(elem)
                    _release(elem)
                    yield record
                elif tag == "siteinfo":
                    self.namespaces = frozenset(
                        int(ns.get("key", "0"))
                        for ns in elem.iter()
                        if isinstance(ns.tag, str) and _local(ns.tag) == "namespace"
                    )
                    _release(elem)
        except (etree.XMLSyntaxError, EOFError, OSError) as exc:
            raise self._malformed(exc) from exc

    def _page_record(self, elem: etree._Element) -> PageRecord:
        fields: dict[str, str] = {}
        revisions: list[etree._Element] = []
        redirect: str | None = None
        for child in elem:
            if not isinstance(child.tag, str):
                continue
            tag = _local(child.tag)
            if tag == "revision":
                revisions.append(child)
            elif tag == "redirect":
                redirect = child.get("title") or None
            elif tag in ("id", "ns", "title") and tag not in fields:
                fields[tag] = (child.text or "").strip()

        page_id = _positive_int(fields.get("id"), "id")
        namespace = _int_field(fields.get("ns"), "ns")
        title = fields.get("title", "")
        if not title:
            raise MalformedXmlError(ERROR_BAD_PAGE.format(field="title", value=title))
        if len(revisions) > 1:
            raise UnsupportedSchemaError(
                ERROR_HISTORY_DUMP.format(page_id=page_id, count=len(revisions))
            )
        if self.namespaces and namespace not in self.namespaces:
            raise MalformedXmlError(
                ERROR_UNDECLARED_NAMESPACE.format(page_id=page_id, namespace=namespace)
            )

        wikitext = ""
        if revisions:
            for child in revisions[0]:
                if isinstance(child.tag, str) and _local(child.tag) == "text":
                    wikitext = child.text or ""
                    break
        if redirect is None:
            redirect = redirect_target_text(wikitext)
        return PageRecord(page_id, namespace, title, redirect, wikitext)


def _int_field(value: str | None, field: str) -> int:
    try:
        return int(value or "")
    except ValueError:
        raise MalformedXmlError(ERROR_BAD_PAGE.format(field=field, value=value)) from None


def _positive_int(value: str | None, field: str) -> int:
    number = _int_field(value, field)
    if number <= 0:
        raise MalformedXmlError(ERROR_BAD_PAGE.format(field=field, value=value))
    return number


def _open_binary(source: DumpSource) -> IO[bytes]:
    if not source.path.exists():
        raise FileNotFoundError(ERROR_DUMP_NOT_FOUND.format(path=source.path))
    if source.compression is Compression.NONE:
        return source.path.open("rb")
    # A multistream file is also a valid sequence of concatenated bz2 streams.
    return bz2.open(source.path, "rb")


def open_dump(source: DumpSource) -> PageStream:
    """Open a dump for sequential reading and validate its export root element."""
    fileobj = _open_binary(source)
    try:
        return PageStream(fileobj, str(source.path))
    except BaseException:
        fileobj.close()
        raise


def read_header(source: DumpSource) -> DumpHeader:
    """Read the schema version and namespaces from the first bz2 stream of a dump."""
    if not source.path.exists():
        raise FileNotFoundError(ERROR_DUMP_NOT_FOUND.format(path=source.path))
    decompressor = bz2.BZ2Decompressor()
    parts: list[bytes] = []
    with source.path.open("rb") as handle:
        while not decompressor.eof:
            block = handle.read(READ_BLOCK_SIZE)
            if not block:
                break
            try:
                parts.append(decompressor.decompress(block))
            except OSError as exc:
                raise MalformedXmlError(
                    ERROR_MALFORMED_XML.format(path=source.path, reason=exc)
                ) from exc
    header = b"".join(parts)
    if _ROOT_CLOSE not in header:
        header += _ROOT_CLOSE
    with PageStream(io.BytesIO(header), str(source.path)) as stream:
        for _ in stream:
            pass
        return DumpHeader(stream.schema_version, stream.namespaces)


def read_multistream_index(index_path: Path) -> list[IndexEntry]:
    """Parse an ``offset:page_id:title`` index file (plain or bz2) in file order."""
    if not index_path.exists():
        raise FileNotFoundError(ERROR_DUMP_NOT_FOUND.format(path=index_path))
    handle: IO[str]
    if index_path.suffix == ".bz2":
        handle = bz2.open(index_path, "rt", encoding="utf-8")
    else:
        handle = index_path.open(encoding="utf-8")
    entries: list[IndexEntry] = []
    with handle:
        for line_number, line in enumerate(handle, start=1):
            line = line.rstrip("\r\n")
            if not line:
                continue
            match = _INDEX_LINE_RE.match(line)
            if match is None:
                raise MalformedIndexLineError(
                    ERROR_MALFORMED_INDEX_LINE.format(line_number=line_number, line=line),
                    line_number,
                )
            entry = IndexEntry(int(match.group(1)), int(match.group(2)), match.group(3))
            if entries and entry.offset < entries[-1].offset:
                raise MalformedIndexLineError(
                    ERROR_INDEX_NOT_SORTED.format(line_number=line_number), line_number
                )
            entries.append(entry)
    return entries


def iter_stream_chunks(entries: Iterable[IndexEntry], file_size: int) -> list[StreamChunk]:
    """Turn index entries into the distinct byte ranges of the page streams."""
    offsets = sorted({entry.offset for entry in entries})
    if not offsets:
        return []
    ends = [*offsets[1:], file_size]
    return [StreamChunk(start, end) for start, end in zip(offsets, ends, strict=True)]


def read_chunk_pages(
    source: DumpSource,
    chunk: StreamChunk,
    header: DumpHeader,
) -> list[PageRecord]:
    """Decompress one multistream block range and parse the pages it holds."""
    with source.path.open("rb") as handle:
        handle.seek(chunk.start)
        data = handle.read(chunk.end - chunk.start)
    try:
        xml = bz2.decompress(data)
    except (OSError, ValueError) as exc:
        raise MalformedXmlError(ERROR_MALFORMED_XML.format(path=source.path, reason=exc)) from exc
    xml = xml.rstrip()
    if xml.endswith(_ROOT_CLOSE):
        xml = xml[: -len(_ROOT_CLOSE)]
    wrapped = (
        f'<{EXPORT_ROOT_TAG} version="{header.schema_version}">'.encode()
        + xml
        + _ROOT_CLOSE
    )
    name = f"{source.path}@{chunk.start}"
    with PageStream(io.BytesIO(wrapped), name, header.namespaces) as stream:
        pages = list(stream)
    logger.debug("Read %d pages from %s", len(pages), name)
    return pages
