"""Ordered fan-out of page jobs to worker processes."""

from __future__ import annotations

import itertools
import logging
import multiprocessing
from collections import deque
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from multiprocessing.pool import AsyncResult
from typing import TypeVar

from wiki_genre_signals.constants import PAGE_BATCH_SIZE
from wiki_genre_signals.dump_ingest import (
    Compression,
    DumpHeader,
    DumpSource,
    PageRecord,
    StreamChunk,
    iter_stream_chunks,
    open_dump,
    read_chunk_pages,
    read_header,
    read_multistream_index,
)

logger = logging.getLogger(__name__)

JobT = TypeVar("JobT")
ResultT = TypeVar("ResultT")

# Jobs submitted but not yet collected, per worker.
_IN_FLIGHT_PER_WORKER = 2


@dataclass(frozen=True)
class ChunkJob:
    """One multistream block; the worker decompresses and parses it itself."""

    source: DumpSource
    chunk: StreamChunk
    header: DumpHeader


PageJob = ChunkJob | tuple[PageRecord, ...]


def map_jobs(
    fn: Callable[[JobT], ResultT],
    jobs: Iterable[JobT],
    workers: int = 1,
) -> Iterator[ResultT]:
    """Apply *fn* to every job, yielding results in job order.

    ``workers == 1`` runs in-process. Otherwise at most a few jobs per worker are
    outstanding at any time, so a lazily produced job stream is never read ahead
    of the pool.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        yield from map(fn, jobs)
        return
    limit = workers * _IN_FLIGHT_PER_WORKER
    with multiprocessing.Pool(workers) as pool:
        pending: deque[AsyncResult[ResultT]] = deque()
        for job in jobs:
            pending.append(pool.apply_async(fn, (job,)))
            if len(pending) >= limit:
                yield pending.popleft().get()
        while pending:
            yield pending.popleft().get()


def iter_page_jobs(source: DumpSource, batch_size: int = PAGE_BATCH_SIZE) -> Iterator[PageJob]:
    """Split a dump into jobs: index blocks for multistream, page batches otherwise."""
    if source.compression is Compression.BZ2_MULTISTREAM and source.index_path is not None:
        header = read_header(source)
        entries = read_multistream_index(source.index_path)
        chunks = iter_stream_chunks(entries, source.path.stat().st_size)
        logger.info("%s: %d multistream blocks", source.path.name, len(chunks))
        for chunk in chunks:
            yield ChunkJob(source, chunk, header)
        return
    with open_dump(source) as stream:
        pages = iter(stream)
        while batch := tuple(itertools.islice(pages, batch_size)):
            yield batch


def job_pages(job: PageJob) -> list[PageRecord]:
    if isinstance(job, ChunkJob):
        return read_chunk_pages(job.source, job.chunk, job.header)
    return list(job)


def iter_pages(source: DumpSource, workers: int = 1) -> Iterator[PageRecord]:
    """All pages of a dump in file order; multistream blocks are read in parallel."""
    for pages in map_jobs(job_pages, iter_page_jobs(source), workers):
        yield from pages
