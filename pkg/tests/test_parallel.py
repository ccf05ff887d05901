"""Tests for ordered job fan-out."""

from __future__ import annotations

import operator
from collections.abc import Iterator
from pathlib import Path

import pytest

from tests.dumps import FakePage, write_multistream_dump, write_plain_dump
from wiki_genre_signals.dump_ingest import DumpSource
from wiki_genre_signals.parallel import ChunkJob, iter_page_jobs, job_pages, map_jobs


def _pages(count: int) -> list[FakePage]:
    return [FakePage(i, f"Page {i}", f"Text of page {i}") for i in range(1, count + 1)]


@pytest.mark.parametrize("workers", [1, 2, 3])
def test_map_jobs_keeps_job_order(workers: int) -> None:
    assert list(map_jobs(operator.neg, range(50), workers)) == [-i for i in range(50)]


def test_map_jobs_rejects_zero_workers() -> None:
    with pytest.raises(ValueError, match="workers must be >= 1"):
        list(map_jobs(operator.neg, [1], 0))


def test_map_jobs_does_not_read_ahead() -> None:
    consumed = 0

    def jobs() -> Iterator[int]:
        nonlocal consumed
        for i in range(1000):
            consumed += 1
            yield i

    results = map_jobs(operator.neg, jobs(), 2)
    assert next(results) == 0
    assert consumed <= 4
    results.close()


def test_iter_page_jobs_batches_plain_dump(tmp_path: Path) -> None:
    source = DumpSource.from_path(write_plain_dump(tmp_path / "pages.xml", _pages(7)))

    jobs = list(iter_page_jobs(source, batch_size=3))

    assert [len(job_pages(job)) for job in jobs] == [3, 3, 1]


def test_iter_page_jobs_uses_multistream_blocks(tmp_path: Path) -> None:
    dump, index = write_multistream_dump(
        tmp_path / "pages.xml.bz2", tmp_path / "index.txt.bz2", _pages(5), pages_per_stream=2
    )
    source = DumpSource.from_path(dump, index)

    jobs = list(iter_page_jobs(source))

    assert all(isinstance(job, ChunkJob) for job in jobs)
    titles = [page.title for job in jobs for page in job_pages(job)]
    assert titles == [f"Page {i}" for i in range(1, 6)]
