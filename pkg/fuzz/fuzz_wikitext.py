#!/usr/bin/env python3
"""Atheris fuzzer for the wikitext scanners.

Run with ``uv run --group fuzz python fuzz/fuzz_wikitext.py [corpus_dir]``.
"""

from __future__ import annotations

import itertools
import re
import sys

from wiki_genre_signals.constants import NS_ARTICLE, NS_CATEGORY
from wiki_genre_signals.errors import EmptyTitleError
from wiki_genre_signals.wikitext import (
    detect_redirect,
    extract_categories,
    extract_lead,
    extract_wikilinks,
    normalize_title,
    parse_templates,
    strip_noise,
)

_WHITESPACE_RE = re.compile(r"[\s_]+")


def _fold(text: str) -> str:
    return _WHITESPACE_RE.sub(" ", text).casefold()


def check_one(data: bytes) -> None:
    """Feed one input to every scanner and check the invariants that hold for any text."""
    text = data.decode("utf-8", errors="replace")

    cleaned = strip_noise(text)
    assert len(cleaned) == len(text)

    spans = sorted(template.span for template in parse_templates(cleaned))
    for start, end in spans:
        assert 0 <= start < end <= len(cleaned)
        assert cleaned.startswith("{{", start) and cleaned.endswith("}}", 0, end)
    for (a_start, a_end), (b_start, b_end) in itertools.combinations(spans, 2):
        # Sorted by start, so b either follows a or sits inside it.
        assert b_start >= a_end or b_end <= a_end, (a_start, a_end, b_start, b_end)

    lead = extract_lead(text)
    links = extract_wikilinks(cleaned)
    categories = extract_categories(text)
    assert all(title.namespace == NS_ARTICLE for title in (*links, *lead.links))
    assert len(lead.text) <= len(text)
    assert text.startswith(lead.text)
    assert all(title.namespace == NS_CATEGORY for title in categories)

    # Without entities or markup every extracted name is spelled out in the input.
    if "&" not in text and "<" not in text:
        haystack = _fold(text)
        for title in (*links, *lead.links, *categories):
            assert _fold(title.name[1:]) in haystack, (text, title)

    target = detect_redirect(text)
    assert target is None or target.name

    try:
        title = normalize_title(text)
    except EmptyTitleError:
        return
    assert normalize_title(str(title)) == title


def main() -> None:
    import atheris

    atheris.Setup(sys.argv, check_one)
    atheris.Fuzz()


if __name__ == "__main__":
    main()
