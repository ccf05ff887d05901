"""Counted warnings: every anomaly is logged and tallied, never dropped."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Mapping
from enum import StrEnum

from wiki_genre_signals.constants import WARNING_LOG_LIMIT

logger = logging.getLogger(__name__)


class WarningKind(StrEnum):
    REDIRECT_CYCLE = "redirect_cycle"
    REDIRECT_HOP_LIMIT = "redirect_hop_limit"
    DUPLICATE_SITELINK = "duplicate_sitelink"
    MALFORMED_JSON = "malformed_json"
    DUPLICATE_ARTICLE = "duplicate_article"
    EMPTY_TITLE = "empty_title"
    MISSING_SUBJECT = "missing_subject"
    NO_PROJECTS = "no_projects"


class Diagnostics:
    """Per-kind warning counters.

    The first ``log_limit`` warnings of each kind go to the log at WARNING level,
    the rest at DEBUG, so huge dumps do not flood stderr.
    """

    def __init__(self, log_limit: int = WARNING_LOG_LIMIT) -> None:
        self.counts: Counter[str] = Counter()
        self._log_limit = log_limit

    def warn(self, kind: WarningKind, message: str, *args: object) -> None:
        # Keyed by the plain value; orjson rejects str subclasses as dict keys.
        self.counts[kind.value] += 1
        seen = self.counts[kind.value]
        level = logging.WARNING if seen <= self._log_limit else logging.DEBUG
        logger.log(level, message, *args)
        if seen == self._log_limit:
            logger.warning("Further %s warnings are logged at DEBUG level", kind.value)

    def merge(self, counts: Mapping[str, int]) -> None:
        """Fold in counts collected elsewhere (e.g. in a worker process)."""
        self.counts.update(counts)

    def as_dict(self) -> dict[str, int]:
        return {kind: self.counts[kind] for kind in sorted(self.counts) if self.counts[kind]}

    def summary_lines(self) -> list[str]:
        if not self.as_dict():
            return ["Warnings: none"]
        return [f"Warnings: {kind} = {count}" for kind, count in self.as_dict().items()]
