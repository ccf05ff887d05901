"""Domain errors raised by the pipeline stages."""

from __future__ import annotations


class DumpFormatError(ValueError):
    """The XML dump cannot be read as a supported MediaWiki export."""


class MalformedXmlError(DumpFormatError):
    """Unrecoverable structural error in the dump XML (including truncation)."""


class UnsupportedSchemaError(DumpFormatError):
    """Export schema outside 0.8-0.11, or a multi-revision history dump."""


class MalformedIndexLineError(ValueError):
    """A multistream index line is not ``offset:page_id:title``."""

    def __init__(self, message: str, line_number: int = 0) -> None:
        super().__init__(message)
        self.line_number = line_number


class EmptyTitleError(ValueError):
    """A title is empty after trimming and fragment removal."""


class MalformedJsonError(ValueError):
    """A Wikidata dump line is not a valid entity object."""

    def __init__(self, message: str, line_number: int | None = None) -> None:
        super().__init__(message)
        self.line_number = line_number


class DuplicateArticleError(ValueError):
    """The same article was offered twice to a tally in strict mode."""


class KindMismatchError(ValueError):
    """Two frequency tables of different kind or set were combined."""
