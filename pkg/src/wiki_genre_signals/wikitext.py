"""Wikitext parsing: titles, redirects, noise removal, templates, wikilinks and the lead section.

Templates, links and headings come from the mwparserfromhell node tree. All offsets are
indices into the Python string. ``strip_noise`` keeps the text length unchanged, so spans
computed on its output address the original page text too.
"""

from __future__ import annotations

import html
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from types import MappingProxyType

import mwparserfromhell
from mwparserfromhell import nodes
from mwparserfromhell.nodes import Node
from mwparserfromhell.wikicode import Wikicode

from wiki_genre_signals.constants import (
    ERROR_EMPTY_TITLE,
    INFOBOX_PREFIX,
    INTERWIKI_PREFIXES,
    NAMESPACE_ALIASES,
    NAMESPACE_NAMES,
    NOISE_TAGS,
    NS_ARTICLE,
    NS_CATEGORY,
    TEMPLATE_NAMESPACE_PREFIX,
)
from wiki_genre_signals.errors import EmptyTitleError

_WHITESPACE_RE = re.compile(r"\s+")
_REDIRECT_RE = re.compile(
    r"\A\s*#REDIRECT\s*:?\s*\[\[([^\[\]|\n]*)(?:\|[^\[\]\n]*)?\]\]",
    re.IGNORECASE,
)
_NOISE_OPEN_RE = re.compile(
    r"<!--|<(" + "|".join(NOISE_TAGS) + r")\b[^>]*?(/?)>",
    re.IGNORECASE,
)
_NOISE_CLOSE_RES = {tag: re.compile(rf"</{tag}\s*>", re.IGNORECASE) for tag in NOISE_TAGS}
_INVALID_NAME_CHARS = frozenset("{}[]<>|")
_LEAD_HEADING_LEVEL = 2


def namespace_table(extra: Mapping[str, int] | None = None) -> Mapping[str, int]:
    """Build the case-insensitive prefix -> namespace table, with optional extra aliases."""
    table = {name.casefold(): ns for ns, name in NAMESPACE_NAMES.items()}
    table.update(NAMESPACE_ALIASES)
    for prefix, ns in (extra or {}).items():
        table[_WHITESPACE_RE.sub(" ", prefix.replace("_", " ")).strip().casefold()] = ns
    return MappingProxyType(table)


NAMESPACES = namespace_table()


@dataclass(frozen=True, order=True)
class Title:
    """Normalized page title: namespace number plus name without prefix."""

    namespace: int
    name: str

    def __str__(self) -> str:
        if self.namespace == NS_ARTICLE:
            return self.name
        prefix = NAMESPACE_NAMES.get(self.namespace, str(self.namespace))
        return f"{prefix}:{self.name}"

    def subject(self) -> Title:
        """Return the subject page for a talk page (odd namespace), else the title itself."""
        if self.namespace > 0 and self.namespace % 2 == 1:
            return Title(self.namespace - 1, self.name)
        return self


@dataclass(frozen=True)
class Template:
    """One ``{{...}}`` transclusion with its parameters and source span."""

    name: str
    params: tuple[tuple[str | None, str], ...]
    span: tuple[int, int]

    def param(self, key: str) -> str | None:
        """Look up a named parameter, case-insensitively."""
        wanted = key.strip().casefold()
        for param_key, value in self.params:
            if param_key is not None and param_key.casefold() == wanted:
                return value
        return None


@dataclass(frozen=True)
class LeadSlice:
    """Section 0 of a page and the wikilinks it contributes."""

    text: str
    templates: tuple[Template, ...]
    links: tuple[Title, ...]


def _unescape(text: str) -> str:
    # Repeat until stable: "&amp;amp;" must not survive one round.
    while True:
        decoded = html.unescape(text)
        if decoded == text:
            return text
        text = decoded


def _upper_first(text: str) -> str:
    first = text[0].upper()
    if len(first) != 1:
        return text
    return first + text[1:]


def _clean(text: str) -> str:
    return _WHITESPACE_RE.sub(" ", text.replace("_", " ")).strip().lstrip(": ")


def normalize_title(raw: str, namespaces: Mapping[str, int] = NAMESPACES) -> Title:
    """Normalize a raw title or link target into a ``Title``.

    Decodes HTML entities, drops the ``#fragment``, maps underscores to spaces,
    collapses whitespace, resolves the namespace prefix and uppercases the first
    character of the name.
    """
    text = _clean(_unescape(raw).split("#", 1)[0])
    namespace = NS_ARTICLE
    prefix, sep, rest = text.partition(":")
    if sep:
        ns = namespaces.get(prefix.rstrip().casefold())
        if ns is not None:
            namespace = ns
            text = rest.lstrip(": ")
    if not text:
        raise EmptyTitleError(ERROR_EMPTY_TITLE.format(raw=raw))
    return Title(namespace, _upper_first(text))


def redirect_target_text(wikitext: str) -> str | None:
    """Return the raw target of a leading ``#REDIRECT [[...]]`` directive."""
    match = _REDIRECT_RE.match(wikitext)
    if match is None or not match.group(1).strip():
        return None
    return match.group(1)


def detect_redirect(wikitext: str, namespaces: Mapping[str, int] = NAMESPACES) -> Title | None:
    """Return the normalized redirect target, or ``None`` for ordinary pages."""
    raw = redirect_target_text(wikitext)
    if raw is None:
        return None
    try:
        return normalize_title(raw, namespaces)
    except EmptyTitleError:
        return None


def strip_noise(wikitext: str) -> str:
    """Blank comments and the interior of nowiki/pre/source/syntaxhighlight with spaces.

    The result has the same length as the input. Unterminated regions run to the end.
    """
    pieces: list[str] = []
    pos = 0
    length = len(wikitext)
    while True:
        match = _NOISE_OPEN_RE.search(wikitext, pos)
        if match is None:
            break
        pieces.append(wikitext[pos : match.start()])
        if match.group(0) == "<!--":
            end = wikitext.find("-->", match.end())
            end = length if end < 0 else end + 3
            pieces.append(" " * (end - match.start()))
            pos = end
            continue
        pieces.append(match.group(0))
        if match.group(2):
            pos = match.end()
            continue
        close = _NOISE_CLOSE_RES[match.group(1).lower()].search(wikitext, match.end())
        interior_end = length if close is None else close.start()
        pieces.append(" " * (interior_end - match.end()))
        pos = interior_end
    pieces.append(wikitext[pos:])
    return "".join(pieces)


def normalize_template_name(raw: str) -> str | None:
    """Normalize a template name like a title; ``None`` if no template can have it."""
    name = _WHITESPACE_RE.sub(" ", raw.replace("_", " ")).strip()
    if name.casefold().startswith(TEMPLATE_NAMESPACE_PREFIX):
        name = name[len(TEMPLATE_NAMESPACE_PREFIX) :].strip()
    if not name or any(char in _INVALID_NAME_CHARS for char in name):
        return None
    return _upper_first(name)


def is_infobox(name: str) -> bool:
    """True when the template name's first word is "Infobox" (any case)."""
    return name.split(" ", 1)[0].casefold() == INFOBOX_PREFIX


def _at(source: str, child: Wikicode, guess: int) -> tuple[Wikicode, int] | None:
    text = str(child)
    if source.startswith(text, guess):
        return child, guess
    found = source.find(text)
    return None if found < 0 else (child, found)


def _children(node: Node, source: str) -> Iterator[tuple[Wikicode, int]]:
    """Child wikicode of *node* with offsets into *source*, the node's own text."""
    if isinstance(node, nodes.Template):
        pos = 2
        yield node.name, pos
        pos += len(str(node.name))
        for param in node.params:
            pos += 1
            if param.showkey:
                yield param.name, pos
                pos += len(str(param.name)) + 1
            yield param.value, pos
            pos += len(str(param.value))
    elif isinstance(node, nodes.Wikilink):
        yield node.title, 2
        if node.text is not None:
            yield node.text, 3 + len(str(node.title))
    elif isinstance(node, nodes.Heading):
        yield node.title, int(node.level)
    elif isinstance(node, nodes.Tag) and node.contents is not None and not node.self_closing:
        if node.wiki_markup:
            tail = str(node.closing_wiki_markup or "")
        else:
            tail = f"</{node.closing_tag}>"
        guess = len(source) - len(tail) - len(str(node.contents))
        if (located := _at(source, node.contents, guess)) is not None:
            yield located
    elif isinstance(node, nodes.ExternalLink) and node.title is not None:
        guess = len(source) - 1 - len(str(node.title))
        if (located := _at(source, node.title, guess)) is not None:
            yield located


def _template(node: nodes.Template, start: int, end: int) -> Template | None:
    name = normalize_template_name(str(node.name))
    if name is None:
        return None
    params: list[tuple[str | None, str]] = []
    for param in node.params:
        key = str(param.name).strip()
        if param.showkey and key:
            params.append((key, str(param.value).strip()))
        else:
            params.append((None, str(param)))
    return Template(name=name, params=tuple(params), span=(start, end))


@dataclass(frozen=True)
class _Located:
    node: Node
    start: int
    template: Template | None
    # Enclosing templates, outermost first.
    within: tuple[Template, ...]


def _walk(
    code: Wikicode, start: int = 0, within: tuple[Template, ...] = ()
) -> Iterator[_Located]:
    """Every node under *code* in source order, with its offset in the parsed text."""
    for node in code.nodes:
        source = str(node)
        template = None
        if isinstance(node, nodes.Template):
            template = _template(node, start, start + len(source))
        yield _Located(node, start, template, within)
        inner = within if template is None else (*within, template)
        for child, offset in _children(node, source):
            yield from _walk(child, start + offset, inner)
        start += len(source)


def _parse(text: str) -> list[_Located]:
    return list(_walk(mwparserfromhell.parse(text)))


def parse_templates(text: str) -> list[Template]:
    """Parse every ``{{...}}`` transclusion in *text* (noise already stripped), in source order.

    Nested templates are reported separately; their spans nest inside the outer span.
    Transclusions whose name cannot be a page title are left out.
    """
    return [item.template for item in _parse(text) if item.template is not None]


def _classify_link(
    raw: str,
    namespaces: Mapping[str, int],
    interwiki: frozenset[str],
) -> tuple[Title, bool] | None:
    """Return (title, leading_colon), or ``None`` for interwiki and empty targets."""
    target = raw.strip()
    leading_colon = target.startswith(":")
    if leading_colon:
        target = target[1:]
    if any(char in _INVALID_NAME_CHARS or char == "\n" for char in target):
        return None
    prefix, sep, _ = target.partition(":")
    if sep:
        key = _clean(prefix).casefold()
        if key in interwiki and key not in namespaces:
            return None
    try:
        return normalize_title(target, namespaces), leading_colon
    except EmptyTitleError:
        return None


def _article_links(
    located: Iterable[_Located],
    namespaces: Mapping[str, int],
    interwiki: frozenset[str],
) -> list[Title]:
    links: list[Title] = []
    for item in located:
        if not isinstance(item.node, nodes.Wikilink):
            continue
        classified = _classify_link(str(item.node.title), namespaces, interwiki)
        if classified is not None and classified[0].namespace == NS_ARTICLE:
            links.append(classified[0])
    return links


def extract_wikilinks(
    text: str,
    namespaces: Mapping[str, int] = NAMESPACES,
    interwiki: frozenset[str] = INTERWIKI_PREFIXES,
) -> list[Title]:
    """Return article-namespace link targets in order, duplicates kept.

    Links nested in templates and in image captions are included.
    """
    return _article_links(_parse(text), namespaces, interwiki)


def extract_categories(
    wikitext: str,
    namespaces: Mapping[str, int] = NAMESPACES,
    interwiki: frozenset[str] = INTERWIKI_PREFIXES,
) -> list[Title]:
    """Return the page's category assignments, deduplicated in first-seen order."""
    seen: dict[Title, None] = {}
    for located in _parse(strip_noise(wikitext)):
        if not isinstance(located.node, nodes.Wikilink):
            continue
        classified = _classify_link(str(located.node.title), namespaces, interwiki)
        if classified is None:
            continue
        title, leading_colon = classified
        if title.namespace == NS_CATEGORY and not leading_colon:
            seen.setdefault(title, None)
    return list(seen)


def _lead_end(located: Iterable[_Located], length: int) -> int:
    for item in located:
        node = item.node
        if (
            isinstance(node, nodes.Heading)
            and not item.within
            and int(node.level) == _LEAD_HEADING_LEVEL
        ):
            return item.start
    return length


def _counts_in_lead(item: _Located) -> bool:
    # Inside templates only infobox parameters count, at any depth.
    return not item.within or any(is_infobox(template.name) for template in item.within)


def extract_lead(
    wikitext: str,
    namespaces: Mapping[str, int] = NAMESPACES,
    interwiki: frozenset[str] = INTERWIKI_PREFIXES,
) -> LeadSlice:
    """Slice section 0 and collect links from its prose and its infobox parameters.

    Templates other than infoboxes (hatnotes, maintenance tags) contribute no links.
    A level-2 heading ends the lead wherever it sits, except inside a template.
    """
    located = _parse(strip_noise(wikitext))
    lead_end = _lead_end(located, len(wikitext))
    in_lead = [item for item in located if item.start < lead_end]
    links = _article_links(
        (item for item in in_lead if _counts_in_lead(item)), namespaces, interwiki
    )
    return LeadSlice(
        text=wikitext[:lead_end],
        templates=tuple(item.template for item in in_lead if item.template is not None),
        links=tuple(links),
    )
