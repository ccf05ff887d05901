"""WikiProject seed sets: banner detection on talk pages, redirect resolution, union."""

from __future__ import annotations

import itertools
import re
from collections.abc import Collection, Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path

from wiki_genre_signals.constants import (
    DEFAULT_ACCEPTED_VALUES,
    DEFAULT_MAX_REDIRECT_HOPS,
    DEFAULT_UNION_NAME,
    ERROR_MAX_HOPS,
    NS_ARTICLE,
    NS_TALK,
)
from wiki_genre_signals.diagnostics import Diagnostics, WarningKind
from wiki_genre_signals.dump_ingest import PageRecord
from wiki_genre_signals.errors import EmptyTitleError
from wiki_genre_signals.wikitext import (
    NAMESPACES,
    Template,
    Title,
    normalize_template_name,
    normalize_title,
    parse_templates,
    strip_noise,
)

_SLUG_RE = re.compile(r"[^a-z0-9]+")


@dataclass(frozen=True)
class RequiredParam:
    """Task-force predicate: the banner must carry ``key`` with an accepted value."""

    key: str
    accepted_values: frozenset[str] = DEFAULT_ACCEPTED_VALUES

    def accepts(self, template: Template) -> bool:
        value = template.param(self.key)
        return value is not None and value.strip().casefold() in self.accepted_values


@dataclass(frozen=True)
class WikiProjectSpec:
    """One seed project: its set name, banner names (with aliases) and optional predicate."""

    set_name: str
    banner_templates: frozenset[str]
    required_param: RequiredParam | None = None

    def __post_init__(self) -> None:
        if not self.banner_templates:
            raise ValueError(f"Project {self.set_name!r} has no banner templates")

    @classmethod
    def create(
        cls,
        set_name: str,
        banner_templates: Iterable[str],
        required_param: RequiredParam | None = None,
    ) -> WikiProjectSpec:
        """Build a spec, normalizing banner names the way template names are parsed."""
        names = frozenset(
            name
            for name in (normalize_template_name(raw) for raw in banner_templates)
            if name is not None
        )
        return cls(set_name, names, required_param)

    def matches(self, templates: Iterable[Template]) -> bool:
        for template in templates:
            if template.name not in self.banner_templates:
                continue
            if self.required_param is None or self.required_param.accepts(template):
                return True
        return False


@dataclass(frozen=True)
class SeedSet:
    """A named set of article-namespace titles, redirects already resolved."""

    name: str
    members: frozenset[Title]

    def __post_init__(self) -> None:
        stray = [title for title in self.members if title.namespace != NS_ARTICLE]
        if stray:
            raise ValueError(f"Seed set {self.name!r} holds non-article titles: {stray[:3]}")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, title: object) -> bool:
        return title in self.members


@dataclass(frozen=True)
class SeedSets:
    """Per-project sets in config order plus their deduplicated union."""

    subsets: tuple[SeedSet, ...]
    union: SeedSet

    @property
    def duplicate_count(self) -> int:
        """Memberships lost to deduplication: sum of subset sizes minus union size."""
        return sum(len(subset) for subset in self.subsets) - len(self.union)

    def overlaps(self) -> list[tuple[str, str, int]]:
        return [
            (a.name, b.name, len(a.members & b.members))
            for a, b in itertools.combinations(self.subsets, 2)
        ]


@dataclass(frozen=True)
class ResolvedTitle:
    title: Title
    flagged: bool = False
    reason: WarningKind | None = field(default=None, compare=False)


def match_banners(talk_wikitext: str, specs: Iterable[WikiProjectSpec]) -> set[str]:
    """Return the names of all specs whose banner appears on the talk page.

    Banners wrapped in a banner shell are found too, since nested templates are parsed.
    """
    templates = parse_templates(strip_noise(talk_wikitext))
    return {spec.set_name for spec in specs if spec.matches(templates)}


def build_redirect_map(
    pages: Iterable[PageRecord],
    namespaces: Mapping[str, int] = NAMESPACES,
    diagnostics: Diagnostics | None = None,
) -> dict[Title, Title]:
    """Map every article-namespace redirect page to its normalized target."""
    redirects: dict[Title, Title] = {}
    for page in pages:
        if page.namespace != NS_ARTICLE or page.redirect_target is None:
            continue
        try:
            source = normalize_title(page.title, namespaces)
            target = normalize_title(page.redirect_target, namespaces)
        except EmptyTitleError as exc:
            if diagnostics is not None:
                diagnostics.warn(WarningKind.EMPTY_TITLE, "Page %d: %s", page.page_id, exc)
            continue
        redirects[source] = target
    return redirects


def resolve(
    title: Title,
    redirect_map: Mapping[Title, Title],
    max_hops: int = DEFAULT_MAX_REDIRECT_HOPS,
) -> ResolvedTitle:
    """Follow redirects from *title* for at most ``max_hops`` steps.

    A cycle or an exhausted hop budget returns the last title reached, flagged.
    """
    if max_hops < 1:
        raise ValueError(ERROR_MAX_HOPS.format(value=max_hops))
    current = title
    seen = {title}
    for _ in range(max_hops):
        target = redirect_map.get(current)
        if target is None:
            return ResolvedTitle(current)
        current = target
        if current in seen:
            return ResolvedTitle(current, True, WarningKind.REDIRECT_CYCLE)
        seen.add(current)
    if current in redirect_map:
        return ResolvedTitle(current, True, WarningKind.REDIRECT_HOP_LIMIT)
    return ResolvedTitle(current)


def scan_talk_page(
    page: PageRecord,
    specs: Iterable[WikiProjectSpec],
    namespaces: Mapping[str, int] = NAMESPACES,
) -> tuple[Title, frozenset[str]] | None:
    """Return (subject title, matched set names) for a banner-carrying talk page."""
    if page.namespace != NS_TALK or page.redirect_target is not None:
        return None
    matched = match_banners(page.wikitext, specs)
    if not matched:
        return None
    try:
        title = normalize_title(page.title, namespaces)
    except EmptyTitleError:
        return None
    return Title(NS_ARTICLE, title.name), frozenset(matched)


def assemble_seed_sets(
    matches: Iterable[tuple[Title, Collection[str]]],
    specs: Iterable[WikiProjectSpec],
    redirect_map: Mapping[Title, Title],
    *,
    existing: Collection[Title] | None = None,
    max_hops: int = DEFAULT_MAX_REDIRECT_HOPS,
    union_name: str = DEFAULT_UNION_NAME,
    diagnostics: Diagnostics | None = None,
) -> SeedSets:
    """Resolve banner matches to article titles and group them into sets.

    The result does not depend on the order of *matches*.
    """
    diagnostics = diagnostics if diagnostics is not None else Diagnostics()
    spec_list = list(specs)
    members: dict[str, set[Title]] = {spec.set_name: set() for spec in spec_list}
    for subject, set_names in matches:
        resolved = resolve(subject, redirect_map, max_hops)
        if resolved.flagged and resolved.reason is not None:
            diagnostics.warn(resolved.reason, "Unresolvable redirect for %s", subject)
            continue
        target = resolved.title
        if target.namespace != NS_ARTICLE or (existing is not None and target not in existing):
            diagnostics.warn(
                WarningKind.MISSING_SUBJECT,
                "No article for talk subject %s (-> %s)",
                subject,
                target,
            )
            continue
        for name in set_names:
            if name in members:
                members[name].add(target)

    subsets = tuple(SeedSet(spec.set_name, frozenset(members[spec.set_name])) for spec in spec_list)
    union = SeedSet(
        union_name, frozenset(itertools.chain.from_iterable(s.members for s in subsets))
    )
    return SeedSets(subsets, union)


def build_seed_sets(
    talk_pages: Iterable[PageRecord],
    specs: Iterable[WikiProjectSpec],
    redirect_map: Mapping[Title, Title],
    *,
    existing: Collection[Title] | None = None,
    max_hops: int = DEFAULT_MAX_REDIRECT_HOPS,
    union_name: str = DEFAULT_UNION_NAME,
    namespaces: Mapping[str, int] = NAMESPACES,
    diagnostics: Diagnostics | None = None,
) -> SeedSets:
    """Build per-project seed sets and their union from a stream of talk pages."""
    spec_list = list(specs)
    matches = (
        scanned
        for scanned in (scan_talk_page(page, spec_list, namespaces) for page in talk_pages)
        if scanned is not None
    )
    return assemble_seed_sets(
        matches,
        spec_list,
        redirect_map,
        existing=existing,
        max_hops=max_hops,
        union_name=union_name,
        diagnostics=diagnostics,
    )


def slugify(name: str) -> str:
    """File-name stem for a set name, e.g. "SF/F baseline" -> "sf-f-baseline"."""
    return _SLUG_RE.sub("-", name.casefold()).strip("-") or "set"


def write_seed_file(path: Path, seed_set: SeedSet) -> None:
    """Write one title per line, sorted, UTF-8 with LF endings."""
    lines = "".join(f"{title.name}\n" for title in sorted(seed_set.members))
    path.write_text(lines, encoding="utf-8", newline="\n")


def read_seed_file(path: Path, name: str) -> SeedSet:
    """Load a seed file written by ``write_seed_file``; non-article lines are ignored."""
    lines = path.read_text(encoding="utf-8").splitlines()
    titles = (normalize_title(line) for line in lines if line.strip())
    return SeedSet(name, frozenset(title for title in titles if title.namespace == NS_ARTICLE))


def write_redirect_map(path: Path, redirect_map: Mapping[Title, Title]) -> None:
    """Write ``source<TAB>target`` rows sorted by source, with a header row."""
    rows = [f"{source}\t{target}\n" for source, target in sorted(redirect_map.items())]
    path.write_text("source\ttarget\n" + "".join(rows), encoding="utf-8", newline="\n")


def read_redirect_map(
    path: Path,
    namespaces: Mapping[str, int] = NAMESPACES,
) -> dict[Title, Title]:
    redirects: dict[Title, Title] = {}
    for line in path.read_text(encoding="utf-8").splitlines()[1:]:
        source, _, target = line.partition("\t")
        if source and target:
            redirects[normalize_title(source, namespaces)] = normalize_title(target, namespaces)
    return redirects
