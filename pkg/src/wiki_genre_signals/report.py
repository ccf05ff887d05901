"""Pipeline stages behind the CLI subcommands: seeds, signals, coverage and plotdata.

Each stage reads files written by the previous one and writes its own directory under
the output root, together with a manifest of inputs, parameters and warning counts.
"""

from __future__ import annotations

import functools
import hashlib
import itertools
import logging
import sys
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import orjson
from tqdm import tqdm

from wiki_genre_signals.config import PipelineConfig
from wiki_genre_signals.constants import (
    ALIGNMENT_FILENAME,
    COVERAGE_DIRNAME,
    DEFAULT_TOP_K,
    ENTITY_BATCH_SIZE,
    ERROR_CONFIG_FIELD_MISSING,
    ERROR_DUPLICATE_ARTICLE,
    ERROR_KEYS_MISSING,
    ERROR_SEEDS_MISSING,
    ERROR_TABLE_FORMAT,
    ERROR_TOP_K,
    GLOBAL_TABLE_STEM,
    MANIFEST_FILENAME,
    NS_ARTICLE,
    OVERLAPS_FILENAME,
    PLOTDATA_DIRNAME,
    REDIRECTS_FILENAME,
    SEED_FILE_SUFFIX,
    SEEDS_DIRNAME,
    SIGNALS_DIRNAME,
    SUMMARY_FILENAME,
)
from wiki_genre_signals.diagnostics import Diagnostics, WarningKind
from wiki_genre_signals.dump_ingest import DumpSource
from wiki_genre_signals.errors import DuplicateArticleError, EmptyTitleError
from wiki_genre_signals.parallel import PageJob, iter_page_jobs, job_pages, map_jobs
from wiki_genre_signals.seedset import (
    SeedSet,
    SeedSets,
    WikiProjectSpec,
    assemble_seed_sets,
    build_redirect_map,
    read_redirect_map,
    read_seed_file,
    resolve,
    scan_talk_page,
    slugify,
    write_redirect_map,
    write_seed_file,
)
from wiki_genre_signals.signals import (
    CoverageStat,
    FrequencyTable,
    SignalKind,
    TableBuilder,
    TopEntry,
    coverage,
    read_table,
    read_table_rows,
    top_k,
    write_coverage_tsv,
    write_plotdata,
    write_table_json,
    write_table_tsv,
)
from wiki_genre_signals.wikidata import (
    AlignmentRow,
    SitelinkIndex,
    alignment_summary,
    iter_entity_lines,
    parse_entity_batch,
    property_distribution,
    table_kind,
    write_alignment_tsv,
)
from wiki_genre_signals.wikitext import (
    Title,
    extract_categories,
    extract_lead,
    normalize_title,
)

logger = logging.getLogger(__name__)

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS
_HASH_BLOCK = 1024 * 1024


@dataclass(frozen=True)
class ScanContext:
    """Read-only parameters shipped to every worker; all fields are picklable."""

    namespaces: Mapping[str, int]
    interwiki: frozenset[str] = frozenset()
    specs: tuple[WikiProjectSpec, ...] = ()
    collect_titles: bool = True
    collect_matches: bool = True


@dataclass(frozen=True)
class SeedScan:
    pages: int
    articles: tuple[Title, ...] = ()
    redirects: tuple[tuple[Title, Title], ...] = ()
    matches: tuple[tuple[Title, frozenset[str]], ...] = ()
    warnings: Mapping[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class ArticleSignals:
    """Signals of one article: lead-section link targets (unresolved) and categories."""

    title: Title
    lead_links: tuple[Title, ...]
    categories: tuple[str, ...]


@dataclass(frozen=True)
class SignalScan:
    pages: int
    articles: tuple[ArticleSignals, ...] = ()
    warnings: Mapping[str, int] = field(default_factory=dict)


def _article_title(
    page_title: str,
    page_id: int,
    context: ScanContext,
    diagnostics: Diagnostics,
) -> Title | None:
    try:
        return normalize_title(page_title, context.namespaces)
    except EmptyTitleError as exc:
        diagnostics.warn(WarningKind.EMPTY_TITLE, "Page %d: %s", page_id, exc)
        return None


def scan_for_seeds(job: PageJob, context: ScanContext) -> SeedScan:
    """Collect article titles, redirects and banner matches from one job."""
    diagnostics = Diagnostics()
    pages = job_pages(job)
    articles: list[Title] = []
    redirects: dict[Title, Title] = {}
    if context.collect_titles:
        for page in pages:
            if page.namespace != NS_ARTICLE or page.redirect_target is not None:
                continue
            title = _article_title(page.title, page.page_id, context, diagnostics)
            if title is not None:
                articles.append(title)
        redirects = build_redirect_map(pages, context.namespaces, diagnostics)
    matches: list[tuple[Title, frozenset[str]]] = []
    if context.collect_matches:
        for page in pages:
            scanned = scan_talk_page(page, context.specs, context.namespaces)
            if scanned is not None:
                matches.append(scanned)
    return SeedScan(
        pages=len(pages),
        articles=tuple(articles),
        redirects=tuple(redirects.items()),
        matches=tuple(matches),
        warnings=dict(diagnostics.counts),
    )


def scan_for_signals(job: PageJob, context: ScanContext) -> SignalScan:
    """Extract lead links and categories from every article page in one job."""
    diagnostics = Diagnostics()
    pages = job_pages(job)
    articles: list[ArticleSignals] = []
    for page in pages:
        if page.namespace != NS_ARTICLE or page.redirect_target is not None:
            continue
        title = _article_title(page.title, page.page_id, context, diagnostics)
        if title is None:
            continue
        lead = extract_lead(page.wikitext, context.namespaces, context.interwiki)
        categories = extract_categories(page.wikitext, context.namespaces, context.interwiki)
        articles.append(
            ArticleSignals(
                title,
                tuple(dict.fromkeys(lead.links)),
                tuple(category.name for category in categories),
            )
        )
    return SignalScan(len(pages), tuple(articles), dict(diagnostics.counts))


def _progress(progress: bool, unit: str, desc: str) -> tqdm[Any]:
    return tqdm(unit=unit, desc=desc, file=sys.stderr, disable=not progress, leave=False)


def file_digest(path: Path) -> dict[str, Any]:
    """Basename, size and sha256 of an input file."""
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        while block := handle.read(_HASH_BLOCK):
            digest.update(block)
    return {"name": path.name, "size": path.stat().st_size, "sha256": digest.hexdigest()}


def write_manifest(
    path: Path,
    stage: str,
    inputs: Iterable[Path],
    parameters: Mapping[str, Any],
    diagnostics: Diagnostics,
    outputs: Mapping[str, Any] | None = None,
) -> None:
    """Describe a stage run; contains no timestamps or absolute paths."""
    payload: dict[str, Any] = {
        "stage": stage,
        "inputs": [file_digest(p) for p in dict.fromkeys(inputs)],
        "parameters": dict(parameters),
        "warnings": diagnostics.as_dict(),
    }
    if outputs:
        payload["outputs"] = dict(outputs)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(payload, option=_JSON_OPTIONS) + b"\n")


def _dump_inputs(source: DumpSource) -> list[Path]:
    return [source.path] if source.index_path is None else [source.path, source.index_path]


def _write_tsv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> None:
    lines = ["\t".join(header), *("\t".join(str(cell) for cell in row) for row in rows)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _check_slugs(names: Iterable[str]) -> None:
    seen: dict[str, str] = {}
    for name in names:
        slug = slugify(name)
        if slug in seen or slug == GLOBAL_TABLE_STEM:
            other = seen.get(slug, GLOBAL_TABLE_STEM)
            raise ValueError(f"Set names {other!r} and {name!r} map to the same file {slug!r}")
        seen[slug] = name


def _project_parameters(config: PipelineConfig) -> list[dict[str, Any]]:
    projects: list[dict[str, Any]] = []
    for spec in config.projects:
        entry: dict[str, Any] = {
            "set_name": spec.set_name,
            "banner_templates": sorted(spec.banner_templates),
        }
        if spec.required_param is not None:
            entry["required_param"] = {
                "key": spec.required_param.key,
                "accepted_values": sorted(spec.required_param.accepted_values),
            }
        projects.append(entry)
    return projects


@dataclass
class _SeedAccumulator:
    articles: set[Title] = field(default_factory=set)
    redirects: dict[Title, Title] = field(default_factory=dict)
    matches: list[tuple[Title, frozenset[str]]] = field(default_factory=list)

    def add(self, scan: SeedScan) -> None:
        self.articles.update(scan.articles)
        for source, target in scan.redirects:
            self.redirects.setdefault(source, target)
        self.matches.extend(scan.matches)


def _run_seed_scan(
    source: DumpSource,
    context: ScanContext,
    accumulator: _SeedAccumulator,
    diagnostics: Diagnostics,
    workers: int,
    progress: bool,
) -> None:
    scan = functools.partial(scan_for_seeds, context=context)
    with _progress(progress, "page", source.path.name) as bar:
        for result in map_jobs(scan, iter_page_jobs(source), workers):
            accumulator.add(result)
            diagnostics.merge(result.warnings)
            bar.update(result.pages)


def seed_sets_from_dumps(
    config: PipelineConfig,
    diagnostics: Diagnostics,
    *,
    progress: bool = False,
) -> tuple[SeedSets, dict[Title, Title]]:
    """Scan the dumps and build the seed sets plus the article redirect map."""
    namespaces = dict(config.namespaces)
    accumulator = _SeedAccumulator()
    same_dump = config.talk_dump == config.articles_dump
    _run_seed_scan(
        config.articles_dump,
        ScanContext(namespaces, specs=config.projects, collect_matches=same_dump),
        accumulator,
        diagnostics,
        config.workers,
        progress,
    )
    if not same_dump:
        _run_seed_scan(
            config.talk_dump,
            ScanContext(namespaces, specs=config.projects, collect_titles=False),
            accumulator,
            diagnostics,
            config.workers,
            progress,
        )
    logger.info(
        "Found %d articles, %d redirects, %d banner-carrying talk pages",
        len(accumulator.articles),
        len(accumulator.redirects),
        len(accumulator.matches),
    )
    seed_sets = assemble_seed_sets(
        accumulator.matches,
        config.projects,
        accumulator.redirects,
        existing=accumulator.articles,
        max_hops=config.max_redirect_hops,
        union_name=config.union_name,
        diagnostics=diagnostics,
    )
    return seed_sets, accumulator.redirects


def write_seed_outputs(
    seeds_dir: Path,
    seed_sets: SeedSets,
    redirect_map: Mapping[Title, Title],
) -> list[Path]:
    """Write set files, summary, overlaps and the redirect map; return written paths."""
    seeds_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    summary_rows: list[tuple[str, int, str]] = []
    for seed_set in (*seed_sets.subsets, seed_sets.union):
        path = seeds_dir / f"{slugify(seed_set.name)}{SEED_FILE_SUFFIX}"
        write_seed_file(path, seed_set)
        written.append(path)
        summary_rows.append((seed_set.name, len(seed_set), path.name))

    summary = seeds_dir / SUMMARY_FILENAME
    _write_tsv(summary, ("set_name", "size", "file"), summary_rows)
    overlaps = seeds_dir / OVERLAPS_FILENAME
    _write_tsv(overlaps, ("set_a", "set_b", "shared"), seed_sets.overlaps())
    redirects = seeds_dir / REDIRECTS_FILENAME
    write_redirect_map(redirects, redirect_map)
    return [*written, summary, overlaps, redirects]


def cmd_seeds(config: PipelineConfig, *, progress: bool = False) -> SeedSets:
    """Build per-project seed sets and their union, and write them under ``seeds/``."""
    diagnostics = Diagnostics()
    _check_slugs([spec.set_name for spec in config.projects] + [config.union_name])
    if not config.projects:
        diagnostics.warn(WarningKind.NO_PROJECTS, "No WikiProjects configured; seed sets are empty")

    seed_sets, redirect_map = seed_sets_from_dumps(config, diagnostics, progress=progress)
    seeds_dir = config.output_dir / SEEDS_DIRNAME
    written = write_seed_outputs(seeds_dir, seed_sets, redirect_map)

    inputs = _dump_inputs(config.articles_dump) + _dump_inputs(config.talk_dump)
    write_manifest(
        seeds_dir / MANIFEST_FILENAME,
        "seeds",
        inputs,
        {
            "projects": _project_parameters(config),
            "union_name": config.union_name,
            "max_redirect_hops": config.max_redirect_hops,
        },
        diagnostics,
        {
            "sizes": {s.name: len(s) for s in (*seed_sets.subsets, seed_sets.union)},
            "duplicates": seed_sets.duplicate_count,
        },
    )

    for seed_set in seed_sets.subsets:
        print(f"{seed_set.name}: {len(seed_set)} articles")
    print(f"{seed_sets.union.name}: {len(seed_sets.union)} articles")
    print(f"Duplicate memberships: {seed_sets.duplicate_count}")
    print(f"Wrote {len(written)} files to {seeds_dir}")
    for line in diagnostics.summary_lines():
        print(line)
    return seed_sets


def load_seed_sets(seeds_dir: Path, union_name: str) -> SeedSets:
    """Read the sets listed in ``summary.tsv``; the row named *union_name* is the union."""
    summary = seeds_dir / SUMMARY_FILENAME
    if not summary.exists():
        raise FileNotFoundError(ERROR_SEEDS_MISSING.format(path=seeds_dir))
    subsets: list[SeedSet] = []
    union: SeedSet | None = None
    for line in summary.read_text(encoding="utf-8").splitlines()[1:]:
        name, _, filename = line.split("\t")
        seed_set = read_seed_file(seeds_dir / filename, name)
        if name == union_name:
            union = seed_set
        else:
            subsets.append(seed_set)
    if union is None:
        raise ValueError(f"Union set {union_name!r} not listed in {summary}")
    return SeedSets(tuple(subsets), union)


def table_dirname(kind: SignalKind, property_id: str | None = None) -> str:
    return kind.value if property_id is None else f"{kind.value}-{property_id.casefold()}"


class SignalTables:
    """Builders for one signal kind: one per seed set plus the global one."""

    def __init__(
        self,
        kind: SignalKind,
        seed_sets: Sequence[SeedSet],
        property_id: str | None = None,
    ) -> None:
        self.kind = kind
        self.property_id = property_id
        self._sets = [
            TableBuilder(kind, s.name, s, property_id=property_id) for s in seed_sets
        ]
        self._global = TableBuilder(kind, GLOBAL_TABLE_STEM, None, property_id=property_id)

    def add(self, title: Title, keys: Sequence[str]) -> None:
        for builder in self._sets:
            builder.add(title, keys)
        self._global.add(title, keys)

    def build(self) -> tuple[list[FrequencyTable], FrequencyTable]:
        return [builder.build() for builder in self._sets], self._global.build()


def _resolved_link_keys(
    links: Iterable[Title],
    redirect_map: Mapping[Title, Title],
    max_hops: int,
    diagnostics: Diagnostics,
) -> list[str]:
    keys: dict[str, None] = {}
    for link in links:
        resolved = resolve(link, redirect_map, max_hops)
        if resolved.flagged and resolved.reason is not None:
            diagnostics.warn(resolved.reason, "Unresolvable lead link target %s", link)
            continue
        if resolved.title.namespace == NS_ARTICLE:
            keys.setdefault(resolved.title.name)
    return list(keys)


@dataclass
class _ArticlePass:
    articles: set[Title]
    lead_links: SignalTables
    categories: SignalTables


def _scan_article_signals(
    config: PipelineConfig,
    all_sets: Sequence[SeedSet],
    redirect_map: Mapping[Title, Title],
    diagnostics: Diagnostics,
    progress: bool,
) -> _ArticlePass:
    context = ScanContext(dict(config.namespaces), config.interwiki_prefixes)
    scan = functools.partial(scan_for_signals, context=context)
    result = _ArticlePass(
        articles=set(),
        lead_links=SignalTables(SignalKind.LEAD_LINK, all_sets),
        categories=SignalTables(SignalKind.CATEGORY, all_sets),
    )
    jobs = iter_page_jobs(config.articles_dump)
    with _progress(progress, "page", config.articles_dump.path.name) as bar:
        for scanned in map_jobs(scan, jobs, config.workers):
            diagnostics.merge(scanned.warnings)
            bar.update(scanned.pages)
            for article in scanned.articles:
                if article.title in result.articles:
                    message = ERROR_DUPLICATE_ARTICLE.format(
                        set_name=GLOBAL_TABLE_STEM, title=article.title
                    )
                    if config.strict:
                        raise DuplicateArticleError(message)
                    diagnostics.warn(WarningKind.DUPLICATE_ARTICLE, message)
                    continue
                result.articles.add(article.title)
                lead_keys = _resolved_link_keys(
                    article.lead_links, redirect_map, config.max_redirect_hops, diagnostics
                )
                result.lead_links.add(article.title, lead_keys)
                result.categories.add(article.title, article.categories)
    return result


def _entity_batches(
    path: Path, strict: bool, diagnostics: Diagnostics
) -> Iterator[tuple[tuple[int, bytes], ...]]:
    lines = iter_entity_lines(path, strict=strict, diagnostics=diagnostics)
    while batch := tuple(itertools.islice(lines, ENTITY_BATCH_SIZE)):
        yield batch


@dataclass
class _WikidataPass:
    index: SitelinkIndex
    global_tables: dict[str, FrequencyTable]


def _scan_wikidata(
    config: PipelineConfig,
    wikidata_dump: Path,
    union: SeedSet,
    articles: set[Title],
    diagnostics: Diagnostics,
    progress: bool,
) -> _WikidataPass:
    index = SitelinkIndex(wanted=union.members)
    builders: dict[str, TableBuilder] = {}
    for pid in config.properties:
        kind, table_property = table_kind(pid)
        builders[pid] = TableBuilder(kind, GLOBAL_TABLE_STEM, None, property_id=table_property)

    parse = functools.partial(
        parse_entity_batch, properties=config.properties, strict=config.strict
    )
    with _progress(progress, "entity", wikidata_dump.name) as bar:
        for records, warnings in map_jobs(
            parse, _entity_batches(wikidata_dump, config.strict, diagnostics), config.workers
        ):
            diagnostics.merge(warnings)
            bar.update(len(records))
            for record in records:
                if not index.add(record, diagnostics):
                    continue
                title = record.enwiki_title
                if title is None or title not in articles:
                    continue
                for pid, builder in builders.items():
                    builder.add(title, record.values(pid))

    # Articles without an item still count toward the global denominator.
    global_tables = {
        pid: builder.build(partial=True).padded_to(len(articles))
        for pid, builder in builders.items()
    }
    logger.info("Aligned %d seed articles with Wikidata items", len(index))
    return _WikidataPass(index, global_tables)


def _write_tables(
    signals_dir: Path,
    set_tables: Sequence[FrequencyTable],
    global_table: FrequencyTable,
) -> list[Path]:
    directory = signals_dir / table_dirname(global_table.signal_kind, global_table.property_id)
    written: list[Path] = []
    for table in (*set_tables, global_table):
        stem = slugify(table.set_name) if table is not global_table else GLOBAL_TABLE_STEM
        tsv = directory / f"{stem}.tsv"
        json_path = directory / f"{stem}.json"
        write_table_tsv(tsv, table)
        write_table_json(json_path, table)
        written.extend([tsv, json_path])
    return written


def cmd_signals(config: PipelineConfig, *, progress: bool = False) -> list[Path]:
    """Compute lead-link, category and Wikidata property tables for every seed set."""
    if config.wikidata_dump is None:
        raise ValueError(ERROR_CONFIG_FIELD_MISSING.format(field="wikidata_dump"))
    diagnostics = Diagnostics()
    seeds_dir = config.output_dir / SEEDS_DIRNAME
    seed_sets = load_seed_sets(seeds_dir, config.union_name)
    redirects_path = seeds_dir / REDIRECTS_FILENAME
    if not redirects_path.exists():
        raise FileNotFoundError(ERROR_SEEDS_MISSING.format(path=seeds_dir))
    redirect_map = read_redirect_map(redirects_path, config.namespaces)
    all_sets = [*seed_sets.subsets, seed_sets.union]

    article_pass = _scan_article_signals(config, all_sets, redirect_map, diagnostics, progress)
    wikidata_pass = _scan_wikidata(
        config, config.wikidata_dump, seed_sets.union, article_pass.articles, diagnostics, progress
    )

    signals_dir = config.output_dir / SIGNALS_DIRNAME
    written: list[Path] = []
    for tables in (article_pass.lead_links, article_pass.categories):
        set_tables, global_table = tables.build()
        written += _write_tables(signals_dir, set_tables, global_table)
    for pid in config.properties:
        set_tables = [property_distribution(s, wikidata_pass.index, pid) for s in all_sets]
        written += _write_tables(signals_dir, set_tables, wikidata_pass.global_tables[pid])

    alignment: list[AlignmentRow] = [
        alignment_summary(s, wikidata_pass.index, config.properties) for s in all_sets
    ]
    alignment_path = signals_dir / ALIGNMENT_FILENAME
    write_alignment_tsv(alignment_path, alignment, config.properties)
    written.append(alignment_path)

    seed_inputs = [seeds_dir / SUMMARY_FILENAME, redirects_path]
    seed_inputs += [seeds_dir / f"{slugify(s.name)}{SEED_FILE_SUFFIX}" for s in all_sets]
    write_manifest(
        signals_dir / MANIFEST_FILENAME,
        "signals",
        [*_dump_inputs(config.articles_dump), config.wikidata_dump, *seed_inputs],
        {
            "properties": list(config.properties),
            "strict": config.strict,
            "max_redirect_hops": config.max_redirect_hops,
            "union_name": config.union_name,
        },
        diagnostics,
        {
            "articles": len(article_pass.articles),
            "duplicate_sitelinks": wikidata_pass.index.duplicates,
        },
    )

    print(f"Articles scanned: {len(article_pass.articles)}")
    for row in alignment:
        print(f"{row.set_name}: {row.with_item}/{row.size} articles have a Wikidata item")
    print(f"Wrote {len(written)} files to {signals_dir}")
    for line in diagnostics.summary_lines():
        print(line)
    return written


def read_keys(path: Path, kind: SignalKind) -> list[str]:
    """Load one key per line; title kinds are normalized like table keys."""
    if not path.exists():
        raise FileNotFoundError(ERROR_KEYS_MISSING.format(path=path))
    keys: dict[str, None] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        raw = line.strip()
        if not raw:
            continue
        if kind in (SignalKind.LEAD_LINK, SignalKind.CATEGORY):
            try:
                raw = normalize_title(raw).name
            except EmptyTitleError:
                continue
        keys.setdefault(raw)
    return list(keys)


def coverage_rows(
    keys: Iterable[str],
    set_table: FrequencyTable,
    global_table: FrequencyTable,
) -> list[CoverageStat]:
    return [coverage(key, set_table, global_table) for key in keys]


def cmd_coverage(
    output_dir: Path,
    keys_path: Path,
    *,
    kind: SignalKind = SignalKind.LEAD_LINK,
    set_name: str,
    property_id: str | None = None,
) -> Path:
    """Report, per requested key, how many carrying articles fall inside the set."""
    diagnostics = Diagnostics()
    table_dir = output_dir / SIGNALS_DIRNAME / table_dirname(kind, property_id)
    set_path = table_dir / f"{slugify(set_name)}.json"
    global_path = table_dir / f"{GLOBAL_TABLE_STEM}.json"
    set_table = read_table(set_path)
    global_table = read_table(global_path)

    stats = coverage_rows(read_keys(keys_path, kind), set_table, global_table)
    coverage_dir = output_dir / COVERAGE_DIRNAME
    out_path = coverage_dir / f"{table_dirname(kind, property_id)}-{slugify(set_name)}.tsv"
    write_coverage_tsv(out_path, stats)
    write_manifest(
        coverage_dir / MANIFEST_FILENAME,
        "coverage",
        [set_path, global_path, keys_path],
        {"kind": kind.value, "set_name": set_name, "property_id": property_id},
        diagnostics,
    )
    print(f"Coverage of {len(stats)} keys in {set_name}: {out_path}")
    return out_path


def _limit(k: int | None, kind: str, top_k_config: Mapping[str, int]) -> int:
    default = top_k_config.get("default", DEFAULT_TOP_K)
    limit = k if k is not None else top_k_config.get(kind, default)
    if limit < 1:
        raise ValueError(ERROR_TOP_K.format(value=limit))
    return limit


def _table_entries(
    table_path: Path,
    k: int | None,
    top_k_config: Mapping[str, int],
) -> list[TopEntry]:
    if table_path.suffix == ".json":
        table = read_table(table_path)
        limit = _limit(k, table.signal_kind.value, top_k_config)
        return top_k(table, limit) if table.counts else []
    if table_path.suffix == ".tsv":
        # TSV tables carry no kind; the directory they were written to names it.
        kind = table_path.parent.name.partition("-")[0]
        return read_table_rows(table_path)[: _limit(k, kind, top_k_config)]
    raise ValueError(ERROR_TABLE_FORMAT.format(path=table_path))


def cmd_plotdata(
    table_path: Path,
    out_path: Path,
    *,
    k: int | None = None,
    top_k_config: Mapping[str, int] | None = None,
) -> Path:
    """Write the top-k rows of a signal table as a columnar file for plotting."""
    entries = _table_entries(table_path, k, top_k_config or {"default": DEFAULT_TOP_K})
    write_plotdata(out_path, entries)
    print(f"Wrote {len(entries)} rows to {out_path}")
    return out_path


def default_plotdata_path(output_dir: Path, table_path: Path) -> Path:
    """``plotdata/<kind>-<stem>.tsv`` under the output root."""
    return output_dir / PLOTDATA_DIRNAME / f"{table_path.parent.name}-{table_path.stem}.tsv"
