"""Centralized string constants and defaults for the signal pipeline."""

# Error messages
ERROR_CONFIG_MISSING = "Configuration file not found: {path}"
ERROR_CONFIG_FIELD_MISSING = "Required config field missing: {field}"
ERROR_CONFIG_INVALID = "Invalid config value for {field}: {reason}"
ERROR_PROJECT_INVALID = "Invalid project spec #{index}: {reason}"
ERROR_DUMP_NOT_FOUND = "Dump file not found: {path}"
ERROR_INDEX_WITHOUT_BZ2 = "Multistream index given for a non-bz2 dump: {path}"
ERROR_MALFORMED_XML = "Malformed XML in {path}: {reason}"
ERROR_NOT_MEDIAWIKI = "Not a MediaWiki export (root element <{tag}>): {path}"
ERROR_UNSUPPORTED_SCHEMA = "Unsupported export schema {version} in {path} (supported: 0.8-0.11)"
ERROR_HISTORY_DUMP = "Page {page_id} has {count} revisions; history dumps are not supported"
ERROR_UNDECLARED_NAMESPACE = "Page {page_id} uses undeclared namespace {namespace}"
ERROR_BAD_PAGE = "Page element without a valid {field}: {value!r}"
ERROR_MALFORMED_INDEX_LINE = "Malformed multistream index line {line_number}: {line!r}"
ERROR_INDEX_NOT_SORTED = "Multistream index offsets decrease at line {line_number}"
ERROR_EMPTY_TITLE = "Empty title: {raw!r}"
ERROR_MALFORMED_JSON = "Malformed Wikidata JSON at line {line_number}: {reason}"
ERROR_DUPLICATE_ARTICLE = "Article seen twice while tallying {set_name}: {title}"
ERROR_KIND_MISMATCH = "Cannot combine tables: {left} vs {right}"
ERROR_MAX_HOPS = "max_hops must be >= 1, got {value}"
ERROR_TOP_K = "k must be >= 1, got {value}"
ERROR_SEEDS_MISSING = "Seed directory not found (run `seeds` first): {path}"
ERROR_TABLE_MISSING = "Signal table not found (run `signals` first): {path}"
ERROR_TABLE_FORMAT = "Unrecognized table file: {path}"
ERROR_KEYS_MISSING = "Key list not found: {path}"

# MediaWiki export schema
SUPPORTED_SCHEMA_VERSIONS = ("0.8", "0.9", "0.10", "0.11")
EXPORT_ROOT_TAG = "mediawiki"

# Namespaces
NS_ARTICLE = 0
NS_TALK = 1
NS_CATEGORY = 14

# Canonical namespace names (enwiki), used for rendering titles.
NAMESPACE_NAMES: dict[int, str] = {
    -2: "Media",
    -1: "Special",
    1: "Talk",
    2: "User",
    3: "User talk",
    4: "Wikipedia",
    5: "Wikipedia talk",
    6: "File",
    7: "File talk",
    8: "MediaWiki",
    9: "MediaWiki talk",
    10: "Template",
    11: "Template talk",
    12: "Help",
    13: "Help talk",
    14: "Category",
    15: "Category talk",
    100: "Portal",
    101: "Portal talk",
    118: "Draft",
    119: "Draft talk",
    710: "TimedText",
    711: "TimedText talk",
    828: "Module",
    829: "Module talk",
}

NAMESPACE_ALIASES: dict[str, int] = {
    "wp": 4,
    "project": 4,
    "project talk": 5,
    "wt": 5,
    "image": 6,
    "image talk": 7,
}

# Language editions and sister projects; a link with one of these prefixes leaves the wiki.
INTERWIKI_PREFIXES = frozenset(
    {
        "ar", "bg", "ca", "cs", "da", "de", "el", "eo", "es", "et", "eu", "fa", "fi", "fr",
        "gl", "he", "hi", "hr", "hu", "hy", "id", "it", "ja", "ka", "kk", "ko", "la", "lt",
        "ms", "nl", "nn", "no", "pl", "pt", "ro", "ru", "sh", "simple", "sk", "sl", "sr",
        "sv", "ta", "th", "tr", "uk", "ur", "uz", "vi", "war", "zh",
        "commons", "d", "m", "meta", "mw", "n", "q", "s", "species", "w", "wikt",
        "wikibooks", "wikidata", "wikinews", "wikipedia", "wikiquote", "wikisource",
        "wikispecies", "wikiversity", "wikivoyage", "wiktionary", "v", "voy", "b", "c",
    }
)

# Wikitext
INFOBOX_PREFIX = "infobox"
NOISE_TAGS = ("nowiki", "pre", "source", "syntaxhighlight")
TEMPLATE_NAMESPACE_PREFIX = "template:"

# Seed sets
DEFAULT_ACCEPTED_VALUES = frozenset({"yes", "y", "1", "true"})
DEFAULT_MAX_REDIRECT_HOPS = 5
DEFAULT_UNION_NAME = "SF/F baseline"

# Used when a config file has no "projects" key.
DEFAULT_PROJECTS: tuple[dict[str, object], ...] = (
    {
        "set_name": "Fantasy",
        "banner_templates": ["WikiProject Novels", "WPNOVELS", "WikiProject Novel", "Novels"],
        "required_param": {"key": "fantasy-task-force"},
    },
    {
        "set_name": "Science Fiction",
        "banner_templates": [
            "WikiProject Science Fiction",
            "WPSF",
            "WikiProject Sci-fi",
            "WikiProject Science fiction",
            "Science Fiction",
        ],
    },
    {
        "set_name": "Science Fiction Novels",
        "banner_templates": ["WikiProject Novels", "WPNOVELS", "WikiProject Novel", "Novels"],
        "required_param": {"key": "sf-task-force"},
    },
)

# Wikidata
DEFAULT_PROPERTIES = ("P31",)
INSTANCE_OF = "P31"
QID_PATTERN = r"^Q[1-9][0-9]*$"
PID_PATTERN = r"^P[1-9][0-9]*$"
DEPRECATED_RANK = "deprecated"

# Pipeline
DEFAULT_CONFIG_FILENAME = "config.json"
DEFAULT_OUTPUT_DIR = "out"
DEFAULT_TOP_K = 20
DEFAULT_WORKERS = 1
PAGE_BATCH_SIZE = 500
ENTITY_BATCH_SIZE = 2000
READ_BLOCK_SIZE = 1024 * 1024
WARNING_LOG_LIMIT = 20

# Output layout
SEEDS_DIRNAME = "seeds"
SIGNALS_DIRNAME = "signals"
COVERAGE_DIRNAME = "coverage"
PLOTDATA_DIRNAME = "plotdata"
MANIFEST_FILENAME = "manifest.json"
SUMMARY_FILENAME = "summary.tsv"
OVERLAPS_FILENAME = "overlaps.tsv"
REDIRECTS_FILENAME = "redirects.tsv"
ALIGNMENT_FILENAME = "alignment.tsv"
GLOBAL_TABLE_STEM = "global"
SEED_FILE_SUFFIX = ".txt"

# Environment
ENV_SLOW_TESTS = "WIKI_GENRE_SIGNALS_SLOW"
