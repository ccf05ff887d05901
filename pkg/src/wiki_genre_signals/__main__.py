"""CLI entrypoint for the genre signal pipeline."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from wiki_genre_signals.config import PipelineConfig, load_config
from wiki_genre_signals.constants import (
    DEFAULT_CONFIG_FILENAME,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_TOP_K,
    ERROR_CONFIG_INVALID,
)
from wiki_genre_signals.report import (
    cmd_coverage,
    cmd_plotdata,
    cmd_seeds,
    cmd_signals,
    default_plotdata_path,
)
from wiki_genre_signals.signals import SignalKind

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=Path,
        default=None,
        help=f"Path to the pipeline config (default: {DEFAULT_CONFIG_FILENAME})",
    )
    common.add_argument(
        "--output",
        type=Path,
        default=None,
        help="Output directory (overrides config output_dir)",
    )
    common.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker processes for dump parsing (overrides config)",
    )
    mode = common.add_mutually_exclusive_group()
    mode.add_argument(
        "--strict",
        dest="strict",
        action="store_true",
        default=None,
        help="Abort on malformed input (default)",
    )
    mode.add_argument(
        "--lenient",
        dest="strict",
        action="store_false",
        help="Count and skip malformed input instead of aborting",
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    verbosity.add_argument(
        "--quiet",
        action="store_true",
        help="Hide progress bars and log only warnings",
    )
    return common


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="genre-signals",
        description="Build WikiProject seed sets and compare their Wikipedia/Wikidata signals.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(
        "seeds",
        parents=[common],
        help="Scan talk pages for WikiProject banners and write seed sets",
    )
    commands.add_parser(
        "signals",
        parents=[common],
        help="Tally lead links, categories and Wikidata types for every seed set",
    )

    coverage = commands.add_parser(
        "coverage",
        parents=[common],
        help="Report how many articles carrying each key fall inside a set",
    )
    coverage.add_argument("--keys", type=Path, required=True, help="File with one key per line")
    coverage.add_argument(
        "--kind",
        choices=[kind.value for kind in SignalKind],
        default=SignalKind.LEAD_LINK.value,
        help="Signal kind of the tables to compare (default: lead_link)",
    )
    coverage.add_argument("--set", dest="set_name", default=None, help="Set name (default: union)")
    coverage.add_argument(
        "--property",
        default=None,
        help="Property id for --kind claim (e.g. P136)",
    )

    plotdata = commands.add_parser(
        "plotdata",
        parents=[common],
        help="Write the top-k rows of a table for external plotting",
    )
    plotdata.add_argument("--table", type=Path, required=True, help="Table file (.json or .tsv)")
    plotdata.add_argument("-k", type=int, default=None, help="Number of rows (default: config)")
    plotdata.add_argument("--out", type=Path, default=None, help="Output file")
    return parser.parse_args(argv)


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def load_effective_config(args: argparse.Namespace) -> PipelineConfig:
    """Load the config file and apply command-line overrides."""
    config = load_config(args.config or Path(DEFAULT_CONFIG_FILENAME))
    if args.output is not None:
        config = replace(config, output_dir=args.output.resolve())
    if args.workers is not None:
        if args.workers < 1:
            raise ValueError(ERROR_CONFIG_INVALID.format(field="workers", reason="must be >= 1"))
        config = replace(config, workers=args.workers)
    if args.strict is not None:
        config = replace(config, strict=args.strict)
    return config


def _plotdata(args: argparse.Namespace) -> None:
    config_path = args.config or Path(DEFAULT_CONFIG_FILENAME)
    if args.config is not None or config_path.exists():
        config = load_effective_config(args)
        output_dir, top_k = config.output_dir, config.top_k
    else:
        output_dir = (args.output or Path(DEFAULT_OUTPUT_DIR)).resolve()
        top_k = {"default": DEFAULT_TOP_K}
    out_path = args.out or default_plotdata_path(output_dir, args.table)
    cmd_plotdata(args.table, out_path, k=args.k, top_k_config=top_k)


def main(argv: list[str] | None = None) -> None:
    """Main CLI flow."""
    args = parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    progress = not args.quiet and sys.stderr.isatty()

    try:
        if args.command == "seeds":
            cmd_seeds(load_effective_config(args), progress=progress)
        elif args.command == "signals":
            cmd_signals(load_effective_config(args), progress=progress)
        elif args.command == "coverage":
            config = load_effective_config(args)
            kind = SignalKind(args.kind)
            if (kind is SignalKind.CLAIM) != (args.property is not None):
                raise ValueError(
                    ERROR_CONFIG_INVALID.format(
                        field="--property", reason="required with --kind claim and only then"
                    )
                )
            cmd_coverage(
                config.output_dir,
                args.keys,
                kind=kind,
                set_name=args.set_name or config.union_name,
                property_id=args.property,
            )
        else:
            _plotdata(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"Error: {exc}")
        sys.exit(1)


if __name__ == "__main__":
    main()
