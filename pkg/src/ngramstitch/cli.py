"""Command-line interface: reconstruct, validate, shred, fetch."""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from .assembly import AssemblyConfig
from .pipeline import (
    DEFAULT_FETCH_TEMPLATE,
    EXIT_EMPTY_INPUT,
    EXIT_IO_ERROR,
    EmptyInputError,
    RunConfig,
    fetch_window,
    reconstruct_command,
    summary_lines,
    validate_command,
)
from .records import FieldMap, ParseError, record_to_json_dict
from .shredder import MODE_ALL_OCCURRENCES, MODE_DISTINCT_FIRST, ShredConfig, shred
from .similarity import format_report_table


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise click.UsageError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(config, dict):
        raise click.UsageError(f"config file {path} must hold a JSON object")
    return config


def _pick(flag, file_config: dict, key: str, default):
    """Flag value if given, else config-file value, else default."""
    if flag is not None:
        return flag
    return file_config.get(key, default)


def _parse_timestamp(value: str) -> datetime:
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        moment = datetime.fromisoformat(text)
    except ValueError:
        raise click.UsageError(f"not an ISO timestamp: {value!r}")
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return moment


def _parse_thresholds(value: str) -> list[float]:
    try:
        thresholds = [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.UsageError(f"thresholds must be comma-separated numbers: {value!r}")
    if any(not 0 <= t <= 1 for t in thresholds):
        raise click.UsageError("thresholds must lie in [0, 1]")
    return thresholds


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log detail (-v info, -vv debug).")
def main(verbose: int):
    """Rebuild full news-article text from web-ngrams record files."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("inputs", nargs=-1, required=True, type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(), help="Corpus NDJSON to write.")
@click.option("--config", "config_path", type=click.Path(), help="JSON config file; flags win.")
@click.option("--langs", help="Comma-separated language allow-list (e.g. 'en,it').")
@click.option("--url-include", multiple=True, help="Keep only URLs containing this substring (repeatable).")
@click.option("--url-exclude", multiple=True, help="Drop URLs containing this substring (repeatable).")
@click.option("--min-overlap", type=int, help="Smallest word overlap accepted for a merge.")
@click.option("--pos-window", type=int, help="Max position-decile distance for a merge.")
@click.option("--min-dup-run", type=int, help="Shortest adjacent duplicate run to collapse.")
@click.option("--workers", type=int, help="Parallel workers over URL groups (default 1).")
def reconstruct(inputs, output, config_path, langs, url_include, url_exclude,
                min_overlap, pos_window, min_dup_run, workers):
    """Reconstruct articles from record files (NDJSON, plain or .gz).

    INPUTS are record files or directories of them. Writes one article per
    line, sorted by URL, and a run summary to stderr.
    """
    file_config = _load_config_file(config_path)
    langs_value = _pick(langs, file_config, "langs", None)
    if isinstance(langs_value, str):
        langs_value = [part.strip() for part in langs_value.split(",") if part.strip()]

    try:
        assembly = AssemblyConfig(
            min_overlap=_pick(min_overlap, file_config, "min_overlap", 3),
            pos_window=_pick(pos_window, file_config, "pos_window", 10),
            min_dup_run=_pick(min_dup_run, file_config, "min_dup_run", 5),
        )
        run_config = RunConfig(
            inputs=list(inputs),
            output=output,
            assembly=assembly,
            langs=langs_value,
            url_include=list(url_include) or file_config.get("url_include", []),
            url_exclude=list(url_exclude) or file_config.get("url_exclude", []),
            workers=_pick(workers, file_config, "workers", 1),
            field_map=FieldMap.from_dict(file_config.get("field_map", {})),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))

    try:
        summary = reconstruct_command(run_config)
    except EmptyInputError as exc:
        click.echo(f"empty input: {exc}", err=True)
        sys.exit(EXIT_EMPTY_INPUT)
    except ParseError as exc:
        click.echo(f"unreadable input: {exc}", err=True)
        sys.exit(EXIT_IO_ERROR)
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(EXIT_IO_ERROR)
    for line in summary_lines(summary):
        click.echo(line, err=True)


@main.command()
@click.argument("reconstructed", type=click.Path())
@click.argument("reference", type=click.Path())
@click.option("--thresholds", default="0.6,0.7,0.8", show_default=True,
              help="Comma-separated Jaccard cutoffs for the filter columns.")
@click.option("--report-json", type=click.Path(), help="Write the machine-readable report here.")
@click.option("--report-table", type=click.Path(), help="Write the text table here (also printed).")
def validate(reconstructed, reference, thresholds, report_json, report_table):
    """Score a reconstructed corpus against a reference corpus.

    Both arguments are NDJSON files with at least {"url": ..., "text": ...}
    per line; articles are paired by exact URL match.
    """
    cutoffs = _parse_thresholds(thresholds)
    try:
        report, stats = validate_command(
            reconstructed, reference, cutoffs,
            report_json=report_json, report_table=report_table,
        )
    except (OSError, ValueError) as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(EXIT_IO_ERROR)
    click.echo(format_report_table(report))
    click.echo(
        f"pairs matched: {stats.matched}  "
        f"unmatched reconstructed: {stats.unmatched_reconstructed}  "
        f"unmatched reference: {stats.unmatched_reference}",
        err=True,
    )
    if stats.matched == 0:
        click.echo("warning: no matching URLs, nothing scored", err=True)


@main.command(name="shred")
@click.argument("sources", nargs=-1, required=True, type=click.Path())
@click.option("-o", "--output", required=True, type=click.Path(), help="Record NDJSON to write.")
@click.option("--reference-out", type=click.Path(),
              help="Also write a {url, text} reference corpus for validate.")
@click.option("--url-prefix", default="https://synthetic.test/", show_default=True,
              help="Article URLs are this prefix plus each source filename stem.")
@click.option("--lang", default="en", show_default=True)
@click.option("--window", type=int, default=7, show_default=True,
              help="Context words kept on each side.")
@click.option("--mode", type=click.Choice([MODE_ALL_OCCURRENCES, MODE_DISTINCT_FIRST]),
              default=MODE_ALL_OCCURRENCES, show_default=True)
@click.option("--drop-rate", type=float, default=0.0, show_default=True,
              help="Fraction of records randomly withheld.")
@click.option("--seed", type=int, default=0, show_default=True)
def shred_cmd(sources, output, reference_out, url_prefix, lang, window, mode, drop_rate, seed):
    """Shred plain-text articles into synthetic record files.

    Each SOURCE file becomes one article's worth of records, letting the
    whole reconstruct/validate chain run against known ground truth.
    """
    try:
        config = ShredConfig(window=window, mode=mode, drop_rate=drop_rate, seed=seed)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    prefix = url_prefix if url_prefix.endswith("/") else url_prefix + "/"

    try:
        with open(output, "w", encoding="utf-8") as out_fh:
            reference_fh = (
                open(reference_out, "w", encoding="utf-8") if reference_out else None
            )
            try:
                for source in sources:
                    path = Path(source)
                    text = path.read_text(encoding="utf-8")
                    url = prefix + path.stem
                    try:
                        records = shred(text, config, url=url, lang=lang)
                    except ValueError as exc:
                        raise click.UsageError(f"{source}: {exc}")
                    for record in records:
                        out_fh.write(json.dumps(record_to_json_dict(record), ensure_ascii=False))
                        out_fh.write("\n")
                    if reference_fh is not None:
                        clean = " ".join(text.split())
                        reference_fh.write(
                            json.dumps({"url": url, "text": clean}, ensure_ascii=False)
                        )
                        reference_fh.write("\n")
            finally:
                if reference_fh is not None:
                    reference_fh.close()
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(EXIT_IO_ERROR)


@main.command()
@click.option("--start", required=True, help="Window start (ISO timestamp, UTC assumed).")
@click.option("--end", required=True, help="Window end (ISO timestamp, inclusive).")
@click.option("--dest", required=True, type=click.Path(), help="Directory for downloaded files.")
@click.option("--template", default=DEFAULT_FETCH_TEMPLATE, show_default=True,
              help="URL pattern; {timestamp} expands to YYYYMMDDHHMMSS per 15-minute tick.")
@click.option("--timeout", type=float, default=60.0, show_default=True)
def fetch(start, end, dest, template, timeout):
    """Download record files for a time window, one per 15-minute tick.

    Missing ticks are skipped with a warning; an entirely empty window is not
    an error.
    """
    start_ts = _parse_timestamp(start)
    end_ts = _parse_timestamp(end)
    if start_ts > end_ts:
        raise click.UsageError("--start must not be after --end")
    try:
        paths = fetch_window(start_ts, end_ts, template=template, dest=dest, timeout=timeout)
    except OSError as exc:
        click.echo(f"I/O error: {exc}", err=True)
        sys.exit(EXIT_IO_ERROR)
    click.echo(f"downloaded {len(paths)} file(s) to {dest}", err=True)
    for path in paths:
        click.echo(str(path))


if __name__ == "__main__":
    main()
