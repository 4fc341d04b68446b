"""End-to-end orchestration: fetch record files, reconstruct per URL in
parallel, write article corpora, and score them against references."""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, Sequence

import requests

from .assembly import AssemblyConfig, assemble, deduplicate
from .fragments import build_fragment, strip_wraparound_artifact
from .records import (
    FieldMap,
    NgramRecord,
    ParseDiagnostics,
    group_by_url,
    parse_file,
)
from .similarity import (
    SimilarityReport,
    format_report_table,
    report_to_json_dict,
    validate_corpus,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_EMPTY_INPUT = 3
EXIT_IO_ERROR = 4

FETCH_INTERVAL = timedelta(minutes=15)
DEFAULT_FETCH_TEMPLATE = (
    "http://data.gdeltproject.org/gdeltv3/webngrams/{timestamp}.webngrams.json.gz"
)
INPUT_SUFFIXES = (".json", ".ndjson", ".jsonl", ".gz")


class EmptyInputError(RuntimeError):
    """No records survived parsing and filtering."""


@dataclass(frozen=True)
class ReconstructedArticle:
    """One reconstructed article plus assembly quality counters."""

    url: str
    lang: str
    date_first_seen: datetime | None
    text: str
    fragments_total: int
    fragments_used: int
    fragments_unanchored: int
    wraparound_applied: int

    def to_json_dict(self) -> dict:
        return {
            "url": self.url,
            "lang": self.lang,
            "date_first_seen": (
                self.date_first_seen.isoformat() if self.date_first_seen else None
            ),
            "text": self.text,
            "fragments_total": self.fragments_total,
            "fragments_used": self.fragments_used,
            "fragments_unanchored": self.fragments_unanchored,
            "wraparound_applied": self.wraparound_applied,
        }


@dataclass
class RunConfig:
    """Everything a reconstruction run needs; built from CLI flags and an
    optional config file (flags win)."""

    inputs: list[str | Path]
    output: str | Path
    assembly: AssemblyConfig = field(default_factory=AssemblyConfig)
    langs: list[str] | None = None
    url_include: list[str] = field(default_factory=list)
    url_exclude: list[str] = field(default_factory=list)
    workers: int = 1
    field_map: FieldMap = field(default_factory=FieldMap)

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not self.inputs:
            raise ValueError("at least one input path is required")


@dataclass
class RunSummary:
    groups: int = 0
    articles: int = 0
    groups_skipped: int = 0
    group_errors: list[tuple[str, str]] = field(default_factory=list)
    diagnostics: ParseDiagnostics = field(default_factory=ParseDiagnostics)
    wall_time_s: float = 0.0
    output: str = ""


def reconstruct_group(
    url: str, records: Sequence[NgramRecord], config: AssemblyConfig
) -> ReconstructedArticle | None:
    """Run the fragment -> assemble -> dedup chain for one URL group.

    Returns None when no fragment survives cleaning.
    """
    fragments = []
    wraparound_applied = 0
    for index, record in enumerate(records):
        frag = build_fragment(record, index)
        if frag is None:
            continue
        stripped = strip_wraparound_artifact(frag)
        if stripped is not frag:
            wraparound_applied += 1
            logger.debug("wrap-around prefix removed: url=%s record=%d", url, index)
        if stripped is None:
            continue
        fragments.append(stripped)
    if not fragments:
        return None

    draft = assemble(fragments, config)
    words = deduplicate(draft.words, config)
    text = " ".join(words)
    if not text:
        return None
    dates = [r.date for r in records if r.date is not None]
    return ReconstructedArticle(
        url=url,
        lang=records[0].lang,
        date_first_seen=min(dates) if dates else None,
        text=text,
        fragments_total=len(records),
        fragments_used=draft.fragments_used,
        fragments_unanchored=draft.fragments_unanchored,
        wraparound_applied=wraparound_applied,
    )


def _group_task(args):
    """Worker-pool entry: never raises, so one bad group cannot kill a batch."""
    url, records, config = args
    try:
        return url, reconstruct_group(url, records, config), None
    except Exception as exc:  # noqa: BLE001 - isolation is the point
        return url, None, f"{type(exc).__name__}: {exc}"


def expand_inputs(inputs: Iterable[str | Path]) -> list[Path]:
    """Resolve input paths; directories expand to their record files, sorted
    for reproducible ordering."""
    paths: list[Path] = []
    for item in inputs:
        path = Path(item)
        if path.is_dir():
            paths.extend(
                sorted(p for p in path.iterdir() if p.suffix.lower() in INPUT_SUFFIXES)
            )
        else:
            paths.append(path)
    return paths


def reconstruct_command(config: RunConfig) -> RunSummary:
    """Parse all inputs, reconstruct every URL group, write the corpus.

    Output is NDJSON, one article per line, sorted by URL so the file bytes
    are identical for any worker count. Raises EmptyInputError when nothing
    survives filtering and OSError for unreadable inputs or an unwritable
    output path.
    """
    started = time.perf_counter()
    records: list[NgramRecord] = []
    diagnostics = ParseDiagnostics()
    for path in expand_inputs(config.inputs):
        file_records, file_diags = parse_file(
            path,
            field_map=config.field_map,
            langs=config.langs,
            url_include=config.url_include,
            url_exclude=config.url_exclude,
        )
        records.extend(file_records)
        diagnostics = diagnostics + file_diags

    if not records:
        raise EmptyInputError("no records left after parsing and filtering")

    groups = group_by_url(records)
    tasks = [(url, group, config.assembly) for url, group in groups.items()]
    if config.workers > 1 and len(tasks) > 1:
        chunksize = max(1, len(tasks) // (config.workers * 4))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_group_task, tasks, chunksize=chunksize))
    else:
        results = [_group_task(task) for task in tasks]

    summary = RunSummary(groups=len(groups), diagnostics=diagnostics)
    articles: list[ReconstructedArticle] = []
    for url, article, error in results:
        if error is not None:
            logger.warning("skipping group %s: %s", url, error)
            summary.group_errors.append((url, error))
            summary.groups_skipped += 1
        elif article is None:
            logger.info("skipping group %s: no usable fragments", url)
            summary.groups_skipped += 1
        else:
            articles.append(article)

    articles.sort(key=lambda a: a.url)
    output = Path(config.output)
    if output.parent and not output.parent.exists():
        output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, "w", encoding="utf-8") as fh:
        for article in articles:
            fh.write(json.dumps(article.to_json_dict(), ensure_ascii=False))
            fh.write("\n")

    summary.articles = len(articles)
    summary.wall_time_s = time.perf_counter() - started
    summary.output = str(output)
    return summary


def read_corpus(path: str | Path) -> dict[str, str]:
    """Load an NDJSON corpus ({url, text} per line) into a url -> text map.
    The first occurrence of a URL wins; later duplicates are ignored."""
    texts: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                url, text = obj["url"], obj["text"]
            except (json.JSONDecodeError, TypeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: not a valid corpus line ({exc})") from exc
            if url not in texts:
                texts[url] = text
    return texts


@dataclass(frozen=True)
class JoinStats:
    matched: int
    unmatched_reconstructed: int
    unmatched_reference: int


def validate_command(
    reconstructed_path: str | Path,
    reference_path: str | Path,
    thresholds: Sequence[float] = (0.6, 0.7, 0.8),
    report_json: str | Path | None = None,
    report_table: str | Path | None = None,
) -> tuple[SimilarityReport, JoinStats]:
    """Join two corpora on exact URL equality and score the matched pairs.

    Unmatched URLs on either side are counted, not scored. The report is
    written as JSON and/or an aligned table when paths are given; zero
    matches is a warning, not an error.
    """
    reconstructed = read_corpus(reconstructed_path)
    reference = read_corpus(reference_path)

    matched_urls = sorted(set(reconstructed) & set(reference))
    stats = JoinStats(
        matched=len(matched_urls),
        unmatched_reconstructed=len(reconstructed) - len(matched_urls),
        unmatched_reference=len(reference) - len(matched_urls),
    )
    if not matched_urls:
        logger.warning(
            "no URLs in common between %s and %s", reconstructed_path, reference_path
        )
    pairs = [(reconstructed[url], reference[url], url) for url in matched_urls]
    report = validate_corpus(pairs, thresholds)

    if report_json is not None:
        payload = report_to_json_dict(report)
        payload["pairs_matched"] = stats.matched
        payload["unmatched_reconstructed"] = stats.unmatched_reconstructed
        payload["unmatched_reference"] = stats.unmatched_reference
        with open(report_json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    if report_table is not None:
        with open(report_table, "w", encoding="utf-8") as fh:
            fh.write(format_report_table(report))
            fh.write("\n")
    return report, stats


def _align_down(moment: datetime) -> datetime:
    minute = (moment.minute // 15) * 15
    return moment.replace(minute=minute, second=0, microsecond=0)


def fetch_window(
    start: datetime,
    end: datetime,
    template: str = DEFAULT_FETCH_TEMPLATE,
    dest: str | Path = ".",
    session: requests.Session | None = None,
    attempts: int = 3,
    backoff_base: float = 1.0,
    timeout: float = 60.0,
) -> list[Path]:
    """Download one record file per 15-minute tick in [start, end].

    Bounds are rounded outward to 15-minute boundaries and both endpoints are
    included. The template is expanded with ``{timestamp}`` (YYYYMMDDHHMMSS).
    Missing ticks (HTTP 404) are skipped with a warning; transient failures
    (5xx, connection errors, timeouts) are retried with exponential backoff up
    to ``attempts`` tries, then skipped. Only an unwritable destination is
    fatal. Returns the paths actually written.
    """
    if start > end:
        raise ValueError("fetch window start must not be after end")
    dest_dir = Path(dest)
    dest_dir.mkdir(parents=True, exist_ok=True)
    own_session = session is None
    http = session or requests.Session()

    tick = _align_down(start)
    aligned_end = _align_down(end)
    if aligned_end < end:
        aligned_end += FETCH_INTERVAL

    downloaded: list[Path] = []
    try:
        while tick <= aligned_end:
            url = template.format(timestamp=tick.strftime("%Y%m%d%H%M%S"))
            content = _fetch_one(http, url, attempts, backoff_base, timeout)
            if content is not None:
                target = dest_dir / url.rsplit("/", 1)[-1]
                target.write_bytes(content)
                downloaded.append(target)
            tick += FETCH_INTERVAL
    finally:
        if own_session:
            http.close()
    if not downloaded:
        logger.warning("no files downloaded for window %s .. %s", start, end)
    return downloaded


def _fetch_one(http, url: str, attempts: int, backoff_base: float, timeout: float):
    for attempt in range(attempts):
        try:
            response = http.get(url, timeout=timeout)
        except requests.RequestException as exc:
            logger.info("attempt %d for %s failed: %s", attempt + 1, url, exc)
            response = None
        else:
            if response.status_code == 200:
                return response.content
            if response.status_code == 404:
                logger.warning("missing tick (404): %s", url)
                return None
            if response.status_code < 500:
                logger.warning("skipping %s: HTTP %d", url, response.status_code)
                return None
            logger.info("attempt %d for %s: HTTP %d", attempt + 1, url, response.status_code)
        if attempt + 1 < attempts:
            time.sleep(backoff_base * (2**attempt))
    logger.warning("giving up on %s after %d attempts", url, attempts)
    return None


def summary_lines(summary: RunSummary) -> list[str]:
    """Human-readable run summary for stderr."""
    d = summary.diagnostics
    lines = [
        f"groups: {summary.groups} ({summary.groups_skipped} skipped)",
        f"articles written: {summary.articles} -> {summary.output}",
        (
            f"records: ok={d.records_ok} malformed={d.lines_malformed} "
            f"type2_skipped={d.records_type2_skipped} filtered={d.records_filtered} "
            f"pos_clamped={d.pos_clamped} (lines read: {d.lines_read})"
        ),
        f"wall time: {summary.wall_time_s:.2f}s",
    ]
    for url, error in summary.group_errors:
        lines.append(f"group error: {url}: {error}")
    return lines
