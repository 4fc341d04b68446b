"""Parse GDELT Web News NGrams records from NDJSON streams and group them by URL."""

from __future__ import annotations

import gzip
import io
import json
import logging
import zlib
from dataclasses import dataclass, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import BinaryIO, Iterable

logger = logging.getLogger(__name__)

GZIP_MAGIC = b"\x1f\x8b"


class ParseError(Exception):
    """The input stream itself is unreadable (bad gzip container, broken file)."""


@dataclass(frozen=True)
class FieldMap:
    """JSON key for each record field.

    The defaults match the public webngrams files; a feed that names its
    fields differently can be handled by remapping here (e.g. via the
    "field_map" section of a config file) instead of editing code.
    """

    date: str = "date"
    ngram: str = "ngram"
    lang: str = "lang"
    lang_type: str = "type"
    pos: str = "pos"
    pre: str = "pre"
    post: str = "post"
    url: str = "url"

    @classmethod
    def from_dict(cls, overrides: dict) -> "FieldMap":
        unknown = set(overrides) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown field_map keys: {sorted(unknown)}")
        return cls(**overrides)


@dataclass(frozen=True)
class NgramRecord:
    """One dataset entry: a unigram with its context snippets and metadata.

    ``pos`` is the decile-style position of the unigram within its article
    (0-100); ``pre``/``post`` hold up to ~7 words of surrounding context.
    Immutable, so records can be shared freely across workers.
    """

    ngram: str
    url: str
    lang: str = ""
    lang_type: int = 1
    pos: int = 0
    pre: str = ""
    post: str = ""
    date: datetime | None = None


@dataclass
class ParseDiagnostics:
    """Per-stream accounting: every line read lands in exactly one bucket
    (ok, malformed, type-2 skipped, or filtered). ``pos_clamped`` counts
    parsed records whose pos was pulled back into [0, 100]; clamping does not
    change which bucket a line lands in.
    """

    lines_read: int = 0
    records_ok: int = 0
    lines_malformed: int = 0
    records_type2_skipped: int = 0
    records_filtered: int = 0
    pos_clamped: int = 0

    def __add__(self, other: "ParseDiagnostics") -> "ParseDiagnostics":
        return ParseDiagnostics(
            **{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        )


def _parse_date(value) -> datetime | None:
    if not isinstance(value, str):
        return None
    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        try:
            parsed = datetime.strptime(value.strip(), "%Y%m%d%H%M%S")
        except ValueError:
            return None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def _coerce_int(value) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return int(value) if value.is_integer() else None
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            return None
    return None


def _record_from_obj(obj: dict, fm: FieldMap, diags: ParseDiagnostics) -> NgramRecord | None:
    """Build a record from one JSON object; None means the line is malformed."""
    ngram = obj.get(fm.ngram)
    url = obj.get(fm.url)
    if not isinstance(ngram, str) or not ngram.strip():
        return None
    if not isinstance(url, str) or not url.strip():
        return None

    lang_type = _coerce_int(obj.get(fm.lang_type))
    if lang_type not in (1, 2):
        return None

    pos = _coerce_int(obj.get(fm.pos))
    if pos is None:
        return None

    pre = obj.get(fm.pre, "")
    post = obj.get(fm.post, "")
    lang = obj.get(fm.lang, "")
    if not isinstance(pre, str) or not isinstance(post, str) or not isinstance(lang, str):
        return None

    if pos < 0 or pos > 100:
        pos = min(max(pos, 0), 100)
        diags.pos_clamped += 1

    return NgramRecord(
        ngram=ngram,
        url=url,
        lang=lang,
        lang_type=lang_type,
        pos=pos,
        pre=pre,
        post=post,
        date=_parse_date(obj.get(fm.date)),
    )


def _binary_lines(stream: BinaryIO) -> Iterable[bytes]:
    """Yield raw lines, transparently gunzipping when the magic bytes match."""
    if not hasattr(stream, "peek"):
        if stream.seekable():
            head = stream.read(2)
            stream.seek(-len(head), io.SEEK_CUR)
        else:
            stream = io.BufferedReader(stream)
            head = stream.peek(2)[:2]
    else:
        head = stream.peek(2)[:2]

    if head == GZIP_MAGIC:
        try:
            with gzip.GzipFile(fileobj=stream) as gz:
                yield from gz
        except (OSError, EOFError, zlib.error) as exc:
            raise ParseError(f"unreadable gzip stream: {exc}") from exc
    else:
        yield from stream


def parse_records(
    stream: BinaryIO,
    field_map: FieldMap | None = None,
    langs: Iterable[str] | None = None,
    url_include: Iterable[str] | None = None,
    url_exclude: Iterable[str] | None = None,
) -> tuple[list[NgramRecord], ParseDiagnostics]:
    """Parse newline-delimited JSON (optionally gzipped) into records.

    Each well-formed line with language type 1 that passes the filters yields
    one record, in line order. Malformed lines (bad UTF-8, bad JSON, missing
    or invalid required fields) are skipped and counted, never fatal; only an
    unreadable stream raises ParseError. Blank lines are ignored entirely.

    ``langs`` is an allow-list of exact language codes; ``url_include`` and
    ``url_exclude`` are substring patterns (any include must match, no
    exclude may match).
    """
    fm = field_map or FieldMap()
    lang_set = set(langs) if langs is not None else None
    includes = list(url_include) if url_include else []
    excludes = list(url_exclude) if url_exclude else []

    records: list[NgramRecord] = []
    diags = ParseDiagnostics()

    for raw in _binary_lines(stream):
        stripped = raw.strip()
        if not stripped:
            continue
        diags.lines_read += 1
        try:
            obj = json.loads(stripped.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            diags.lines_malformed += 1
            continue
        if not isinstance(obj, dict):
            diags.lines_malformed += 1
            continue
        record = _record_from_obj(obj, fm, diags)
        if record is None:
            diags.lines_malformed += 1
            continue
        if record.lang_type == 2:
            diags.records_type2_skipped += 1
            continue
        if lang_set is not None and record.lang not in lang_set:
            diags.records_filtered += 1
            continue
        if includes and not any(pat in record.url for pat in includes):
            diags.records_filtered += 1
            continue
        if excludes and any(pat in record.url for pat in excludes):
            diags.records_filtered += 1
            continue
        diags.records_ok += 1
        records.append(record)

    return records, diags


def parse_file(path: str | Path, **kwargs) -> tuple[list[NgramRecord], ParseDiagnostics]:
    """Open ``path`` (plain or .gz) and run :func:`parse_records` over it."""
    with open(path, "rb") as fh:
        return parse_records(fh, **kwargs)


def group_by_url(records: Iterable[NgramRecord]) -> dict[str, list[NgramRecord]]:
    """Partition records by source URL, preserving input order within groups."""
    groups: dict[str, list[NgramRecord]] = {}
    for record in records:
        groups.setdefault(record.url, []).append(record)
    return groups


def record_to_json_dict(record: NgramRecord, field_map: FieldMap | None = None) -> dict:
    """Serialize a record back to the wire shape; inverse of parsing."""
    fm = field_map or FieldMap()
    return {
        fm.date: record.date.isoformat() if record.date is not None else None,
        fm.ngram: record.ngram,
        fm.lang: record.lang,
        fm.lang_type: record.lang_type,
        fm.pos: record.pos,
        fm.pre: record.pre,
        fm.post: record.post,
        fm.url: record.url,
    }
