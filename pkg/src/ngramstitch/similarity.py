"""Text similarity metrics for validating reconstructions against references.

Three measures: Levenshtein similarity (1 - edits / combined length),
sequence-matcher similarity (2M / TC over recursively matched contiguous
blocks), and Jaccard token overlap, which gates which article pairs are
treated as the same version of a text.
"""

from __future__ import annotations

import difflib
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_NON_ALNUM = re.compile(r"[\W_]+", re.UNICODE)


@dataclass(frozen=True)
class NormalizedText:
    text: str
    tokens: list[str]


@dataclass(frozen=True)
class SequenceMatchStats:
    """Matching character total M and combined length TC behind the ratio."""

    matching_chars: int
    total_chars: int


@dataclass(frozen=True)
class PairScores:
    url: str
    levenshtein: float
    sequence_matcher: float
    jaccard: float


@dataclass(frozen=True)
class FilterColumn:
    """Aggregate means over the pairs whose Jaccard overlap exceeds ``threshold``
    (None = no filter). Means are None when no pair qualifies."""

    label: str
    threshold: float | None
    pair_count: int
    levenshtein_mean: float | None
    sequence_matcher_mean: float | None


@dataclass(frozen=True)
class SimilarityReport:
    pairs: list[PairScores]
    columns: list[FilterColumn]


def preprocess(raw: str) -> NormalizedText:
    """Normalize text for comparison: NFKC fold, lowercase, every
    non-alphanumeric character becomes a space, whitespace collapsed."""
    text = unicodedata.normalize("NFKC", raw).lower()
    text = _NON_ALNUM.sub(" ", text).strip()
    # the regex collapses runs already; split/join guards odd whitespace chars
    tokens = text.split()
    return NormalizedText(text=" ".join(tokens), tokens=tokens)


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of single-character insertions, deletions and
    substitutions turning ``a`` into ``b``.

    Exact dynamic programming, vectorized one row at a time so article-sized
    strings stay fast; a common prefix/suffix is trimmed first since it can
    never contribute edits.
    """
    if a == b:
        return 0
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) > len(b):
        a, b = b, a  # iterate rows over the shorter string

    ca = np.frombuffer(a.encode("utf-32-le"), dtype=np.uint32)
    cb = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    m = cb.size
    offsets = np.arange(m + 1, dtype=np.int64)
    prev = offsets.copy()
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(ca.size):
        # substitution / deletion candidates are row-independent...
        np.minimum(prev[:-1] + (cb != ca[i]), prev[1:] + 1, out=cur[1:])
        cur[0] = i + 1
        # ...the insertion chain cur[j] = min(cur[j], cur[j-1] + 1) resolves
        # as a running minimum of cur[j] - j
        np.subtract(cur, offsets, out=cur)
        np.minimum.accumulate(cur, out=cur)
        np.add(cur, offsets, out=cur)
        prev, cur = cur, prev
    return int(prev[-1])


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - distance / (len(a) + len(b)); 1.0 when both strings are empty."""
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / total


def sequence_matcher_similarity(a: str, b: str) -> tuple[float, SequenceMatchStats]:
    """Similarity ratio 2M/TC from recursive longest-contiguous-block matching.

    The matcher repeatedly takes the longest common block (earliest in ``a``
    on ties, then earliest in ``b``) and recurses on the text before and after
    it. No junk or popularity heuristics are applied, so the result is a pure
    function of the two strings. Both empty counts as identical (ratio 1).
    """
    if a == b:
        # the whole string is the single matching block
        return 1.0, SequenceMatchStats(matching_chars=len(a), total_chars=2 * len(a))
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    matching = sum(size for _, _, size in matcher.get_matching_blocks())
    total = len(a) + len(b)
    ratio = 1.0 if total == 0 else 2.0 * matching / total
    return ratio, SequenceMatchStats(matching_chars=matching, total_chars=total)


def jaccard_similarity(tokens_a: Iterable[str], tokens_b: Iterable[str]) -> float:
    """Intersection over union of the two token sets; 1.0 when both are empty."""
    set_a, set_b = set(tokens_a), set(tokens_b)
    if not set_a and not set_b:
        return 1.0
    return len(set_a & set_b) / len(set_a | set_b)


def _threshold_label(threshold: float) -> str:
    percent = threshold * 100
    if abs(percent - round(percent)) < 1e-9:
        return f">{round(percent)}%"
    return f">{percent:g}%"


def _column(label: str, threshold: float | None, rows: Sequence[PairScores]) -> FilterColumn:
    if not rows:
        return FilterColumn(label, threshold, 0, None, None)
    return FilterColumn(
        label=label,
        threshold=threshold,
        pair_count=len(rows),
        levenshtein_mean=sum(r.levenshtein for r in rows) / len(rows),
        sequence_matcher_mean=sum(r.sequence_matcher for r in rows) / len(rows),
    )


def validate_corpus(
    pairs: Sequence[tuple[str, str, str]],
    thresholds: Sequence[float] = (0.6, 0.7, 0.8),
) -> SimilarityReport:
    """Score (reconstructed, reference, url) pairs and aggregate the results.

    Both texts are preprocessed, then all three metrics run on the normalized
    forms. Aggregate means are reported unfiltered and restricted to pairs
    whose Jaccard token overlap strictly exceeds each threshold, mirroring the
    idea that high-overlap pairs almost surely are the same article version.
    """
    rows: list[PairScores] = []
    for reconstructed, reference, url in pairs:
        norm_a = preprocess(reconstructed)
        norm_b = preprocess(reference)
        lev = levenshtein_similarity(norm_a.text, norm_b.text)
        seq, _ = sequence_matcher_similarity(norm_a.text, norm_b.text)
        jac = jaccard_similarity(norm_a.tokens, norm_b.tokens)
        rows.append(PairScores(url=url, levenshtein=lev, sequence_matcher=seq, jaccard=jac))

    columns = [_column("No Filter", None, rows)]
    for threshold in thresholds:
        kept = [r for r in rows if r.jaccard > threshold]
        columns.append(_column(_threshold_label(threshold), threshold, kept))
    return SimilarityReport(pairs=rows, columns=columns)


def format_report_table(report: SimilarityReport) -> str:
    """Render the report as an aligned text table: metrics as rows, one column
    per Jaccard filter, plus a pair-count row."""
    headers = ["Metric"] + [c.label for c in report.columns]
    metric_rows = [
        ("Levenshtein Similarity", [c.levenshtein_mean for c in report.columns]),
        ("SequenceMatcher Similarity", [c.sequence_matcher_mean for c in report.columns]),
    ]
    body = [
        [name] + ["-" if v is None else f"{v:.6f}" for v in values]
        for name, values in metric_rows
    ]
    body.append(["Pairs"] + [str(c.pair_count) for c in report.columns])

    widths = [max(len(row[i]) for row in [headers] + body) for i in range(len(headers))]
    lines = []
    for row in [headers] + body:
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(widths[i + 1]) for i, cell in enumerate(row[1:])]
        lines.append("  ".join([first] + rest).rstrip())
    return "\n".join(lines)


def report_to_json_dict(report: SimilarityReport) -> dict:
    """Machine-readable report: one summary row per (metric, filter) plus the
    per-pair scores."""
    summary = []
    for metric, attr in (
        ("levenshtein_similarity", "levenshtein_mean"),
        ("sequence_matcher_similarity", "sequence_matcher_mean"),
    ):
        for col in report.columns:
            summary.append(
                {
                    "metric": metric,
                    "filter": col.label,
                    "mean": getattr(col, attr),
                    "pair_count": col.pair_count,
                }
            )
    pairs = [
        {
            "url": r.url,
            "levenshtein_similarity": r.levenshtein,
            "sequence_matcher_similarity": r.sequence_matcher,
            "jaccard": r.jaccard,
        }
        for r in report.pairs
    ]
    return {"summary": summary, "pairs": pairs}
