"""Greedy overlap-based reconstruction of one article from its fragments.

The draft starts from the earliest-positioned fragment and grows by merging,
each round, the unplaced fragment with the largest word overlap against either
end of the draft, as long as the fragment's position decile is close enough to
that end. Fragments that never reach the overlap threshold are appended at the
end in position order so no content is silently lost. A final pass collapses
adjacent duplicated runs introduced at bad junctions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .fragments import Fragment

OverlapMode = Literal["append", "prepend"]


@dataclass
class AssemblyConfig:
    """Thresholds steering the merge loop.

    min_overlap: smallest word overlap accepted as evidence of adjacency.
    pos_window: maximum position-decile distance between a fragment and the
        draft end it merges onto.
    min_dup_run: shortest adjacent duplicated run the dedup pass collapses.
    """

    min_overlap: int = 3
    pos_window: int = 10
    min_dup_run: int = 5

    def __post_init__(self):
        if self.min_overlap < 1:
            raise ValueError("min_overlap must be >= 1")
        if not 0 <= self.pos_window <= 100:
            raise ValueError("pos_window must be in [0, 100]")
        if self.min_dup_run < 2:
            raise ValueError("min_dup_run must be >= 2")


@dataclass
class ArticleDraft:
    """The evolving reconstruction plus bookkeeping about how it was built."""

    words: list[str] = field(default_factory=list)
    head_pos: int = 0
    tail_pos: int = 0
    fragments_used: int = 0
    fragments_unanchored: int = 0


def select_seed(fragments: list[Fragment]) -> Fragment:
    """Pick the starting fragment: minimum pos, then most words, then lowest
    source index. Deterministic for any input order."""
    if not fragments:
        raise ValueError("nothing to assemble: empty fragment list")
    return min(fragments, key=lambda f: (f.pos, -len(f.words), f.source_index))


def best_overlap(
    draft: ArticleDraft, fragment: Fragment, config: AssemblyConfig
) -> tuple[OverlapMode | None, int]:
    """Largest word overlap between the fragment and either draft end.

    The append candidate is the largest k with the draft's last k words equal
    to the fragment's first k; the prepend candidate mirrors that at the draft
    start. Each side only counts when the fragment's pos lies within
    ``pos_window`` of that end's pos. Returns (mode, k) for the larger
    candidate, append winning ties, or (None, 0) when neither side overlaps.
    """
    dw, fw = draft.words, fragment.words
    limit = min(len(dw), len(fw))
    append_k = prepend_k = 0
    if abs(fragment.pos - draft.tail_pos) <= config.pos_window:
        for k in range(limit, 0, -1):
            if dw[len(dw) - k :] == fw[:k]:
                append_k = k
                break
    if abs(fragment.pos - draft.head_pos) <= config.pos_window:
        for k in range(limit, 0, -1):
            if fw[len(fw) - k :] == dw[:k]:
                prepend_k = k
                break
    if append_k == 0 and prepend_k == 0:
        return None, 0
    if append_k >= prepend_k:
        return "append", append_k
    return "prepend", prepend_k


def _build_edge_index(items: list[Fragment], min_k: int):
    """Index fragment prefixes and suffixes by length, for O(1) edge lookups.

    prefix[k] maps the tuple of a fragment's first k words to the item ids
    carrying that prefix (append candidates); suffix[k] mirrors the last k
    words (prepend candidates). Only k >= min_k can ever be merged.
    """
    prefix: dict[int, dict[tuple, list[int]]] = {}
    suffix: dict[int, dict[tuple, list[int]]] = {}
    for idx, frag in enumerate(items):
        for k in range(min_k, len(frag.words) + 1):
            prefix.setdefault(k, {}).setdefault(tuple(frag.words[:k]), []).append(idx)
            suffix.setdefault(k, {}).setdefault(tuple(frag.words[-k:]), []).append(idx)
    return prefix, suffix


def assemble(fragments: list[Fragment], config: AssemblyConfig | None = None) -> ArticleDraft:
    """Reconstruct an article draft from one URL group's fragments.

    Greedy loop: every round scores all unplaced fragments against both draft
    ends and merges the one with the globally largest overlap at or above
    ``min_overlap`` (ties broken by lower pos, then lower source index); the
    overlapping words are written once. When no fragment qualifies, the rest
    are flushed onto the end in (pos, source_index) order and counted as
    unanchored. Each fragment is placed exactly once, so the result is a pure
    function of the fragment list and config.
    """
    cfg = config or AssemblyConfig()
    seed = select_seed(fragments)
    draft = ArticleDraft(
        words=list(seed.words),
        head_pos=seed.pos,
        tail_pos=seed.pos,
        fragments_used=1,
        fragments_unanchored=0,
    )
    items = [f for f in fragments if f is not seed]
    if not items:
        return draft

    prefix_idx, suffix_idx = _build_edge_index(items, cfg.min_overlap)
    max_k = max(len(f.words) for f in items)
    active = set(range(len(items)))

    while active:
        chosen = None  # (pos, source_index, item idx, mode, k)
        for k in range(min(max_k, len(draft.words)), cfg.min_overlap - 1, -1):
            candidates: list[tuple[int, int, int, str]] = []
            seen: set[int] = set()
            by_prefix = prefix_idx.get(k)
            if by_prefix is not None:
                hits = by_prefix.get(tuple(draft.words[len(draft.words) - k :]))
                if hits:
                    for idx in hits:
                        if idx in active:
                            frag = items[idx]
                            if abs(frag.pos - draft.tail_pos) <= cfg.pos_window:
                                candidates.append((frag.pos, frag.source_index, idx, "append"))
                                seen.add(idx)
            by_suffix = suffix_idx.get(k)
            if by_suffix is not None:
                hits = by_suffix.get(tuple(draft.words[:k]))
                if hits:
                    for idx in hits:
                        # append wins when both directions tie at the same k
                        if idx in active and idx not in seen:
                            frag = items[idx]
                            if abs(frag.pos - draft.head_pos) <= cfg.pos_window:
                                candidates.append((frag.pos, frag.source_index, idx, "prepend"))
            if candidates:
                pos, source_index, idx, mode = min(candidates)
                chosen = (idx, mode, k)
                break
        if chosen is None:
            break

        idx, mode, k = chosen
        frag = items[idx]
        active.discard(idx)
        if mode == "append":
            draft.words.extend(frag.words[k:])
            draft.tail_pos = max(draft.tail_pos, frag.pos)
        else:
            draft.words[:0] = frag.words[: len(frag.words) - k]
            draft.head_pos = min(draft.head_pos, frag.pos)
        draft.fragments_used += 1

    # flush whatever never anchored, in position order, so nothing is dropped
    for frag in sorted((items[i] for i in active), key=lambda f: (f.pos, f.source_index)):
        draft.words.extend(frag.words)
        draft.tail_pos = max(draft.tail_pos, frag.pos)
        draft.fragments_used += 1
        draft.fragments_unanchored += 1
    return draft


def deduplicate(words: list[str], config: AssemblyConfig | None = None) -> list[str]:
    """Collapse adjacent duplicated runs of at least ``min_dup_run`` words.

    Repeatedly finds the leftmost position where some maximal run of k words
    is immediately followed by an identical run, keeps one copy, and rescans
    until no such run remains. Only adjacent duplicates are touched, so
    legitimate long-range repetition (quotes, refrains) survives.
    """
    cfg = config or AssemblyConfig()
    min_run = cfg.min_dup_run
    out = list(words)
    changed = True
    while changed:
        changed = False
        n = len(out)
        for i in range(0, n - 2 * min_run + 1):
            for k in range((n - i) // 2, min_run - 1, -1):
                # cheap guards before slicing: run ends must already agree
                if out[i] != out[i + k] or out[i + k - 1] != out[i + 2 * k - 1]:
                    continue
                if out[i : i + k] == out[i + k : i + 2 * k]:
                    del out[i + k : i + 2 * k]
                    changed = True
                    break
            if changed:
                break
    return out
