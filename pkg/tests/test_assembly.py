import pytest

from ngramstitch.assembly import (
    ArticleDraft,
    AssemblyConfig,
    assemble,
    best_overlap,
    deduplicate,
    select_seed,
)
from ngramstitch.fragments import Fragment, build_fragment
from ngramstitch.shredder import ShredConfig, shred
from oracles import assemble_reference, dedup_reference, find_adjacent_dup, overlap_scan


def frag(words, pos, source_index=0):
    return Fragment(words=list(words), pos=pos, source_index=source_index)


def draft_of(words, head_pos, tail_pos):
    return ArticleDraft(words=list(words), head_pos=head_pos, tail_pos=tail_pos)


def shred_to_fragments(text, window, mode="all_occurrences", drop_rate=0.0, seed=0):
    records = shred(text, ShredConfig(window=window, mode=mode, drop_rate=drop_rate, seed=seed))
    return [build_fragment(r, i) for i, r in enumerate(records)]


class TestSelectSeed:
    def test_minimum_pos_wins(self):
        fragments = [frag("a b c".split(), 30, 0), frag("d e".split(), 0, 1), frag("f".split(), 50, 2)]
        assert select_seed(fragments) is fragments[1]

    def test_tie_broken_by_length(self):
        short = frag([f"w{i}" for i in range(8)], 0, 0)
        long = frag([f"v{i}" for i in range(12)], 0, 1)
        assert select_seed([short, long]) is long

    def test_tie_broken_by_source_index(self):
        a = frag(["x", "y"], 0, 4)
        b = frag(["p", "q"], 0, 2)
        assert select_seed([a, b]) is b

    def test_single_fragment(self):
        only = frag(["solo"], 70, 0)
        assert select_seed([only]) is only

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            select_seed([])


class TestBestOverlap:
    def test_append_two_word_overlap(self):
        draft = draft_of(["the", "quick", "brown", "fox"], 10, 10)
        mode, k = best_overlap(draft, frag(["brown", "fox", "jumps", "over"], 10), AssemblyConfig())
        assert (mode, k) == ("append", 2)

    def test_pos_gate_blocks_overlap(self):
        draft = draft_of(["c", "d", "e"], 50, 50)
        mode, k = best_overlap(draft, frag(["a", "b", "c"], 0), AssemblyConfig(pos_window=10))
        assert (mode, k) == (None, 0)

    def test_no_shared_boundary(self):
        draft = draft_of(["x", "y"], 0, 0)
        assert best_overlap(draft, frag(["p", "q"], 0), AssemblyConfig()) == (None, 0)

    def test_prepend_detected(self):
        draft = draft_of(["c", "d", "e"], 20, 20)
        mode, k = best_overlap(draft, frag(["a", "b", "c"], 10), AssemblyConfig())
        assert (mode, k) == ("prepend", 1)

    def test_append_wins_ties(self):
        # fragment overlaps both ends of a palindromic draft with equal k
        draft = draft_of(["a", "b", "a"], 10, 10)
        mode, k = best_overlap(draft, frag(["a", "b", "a"], 10), AssemblyConfig())
        assert mode == "append" and k == 3

    def test_matches_brute_force_scan(self, rng):
        config = AssemblyConfig(pos_window=100)
        for _ in range(500):
            dw = [rng.choice("abcd") for _ in range(rng.randrange(1, 10))]
            fw = [rng.choice("abcd") for _ in range(rng.randrange(1, 10))]
            draft = draft_of(dw, 0, 0)
            mode, k = best_overlap(draft, frag(fw, 0), config)
            append_k = overlap_scan(dw, fw)
            prepend_k = overlap_scan(fw, dw)
            expected_k = max(append_k, prepend_k)
            if expected_k == 0:
                assert (mode, k) == (None, 0)
            else:
                assert k == expected_k
                assert mode == ("append" if append_k >= prepend_k else "prepend")


class TestAssemble:
    def test_single_fragment(self):
        only = frag(["one", "two", "three"], 0, 0)
        draft = assemble([only])
        assert draft.words == ["one", "two", "three"]
        assert draft.fragments_used == 1
        assert draft.fragments_unanchored == 0

    def test_two_fragment_merge(self):
        fragments = [
            frag(["the", "quick", "brown", "fox"], 0, 0),
            frag(["brown", "fox", "jumps", "over"], 10, 1),
        ]
        draft = assemble(fragments, AssemblyConfig(min_overlap=2))
        assert draft.words == ["the", "quick", "brown", "fox", "jumps", "over"]
        assert draft.fragments_unanchored == 0
        assert draft.head_pos == 0 and draft.tail_pos == 10

    def test_shred_round_trip_small(self):
        text = "a b c d e f g h i j"
        fragments = shred_to_fragments(text, window=2)
        draft = assemble(fragments)
        assert draft.words == text.split()
        assert draft.fragments_unanchored == 0

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            assemble([])

    def test_deterministic(self, rng, vocab, vocab_weights):
        from conftest import make_article

        text = make_article(rng, 120, vocab, vocab_weights)
        fragments = shred_to_fragments(text, window=4)
        rng.shuffle(fragments)
        first = assemble(fragments)
        second = assemble(fragments)
        assert first.words == second.words
        assert first.fragments_used == second.fragments_used

    def test_matches_reference_on_clean_shreds(self, rng, vocab, vocab_weights):
        from conftest import make_article

        config = AssemblyConfig()
        for trial in range(30):
            text = make_article(rng, rng.randrange(20, 60), vocab, vocab_weights)
            fragments = shred_to_fragments(text, window=rng.choice([3, 4, 7]))
            rng.shuffle(fragments)
            draft = assemble(fragments, config)
            ref_words, ref_used, ref_unanchored, _ = assemble_reference(
                fragments, config.min_overlap, config.pos_window
            )
            assert draft.words == ref_words, f"trial {trial}"
            assert draft.fragments_used == ref_used
            assert draft.fragments_unanchored == ref_unanchored

    def test_matches_reference_on_noisy_soup(self, rng):
        # arbitrary fragments, not from a shredder: gaps, overlaps, junk
        config = AssemblyConfig(min_overlap=2, pos_window=15)
        alphabet = ["w1", "w2", "w3", "w4", "w5", "w6"]
        for trial in range(200):
            fragments = []
            for idx in range(rng.randrange(1, 9)):
                words = [rng.choice(alphabet) for _ in range(rng.randrange(1, 7))]
                fragments.append(frag(words, rng.randrange(0, 101), idx))
            draft = assemble(fragments, config)
            ref_words, ref_used, ref_unanchored, _ = assemble_reference(
                fragments, config.min_overlap, config.pos_window
            )
            assert draft.words == ref_words, f"trial {trial}"
            assert draft.fragments_used == ref_used
            assert draft.fragments_unanchored == ref_unanchored

    def test_conservation_when_fully_anchored(self, rng, vocab, vocab_weights):
        from conftest import make_article

        config = AssemblyConfig()
        for _ in range(20):
            text = make_article(rng, 50, vocab, vocab_weights)
            fragments = shred_to_fragments(text, window=4)
            draft = assemble(fragments, config)
            if draft.fragments_unanchored:
                continue
            _, _, _, merges = assemble_reference(fragments, config.min_overlap, config.pos_window)
            total_words = sum(len(f.words) for f in fragments)
            total_overlap = sum(k for _, _, k in merges)
            assert len(draft.words) == total_words - total_overlap

    def test_unanchored_fragments_flushed_in_pos_order(self):
        fragments = [
            frag(["a", "b", "c"], 0, 0),
            frag(["x", "y", "z"], 90, 1),  # no overlap, far away
            frag(["p", "q"], 40, 2),
        ]
        draft = assemble(fragments, AssemblyConfig())
        assert draft.words == ["a", "b", "c", "p", "q", "x", "y", "z"]
        assert draft.fragments_used == 3
        assert draft.fragments_unanchored == 2

    def test_head_and_tail_pos_stay_ordered(self, rng):
        alphabet = ["m1", "m2", "m3", "m4"]
        for _ in range(100):
            fragments = [
                frag([rng.choice(alphabet) for _ in range(rng.randrange(1, 6))], rng.randrange(0, 101), i)
                for i in range(rng.randrange(1, 8))
            ]
            draft = assemble(fragments, AssemblyConfig(min_overlap=1, pos_window=100))
            assert draft.head_pos <= draft.tail_pos


class TestDeduplicate:
    def test_documented_collapse(self):
        words = ["a", "b", "c", "d", "e", "a", "b", "c", "d", "e", "f"]
        assert deduplicate(words, AssemblyConfig(min_dup_run=5)) == ["a", "b", "c", "d", "e", "f"]

    def test_short_runs_untouched(self):
        words = ["a", "b", "a", "b", "c"]
        assert deduplicate(words, AssemblyConfig(min_dup_run=5)) == words

    def test_empty(self):
        assert deduplicate([], AssemblyConfig()) == []

    def test_long_range_repeats_survive(self):
        words = ["a", "b", "c", "d", "e", "x", "a", "b", "c", "d", "e"]
        assert deduplicate(words, AssemblyConfig(min_dup_run=5)) == words

    def test_fuzz_against_reference(self, rng):
        config = AssemblyConfig(min_dup_run=3)
        for trial in range(300):
            n = rng.randrange(0, 30)
            words = [rng.choice(["a", "b", "c"]) for _ in range(n)]
            if rng.random() < 0.5 and n >= 3:
                # plant an adjacent duplicate
                i = rng.randrange(0, n)
                k = rng.randrange(3, 7)
                run = [rng.choice(["a", "b", "c"]) for _ in range(k)]
                words[i:i] = run + run
            result = deduplicate(words, config)
            assert result == dedup_reference(words, 3), f"trial {trial}"
            assert find_adjacent_dup(result, 3) is None

    def test_idempotent(self, rng):
        config = AssemblyConfig()
        for _ in range(100):
            words = [rng.choice(["a", "b"]) for _ in range(rng.randrange(0, 40))]
            once = deduplicate(words, config)
            assert deduplicate(once, config) == once


class TestConfig:
    def test_defaults(self):
        config = AssemblyConfig()
        assert (config.min_overlap, config.pos_window, config.min_dup_run) == (3, 10, 5)

    @pytest.mark.parametrize(
        "kwargs",
        [{"min_overlap": 0}, {"pos_window": -1}, {"pos_window": 101}, {"min_dup_run": 1}],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            AssemblyConfig(**kwargs)
