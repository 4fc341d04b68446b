import random

import pytest

from oracles import find_adjacent_dup

# Deterministic news-ish vocabulary: enough types that coincidental overlaps
# are rare, sampled with Zipf-like weights so common words repeat naturally.
_SYLLABLES = [
    "ba", "co", "da", "el", "fi", "ga", "ho", "in", "ja", "ka",
    "lo", "ma", "ne", "or", "pa", "qui", "ra", "se", "ti", "ul",
    "ve", "wa", "xe", "yo", "zu", "bri", "cla", "dro", "fen", "gri",
]
_FUNCTION_WORDS = [
    "the", "of", "and", "to", "a", "in", "that", "for", "on", "with",
    "as", "was", "at", "by", "from", "has", "its", "but", "new", "said",
]


def make_vocab(size: int = 1500) -> list[str]:
    vocab = list(_FUNCTION_WORDS)
    i = 0
    while len(vocab) < size:
        first = _SYLLABLES[i % len(_SYLLABLES)]
        second = _SYLLABLES[(i // len(_SYLLABLES)) % len(_SYLLABLES)]
        third = _SYLLABLES[(i // len(_SYLLABLES) ** 2) % len(_SYLLABLES)]
        vocab.append(first + second + third)
        i += 1
    return vocab[:size]


def zipf_weights(size: int, exponent: float = 1.05) -> list[float]:
    return [1.0 / (rank**exponent) for rank in range(1, size + 1)]


def make_article(rng: random.Random, n_words: int, vocab, weights, min_dup_run: int = 5) -> str:
    """Random article text guaranteed to carry no adjacent duplicated run of
    ``min_dup_run`` words or more (resampled in the rare case one appears)."""
    while True:
        words = rng.choices(vocab, weights=weights, k=n_words)
        if find_adjacent_dup(words, min_dup_run) is None:
            return " ".join(words)


@pytest.fixture(scope="session")
def vocab():
    return make_vocab()


@pytest.fixture(scope="session")
def vocab_weights(vocab):
    return zipf_weights(len(vocab))


@pytest.fixture
def rng():
    return random.Random(20240517)
