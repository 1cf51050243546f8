"""Deterministic providers for tweet embeddings, sentiment, and user topics.

Each capability has a pure built-in default (no model weights, no network)
plus a file-backed adapter so externally computed model outputs can be
swapped in without touching the pipeline.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ProviderError
from .ingest import Corpus, _load_data_lines

logger = logging.getLogger(__name__)

POSITIVE = "positive"
NEGATIVE = "negative"
NEUTRAL = "neutral"
SENTIMENT_LABELS = (POSITIVE, NEGATIVE, NEUTRAL)


@dataclass(frozen=True)
class TopicAssignment:
    user_id: str
    topic: str


# ---------------------------------------------------------------------------
# Embeddings

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a_64(data: bytes) -> int:
    # FNV-1a, 64-bit: h = (h XOR byte) * prime, fixed offset basis.
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


class HashedNgramEmbedder:
    """Default embedding: hashed character 3-5-gram frequency vector.

    Each n-gram is hashed with 64-bit FNV-1a and reduced modulo the
    dimension; counts accumulate and the vector is L2-normalized. Texts
    shorter than 3 characters hash the whole text as a single gram, and
    the empty text maps to the first basis vector, so every output has
    unit norm.
    """

    name = "hashed-ngram"

    def __init__(self, dimension: int = 256):
        if dimension < 1:
            raise ProviderError("embedding dimension must be positive")
        self.dimension = dimension

    def embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension)
        grams = [
            text[i : i + n]
            for n in (3, 4, 5)
            for i in range(len(text) - n + 1)
        ]
        if not grams:
            grams = [text] if text else []
        if not grams:
            vec[0] = 1.0
            return vec
        for g in grams:
            vec[_fnv1a_64(g.encode("utf-8")) % self.dimension] += 1.0
        return vec / np.linalg.norm(vec)

    def embed_tweets(
        self, tweet_ids: Sequence[str], texts: Sequence[str]
    ) -> np.ndarray:
        return np.array([self.embed_one(t) for t in texts])


class FileEmbeddingProvider:
    """Embeddings read from a TSV file keyed by tweet id.

    File format: header line ``dimension=D`` then ``tweet_id<TAB>v1,...,vD``.
    Vectors are re-normalized to unit length on load.
    """

    name = "file"

    def __init__(self, path):
        self._vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith("dimension="):
                raise ProviderError(f"embedding file {path} missing dimension header")
            self.dimension = int(header.split("=", 1)[1])
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                tweet_id, raw = line.split("\t", 1)
                vec = np.array([float(x) for x in raw.split(",")])
                if vec.shape[0] != self.dimension:
                    raise ProviderError(
                        f"embedding for {tweet_id} has {vec.shape[0]} components, "
                        f"expected {self.dimension}"
                    )
                norm = np.linalg.norm(vec)
                if norm == 0:
                    raise ProviderError(f"zero embedding for {tweet_id}")
                self._vectors[tweet_id] = vec / norm

    def embed_tweets(
        self, tweet_ids: Sequence[str], texts: Sequence[str]
    ) -> np.ndarray:
        missing = [t for t in tweet_ids if t not in self._vectors]
        if missing:
            raise ProviderError(
                "embedding file missing tweet ids: " + ", ".join(sorted(missing)[:20])
            )
        return np.array([self._vectors[t] for t in tweet_ids])


def embed_tweets(texts: Sequence[str], provider=None) -> np.ndarray:
    """One unit vector per text under the given provider (default built-in)."""
    provider = provider or HashedNgramEmbedder()
    out = provider.embed_tweets([""] * len(texts), texts)
    if out.ndim != 2 or out.shape[1] != provider.dimension:
        raise ProviderError("provider returned vectors of wrong dimension")
    return out


# ---------------------------------------------------------------------------
# Sentiment


def _load_lexicon(name: str) -> tuple[frozenset[str], frozenset[str]]:
    pos, neg = set(), set()
    for line in _load_data_lines(name):
        word, _, label = line.partition("\t")
        (pos if label == "pos" else neg).add(word)
    return frozenset(pos), frozenset(neg)


class LexiconSentimentProvider:
    """Default sentiment: sign of (positive hits - negative hits) against a
    bundled per-language polarity lexicon."""

    name = "lexicon"

    def __init__(self):
        self._lexicons = {
            "en": _load_lexicon("sentiment_en.txt"),
            "es": _load_lexicon("sentiment_es.txt"),
        }

    def classify(self, text: str, lang: str, tweet_id: str | None = None) -> str:
        if lang not in self._lexicons:
            logger.warning("no sentiment lexicon for language %r; using neutral", lang)
            return NEUTRAL
        pos, neg = self._lexicons[lang]
        tokens = [t.strip(".,;:!?\"'()[]").lower() for t in text.split()]
        score = sum(t in pos for t in tokens) - sum(t in neg for t in tokens)
        if score > 0:
            return POSITIVE
        if score < 0:
            return NEGATIVE
        return NEUTRAL


class FileSentimentProvider:
    """Per-tweet labels from a ``tweet_id<TAB>label`` file."""

    name = "file"

    def __init__(self, path):
        self._labels: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                tweet_id, label = line.split("\t", 1)
                if label not in SENTIMENT_LABELS:
                    raise ProviderError(f"unknown sentiment label {label!r}")
                self._labels[tweet_id] = label

    def classify(self, text: str, lang: str, tweet_id: str | None = None) -> str:
        if tweet_id is None or tweet_id not in self._labels:
            raise ProviderError(f"sentiment file missing tweet id {tweet_id!r}")
        return self._labels[tweet_id]


def classify_sentiment(text: str, lang: str, provider=None, tweet_id=None) -> str:
    provider = provider or LexiconSentimentProvider()
    return provider.classify(text, lang, tweet_id)


# ---------------------------------------------------------------------------
# Topics


class TopHashtagTopicProvider:
    """Default per-user topic: the user's most frequent hashtag restricted
    to the top-K globally most frequent hashtags; 'other' when none apply.
    Ties break lexicographically at both levels."""

    name = "top-hashtag"

    def __init__(self, top_k: int = 50):
        self.top_k = top_k

    def assign(self, corpus: Corpus, users: Iterable[str]) -> dict[str, str]:
        global_counts: Counter[str] = Counter()
        for rec in corpus:
            global_counts.update(rec.hashtags)
        top = {
            tag
            for tag, _ in sorted(
                global_counts.items(), key=lambda kv: (-kv[1], kv[0])
            )[: self.top_k]
        }
        out = {}
        for user in users:
            counts: Counter[str] = Counter()
            for rec in corpus.records_for_user(user):
                counts.update(t for t in rec.hashtags if t in top)
            if counts:
                out[user] = min(counts, key=lambda t: (-counts[t], t))
            else:
                out[user] = "other"
        return out


class FileTopicProvider:
    """Per-user topics from a ``user_id<TAB>topic`` file."""

    name = "file"

    def __init__(self, path):
        self._topics: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                user_id, topic = line.split("\t", 1)
                self._topics[user_id] = topic

    def assign(self, corpus: Corpus, users: Iterable[str]) -> dict[str, str]:
        users = list(users)
        covered = [u for u in users if u in self._topics]
        if users and len(covered) * 2 < len(users):
            raise ProviderError(
                f"topic file covers only {len(covered)} of {len(users)} users"
            )
        return {u: self._topics[u] for u in covered}


def assign_topics(corpus: Corpus, users: Iterable[str], provider=None) -> list[TopicAssignment]:
    provider = provider or TopHashtagTopicProvider()
    mapping = provider.assign(corpus, users)
    return [TopicAssignment(u, t) for u, t in sorted(mapping.items())]
