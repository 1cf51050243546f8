"""Analyst reports over detected coordination drivers: driver selection,
top entities with media annotations, engagement statistics, bilingual
posters, and sentiment timelines.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import CoordnetError
from .graphs import SimilarityGraph, eigenvector_centrality
from .ingest import Corpus, DomainFilterList, filter_domains
from .providers import LexiconSentimentProvider, NEGATIVE, NEUTRAL, POSITIVE

FACTUALITY_LEVELS = ("very low", "low", "mixed", "high", "very high", "NA")
LEANING_LEVELS = ("left", "left-center", "least biased", "right-center", "right", "NA")


@dataclass(frozen=True)
class MbfcRecord:
    domain: str
    factuality: str = "NA"
    leaning: str = "NA"

    def __post_init__(self):
        if self.factuality not in FACTUALITY_LEVELS:
            raise CoordnetError(f"unknown factuality {self.factuality!r}")
        if self.leaning not in LEANING_LEVELS:
            raise CoordnetError(f"unknown leaning {self.leaning!r}")


def _norm_enum(raw: str | None) -> str:
    val = (raw or "").strip()
    return "NA" if not val or val.upper() == "NA" else val.lower()


def load_mbfc(path) -> dict[str, MbfcRecord]:
    """Read a `domain,factuality,leaning` CSV into a lookup table."""
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            dom = row["domain"].strip().lower()
            out[dom] = MbfcRecord(
                domain=dom,
                factuality=_norm_enum(row.get("factuality")),
                leaning=_norm_enum(row.get("leaning")),
            )
    return out


@dataclass(frozen=True)
class DriverSet:
    users: frozenset[str]
    network_label: str
    percentile: float


def select_drivers(
    graph: SimilarityGraph, percentile: float, network_label: str = "fused"
) -> DriverSet:
    """Top ceil(percentile * n) nodes by eigenvector centrality.

    Ties at the cut break toward the smaller user id.
    """
    if not 0.0 < percentile < 1.0:
        raise CoordnetError("percentile must lie in (0, 1)")
    if graph.num_nodes == 0:
        raise CoordnetError("cannot select drivers from an empty graph")
    cv = eigenvector_centrality(graph)
    k = math.ceil(percentile * graph.num_nodes)
    ranked = sorted(cv.scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return DriverSet(
        users=frozenset(u for u, _ in ranked[:k]),
        network_label=network_label,
        percentile=percentile,
    )


def top_entities(
    corpus: Corpus,
    users: Iterable[str],
    kind: str,
    k: int,
    mbfc: Mapping[str, MbfcRecord] | None = None,
    domain_filter: DomainFilterList | None = None,
) -> list[dict]:
    """Frequency-ranked top-k hashtags or base domains among the users' tweets.

    Domains are joined against MBFC annotations when available; ties break
    lexicographically.
    """
    if kind not in ("hashtags", "domains"):
        raise CoordnetError(f"unknown entity kind {kind!r}")
    if k < 1:
        raise CoordnetError("k must be >= 1")
    counts: Counter[str] = Counter()
    filt = domain_filter or DomainFilterList(frozenset())
    for user in set(users):
        for rec in corpus.records_for_user(user):
            if kind == "hashtags":
                counts.update(rec.hashtags)
            else:
                counts.update(filter_domains(rec.urls, filt))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
    rows = []
    for entity, freq in ranked:
        row = {"entity": entity, "frequency": freq}
        if kind == "domains":
            rec = (mbfc or {}).get(entity)
            row["factuality"] = rec.factuality if rec else "NA"
            row["leaning"] = rec.leaning if rec else "NA"
        rows.append(row)
    return rows


@dataclass(frozen=True)
class EngagementStats:
    avg_likes: float
    avg_retweets: float
    avg_quotes: float
    avg_replies: float

    def to_dict(self) -> dict:
        return {
            "avg_likes": self.avg_likes,
            "avg_retweets": self.avg_retweets,
            "avg_quotes": self.avg_quotes,
            "avg_replies": self.avg_replies,
        }


def engagement_stats(corpus: Corpus, users: Iterable[str]) -> EngagementStats:
    """Arithmetic mean of the four engagement counts over the users' tweets."""
    likes = retweets = quotes = replies = 0
    n = 0
    for user in set(users):
        for rec in corpus.records_for_user(user):
            likes += rec.like_count
            retweets += rec.retweet_count
            quotes += rec.quote_count
            replies += rec.reply_count
            n += 1
    if n == 0:
        raise CoordnetError("engagement stats require at least one tweet")
    return EngagementStats(likes / n, retweets / n, quotes / n, replies / n)


def find_bilingual_users(
    corpus: Corpus, lang_a: str, lang_b: str, min_tweets_each: int = 1
) -> set[str]:
    """Users with at least `min_tweets_each` tweets in both languages."""
    if min_tweets_each < 1:
        raise CoordnetError("min_tweets_each must be >= 1")
    out = set()
    for user, idxs in corpus.user_index.items():
        langs = Counter(corpus.records[i].lang for i in idxs)
        if langs[lang_a] >= min_tweets_each and langs[lang_b] >= min_tweets_each:
            out.add(user)
    return out


def driver_language_overlap(
    drivers_a: Iterable[str], drivers_b: Iterable[str], bilinguals: Iterable[str]
) -> dict:
    """How many drivers from each cohort are bilingual, with identities."""
    a, b, bi = set(drivers_a), set(drivers_b), set(bilinguals)
    return {
        "a_bilingual": sorted(a & bi),
        "b_bilingual": sorted(b & bi),
        "a_bilingual_count": len(a & bi),
        "b_bilingual_count": len(b & bi),
        "shared_drivers": sorted(a & b),
    }


def sentiment_timeline(
    corpus: Corpus,
    users: Iterable[str],
    sentiment_provider=None,
    year_range: tuple[int, int] = (2024, 2024),
) -> dict:
    """Monthly positive/negative/neutral tweet counts for a user cohort.

    Tweets outside the configured year range are excluded and counted.
    """
    provider = sentiment_provider or LexiconSentimentProvider()
    lo, hi = year_range
    buckets: dict[str, dict[str, int]] = {}
    excluded = 0
    for user in set(users):
        for rec in corpus.records_for_user(user):
            if not lo <= rec.created_at.year <= hi:
                excluded += 1
                continue
            month = rec.created_at.strftime("%Y-%m")
            counts = buckets.setdefault(
                month, {POSITIVE: 0, NEGATIVE: 0, NEUTRAL: 0}
            )
            counts[provider.classify(rec.text, rec.lang, rec.tweet_id)] += 1
    return {
        "months": {m: buckets[m] for m in sorted(buckets)},
        "excluded": excluded,
    }
