"""Synthetic multilingual corpora with planted coordinated groups.

Organic users sample entities from Zipf-distributed global pools with
independent timestamps; each planted group shares a small dedicated
entity pool per enabled coordination kind and posts in synchronized
bursts. Generation is fully determined by the spec's seed, which enables
ground-truth scoring of the detection pipeline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Mapping

from sklearn.metrics import normalized_mutual_info_score

from .analysis import DriverSet
from .errors import ConfigError, CoordnetError
from .graphs import Partition
from .ingest import Corpus, TweetRecord

COORDINATION_KINDS = ("domains", "hashtags", "near_duplicate_text")

# Neutral filler vocabulary for template texts; disjoint from the bundled
# stopword lists so cleaning never empties a synthetic tweet.
_VOCAB = [
    "river", "mountain", "harbor", "garden", "bridge", "market", "signal",
    "window", "summer", "winter", "morning", "evening", "journey", "station",
    "forest", "meadow", "valley", "castle", "lantern", "compass", "anchor",
    "horizon", "thunder", "breeze", "shadow", "mirror", "canvas", "melody",
    "rhythm", "silence", "whisper", "echo", "marble", "copper", "silver",
    "golden", "crimson", "azure", "violet", "amber", "ivory", "cobalt",
    "falcon", "sparrow", "heron", "otter", "badger", "lynx", "walrus",
    "dolphin", "orchard", "harvest", "lantern2", "voyage", "glacier",
    "prairie", "tundra", "lagoon", "estuary", "plateau", "canyon", "dune",
    "reef", "atoll", "fjord", "delta", "basin", "ridge", "summit", "slope",
    "trail", "path", "road", "avenue", "plaza", "corner", "tower", "arch",
    "vault", "cellar", "attic", "balcony", "terrace", "courtyard", "fountain",
    "statue", "mosaic", "fresco", "tapestry", "scroll", "ledger", "quill",
    "parchment", "beacon", "harvest2", "orchid", "juniper",
]


@dataclass(frozen=True)
class GroupSpec:
    size: int
    kinds: tuple[str, ...]
    burst_window: timedelta = timedelta(minutes=30)
    entity_pool_size: int = 4

    def __post_init__(self):
        if self.size < 2:
            raise ConfigError("planted group size must be >= 2")
        for kind in self.kinds:
            if kind not in COORDINATION_KINDS:
                raise ConfigError(f"unknown coordination kind {kind!r}")


@dataclass
class CampaignSpec:
    n_organic: int = 500
    groups: list[GroupSpec] = field(default_factory=list)
    langs: tuple[str, ...] = ("en", "es")
    time_span: tuple[datetime, datetime] = (
        datetime(2024, 5, 1, tzinfo=timezone.utc),
        datetime(2024, 10, 31, tzinfo=timezone.utc),
    )
    seed: int = 0
    global_domain_pool: int = 300
    global_hashtag_pool: int = 300
    # 0.9 keeps organic TF-IDF cosines well under the trace thresholds at
    # desk scale; steeper exponents collapse organic vectors onto the head
    # entities and flood the traces with chaff edges.
    zipf_exponent: float = 0.9
    organic_tweets: tuple[int, int] = (12, 18)
    organic_domains: tuple[int, int] = (6, 9)
    organic_hashtags: tuple[int, int] = (7, 11)

    def __post_init__(self):
        if self.time_span[0] >= self.time_span[1]:
            raise ConfigError("time_span must be non-empty")
        for g in self.groups:
            if g.entity_pool_size > self.global_domain_pool:
                raise ConfigError(
                    "group entity pool exceeds the global entity pool"
                )

    @classmethod
    def default(cls, seed: int = 0) -> "CampaignSpec":
        """500 organic users and 3 bursty domain+hashtag groups of 10."""
        groups = [
            GroupSpec(size=10, kinds=("domains", "hashtags"),
                      burst_window=timedelta(minutes=30), entity_pool_size=4)
            for _ in range(3)
        ]
        return cls(n_organic=500, groups=groups, seed=seed)


GroundTruth = dict[str, int | None]


def _zipf_weights(n: int, exponent: float) -> list[float]:
    return [1.0 / (rank + 1) ** exponent for rank in range(n)]


class _Generator:
    def __init__(self, spec: CampaignSpec):
        self.spec = spec
        self.rng = random.Random(spec.seed)
        self.tweet_counter = 0
        self.domains = [f"site{i:03d}.com" for i in range(spec.global_domain_pool)]
        self.tags = [f"tag{i:03d}" for i in range(spec.global_hashtag_pool)]
        self.domain_weights = _zipf_weights(len(self.domains), spec.zipf_exponent)
        self.tag_weights = _zipf_weights(len(self.tags), spec.zipf_exponent)

    def _next_tweet_id(self) -> str:
        self.tweet_counter += 1
        return f"t{self.tweet_counter:07d}"

    def _timestamp(self) -> datetime:
        lo, hi = self.spec.time_span
        offset = self.rng.randint(0, int((hi - lo).total_seconds()))
        return lo + timedelta(seconds=offset)

    def _distinct_weighted(self, pool, weights, k: int) -> list[str]:
        picked: list[str] = []
        while len(picked) < k:
            cand = self.rng.choices(pool, weights=weights)[0]
            if cand not in picked:
                picked.append(cand)
        return picked

    def _text(self, n_tokens: int) -> str:
        return " ".join(self.rng.choice(_VOCAB) for _ in range(n_tokens))

    def _record(self, user, when, lang, text, tags, urls) -> TweetRecord:
        rng = self.rng
        return TweetRecord(
            tweet_id=self._next_tweet_id(),
            user_id=user,
            created_at=when.replace(microsecond=0),
            lang=lang,
            text=text,
            hashtags=tuple(tags),
            urls=tuple(urls),
            like_count=rng.randint(0, 50),
            retweet_count=rng.randint(0, 10),
            quote_count=rng.randint(0, 3),
            reply_count=rng.randint(0, 5),
        )

    def organic_user(self, user: str) -> list[TweetRecord]:
        rng = self.rng
        lo, hi = self.spec.organic_tweets
        n_tweets = rng.randint(lo, hi)
        my_domains = self._distinct_weighted(
            self.domains, self.domain_weights,
            rng.randint(*self.spec.organic_domains),
        )
        my_tags = self._distinct_weighted(
            self.tags, self.tag_weights,
            rng.randint(*self.spec.organic_hashtags),
        )
        lang = rng.choice(self.spec.langs)
        records = []
        for _ in range(n_tweets):
            tags = rng.sample(my_tags, rng.randint(1, 2))
            domain = rng.choice(my_domains)
            records.append(
                self._record(
                    user,
                    self._timestamp(),
                    lang,
                    self._text(rng.randint(8, 12)),
                    tags,
                    [f"https://{domain}/p{rng.randint(1, 999)}"],
                )
            )
        return records

    def planted_group(self, gid: int, group: GroupSpec) -> list[TweetRecord]:
        rng = self.rng
        lang = rng.choice(self.spec.langs)
        domain_pool = [
            f"campaign{gid:02d}n{i}.net" for i in range(group.entity_pool_size)
        ]
        tag_pool = [
            f"op{gid:02d}tag{i}"
            for i in range(max(group.entity_pool_size, 7))
        ]
        base_text = self._text(10).split()
        n_tweets = max(6, group.entity_pool_size + 3)
        burst_starts = sorted(self._timestamp() for _ in range(n_tweets))
        window_secs = max(1, int(group.burst_window.total_seconds()))
        records = []
        for k in range(group.size):
            user = f"grp{gid:02d}u{k:02d}"
            for i, burst in enumerate(burst_starts):
                when = burst + timedelta(seconds=rng.randint(0, window_secs - 1))
                urls = []
                if "domains" in group.kinds:
                    # rotated pool coverage first, then random repeats:
                    # supports coincide but count vectors differ, keeping
                    # intra-group cosines high without exact ties
                    if i < len(domain_pool):
                        domain = domain_pool[(i + k) % len(domain_pool)]
                    else:
                        domain = rng.choice(domain_pool)
                    urls = [f"https://{domain}/x{rng.randint(1, 999)}"]
                elif rng.random() < 0.3:
                    domain = rng.choices(
                        self.domains, weights=self.domain_weights
                    )[0]
                    urls = [f"https://{domain}/p{rng.randint(1, 999)}"]
                if "hashtags" in group.kinds:
                    first = tag_pool[(2 * i) % len(tag_pool)]
                    second = rng.choice(tag_pool)
                    tags = [first] if second == first else [first, second]
                else:
                    tags = [rng.choices(self.tags, weights=self.tag_weights)[0]]
                if "near_duplicate_text" in group.kinds:
                    tokens = list(base_text)
                    for _ in range(rng.randint(0, 2)):
                        tokens[rng.randrange(len(tokens))] = rng.choice(_VOCAB)
                    text = " ".join(tokens)
                else:
                    text = self._text(rng.randint(8, 12))
                records.append(self._record(user, when, lang, text, tags, urls))
        return records


def generate(spec: CampaignSpec) -> tuple[Corpus, GroundTruth]:
    """Generate a synthetic corpus and its user -> group ground truth.

    Records are emitted in (created_at, tweet_id) order. Organic users are
    mapped to None in the ground truth.
    """
    gen = _Generator(spec)
    records: list[TweetRecord] = []
    truth: GroundTruth = {}
    for i in range(spec.n_organic):
        user = f"org{i:05d}"
        records.extend(gen.organic_user(user))
        truth[user] = None
    for gid, group in enumerate(spec.groups):
        records.extend(gen.planted_group(gid, group))
        for k in range(group.size):
            truth[f"grp{gid:02d}u{k:02d}"] = gid
    records.sort(key=lambda r: (r.created_at, r.tweet_id))
    return Corpus(records), truth


def write_ground_truth(truth: GroundTruth, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for user in sorted(truth):
            group = truth[user]
            fh.write(f"{user}\t{'organic' if group is None else group}\n")


def read_ground_truth(path) -> GroundTruth:
    out: GroundTruth = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            user, raw = line.split("\t", 1)
            out[user] = None if raw == "organic" else int(raw)
    return out


def _same_group_pairs(labels: Mapping[str, int]) -> set[tuple[str, str]]:
    by_group: dict[int, list[str]] = {}
    for user in sorted(labels):
        by_group.setdefault(labels[user], []).append(user)
    pairs = set()
    for members in by_group.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.add((members[i], members[j]))
    return pairs


def score_recovery(truth: GroundTruth, detected) -> dict:
    """Pairwise precision/recall/F1 plus NMI against the planted groups.

    `detected` may be a Partition (or any user -> label mapping), where
    predicted coordinated pairs are same-community pairs, or a DriverSet,
    which is treated as a single predicted group. Users absent from
    `detected` are predicted non-coordinated. An empty prediction scores
    vacuous precision 1.0 and is flagged.
    """
    if isinstance(detected, DriverSet):
        predicted: dict[str, int] = {u: 0 for u in detected.users}
    elif isinstance(detected, Partition):
        predicted = dict(detected.assignment)
    else:
        predicted = dict(detected)
    unknown = sorted(set(predicted) - set(truth))
    if unknown:
        raise CoordnetError(f"detected users not in ground truth: {unknown[:10]}")

    true_labels = {u: g for u, g in truth.items() if g is not None}
    true_pairs = _same_group_pairs(true_labels)
    pred_pairs = _same_group_pairs(predicted)
    tp = len(true_pairs & pred_pairs)
    vacuous = not pred_pairs
    precision = 1.0 if vacuous else tp / len(pred_pairs)
    recall = 1.0 if not true_pairs else tp / len(true_pairs)
    f1 = (
        0.0
        if precision + recall == 0
        else 2 * precision * recall / (precision + recall)
    )

    planted = sorted(true_labels)
    if planted:
        labels_true = [true_labels[u] for u in planted]
        next_free = -1
        labels_pred = []
        for u in planted:
            if u in predicted:
                labels_pred.append(predicted[u])
            else:
                labels_pred.append(next_free)  # unique singleton per miss
                next_free -= 1
        nmi = float(normalized_mutual_info_score(labels_true, labels_pred))
    else:
        nmi = 1.0
    return {
        "pairwise_precision": precision,
        "pairwise_recall": recall,
        "pairwise_f1": f1,
        "nmi": nmi,
        "vacuous_precision": vacuous,
    }
