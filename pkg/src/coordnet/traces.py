"""Behavioral-trace similarity networks.

Three traces are supported: shared base domains (co_domain), shared
hashtags (co_hashtag), and near-duplicate tweet text (text_similarity).
The first two project a TF-IDF-weighted user-entity matrix into a user
similarity graph; the text trace compares tweet embeddings directly.
"""

from __future__ import annotations

import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .errors import ConfigError, EmptyMatrixError, ProviderError
from .graphs import SimilarityGraph
from .ingest import Corpus, DomainFilterList, filter_domains, _load_data_lines
from .providers import HashedNgramEmbedder

TRACE_KINDS = ("co_domain", "co_hashtag", "text_similarity")

_TRACE_DEFAULTS = {
    # (min_unique_entities, min_df, sim_threshold)
    "co_domain": (3, 3, 0.6),
    "co_hashtag": (6, 5, 0.7),
    "text_similarity": (1, 1, 0.90),  # 0.95 is the Spanish default
}

TEXT_SIM_THRESHOLDS = {"en": 0.90, "es": 0.95}


@dataclass
class TraceConfig:
    trace_kind: str
    min_unique_entities: int
    min_df: int
    sim_threshold: float
    embedding_provider_ref: str = "hashed-ngram"
    sequence_mode: bool = False  # co_hashtag: treat a tweet's full tag tuple as the entity
    keep_isolates: bool = False
    min_tokens: int = 4

    def __post_init__(self):
        if self.trace_kind not in TRACE_KINDS:
            raise ConfigError(f"unknown trace kind {self.trace_kind!r}")
        if not 0.0 <= self.sim_threshold <= 1.0:
            raise ConfigError("sim_threshold must lie in [0, 1]")
        if self.min_df < 1 or self.min_unique_entities < 1:
            raise ConfigError("min_df and min_unique_entities must be >= 1")

    @classmethod
    def default(cls, trace_kind: str, lang: str | None = None) -> "TraceConfig":
        if trace_kind not in _TRACE_DEFAULTS:
            raise ConfigError(f"unknown trace kind {trace_kind!r}")
        mue, mdf, thr = _TRACE_DEFAULTS[trace_kind]
        if trace_kind == "text_similarity" and lang in TEXT_SIM_THRESHOLDS:
            thr = TEXT_SIM_THRESHOLDS[lang]
        return cls(trace_kind, mue, mdf, thr)


@dataclass
class UserEntityMatrix:
    users: list[str]
    entities: list[str]
    weights: csr_matrix  # rows L2-normalized
    row_norms: np.ndarray  # norms before normalization


def _user_entity_counts(
    corpus: Corpus,
    trace_kind: str,
    domain_filter: DomainFilterList | None,
    sequence_mode: bool,
) -> dict[str, Counter]:
    domain_filter = domain_filter or DomainFilterList(frozenset())
    per_user: dict[str, Counter] = {}
    for rec in corpus:
        if trace_kind == "co_domain":
            entities = filter_domains(rec.urls, domain_filter)
        elif sequence_mode:
            entities = [",".join(rec.hashtags)] if rec.hashtags else []
        else:
            entities = list(rec.hashtags)
        if entities:
            per_user.setdefault(rec.user_id, Counter()).update(entities)
    return per_user


def build_user_entity_matrix(
    corpus: Corpus,
    trace_kind: str,
    min_unique_entities: int,
    min_df: int,
    domain_filter: DomainFilterList | None = None,
    sequence_mode: bool = False,
) -> UserEntityMatrix:
    """TF-IDF-weighted users x entities matrix for a bipartite trace.

    Users sharing fewer than `min_unique_entities` unique entities are
    dropped first; entities present for fewer than `min_df` of the
    remaining users are dropped next; users left with empty rows go last.
    Weights are tf * (ln((1+N)/(1+df)) + 1) with raw-count tf, then each
    row is L2-normalized.
    """
    if trace_kind not in ("co_domain", "co_hashtag"):
        raise ConfigError(f"bipartite matrix undefined for {trace_kind!r}")
    per_user = _user_entity_counts(corpus, trace_kind, domain_filter, sequence_mode)
    active = {
        u: c for u, c in per_user.items() if len(c) >= min_unique_entities
    }
    if not active:
        raise EmptyMatrixError(
            f"no user shares >= {min_unique_entities} unique entities for "
            f"trace {trace_kind!r}"
        )
    df: Counter = Counter()
    for counts in active.values():
        df.update(counts.keys())
    kept_entities = sorted(e for e, d in df.items() if d >= min_df)
    entity_index = {e: i for i, e in enumerate(kept_entities)}
    n_users = len(active)

    users = []
    rows, cols, vals = [], [], []
    row_norms = []
    r = 0
    for user in sorted(active):
        counts = active[user]
        entries = []
        for entity, tf in counts.items():
            j = entity_index.get(entity)
            if j is None:
                continue
            idf = math.log((1 + n_users) / (1 + df[entity])) + 1.0
            entries.append((j, tf * idf))
        if not entries:
            continue
        norm = math.sqrt(sum(w * w for _, w in entries))
        for j, w in sorted(entries):
            rows.append(r)
            cols.append(j)
            vals.append(w / norm)
        users.append(user)
        row_norms.append(norm)
        r += 1
    if not users:
        raise EmptyMatrixError(
            f"all users lost their entities to the min_df={min_df} filter"
        )
    weights = csr_matrix(
        (vals, (rows, cols)), shape=(len(users), len(kept_entities))
    )
    return UserEntityMatrix(
        users=users,
        entities=kept_entities,
        weights=weights,
        row_norms=np.array(row_norms),
    )


def project_similarity(
    matrix: UserEntityMatrix,
    sim_threshold: float,
    keep_isolates: bool = False,
    trace_kind: str | None = None,
) -> SimilarityGraph:
    """Project the user-entity matrix into a user similarity graph.

    Rows are unit vectors, so the pairwise dot product is the cosine; an
    edge (u, v) exists iff the cosine is >= sim_threshold.
    """
    x = matrix.weights
    sims = (x @ x.T).tocoo()
    edges: dict[tuple[str, str], float] = {}
    for i, j, s in zip(sims.row, sims.col, sims.data):
        if i < j and s >= sim_threshold:
            edges[(matrix.users[i], matrix.users[j])] = float(s)
    nodes = matrix.users if keep_isolates else ()
    meta = {"trace_kind": trace_kind, "sim_threshold": sim_threshold}
    return SimilarityGraph(edges, nodes=nodes, metadata=meta)


def build_trace_graph(
    corpus: Corpus,
    config: TraceConfig,
    domain_filter: DomainFilterList | None = None,
    embedding_provider=None,
) -> SimilarityGraph:
    """Build one of the three trace networks from a corpus."""
    if config.trace_kind == "text_similarity":
        return build_text_similarity_graph(
            corpus,
            embedding_provider or HashedNgramEmbedder(),
            config.sim_threshold,
            PreprocessConfig(min_tokens=config.min_tokens),
            keep_isolates=config.keep_isolates,
        )
    matrix = build_user_entity_matrix(
        corpus,
        config.trace_kind,
        config.min_unique_entities,
        config.min_df,
        domain_filter=domain_filter,
        sequence_mode=config.sequence_mode,
    )
    return project_similarity(
        matrix, config.sim_threshold, config.keep_isolates, config.trace_kind
    )


# ---------------------------------------------------------------------------
# Text similarity


@dataclass
class PreprocessConfig:
    min_tokens: int = 4
    strip_urls: bool = True


_URL_RE = re.compile(r"https?://\S+|www\.\S+")
_STOPWORDS: dict[str, frozenset[str]] = {}


def _stopwords(lang: str) -> frozenset[str]:
    if lang not in _STOPWORDS:
        name = {"en": "stopwords_en.txt", "es": "stopwords_es.txt"}.get(lang)
        _STOPWORDS[lang] = (
            frozenset(_load_data_lines(name)) if name else frozenset()
        )
    return _STOPWORDS[lang]


def _is_emoji_or_symbol(ch: str) -> bool:
    return unicodedata.category(ch) in ("So", "Sk", "Sm", "Sc", "Cs", "Co")


def clean_text(text: str, lang: str, config: PreprocessConfig) -> list[str]:
    """Lowercase, strip URLs, punctuation, emoji/symbols, and stopwords."""
    if config.strip_urls:
        text = _URL_RE.sub(" ", text)
    chars = []
    for ch in text.lower():
        if _is_emoji_or_symbol(ch):
            chars.append(" ")
        elif unicodedata.category(ch).startswith("P"):
            chars.append(" ")
        else:
            chars.append(ch)
    stop = _stopwords(lang)
    return [tok for tok in "".join(chars).split() if tok not in stop]


def build_text_similarity_graph(
    corpus: Corpus,
    embedding_provider,
    sim_threshold: float,
    preprocess: PreprocessConfig | None = None,
    keep_isolates: bool = False,
) -> SimilarityGraph:
    """User similarity from near-duplicate tweet text.

    Tweets are cleaned and embedded; two users are connected when any
    cross-user tweet pair reaches the cosine threshold, weighted by the
    maximum qualifying pair cosine.
    """
    preprocess = preprocess or PreprocessConfig()
    tweet_ids, texts, owners = [], [], []
    for rec in corpus:
        tokens = clean_text(rec.text, rec.lang, preprocess)
        if len(tokens) < preprocess.min_tokens:
            continue
        tweet_ids.append(rec.tweet_id)
        texts.append(" ".join(tokens))
        owners.append(rec.user_id)
    meta = {"trace_kind": "text_similarity", "sim_threshold": sim_threshold}
    if not tweet_ids:
        return SimilarityGraph(metadata=meta)
    emb = embedding_provider.embed_tweets(tweet_ids, texts)
    emb = np.asarray(emb, dtype=float)
    if emb.ndim != 2 or emb.shape[0] != len(tweet_ids):
        raise ProviderError("embedding provider returned a malformed array")
    dim = getattr(embedding_provider, "dimension", emb.shape[1])
    if emb.shape[1] != dim:
        raise ProviderError(
            f"embedding dimension mismatch: got {emb.shape[1]}, expected {dim}"
        )
    edges: dict[tuple[str, str], float] = {}
    block = 512
    for start in range(0, len(tweet_ids), block):
        stop = min(start + block, len(tweet_ids))
        sims = emb[start:stop] @ emb.T
        ii, jj = np.nonzero(sims >= sim_threshold)
        for i, j in zip(ii, jj):
            gi = start + int(i)
            gj = int(j)
            if gj <= gi or owners[gi] == owners[gj]:
                continue
            u, v = sorted((owners[gi], owners[gj]))
            s = float(sims[i, j])
            if edges.get((u, v), -1.0) < s:
                edges[(u, v)] = min(s, 1.0)
    nodes = sorted(set(owners)) if keep_isolates else ()
    return SimilarityGraph(edges, nodes=nodes, metadata=meta)
