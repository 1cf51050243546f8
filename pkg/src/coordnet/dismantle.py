"""Network dismantling: edge filters (weight percentile, shared time
window, sentiment agreement) and centrality-based node pruning, plus the
five named strategy pipelines used for clustering-quality comparisons.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from datetime import timedelta

from .errors import ConfigError, ConsistencyError, CoordnetError
from .graphs import SimilarityGraph, eigenvector_centrality, louvain
from .ingest import Corpus
from .providers import LexiconSentimentProvider, NEUTRAL

STRATEGIES = (
    "none",
    "weight_only",
    "time_sentiment_only",
    "prune_only",
    "time_sentiment_plus_prune",
)


@dataclass
class DismantleConfig:
    strategy: str = "none"
    keep_top_weight_fraction: float = 0.3
    time_window: timedelta = timedelta(hours=1)
    require_sentiment_match: bool = True
    centrality_threshold: float = 1e-2
    iterate_pruning: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if not 0.0 < self.keep_top_weight_fraction <= 1.0:
            raise ConfigError("keep_top_weight_fraction must lie in (0, 1]")


def filter_edges_by_weight(
    graph: SimilarityGraph, keep_top_fraction: float
) -> SimilarityGraph:
    """Keep exactly ceil(fraction * |E|) heaviest edges.

    Ties at the cut break in favor of the canonically smaller (u, v) pair.
    Nodes left isolated are dropped.
    """
    if not 0.0 < keep_top_fraction <= 1.0:
        raise ConfigError("keep_top_fraction must lie in (0, 1]")
    edges = list(graph.edges())
    if not edges:
        return graph.with_edges([])
    n_keep = math.ceil(keep_top_fraction * len(edges))
    ranked = sorted(edges, key=lambda e: (-e[2], e[0], e[1]))
    return graph.with_edges((u, v) for u, v, _ in ranked[:n_keep])


def _user_timestamps(graph: SimilarityGraph, corpus: Corpus) -> dict[str, list]:
    out = {}
    for node in graph.nodes:
        recs = corpus.records_for_user(node)
        if not recs:
            raise ConsistencyError(f"graph node {node!r} has no tweets in corpus")
        out[node] = sorted(r.created_at for r in recs)
    return out


def _min_gap_within(times_u, times_v, window: timedelta) -> bool:
    # sorted-merge scan: O(|u| + |v|) instead of all pairs
    i = j = 0
    while i < len(times_u) and j < len(times_v):
        a, b = times_u[i], times_v[j]
        if abs(a - b) <= window:
            return True
        if a < b:
            i += 1
        else:
            j += 1
    return False


def filter_edges_by_time(
    graph: SimilarityGraph, corpus: Corpus, window: timedelta
) -> SimilarityGraph:
    """Keep edges whose endpoints tweeted within `window` of each other."""
    times = _user_timestamps(graph, corpus)
    keep = [
        (u, v)
        for u, v, _ in graph.edges()
        if _min_gap_within(times[u], times[v], window)
    ]
    return graph.with_edges(keep)


def dominant_sentiment(corpus: Corpus, user: str, provider) -> str:
    """Mode of the user's per-tweet labels; any tie resolves to neutral."""
    counts: Counter[str] = Counter()
    for rec in corpus.records_for_user(user):
        counts[provider.classify(rec.text, rec.lang, rec.tweet_id)] += 1
    if not counts:
        raise ConsistencyError(f"user {user!r} has no tweets in corpus")
    best = max(counts.values())
    top = [label for label, c in counts.items() if c == best]
    return top[0] if len(top) == 1 else NEUTRAL


def filter_edges_by_sentiment(
    graph: SimilarityGraph, corpus: Corpus, sentiment_provider=None
) -> SimilarityGraph:
    """Keep edges whose endpoints share the same dominant sentiment."""
    provider = sentiment_provider or LexiconSentimentProvider()
    dom = {n: dominant_sentiment(corpus, n, provider) for n in graph.nodes}
    keep = [(u, v) for u, v, _ in graph.edges() if dom[u] == dom[v]]
    return graph.with_edges(keep)


def prune_nodes_by_centrality(
    graph: SimilarityGraph,
    threshold: float = 1e-2,
    iterate: bool = False,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> SimilarityGraph:
    """Drop nodes with eigenvector centrality below `threshold`.

    Single pass by default; with `iterate`, re-scores and prunes until no
    node falls below the threshold.
    """
    if graph.num_nodes == 0:
        raise CoordnetError("cannot prune an empty graph")
    while True:
        cv = eigenvector_centrality(graph, tol=tol, max_iter=max_iter)
        doomed = [n for n, s in cv.scores.items() if s < threshold]
        if len(doomed) == graph.num_nodes:
            raise CoordnetError(
                f"centrality threshold {threshold} prunes every node"
            )
        if not doomed:
            return graph
        graph = graph.without_nodes(doomed)
        if not iterate:
            return graph
        if graph.num_nodes == 0:
            raise CoordnetError(
                f"centrality threshold {threshold} prunes every node"
            )


def run_strategy(
    graph: SimilarityGraph,
    corpus: Corpus,
    config: DismantleConfig,
    sentiment_provider=None,
    louvain_seed: int = 0,
) -> tuple[SimilarityGraph, dict]:
    """Apply one named dismantling pipeline and report network properties.

    Edge filters always run before node pruning. The report carries the
    post-strategy node/edge counts and the Louvain cluster count and
    modularity (None for an edgeless result).
    """
    g = graph
    if config.strategy == "weight_only":
        g = filter_edges_by_weight(g, config.keep_top_weight_fraction)
    elif config.strategy in ("time_sentiment_only", "time_sentiment_plus_prune"):
        g = filter_edges_by_time(g, corpus, config.time_window)
        if config.require_sentiment_match:
            g = filter_edges_by_sentiment(g, corpus, sentiment_provider)
    if config.strategy in ("prune_only", "time_sentiment_plus_prune"):
        if g.num_nodes > 0:
            g = prune_nodes_by_centrality(
                g, config.centrality_threshold, iterate=config.iterate_pruning
            )
    if g.num_edges > 0:
        part = louvain(g, resolution=1.0, seed=louvain_seed)
        clusters, q = part.num_communities, part.modularity
    else:
        clusters, q = 0, None
    report = {
        "strategy": config.strategy,
        "nodes": g.num_nodes,
        "edges": g.num_edges,
        "clusters": clusters,
        "modularity": q,
    }
    return g, report
