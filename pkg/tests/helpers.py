"""Shared test helpers: corpus builders and independent reference
implementations (oracles) for similarity projection, modularity,
eigenvector centrality, and report tallies.

The oracles deliberately favor clarity over speed: pure-Python data
structures, quadratic all-pairs loops, exhaustive enumeration, and dense
numpy solvers.
"""

from __future__ import annotations

import math
import random
from datetime import datetime, timedelta, timezone

import numpy as np

from coordnet import Corpus, SimilarityGraph, TweetRecord, extract_base_domain
from coordnet.errors import DomainExtractionError

UTC = timezone.utc
T0 = datetime(2024, 6, 1, 12, 0, 0, tzinfo=UTC)


def make_record(
    tweet_id,
    user_id,
    created=T0,
    lang="en",
    text="just some ordinary words here",
    hashtags=(),
    urls=(),
    **counts,
):
    if isinstance(created, (int, float)):
        created = T0 + timedelta(seconds=created)
    return TweetRecord(
        tweet_id=str(tweet_id),
        user_id=str(user_id),
        created_at=created,
        lang=lang,
        text=text,
        hashtags=tuple(hashtags),
        urls=tuple(urls),
        **counts,
    )


def make_corpus(records):
    return Corpus(records)


# ---------------------------------------------------------------------------
# Naive bipartite-trace reference (pure Python, quadratic all-pairs)


def naive_bipartite_edges(
    corpus, kind, min_unique, min_df, threshold, blocked=frozenset()
):
    """Reference TF-IDF + cosine projection for co_domain / co_hashtag."""
    per_user: dict[str, dict[str, int]] = {}
    for rec in corpus:
        if kind == "co_domain":
            ents = []
            for url in rec.urls:
                try:
                    dom = extract_base_domain(url)
                except DomainExtractionError:
                    continue
                if dom not in blocked:
                    ents.append(dom)
        else:
            ents = list(rec.hashtags)
        if ents:
            counts = per_user.setdefault(rec.user_id, {})
            for e in ents:
                counts[e] = counts.get(e, 0) + 1

    active = {u: c for u, c in per_user.items() if len(c) >= min_unique}
    if not active:
        return {}
    n_users = len(active)
    df: dict[str, int] = {}
    for counts in active.values():
        for e in counts:
            df[e] = df.get(e, 0) + 1
    kept = {e for e, d in df.items() if d >= min_df}

    vectors: dict[str, dict[str, float]] = {}
    for user, counts in active.items():
        vec = {}
        for e, tf in counts.items():
            if e in kept:
                vec[e] = tf * (math.log((1 + n_users) / (1 + df[e])) + 1.0)
        if vec:
            norm = math.sqrt(math.fsum(w * w for w in vec.values()))
            vectors[user] = {e: w / norm for e, w in vec.items()}

    edges = {}
    users = sorted(vectors)
    for i in range(len(users)):
        for j in range(i + 1, len(users)):
            a, b = vectors[users[i]], vectors[users[j]]
            s = math.fsum(a[e] * b[e] for e in a if e in b)
            if s >= threshold:
                edges[(users[i], users[j])] = s
    return edges


def naive_text_edges(corpus, provider, threshold, min_tokens=4):
    """Reference near-duplicate-text projection: quadratic tweet-pair scan."""
    from coordnet.traces import PreprocessConfig, clean_text

    pre = PreprocessConfig(min_tokens=min_tokens)
    items = []
    for rec in corpus:
        tokens = clean_text(rec.text, rec.lang, pre)
        if len(tokens) >= min_tokens:
            items.append((rec.user_id, " ".join(tokens)))
    if not items:
        return {}
    emb = provider.embed_tweets([str(i) for i in range(len(items))],
                                [t for _, t in items])
    edges = {}
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i][0] == items[j][0]:
                continue
            s = float(np.dot(emb[i], emb[j]))
            if s >= threshold:
                u, v = sorted((items[i][0], items[j][0]))
                s = min(s, 1.0)
                if edges.get((u, v), -1.0) < s:
                    edges[(u, v)] = s
    return edges


# ---------------------------------------------------------------------------
# Graph oracles


def naive_modularity(graph, assignment, resolution=1.0):
    """Textbook double-sum modularity over all ordered node pairs."""
    nodes = list(graph.nodes)
    two_w = 2.0 * graph.total_weight()
    q = 0.0
    for u in nodes:
        for v in nodes:
            if assignment[u] != assignment[v]:
                continue
            a_uv = graph.weight(u, v) if graph.has_edge(u, v) else 0.0
            q += a_uv - resolution * graph.strength(u) * graph.strength(v) / two_w
    return q / two_w


def enumerate_partitions(items):
    """All set partitions of `items` as node -> block-index dicts."""
    items = list(items)

    def rec(i, blocks):
        if i == len(items):
            yield {u: b for b, block in enumerate(blocks) for u in block}
            return
        for b in blocks:
            b.append(items[i])
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        yield from rec(i + 1, blocks)
        blocks.pop()

    yield from rec(0, [])


def best_partition_modularity(graph, resolution=1.0):
    """Exhaustive-search optimum modularity (feasible for n <= ~10)."""
    best = -math.inf
    for assignment in enumerate_partitions(graph.nodes):
        best = max(best, naive_modularity(graph, assignment, resolution))
    return best


def dense_eig_scores(graph):
    """Dense-solver eigenvector centrality with the same normalization:
    per-component leading eigenvector, then global max rescaled to 1."""
    from coordnet import connected_components

    comp = connected_components(graph)
    members: dict[int, list[str]] = {}
    for node in graph.nodes:
        members.setdefault(comp[node], []).append(node)
    scores = {}
    for nodes in members.values():
        if len(nodes) == 1:
            scores[nodes[0]] = 1.0
            continue
        index = {n: i for i, n in enumerate(nodes)}
        a = np.zeros((len(nodes), len(nodes)))
        for u in nodes:
            for v, w in graph.neighbors(u).items():
                a[index[u], index[v]] = w
        vals, vecs = np.linalg.eigh(a)
        lead = np.abs(vecs[:, np.argmax(vals)])
        for n, s in zip(nodes, lead):
            scores[n] = float(s)
    peak = max(scores.values())
    return {n: s / peak for n, s in scores.items()}


def random_graph(rng: random.Random, n, p=0.5, wlo=0.1, whi=5.0, prefix="n"):
    """Seeded random weighted graph; regenerates until it has an edge."""
    while True:
        edges = {}
        names = [f"{prefix}{i:02d}" for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    edges[(names[i], names[j])] = rng.uniform(wlo, whi)
        if edges:
            return SimilarityGraph(edges, nodes=names)
