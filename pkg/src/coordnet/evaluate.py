"""Unsupervised clustering-quality scoring.

A partition is judged by intra-cluster topic homogeneity (normalized
entropy, size-weighted) and inter-cluster separation (mean pairwise
Jensen-Shannon divergence, base 2). Good partitions sit at low weighted
entropy and high mean JSD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import EvaluationError
from .graphs import Partition, SimilarityGraph

_PROB_TOL = 1e-9


@dataclass
class ClusterTopicDistribution:
    cluster_id: int
    size: int
    topic_probs: dict[str, float]


@dataclass
class QualityReport:
    h_weighted: float
    mean_jsd: float
    per_cluster: list[tuple[int, float, int, int]]  # (id, H_k, size, topic count)
    excluded_clusters: int
    strategy: str = ""
    degenerate: bool = False
    jsd_matrix: dict[tuple[int, int], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "h_weighted": self.h_weighted,
            "mean_jsd": self.mean_jsd,
            "degenerate": self.degenerate,
            "excluded_clusters": self.excluded_clusters,
            "per_cluster": [
                {"cluster": c, "entropy": h, "size": s, "topics": t}
                for c, h, s, t in self.per_cluster
            ],
        }


def _validate_probs(probs: Sequence[float]) -> None:
    if any(p < 0 for p in probs):
        raise EvaluationError("negative probability")
    if abs(sum(probs) - 1.0) > _PROB_TOL:
        raise EvaluationError(f"probabilities sum to {sum(probs)}, not 1")


def cluster_entropy(topic_probs: Mapping[str, float] | Sequence[float]) -> float:
    """Normalized entropy in [0, 1]; a single-topic cluster scores 0."""
    probs = (
        list(topic_probs.values())
        if isinstance(topic_probs, Mapping)
        else list(topic_probs)
    )
    _validate_probs(probs)
    support = [p for p in probs if p > 0]
    if len(support) <= 1:
        return 0.0
    n_topics = len(probs)
    if n_topics == 1:
        return 0.0
    h = -sum(p * math.log(p) for p in support) / math.log(n_topics)
    return min(h, 1.0)


def weighted_entropy(clusters: Sequence[ClusterTopicDistribution]) -> float:
    """Cluster-size-weighted mean of normalized entropies."""
    if not clusters:
        raise EvaluationError("weighted entropy of an empty cluster list")
    total = sum(c.size for c in clusters)
    return sum(c.size * cluster_entropy(c.topic_probs) for c in clusters) / total


def _kl_bits(p: Sequence[float], q: Sequence[float]) -> float:
    return sum(pi * math.log2(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def jsd(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """Base-2 Jensen-Shannon divergence over the union of supports."""
    universe = sorted(set(p) | set(q))
    pv = [p.get(t, 0.0) for t in universe]
    qv = [q.get(t, 0.0) for t in universe]
    _validate_probs(pv)
    _validate_probs(qv)
    m = [(a + b) / 2.0 for a, b in zip(pv, qv)]
    val = 0.5 * _kl_bits(pv, m) + 0.5 * _kl_bits(qv, m)
    return min(max(val, 0.0), 1.0)


def pairwise_jsd(
    clusters: Sequence[ClusterTopicDistribution],
    topic_universe: Sequence[str] | None = None,
) -> tuple[float, dict[tuple[int, int], float]]:
    """Mean base-2 JSD over all unordered cluster pairs, plus the matrix.

    Fewer than two clusters yields mean 0 (the degenerate case is flagged
    by the caller). Zero-probability topics added by the shared universe
    change nothing.
    """
    if len(clusters) < 2:
        return 0.0, {}
    matrix: dict[tuple[int, int], float] = {}
    vals = []
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            d = jsd(clusters[i].topic_probs, clusters[j].topic_probs)
            matrix[(clusters[i].cluster_id, clusters[j].cluster_id)] = d
            vals.append(d)
    return sum(vals) / len(vals), matrix


def evaluate_network(
    graph: SimilarityGraph,
    partition: Partition,
    topic_assignments: Mapping[str, str],
    min_cluster_size: int = 3,
    strategy: str = "",
) -> QualityReport:
    """Score a partition's clustering quality.

    Clusters smaller than `min_cluster_size` or with no topic-assigned
    members are excluded (and counted); remaining clusters become topic
    distributions over their assigned members.
    """
    for node in graph.nodes:
        if node not in partition.assignment:
            raise EvaluationError(f"partition does not cover node {node!r}")
    clusters: list[ClusterTopicDistribution] = []
    excluded = 0
    for cid, members in sorted(partition.communities().items()):
        topics = [topic_assignments[m] for m in members if m in topic_assignments]
        if len(members) < min_cluster_size or not topics:
            excluded += 1
            continue
        n = len(topics)
        probs = {}
        for t in sorted(set(topics)):
            probs[t] = topics.count(t) / n
        clusters.append(
            ClusterTopicDistribution(cluster_id=cid, size=len(members),
                                     topic_probs=probs)
        )
    if not clusters:
        raise EvaluationError(
            f"all {excluded} clusters were excluded (size < {min_cluster_size} "
            "or no topic-assigned members)"
        )
    h_w = weighted_entropy(clusters)
    mean_j, matrix = pairwise_jsd(clusters)
    return QualityReport(
        h_weighted=h_w,
        mean_jsd=mean_j,
        per_cluster=[
            (c.cluster_id, cluster_entropy(c.topic_probs), c.size,
             len(c.topic_probs))
            for c in clusters
        ],
        excluded_clusters=excluded,
        strategy=strategy,
        degenerate=len(clusters) < 2,
        jsd_matrix=matrix,
    )
