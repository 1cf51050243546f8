"""Sparse weighted undirected graphs plus the network primitives the
pipeline is built on: connected components, per-component eigenvector
centrality, weighted modularity, Louvain community detection, and
multi-network fusion.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping
from xml.sax.saxutils import quoteattr

import numpy as np
from scipy.sparse import csr_matrix

from .errors import CoordnetError


class SimilarityGraph:
    """Undirected weighted graph over user ids.

    Nodes are kept in canonical (sorted) order and edges are reported
    sorted by (min(u,v), max(u,v)), so serialization is unique. Weights
    must be positive; self-loops are rejected.
    """

    def __init__(
        self,
        edges: Mapping[tuple[str, str], float] | Iterable[tuple[str, str, float]] = (),
        nodes: Iterable[str] = (),
        metadata: dict | None = None,
        supports: Mapping[tuple[str, str], int] | None = None,
    ):
        self._adj: dict[str, dict[str, float]] = {n: {} for n in nodes}
        items = edges.items() if isinstance(edges, Mapping) else (
            ((u, v), w) for u, v, w in edges
        )
        for (u, v), w in items:
            if u == v:
                raise CoordnetError(f"self-loop on {u!r}")
            if w <= 0:
                raise CoordnetError(f"non-positive weight on ({u!r}, {v!r})")
            self._adj.setdefault(u, {})[v] = w
            self._adj.setdefault(v, {})[u] = w
        self.nodes: tuple[str, ...] = tuple(sorted(self._adj))
        self.metadata: dict = dict(metadata or {})
        self.supports: dict[tuple[str, str], int] = {
            (min(u, v), max(u, v)): s for (u, v), s in (supports or {}).items()
        }

    # -- basic accessors ----------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values()) // 2

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._adj.get(u, {})

    def weight(self, u: str, v: str) -> float:
        return self._adj[u][v]

    def neighbors(self, u: str) -> dict[str, float]:
        return self._adj[u]

    def edges(self) -> Iterator[tuple[str, str, float]]:
        """Edges in canonical (u, v) order with u < v."""
        for u in self.nodes:
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v, self._adj[u][v]

    def total_weight(self) -> float:
        return sum(w for _, _, w in self.edges())

    def strength(self, u: str) -> float:
        return sum(self._adj[u].values())

    # -- derived graphs -----------------------------------------------------

    def with_edges(
        self, keep: Iterable[tuple[str, str]], drop_isolates: bool = True
    ) -> "SimilarityGraph":
        """Subgraph retaining only the given canonical edges."""
        keep = set(keep)
        edges = {
            (u, v): w for u, v, w in self.edges() if (u, v) in keep
        }
        supports = {e: s for e, s in self.supports.items() if e in edges}
        nodes = () if drop_isolates else self.nodes
        return SimilarityGraph(edges, nodes=nodes, metadata=self.metadata,
                               supports=supports)

    def without_nodes(
        self, remove: Iterable[str], drop_isolates: bool = True
    ) -> "SimilarityGraph":
        remove = set(remove)
        edges = {
            (u, v): w
            for u, v, w in self.edges()
            if u not in remove and v not in remove
        }
        supports = {e: s for e, s in self.supports.items() if e in edges}
        nodes = () if drop_isolates else (n for n in self.nodes if n not in remove)
        return SimilarityGraph(edges, nodes=nodes, metadata=self.metadata,
                               supports=supports)

    # -- serialization ------------------------------------------------------

    def to_edge_csv(self, path) -> None:
        """Canonical edge list: u,v,weight[,support], sorted by (u, v)."""
        with_support = bool(self.supports)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = ["u", "v", "weight"] + (["support"] if with_support else [])
            writer.writerow(header)
            for u, v, w in self.edges():
                row = [u, v, repr(w)]
                if with_support:
                    row.append(str(self.supports.get((u, v), 1)))
                writer.writerow(row)

    @classmethod
    def from_edge_csv(cls, path) -> "SimilarityGraph":
        edges: dict[tuple[str, str], float] = {}
        supports: dict[tuple[str, str], int] = {}
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            has_support = len(header) > 3
            for row in reader:
                u, v, w = row[0], row[1], float(row[2])
                edges[(u, v)] = w
                if has_support:
                    supports[(u, v)] = int(row[3])
        return cls(edges, supports=supports or None)

    def to_gexf(self, path, node_attrs: Mapping[str, Mapping[str, object]] | None = None) -> None:
        """GEXF 1.2 export with optional per-node attributes.

        `node_attrs` maps attribute name -> {node -> value}; values are
        written as strings (floats via repr for byte stability).
        """
        node_attrs = dict(node_attrs or {})
        attr_names = sorted(node_attrs)
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">',
            '  <graph defaultedgetype="undirected">',
        ]
        if attr_names:
            lines.append('    <attributes class="node">')
            for i, name in enumerate(attr_names):
                lines.append(
                    f'      <attribute id="{i}" title={quoteattr(name)} type="string"/>'
                )
            lines.append("    </attributes>")
        lines.append("    <nodes>")
        for n in self.nodes:
            attvals = []
            for i, name in enumerate(attr_names):
                if n in node_attrs[name]:
                    val = node_attrs[name][n]
                    sval = repr(val) if isinstance(val, float) else str(val)
                    attvals.append(
                        f'          <attvalue for="{i}" value={quoteattr(sval)}/>'
                    )
            if attvals:
                lines.append(f"      <node id={quoteattr(n)} label={quoteattr(n)}>")
                lines.append("        <attvalues>")
                lines.extend(attvals)
                lines.append("        </attvalues>")
                lines.append("      </node>")
            else:
                lines.append(f"      <node id={quoteattr(n)} label={quoteattr(n)}/>")
        lines.append("    </nodes>")
        lines.append("    <edges>")
        for i, (u, v, w) in enumerate(self.edges()):
            lines.append(
                f'      <edge id="{i}" source={quoteattr(u)} '
                f'target={quoteattr(v)} weight="{repr(w)}"/>'
            )
        lines.append("    </edges>")
        lines.append("  </graph>")
        lines.append("</gexf>")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Components


def connected_components(graph: SimilarityGraph) -> dict[str, int]:
    """Node -> component id; components numbered by smallest member node."""
    comp: dict[str, int] = {}
    next_id = 0
    for start in graph.nodes:  # sorted, so ids follow smallest members
        if start in comp:
            continue
        stack = [start]
        comp[start] = next_id
        while stack:
            u = stack.pop()
            for v in graph.neighbors(u):
                if v not in comp:
                    comp[v] = next_id
                    stack.append(v)
        next_id += 1
    return comp


# ---------------------------------------------------------------------------
# Eigenvector centrality


@dataclass
class CentralityVector:
    scores: dict[str, float]
    converged: bool = True
    normalization: str = "global-max = 1"


def eigenvector_centrality(
    graph: SimilarityGraph, tol: float = 1e-8, max_iter: int = 1000
) -> CentralityVector:
    """Weighted eigenvector centrality via per-component power iteration.

    Each connected component is iterated separately (whole-graph iteration
    would zero out every non-dominant component); the concatenated vector
    is rescaled so the global maximum equals 1. Iteration uses the shifted
    operator A + 0.5*I, which shares eigenvectors with A and suppresses the
    sign oscillation bipartite-like components would otherwise exhibit.
    """
    if graph.num_nodes == 0:
        raise CoordnetError("eigenvector centrality of an empty graph")
    comp = connected_components(graph)
    n_comp = max(comp.values()) + 1
    members: list[list[str]] = [[] for _ in range(n_comp)]
    for node in graph.nodes:
        members[comp[node]].append(node)

    scores: dict[str, float] = {}
    converged = True
    for nodes in members:
        if len(nodes) == 1:
            scores[nodes[0]] = 1.0
            continue
        index = {n: i for i, n in enumerate(nodes)}
        rows, cols, vals = [], [], []
        for u in nodes:
            for v, w in graph.neighbors(u).items():
                rows.append(index[u])
                cols.append(index[v])
                vals.append(w)
        a = csr_matrix((vals, (rows, cols)), shape=(len(nodes), len(nodes)))
        x = np.full(len(nodes), 1.0 / math.sqrt(len(nodes)))
        ok = False
        for _ in range(max_iter):
            y = a @ x + 0.5 * x
            y /= np.linalg.norm(y)
            if np.linalg.norm(y - x) < tol:
                x = y
                ok = True
                break
            x = y
        if not ok:
            converged = False
        for node, val in zip(nodes, x):
            scores[node] = float(val)

    peak = max(scores.values())
    scores = {n: s / peak for n, s in scores.items()}
    return CentralityVector(scores=scores, converged=converged)


# ---------------------------------------------------------------------------
# Modularity and Louvain


@dataclass
class Partition:
    assignment: dict[str, int]
    modularity: float
    resolution: float = 1.0

    @property
    def num_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for node in sorted(self.assignment):
            out.setdefault(self.assignment[node], []).append(node)
        return out


def modularity(
    graph: SimilarityGraph,
    assignment: Mapping[str, int],
    resolution: float = 1.0,
) -> float:
    """Weighted Newman modularity Q = sum_c [w_c/W - g*(s_c/2W)^2]."""
    total = graph.total_weight()
    if total <= 0:
        raise CoordnetError("modularity is undefined for an edgeless graph")
    for node in graph.nodes:
        if node not in assignment:
            raise CoordnetError(f"partition does not cover node {node!r}")
    intra: dict[int, float] = {}
    strength: dict[int, float] = {}
    for u, v, w in graph.edges():
        if assignment[u] == assignment[v]:
            intra[assignment[u]] = intra.get(assignment[u], 0.0) + w
    for node in graph.nodes:
        c = assignment[node]
        strength[c] = strength.get(c, 0.0) + graph.strength(node)
    q = 0.0
    for c in strength:
        q += intra.get(c, 0.0) / total
        q -= resolution * (strength[c] / (2.0 * total)) ** 2
    return q


class _LouvainLevel:
    """Integer-indexed working graph for one Louvain level.

    Self-loop weights store intra-community weight (counted once); node
    strength counts a self-loop twice, keeping modularity bookkeeping
    invariant under aggregation.
    """

    def __init__(self, adj: list[dict[int, float]], self_loops: list[float]):
        self.adj = adj
        self.self_loops = self_loops
        self.n = len(adj)
        self.strength = [
            sum(adj[i].values()) + 2.0 * self_loops[i] for i in range(self.n)
        ]
        self.total = (
            sum(sum(a.values()) for a in adj) / 2.0 + sum(self_loops)
        )

    def local_move(self, rng: random.Random, resolution: float) -> list[int]:
        """Greedy modularity-gain moving to a fixpoint.

        Gains are measured against leaving the node alone in an empty
        community (gain 0). Equal-gain candidates prefer the lowest
        community id, and an existing community beats going alone on a
        tie, so the pass is deterministic for a fixed visit order.
        """
        comm = list(range(self.n))
        comm_strength = list(self.strength)
        comm_size = [1] * self.n
        free: set[int] = set()
        order = list(range(self.n))
        rng.shuffle(order)
        two_w = 2.0 * self.total
        moved = True
        while moved:
            moved = False
            for v in order:
                c_old = comm[v]
                k_v = self.strength[v]
                comm_strength[c_old] -= k_v
                comm_size[c_old] -= 1
                if comm_size[c_old] == 0:
                    free.add(c_old)
                links: dict[int, float] = {}
                for u, w in self.adj[v].items():
                    cu = comm[u]
                    links[cu] = links.get(cu, 0.0) + w
                best_c = -1  # -1 means "alone in a fresh community"
                best_gain = 0.0
                for c in sorted(links):
                    gain = links[c] - resolution * comm_strength[c] * k_v / two_w
                    if gain > best_gain or (
                        gain == best_gain and (best_c == -1 or c < best_c)
                    ):
                        best_gain = gain
                        best_c = c
                if best_c == -1:
                    best_c = c_old if c_old in free else min(free)
                if best_c != c_old:
                    moved = True
                comm[v] = best_c
                comm_strength[best_c] += k_v
                comm_size[best_c] += 1
                free.discard(best_c)
        return comm

    def aggregate(self, comm: list[int]) -> tuple["_LouvainLevel", list[int]]:
        labels = sorted(set(comm))
        relabel = {c: i for i, c in enumerate(labels)}
        dense = [relabel[c] for c in comm]
        m = len(labels)
        adj: list[dict[int, float]] = [{} for _ in range(m)]
        self_loops = [0.0] * m
        for v in range(self.n):
            cv = dense[v]
            self_loops[cv] += self.self_loops[v]
            for u, w in self.adj[v].items():
                if u < v:
                    continue
                cu = dense[u]
                if cu == cv:
                    self_loops[cv] += w
                else:
                    adj[cv][cu] = adj[cv].get(cu, 0.0) + w
                    adj[cu][cv] = adj[cu].get(cv, 0.0) + w
        return _LouvainLevel(adj, self_loops), dense


def louvain(
    graph: SimilarityGraph, resolution: float = 1.0, seed: int = 0
) -> Partition:
    """Two-phase Louvain community detection.

    Node visit order is a seeded shuffle of the canonical node order and
    equal-gain moves prefer the lowest community id, so results are fully
    deterministic for a given seed. Community ids in the returned
    Partition are dense, numbered by first appearance in canonical node
    order; the reported modularity is recomputed from scratch.
    """
    if graph.num_edges == 0:
        raise CoordnetError("louvain requires at least one edge")
    rng = random.Random(seed)
    nodes = list(graph.nodes)
    index = {n: i for i, n in enumerate(nodes)}
    adj: list[dict[int, float]] = [
        {index[v]: w for v, w in graph.neighbors(u).items()} for u in nodes
    ]
    level = _LouvainLevel(adj, [0.0] * len(nodes))
    membership = list(range(len(nodes)))  # original node -> current super node
    while True:
        comm = level.local_move(rng, resolution)
        new_level, dense = level.aggregate(comm)
        if new_level.n == level.n:
            membership = [dense[m] for m in membership]
            break
        membership = [dense[m] for m in membership]
        level = new_level

    # dense relabel by first appearance in canonical node order
    relabel: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for node, c in zip(nodes, membership):
        if c not in relabel:
            relabel[c] = len(relabel)
        assignment[node] = relabel[c]
    q = modularity(graph, assignment, resolution)
    return Partition(assignment=assignment, modularity=q, resolution=resolution)


# ---------------------------------------------------------------------------
# Fusion


def fuse(graphs: list[SimilarityGraph]) -> SimilarityGraph:
    """Combine similarity graphs into one fused network.

    Per input graph, edge weights are min-max normalized to [0, 1] (a graph
    whose weights are all equal normalizes to 1.0); the fused weight is the
    arithmetic mean of normalized weights over the graphs containing the
    edge, recorded alongside a `support` count. Edges whose fused weight is
    0 (each input graph's unique minimum, when unsupported elsewhere) are
    dropped, as are nodes left isolated.
    """
    if len(graphs) < 2:
        raise CoordnetError("fusion requires at least two graphs")
    sums: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    for g in graphs:
        weights = [w for _, _, w in g.edges()]
        if not weights:
            continue
        lo, hi = min(weights), max(weights)
        span = hi - lo
        for u, v, w in g.edges():
            norm = 1.0 if span == 0 else (w - lo) / span
            key = (u, v)
            sums[key] = sums.get(key, 0.0) + norm
            counts[key] = counts.get(key, 0) + 1
    edges = {}
    supports = {}
    for key, s in sums.items():
        w = s / counts[key]
        if w > 0:
            edges[key] = w
            supports[key] = counts[key]
    kinds = [g.metadata.get("trace_kind") for g in graphs]
    meta = {"trace_kind": "+".join(sorted(str(k) for k in kinds if k)) or "fused"}
    return SimilarityGraph(edges, metadata=meta, supports=supports)
