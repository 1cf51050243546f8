"""Louvain clustering and unsupervised quality scoring (weighted topic
entropy vs mean pairwise Jensen-Shannon divergence).

Run: python3 demos/04_cluster_and_evaluate.py
"""

from coordnet import (
    CampaignSpec,
    DomainFilterList,
    GroupSpec,
    TopHashtagTopicProvider,
    TraceConfig,
    build_trace_graph,
    evaluate_network,
    filter_edges_by_weight,
    fuse,
    generate,
    louvain,
)

spec = CampaignSpec(
    n_organic=150,
    groups=[GroupSpec(size=8, kinds=("domains", "hashtags"))
            for _ in range(3)],
    seed=5,
)
corpus, truth = generate(spec)
no_filter = DomainFilterList(frozenset())
graphs = [
    build_trace_graph(corpus, TraceConfig.default(k), domain_filter=no_filter)
    for k in ("co_domain", "co_hashtag")
]
network = filter_edges_by_weight(fuse(graphs), 0.3)
part = louvain(network, seed=0)
print(f"network: {network.num_nodes} nodes, {network.num_edges} edges")
print(f"louvain: {part.num_communities} communities, "
      f"Q = {part.modularity:.3f}")

topics = TopHashtagTopicProvider().assign(corpus, network.nodes)
report = evaluate_network(network, part, topics)
print(f"\nquality: H_weighted = {report.h_weighted:.3f} (lower is purer), "
      f"mean JSD = {report.mean_jsd:.3f} (higher is better separated)")
print(f"excluded clusters (too small / no topics): "
      f"{report.excluded_clusters}")
for cid, h, size, n_topics in report.per_cluster:
    members = [n for n, c in part.assignment.items() if c == cid]
    n_planted = sum(truth.get(m) is not None for m in members)
    print(f"  cluster {cid}: size {size} ({n_planted} planted), "
          f"H = {h:.3f}, {n_topics} topics")
