"""Fusing trace networks and comparing the five dismantling strategies.

Run: python3 demos/03_fuse_and_dismantle.py
"""

from coordnet import (
    CampaignSpec,
    DismantleConfig,
    DomainFilterList,
    GroupSpec,
    TraceConfig,
    build_trace_graph,
    fuse,
)
from coordnet.dismantle import STRATEGIES, run_strategy
from coordnet.synth import generate

spec = CampaignSpec(
    n_organic=150,
    groups=[GroupSpec(size=8, kinds=("domains", "hashtags"))
            for _ in range(2)],
    seed=3,
)
corpus, _ = generate(spec)
no_filter = DomainFilterList(frozenset())
graphs = [
    build_trace_graph(corpus, TraceConfig.default(k), domain_filter=no_filter)
    for k in ("co_domain", "co_hashtag")
]
fused = fuse(graphs)
print(f"fused network: {fused.num_nodes} nodes, {fused.num_edges} edges")
multi = sum(1 for s in fused.supports.values() if s > 1)
print(f"edges supported by both traces: {multi}")

print(f"\n{'strategy':30s} {'nodes':>6s} {'edges':>6s} "
      f"{'clusters':>8s} {'Q':>7s}")
for name in STRATEGIES:
    _, report = run_strategy(fused, corpus, DismantleConfig(strategy=name),
                             louvain_seed=0)
    q = "--" if report["modularity"] is None else f"{report['modularity']:.3f}"
    print(f"{name:30s} {report['nodes']:6d} {report['edges']:6d} "
          f"{report['clusters']:8d} {q:>7s}")
