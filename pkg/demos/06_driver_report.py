"""Driver selection and analyst reporting: eigenvector-centrality driver
accounts, their top entities, engagement, bilingual overlap, and a
monthly sentiment timeline.

Run: python3 demos/06_driver_report.py
"""

import json

from coordnet import (
    CampaignSpec,
    DomainFilterList,
    GroupSpec,
    TraceConfig,
    build_trace_graph,
    engagement_stats,
    filter_edges_by_weight,
    find_bilingual_users,
    fuse,
    generate,
    select_drivers,
    sentiment_timeline,
    top_entities,
)

spec = CampaignSpec(
    n_organic=150,
    groups=[GroupSpec(size=10, kinds=("domains", "hashtags"))],
    seed=8,
)
corpus, truth = generate(spec)
no_filter = DomainFilterList(frozenset())
graphs = [
    build_trace_graph(corpus, TraceConfig.default(k), domain_filter=no_filter)
    for k in ("co_domain", "co_hashtag")
]
network = filter_edges_by_weight(fuse(graphs), 0.3)

drivers = select_drivers(network, 0.10, network_label="fused")
planted = sum(truth.get(u) is not None for u in drivers.users)
print(f"drivers (top 10% by eigenvector centrality): "
      f"{sorted(drivers.users)} ({planted} planted)")

print("\ntop hashtags among drivers:")
for row in top_entities(corpus, drivers.users, "hashtags", 5):
    print(f"  #{row['entity']}: {row['frequency']}")

print("\ntop domains among drivers:")
for row in top_entities(corpus, drivers.users, "domains", 5):
    print(f"  {row['entity']}: {row['frequency']} "
          f"(factuality={row['factuality']}, leaning={row['leaning']})")

stats = engagement_stats(corpus, drivers.users)
print(f"\nengagement: {json.dumps(stats.to_dict(), sort_keys=True)}")

bilinguals = find_bilingual_users(corpus, "en", "es")
print(f"bilingual users in corpus: {len(bilinguals)}")

timeline = sentiment_timeline(corpus, drivers.users)
print("\nmonthly sentiment of driver tweets:")
for month, counts in timeline["months"].items():
    print(f"  {month}: +{counts['positive']} -{counts['negative']} "
          f"={counts['neutral']}")
