"""Acceptance gate: one test per release criterion, each printing a
single PASS line with its runtime and enforcing the stated budget.

Oracles are independent implementations from helpers.py (pure-Python
all-pairs TF-IDF/cosine, exhaustive partition enumeration, dense
eigen-solver, brute-force tallies).
"""

import hashlib
import math
import random
import time
from datetime import timedelta, timezone

import pytest

from coordnet import (
    CampaignSpec,
    DomainFilterList,
    GroupSpec,
    HashedNgramEmbedder,
    LexiconSentimentProvider,
    Partition,
    SimilarityGraph,
    TopHashtagTopicProvider,
    TraceConfig,
    build_trace_graph,
    cluster_entropy,
    connected_components,
    eigenvector_centrality,
    engagement_stats,
    evaluate_network,
    filter_edges_by_time,
    filter_edges_by_weight,
    find_bilingual_users,
    fuse,
    generate,
    jsd,
    louvain,
    modularity,
    pairwise_jsd,
    score_recovery,
    select_drivers,
    sentiment_timeline,
    top_entities,
    weighted_entropy,
)
from coordnet.dismantle import STRATEGIES, DismantleConfig, run_strategy
from coordnet.evaluate import ClusterTopicDistribution
from helpers import (
    dense_eig_scores,
    make_corpus,
    make_record,
    naive_bipartite_edges,
    naive_modularity,
    naive_text_edges,
    random_graph,
)

UTC = timezone.utc
NO_FILTER = DomainFilterList(frozenset())

# Hand-derived frozen values (base-2 normalized entropy / JSD):
H_75_25 = 0.8112781244591328
JSD_DIRAC_UNIFORM = 0.31127812445913283


class Budget:
    def __init__(self, criterion: str, seconds: float):
        self.criterion = criterion
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc_type is None:
            assert elapsed < self.seconds, (
                f"criterion {self.criterion} exceeded its {self.seconds}s "
                f"budget ({elapsed:.1f}s)"
            )
            print(f"PASS criterion {self.criterion} ({elapsed:.2f}s)")
        else:
            print(f"FAIL criterion {self.criterion} ({elapsed:.2f}s)")
        return False


def test_criterion_1_metric_exactness():
    with Budget("1 (metric exactness and bounds)", 5.0):
        assert cluster_entropy({"a": 0.75, "b": 0.25}) == pytest.approx(
            H_75_25, abs=1e-9
        )
        assert cluster_entropy({"a": 1.0}) == 0.0
        assert cluster_entropy({"a": 0.5, "b": 0.5}) == pytest.approx(
            1.0, abs=1e-9
        )
        clusters = [
            ClusterTopicDistribution(0, 3, {"a": 0.5, "b": 0.5}),
            ClusterTopicDistribution(1, 1, {"a": 1.0}),
        ]
        assert weighted_entropy(clusters) == pytest.approx(0.75, abs=1e-9)
        assert jsd({"a": 1.0}, {"a": 0.5, "b": 0.5}) == pytest.approx(
            JSD_DIRAC_UNIFORM, abs=1e-9
        )
        assert jsd({"a": 1.0}, {"b": 1.0}) == pytest.approx(1.0, abs=1e-9)
        mean, _ = pairwise_jsd([
            ClusterTopicDistribution(0, 3, {"a": 1.0}),
            ClusterTopicDistribution(1, 3, {"b": 1.0}),
            ClusterTopicDistribution(2, 3, {"a": 0.5, "b": 0.5}),
        ])
        assert mean == pytest.approx((1 + 2 * JSD_DIRAC_UNIFORM) / 3, abs=1e-9)

        rng = random.Random(0)
        for _ in range(10_000):
            k = rng.randint(1, 8)
            raw = [rng.random() + 1e-9 for _ in range(k)]
            total = math.fsum(raw)
            p = {f"t{i}": x / total for i, x in enumerate(raw)}
            k2 = rng.randint(1, 8)
            raw2 = [rng.random() + 1e-9 for _ in range(k2)]
            total2 = math.fsum(raw2)
            q = {f"t{i}": x / total2 for i, x in enumerate(raw2)}
            h = cluster_entropy(p)
            d = jsd(p, q)
            assert 0.0 <= h <= 1.0
            assert 0.0 <= d <= 1.0


def test_criterion_2_graph_core_oracles():
    with Budget("2 (graph-core oracles)", 60.0):
        # modularity exact against pairwise bookkeeping on every partition
        # of small graphs
        from helpers import enumerate_partitions

        for seed in range(5):
            rng = random.Random(seed)
            g = random_graph(rng, rng.randint(3, 6), p=0.6)
            for assignment in enumerate_partitions(g.nodes):
                assert modularity(g, assignment) == pytest.approx(
                    naive_modularity(g, assignment), abs=1e-12
                )

        # Louvain within 0.05 of the enumerated optimum on 50 seeded graphs
        for seed in range(50):
            rng = random.Random(1000 + seed)
            g = random_graph(rng, rng.randint(3, 8), p=rng.uniform(0.3, 0.9))
            part = louvain(g, seed=seed)
            best = max(
                modularity(g, a) for a in enumerate_partitions(g.nodes)
            )
            assert part.modularity >= best - 0.05
            assert part.modularity <= best + 1e-9

        # exact component recovery on disjoint cliques
        edges = {}
        for c in range(5):
            members = [f"q{c}m{i}" for i in range(4)]
            for i in range(4):
                for j in range(i + 1, 4):
                    edges[(members[i], members[j])] = 1.0
        g = SimilarityGraph(edges)
        part = louvain(g, seed=0)
        comp = connected_components(g)
        blocks = {}
        for node, cid in part.assignment.items():
            blocks.setdefault(cid, set()).add(node)
        comp_blocks = {}
        for node, cid in comp.items():
            comp_blocks.setdefault(cid, set()).add(node)
        assert set(map(frozenset, blocks.values())) == set(
            map(frozenset, comp_blocks.values())
        )

        # eigenvector centrality vs dense solver, 50 graphs, n <= 50
        for seed in range(50):
            rng = random.Random(2000 + seed)
            g = random_graph(rng, rng.randint(2, 50), p=rng.uniform(0.05, 0.6))
            got = eigenvector_centrality(g).scores
            expected = dense_eig_scores(g)
            linf = max(abs(got[n] - expected[n]) for n in g.nodes)
            assert linf <= 1e-6


def _random_corpus(rng, n_users, n_domains=30, n_tags=30, max_tweets=10):
    recs = []
    t = 0
    for i in range(n_users):
        user = f"u{i:03d}"
        for _ in range(rng.randint(1, max_tweets)):
            urls = (
                [f"https://d{rng.randrange(n_domains):02d}.com/x"]
                if rng.random() < 0.8 else []
            )
            tags = [
                f"h{rng.randrange(n_tags):02d}"
                for _ in range(rng.randint(0, 3))
            ]
            recs.append(
                make_record(f"t{t:05d}", user, created=t * 31, urls=urls,
                            hashtags=tags)
            )
            t += 1
    return make_corpus(recs)


def test_criterion_3_trace_oracle():
    with Budget("3 (trace-construction oracle)", 30.0):
        for seed in (0, 1):
            rng = random.Random(seed)
            corpus = _random_corpus(rng, 200, n_domains=25, n_tags=20)
            for kind, (mue, mdf, thr) in (
                ("co_domain", (3, 3, 0.6)),
                ("co_hashtag", (6, 5, 0.7)),
            ):
                cfg = TraceConfig(kind, mue, mdf, thr)
                g = build_trace_graph(corpus, cfg, domain_filter=NO_FILTER)
                expected = naive_bipartite_edges(corpus, kind, mue, mdf, thr)
                got = {(u, v): w for u, v, w in g.edges()}
                assert set(got) == set(expected)
                for key, w in expected.items():
                    assert got[key] == pytest.approx(w, abs=1e-12)

        # wired defaults match the documented thresholds
        assert TraceConfig.default("co_domain").sim_threshold == 0.6
        assert TraceConfig.default("co_hashtag").sim_threshold == 0.7
        assert TraceConfig.default("text_similarity", "en").sim_threshold == 0.90
        assert TraceConfig.default("text_similarity", "es").sim_threshold == 0.95

        # text-similarity trace vs the quadratic tweet-pair reference, at
        # both language thresholds
        rng = random.Random(7)
        vocab = ["melon", "copper", "violet", "anchor", "summit", "piano",
                 "stream", "object", "ribbon", "coral", "timber", "quartz"]
        templates = [
            " ".join(rng.choice(vocab) for _ in range(8)) for _ in range(6)
        ]
        recs = []
        for i in range(450):
            base = rng.choice(templates).split()
            if rng.random() < 0.6:
                base[rng.randrange(len(base))] = rng.choice(vocab)
            recs.append(
                make_record(f"t{i}", f"u{i % 150:03d}", created=i,
                            text=" ".join(base))
            )
        corpus = make_corpus(recs)
        provider = HashedNgramEmbedder()
        for thr in (0.90, 0.95):
            g = build_trace_graph(
                corpus,
                TraceConfig("text_similarity", 1, 1, thr),
                embedding_provider=provider,
            )
            expected = naive_text_edges(corpus, provider, thr)
            got = {(u, v): w for u, v, w in g.edges()}
            assert set(got) == set(expected)
            for key, w in expected.items():
                assert got[key] == pytest.approx(w, abs=1e-12)


def test_criterion_4_dismantling_contracts():
    with Budget("4 (dismantling contracts)", 30.0):
        # weight filter keeps exactly ceil(0.3 * |E|)
        rng = random.Random(3)
        for n_edges in (1, 7, 10, 33, 100, 501):
            g = SimilarityGraph({
                (f"x{i:03d}", f"y{i:03d}"): rng.random() + 0.01
                for i in range(n_edges)
            })
            assert filter_edges_by_weight(g, 0.3).num_edges == math.ceil(
                0.3 * n_edges
            )

        # time filter: brute force on 1,000 random node pairs + monotone
        rng = random.Random(4)
        times = {
            f"u{i:03d}": sorted(
                rng.randrange(0, 10**6) for _ in range(rng.randint(1, 6))
            )
            for i in range(150)
        }
        recs = [
            make_record(f"{u}-{k}", u, created=s)
            for u, ts in times.items()
            for k, s in enumerate(ts)
        ]
        corpus = make_corpus(recs)
        names = sorted(times)
        pairs = set()
        while len(pairs) < 1000:
            u, v = rng.sample(names, 2)
            pairs.add((min(u, v), max(u, v)))
        g = SimilarityGraph({p: 1.0 for p in pairs})
        prev_kept = set()
        for secs in (500, 5000, 50000, 500000):
            window = timedelta(seconds=secs)
            out = filter_edges_by_time(g, corpus, window)
            kept = {(u, v) for u, v, _ in out.edges()}
            for u, v in pairs:
                expected = any(
                    abs(a - b) <= secs for a in times[u] for b in times[v]
                )
                assert ((u, v) in kept) == expected
            assert prev_kept <= kept
            prev_kept = kept

        # five strategy pipelines on the synthetic fixture
        spec = CampaignSpec(
            n_organic=120,
            groups=[GroupSpec(size=8, kinds=("domains", "hashtags"))
                    for _ in range(2)],
            seed=11,
        )
        corpus, _ = generate(spec)
        graphs = [
            build_trace_graph(corpus, TraceConfig.default(k),
                              domain_filter=NO_FILTER)
            for k in ("co_domain", "co_hashtag")
        ]
        fused = fuse(graphs)
        for name in STRATEGIES:
            out, report = run_strategy(
                fused, corpus, DismantleConfig(strategy=name), louvain_seed=11
            )
            assert report["strategy"] == name
            assert report["nodes"] == out.num_nodes
            assert report["edges"] == out.num_edges
            if report["edges"]:
                assert report["clusters"] >= 1
                assert -1.0 <= report["modularity"] <= 1.0
            else:
                assert report["modularity"] is None


def _recovery_pipeline(seed):
    """Default campaign -> traces -> fuse -> 0.3 weight filter -> Louvain."""
    spec = CampaignSpec.default(seed=seed)
    corpus, truth = generate(spec)
    graphs = [
        build_trace_graph(corpus, TraceConfig.default(k),
                          domain_filter=NO_FILTER)
        for k in ("co_domain", "co_hashtag")
    ]
    fused = fuse(graphs)
    filtered = filter_edges_by_weight(fused, 0.3)
    part = louvain(filtered, seed=seed)
    return corpus, truth, filtered, part


def test_criterion_5_end_to_end_recovery():
    with Budget("5 (end-to-end planted recovery)", 120.0):
        corpus, truth, filtered, part = _recovery_pipeline(seed=42)
        # drivers at the top 5% of the dismantled network exist and are
        # drawn from it; recovery is scored on the full partition, which
        # is what identifies the coordinated groups
        drivers = select_drivers(filtered, 0.05, network_label="fused")
        assert drivers.users <= set(filtered.nodes)
        metrics = score_recovery(truth, part)
        assert metrics["pairwise_f1"] >= 0.9, metrics
        assert metrics["nmi"] >= 0.8, metrics


def test_criterion_6_determinism(tmp_path):
    with Budget("6 (byte-identical artifacts)", 120.0):
        from coordnet.cli import main

        def run_all(out_dir, threads):
            base = ["--out-dir", str(out_dir), "--seed", "7",
                    "--threads", threads]
            steps = [
                ["synth", "--organic", "80", "--groups", "2",
                 "--group-size", "6"],
                ["ingest", "--input", str(out_dir / "synthetic.jsonl")],
                ["build-trace", "--kind", "co_domain"],
                ["build-trace", "--kind", "co_hashtag"],
                ["build-trace", "--kind", "text_similarity"],
                ["fuse"],
                ["dismantle", "--strategy", "weight_only"],
                ["cluster", "--graph", "dismantled_weight_only"],
                ["score", "--partition", "dismantled_weight_only"],
                ["evaluate"],
                ["drivers", "--graph", "fused", "--percentile", "0.05"],
                ["report"],
            ]
            for step in steps:
                assert main(base + step) == 0, step

        def digest(out_dir):
            return {
                p.name: hashlib.sha256(p.read_bytes()).hexdigest()
                for p in sorted(out_dir.iterdir()) if p.is_file()
            }

        d1, d2 = tmp_path / "run1", tmp_path / "run2"
        run_all(d1, threads="1")
        run_all(d2, threads="8")
        assert digest(d1) == digest(d2)


def test_criterion_7_quality_scatter_shape():
    with Budget("7 (quality-scatter quadrant shape)", 300.0):
        topic_provider = TopHashtagTopicProvider()
        for seed in range(20):
            spec = CampaignSpec(
                n_organic=150,
                groups=[GroupSpec(size=8, kinds=("domains", "hashtags"))
                        for _ in range(3)],
                seed=seed,
            )
            corpus, truth = generate(spec)
            graphs = [
                build_trace_graph(corpus, TraceConfig.default(k),
                                  domain_filter=NO_FILTER)
                for k in ("co_domain", "co_hashtag")
            ]
            filtered = filter_edges_by_weight(fuse(graphs), 0.3)
            topics = topic_provider.assign(corpus, filtered.nodes)

            # pure-recovery partition: planted groups as communities,
            # organic nodes as singletons (excluded by min_cluster_size)
            assignment = {}
            next_id = len(spec.groups)
            for node in filtered.nodes:
                if truth.get(node) is not None:
                    assignment[node] = truth[node]
                else:
                    assignment[node] = next_id
                    next_id += 1
            recovery = Partition(assignment=assignment, modularity=0.0)
            rep_rec = evaluate_network(filtered, recovery, topics)

            rng = random.Random(10_000 + seed)
            rand_assign = {
                node: rng.randrange(len(spec.groups))
                for node in filtered.nodes
            }
            rand = Partition(assignment=rand_assign, modularity=0.0)
            rep_rand = evaluate_network(filtered, rand, topics)

            assert rep_rec.h_weighted < rep_rand.h_weighted, seed
            assert rep_rec.mean_jsd > rep_rand.mean_jsd, seed


def test_criterion_8_report_correctness():
    with Budget("8 (report brute-force agreement)", 60.0):
        spec = CampaignSpec(
            n_organic=70,
            groups=[GroupSpec(size=5, kinds=("domains", "hashtags"))],
            seed=13,
        )
        corpus, _ = generate(spec)
        assert len(corpus) >= 1000
        users = sorted(corpus.users())[:40]

        # top_entities (hashtags)
        tag_counts = {}
        for u in users:
            for rec in corpus.records_for_user(u):
                for t in rec.hashtags:
                    tag_counts[t] = tag_counts.get(t, 0) + 1
        expected = sorted(tag_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        rows = top_entities(corpus, users, "hashtags", 10)
        assert [(r["entity"], r["frequency"]) for r in rows] == expected[:10]

        # top_entities (domains)
        from coordnet import extract_base_domain

        dom_counts = {}
        for u in users:
            for rec in corpus.records_for_user(u):
                for url in rec.urls:
                    d = extract_base_domain(url)
                    dom_counts[d] = dom_counts.get(d, 0) + 1
        expected = sorted(dom_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        rows = top_entities(corpus, users, "domains", 10)
        assert [(r["entity"], r["frequency"]) for r in rows] == expected[:10]

        # engagement_stats
        tallies = [0, 0, 0, 0]
        n = 0
        for u in users:
            for rec in corpus.records_for_user(u):
                tallies[0] += rec.like_count
                tallies[1] += rec.retweet_count
                tallies[2] += rec.quote_count
                tallies[3] += rec.reply_count
                n += 1
        stats = engagement_stats(corpus, users)
        assert stats.avg_likes == tallies[0] / n
        assert stats.avg_retweets == tallies[1] / n
        assert stats.avg_quotes == tallies[2] / n
        assert stats.avg_replies == tallies[3] / n

        # find_bilingual_users
        expected_bi = set()
        for u in corpus.users():
            langs = [r.lang for r in corpus.records_for_user(u)]
            if langs.count("en") >= 1 and langs.count("es") >= 1:
                expected_bi.add(u)
        bi = find_bilingual_users(corpus, "en", "es")
        assert bi == expected_bi

        # driver_language_overlap
        from coordnet import driver_language_overlap

        a = users[:10]
        b = users[5:15]
        out = driver_language_overlap(a, b, bi)
        assert out["a_bilingual"] == sorted(set(a) & bi)
        assert out["b_bilingual"] == sorted(set(b) & bi)
        assert out["shared_drivers"] == sorted(set(a) & set(b))

        # sentiment_timeline against a per-record brute force
        provider = LexiconSentimentProvider()
        timeline = sentiment_timeline(corpus, users, provider,
                                      year_range=(2024, 2024))
        expected_months = {}
        excluded = 0
        for u in users:
            for rec in corpus.records_for_user(u):
                if rec.created_at.year != 2024:
                    excluded += 1
                    continue
                key = rec.created_at.strftime("%Y-%m")
                bucket = expected_months.setdefault(
                    key, {"positive": 0, "negative": 0, "neutral": 0}
                )
                bucket[provider.classify(rec.text, rec.lang, rec.tweet_id)] += 1
        assert timeline["months"] == expected_months
        assert timeline["excluded"] == excluded
