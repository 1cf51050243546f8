"""File-staged command-line pipeline.

Each subcommand reads upstream artifacts from the output directory,
writes its own artifacts plus a manifest recording the resolved-config
hash and input hashes, and refuses to build on stale upstream artifacts
unless --force is given. All outputs are byte-reproducible from
(inputs, config, seed).

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.
"""

from __future__ import annotations

import hashlib
import json
import sys
from datetime import timedelta
from pathlib import Path

import click
import yaml

from . import __version__
from .analysis import (
    driver_language_overlap,
    engagement_stats,
    find_bilingual_users,
    load_mbfc,
    select_drivers,
    sentiment_timeline,
    top_entities,
)
from .dismantle import STRATEGIES, DismantleConfig, run_strategy
from .errors import ConfigError, CoordnetError, EvaluationError
from .evaluate import evaluate_network
from .graphs import SimilarityGraph, fuse, louvain
from .ingest import Corpus, DomainFilterList, balanced_sample, parse_corpus
from .providers import (
    FileEmbeddingProvider,
    FileSentimentProvider,
    FileTopicProvider,
    HashedNgramEmbedder,
    LexiconSentimentProvider,
    TopHashtagTopicProvider,
)
from .synth import (
    CampaignSpec,
    GroupSpec,
    generate,
    read_ground_truth,
    score_recovery,
    write_ground_truth,
)
from .traces import TRACE_KINDS, TraceConfig, build_trace_graph

DEFAULT_CONFIG = {
    "input": None,
    "out_dir": "out",
    "seed": 0,
    "threads": 1,
    "lang_pair": ["en", "es"],
    "balanced_sample": False,
    "domain_filter": "en",
    "traces": {},
    "providers": {"embedding": "hashed-ngram", "sentiment": "lexicon",
                  "topics": "top-hashtag"},
    "dismantle": {
        "strategy": "none",
        "keep_top_weight_fraction": 0.3,
        "time_window_minutes": 60,
        "require_sentiment_match": True,
        "centrality_threshold": 0.01,
    },
    "evaluate": {"min_cluster_size": 3},
    "drivers": {"percentile": 0.05, "graph": "fused"},
    "report": {"year_range": [2024, 2024], "mbfc": None, "top_k": 10},
    "synth": {},
}


class StageError(CoordnetError):
    """A required upstream artifact is missing or stale."""


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = DEFAULT_CONFIG
    if path:
        with open(path, encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a mapping")
        cfg = _deep_merge(cfg, loaded)
    return _deep_merge(cfg, overrides)


# Keys with no bearing on artifact content; excluded from the config hash
# so identical pipelines in different directories (or with a different
# worker cap) produce byte-identical artifacts and manifests.
_NON_SEMANTIC_KEYS = ("out_dir", "threads")


def config_hash(cfg: dict) -> str:
    semantic = {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC_KEYS}
    canon = json.dumps(semantic, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", "utf-8")


class Pipeline:
    """Shared stage plumbing: artifact paths, manifests, staleness checks."""

    def __init__(self, cfg: dict, force: bool = False):
        self.cfg = cfg
        self.force = force
        self.out_dir = Path(cfg["out_dir"])
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.hash = config_hash(cfg)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def require(self, name: str, producer: str) -> Path:
        p = self.path(name)
        if not p.exists():
            raise StageError(
                f"missing artifact {name!r}; run the {producer!r} stage first"
            )
        manifest = self.path(f"{producer}.manifest.json")
        if manifest.exists() and not self.force:
            recorded = json.loads(manifest.read_text("utf-8"))
            if recorded.get("config_hash") != self.hash:
                raise StageError(
                    f"artifact {name!r} was built with a different config; "
                    "rerun the upstream stage or pass --force"
                )
        return p

    def write_manifest(self, stage: str, inputs: list[Path], outputs: list[Path]):
        _write_json(
            self.path(f"{stage}.manifest.json"),
            {
                "stage": stage,
                "version": __version__,
                "config_hash": self.hash,
                "inputs": {p.name: _sha256(p) for p in sorted(inputs)},
                "outputs": sorted(p.name for p in outputs),
            },
        )

    # -- shared loaders -----------------------------------------------------

    def load_corpus(self) -> Corpus:
        p = self.require("corpus.jsonl", "ingest")
        with open(p, encoding="utf-8") as fh:
            return parse_corpus(fh)

    def domain_filter(self) -> DomainFilterList:
        ref = self.cfg["domain_filter"]
        if ref in ("en", "es"):
            return DomainFilterList.default(ref)
        return DomainFilterList.from_file(ref)

    def embedding_provider(self):
        ref = self.cfg["providers"]["embedding"]
        return HashedNgramEmbedder() if ref == "hashed-ngram" else FileEmbeddingProvider(ref)

    def sentiment_provider(self):
        ref = self.cfg["providers"]["sentiment"]
        return LexiconSentimentProvider() if ref == "lexicon" else FileSentimentProvider(ref)

    def topic_provider(self):
        ref = self.cfg["providers"]["topics"]
        return TopHashtagTopicProvider() if ref == "top-hashtag" else FileTopicProvider(ref)

    def trace_config(self, kind: str) -> TraceConfig:
        lang = self.cfg["lang_pair"][0]
        base = TraceConfig.default(kind, lang=lang)
        section = self.cfg["traces"].get(kind, {})
        for key, val in section.items():
            if not hasattr(base, key):
                raise ConfigError(f"unknown trace option {key!r}")
            setattr(base, key, val)
        base.__post_init__()
        return base

    def dismantle_config(self, strategy: str | None = None) -> DismantleConfig:
        d = self.cfg["dismantle"]
        return DismantleConfig(
            strategy=strategy or d["strategy"],
            keep_top_weight_fraction=d["keep_top_weight_fraction"],
            time_window=timedelta(minutes=d["time_window_minutes"]),
            require_sentiment_match=d["require_sentiment_match"],
            centrality_threshold=d["centrality_threshold"],
        )

    def save_graph(self, graph: SimilarityGraph, stem: str) -> list[Path]:
        csv_path = self.path(f"{stem}.csv")
        gexf_path = self.path(f"{stem}.gexf")
        graph.to_edge_csv(csv_path)
        graph.to_gexf(gexf_path)
        return [csv_path, gexf_path]

    def load_graph(self, stem: str, producer: str) -> SimilarityGraph:
        return SimilarityGraph.from_edge_csv(self.require(f"{stem}.csv", producer))


pass_pipeline = click.make_pass_decorator(Pipeline)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="YAML config file; flags override its keys.")
@click.option("--out-dir", default=None, help="Artifact directory.")
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=None,
              help="Worker cap; outputs never depend on it.")
@click.option("--force", is_flag=True, help="Ignore stale-artifact checks.")
@click.pass_context
def cli(ctx, config_path, out_dir, seed, threads, force):
    """Coordinated-posting detection pipeline."""
    overrides = {}
    if out_dir is not None:
        overrides["out_dir"] = out_dir
    if seed is not None:
        overrides["seed"] = seed
    if threads is not None:
        overrides["threads"] = threads
    cfg = load_config(config_path, overrides)
    ctx.obj = Pipeline(cfg, force=force)


@cli.command()
@click.option("--input", "input_path", default=None, help="Line-delimited records.")
@click.option("--balance/--no-balance", default=None,
              help="Balanced two-language sampling.")
@pass_pipeline
def ingest(pipe: Pipeline, input_path, balance):
    """Parse and normalize the raw corpus into corpus.jsonl."""
    src = input_path or pipe.cfg["input"]
    if not src:
        raise ConfigError("no input path given (config key 'input' or --input)")
    with open(src, encoding="utf-8") as fh:
        corpus = parse_corpus(fh)
    do_balance = pipe.cfg["balanced_sample"] if balance is None else balance
    if do_balance:
        lang_a, lang_b = pipe.cfg["lang_pair"]
        corpus = balanced_sample(corpus, lang_a, lang_b, pipe.cfg["seed"])
    out = pipe.path("corpus.jsonl")
    with open(out, "w", encoding="utf-8") as fh:
        corpus.to_jsonl(fh)
    pipe.write_manifest("ingest", [Path(src)], [out])
    click.echo(f"ingest: {len(corpus)} records ({corpus.skipped} skipped) -> {out}")


@cli.command("build-trace")
@click.option("--kind", type=click.Choice(TRACE_KINDS), required=True)
@pass_pipeline
def build_trace(pipe: Pipeline, kind):
    """Build one behavioral-trace similarity network."""
    corpus = pipe.load_corpus()
    graph = build_trace_graph(
        corpus,
        pipe.trace_config(kind),
        domain_filter=pipe.domain_filter(),
        embedding_provider=pipe.embedding_provider(),
    )
    outs = pipe.save_graph(graph, f"trace_{kind}")
    pipe.write_manifest(f"build-trace-{kind}", [pipe.path("corpus.jsonl")], outs)
    click.echo(f"trace {kind}: {graph.num_nodes} nodes, {graph.num_edges} edges")


@cli.command("fuse")
@click.option("--kinds", default="co_domain,co_hashtag,text_similarity",
              help="Comma-separated trace kinds to fuse.")
@pass_pipeline
def fuse_cmd(pipe: Pipeline, kinds):
    """Fuse trace networks into one weighted network."""
    kind_list = [k.strip() for k in kinds.split(",") if k.strip()]
    graphs, inputs = [], []
    for kind in kind_list:
        graphs.append(pipe.load_graph(f"trace_{kind}", f"build-trace-{kind}"))
        inputs.append(pipe.path(f"trace_{kind}.csv"))
    fused = fuse(graphs)
    outs = pipe.save_graph(fused, "fused")
    pipe.write_manifest("fuse", inputs, outs)
    click.echo(f"fused: {fused.num_nodes} nodes, {fused.num_edges} edges")


@cli.command()
@click.option("--strategy", type=click.Choice(STRATEGIES), default=None)
@pass_pipeline
def dismantle(pipe: Pipeline, strategy):
    """Apply a dismantling strategy to the fused network."""
    corpus = pipe.load_corpus()
    fused = pipe.load_graph("fused", "fuse")
    config = pipe.dismantle_config(strategy)
    graph, report = run_strategy(
        fused, corpus, config, sentiment_provider=pipe.sentiment_provider(),
        louvain_seed=pipe.cfg["seed"],
    )
    outs = pipe.save_graph(graph, f"dismantled_{config.strategy}")
    report_path = pipe.path(f"strategy_{config.strategy}.json")
    _write_json(report_path, report)
    outs.append(report_path)
    pipe.write_manifest(
        f"dismantle-{config.strategy}",
        [pipe.path("fused.csv"), pipe.path("corpus.jsonl")],
        outs,
    )
    click.echo(json.dumps(report, sort_keys=True))


@cli.command()
@click.option("--graph", "stem", default="fused",
              help="Graph artifact stem (fused, trace_co_domain, ...).")
@click.option("--resolution", type=float, default=1.0)
@pass_pipeline
def cluster(pipe: Pipeline, stem, resolution):
    """Louvain-cluster a graph artifact."""
    if stem == "fused":
        producer = "fuse"
    elif stem.startswith("dismantled_"):
        producer = f"dismantle-{stem.removeprefix('dismantled_')}"
    else:
        producer = f"build-trace-{stem.removeprefix('trace_')}"
    graph = pipe.load_graph(stem, producer)
    part = louvain(graph, resolution=resolution, seed=pipe.cfg["seed"])
    csv_path = pipe.path(f"partition_{stem}.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("user_id,community\n")
        for node in sorted(part.assignment):
            fh.write(f"{node},{part.assignment[node]}\n")
    meta_path = pipe.path(f"partition_{stem}.json")
    _write_json(meta_path, {
        "graph": stem,
        "communities": part.num_communities,
        "modularity": part.modularity,
        "resolution": resolution,
    })
    pipe.write_manifest(f"cluster-{stem}", [pipe.path(f"{stem}.csv")],
                        [csv_path, meta_path])
    click.echo(f"{part.num_communities} communities, Q={part.modularity:.4f}")


@cli.command()
@click.option("--strategies", default="all",
              help="'all' or comma-separated strategy names.")
@pass_pipeline
def evaluate(pipe: Pipeline, strategies):
    """Score clustering quality per dismantling strategy; emit scatter CSV."""
    names = list(STRATEGIES) if strategies == "all" else [
        s.strip() for s in strategies.split(",")
    ]
    corpus = pipe.load_corpus()
    fused = pipe.load_graph("fused", "fuse")
    topic_provider = pipe.topic_provider()
    sentiment_provider = pipe.sentiment_provider()
    rows = []
    outs = []
    for name in names:
        config = pipe.dismantle_config(name)
        graph, _ = run_strategy(
            fused, corpus, config, sentiment_provider=sentiment_provider,
            louvain_seed=pipe.cfg["seed"],
        )
        if graph.num_edges == 0:
            click.echo(f"{name}: empty network, skipped", err=True)
            continue
        part = louvain(graph, seed=pipe.cfg["seed"])
        topics = topic_provider.assign(corpus, graph.nodes)
        try:
            report = evaluate_network(
                graph, part, topics,
                min_cluster_size=pipe.cfg["evaluate"]["min_cluster_size"],
                strategy=name,
            )
        except EvaluationError as exc:
            click.echo(f"{name}: {exc}", err=True)
            continue
        path = pipe.path(f"quality_{name}.json")
        _write_json(path, report.to_dict())
        outs.append(path)
        rows.append((name, report.h_weighted, report.mean_jsd))
    scatter = pipe.path("quality_scatter.csv")
    with open(scatter, "w", encoding="utf-8") as fh:
        fh.write("strategy,h_weighted,mean_jsd\n")
        for name, h, j in rows:
            fh.write(f"{name},{h!r},{j!r}\n")
    outs.append(scatter)
    pipe.write_manifest("evaluate",
                        [pipe.path("fused.csv"), pipe.path("corpus.jsonl")], outs)
    click.echo(f"evaluated {len(rows)} strategies -> {scatter}")


@cli.command()
@click.option("--graph", "stem", default=None)
@click.option("--percentile", type=float, default=None)
@pass_pipeline
def drivers(pipe: Pipeline, stem, percentile):
    """Select the top-centrality driver accounts from a graph artifact."""
    stem = stem or pipe.cfg["drivers"]["graph"]
    pct = percentile if percentile is not None else pipe.cfg["drivers"]["percentile"]
    producer = "fuse" if stem == "fused" else f"dismantle-{stem.removeprefix('dismantled_')}"
    graph = pipe.load_graph(stem, producer)
    ds = select_drivers(graph, pct, network_label=stem)
    out = pipe.path("drivers.txt")
    out.write_text("".join(f"{u}\n" for u in sorted(ds.users)), "utf-8")
    pipe.write_manifest("drivers", [pipe.path(f"{stem}.csv")], [out])
    click.echo(f"{len(ds.users)} drivers -> {out}")


@cli.command()
@pass_pipeline
def report(pipe: Pipeline):
    """Analyst report for the selected drivers."""
    corpus = pipe.load_corpus()
    driver_path = pipe.require("drivers.txt", "drivers")
    users = [u for u in driver_path.read_text("utf-8").splitlines() if u]
    mbfc_path = pipe.cfg["report"]["mbfc"]
    mbfc = load_mbfc(mbfc_path) if mbfc_path else None
    lang_a, lang_b = pipe.cfg["lang_pair"]
    year_lo, year_hi = pipe.cfg["report"]["year_range"]
    top_k = pipe.cfg["report"]["top_k"]
    sentiment_provider = pipe.sentiment_provider()
    bilinguals = find_bilingual_users(corpus, lang_a, lang_b)
    payload = {
        "drivers": sorted(users),
        "top_hashtags": top_entities(corpus, users, "hashtags", top_k),
        "top_domains": top_entities(corpus, users, "domains", top_k, mbfc=mbfc,
                                    domain_filter=pipe.domain_filter()),
        "engagement": engagement_stats(corpus, users).to_dict() if users else None,
        "bilingual_users": len(bilinguals),
        "driver_bilingual_overlap": driver_language_overlap(users, [], bilinguals),
        "sentiment_timeline": sentiment_timeline(
            corpus, users, sentiment_provider, (year_lo, year_hi)
        ),
    }
    out = pipe.path("report.json")
    _write_json(out, payload)
    pipe.write_manifest("report", [pipe.path("corpus.jsonl"), driver_path], [out])
    click.echo(f"report -> {out}")


@cli.command()
@click.option("--organic", type=int, default=None)
@click.option("--groups", type=int, default=None)
@click.option("--group-size", type=int, default=None)
@pass_pipeline
def synth(pipe: Pipeline, organic, groups, group_size):
    """Generate a synthetic corpus with planted coordinated groups."""
    section = dict(pipe.cfg["synth"])
    spec = CampaignSpec.default(seed=pipe.cfg["seed"])
    if organic is not None:
        section["n_organic"] = organic
    if "n_organic" in section:
        spec.n_organic = int(section["n_organic"])
    n_groups = groups if groups is not None else section.get("groups", 3)
    size = group_size if group_size is not None else section.get("group_size", 10)
    kinds = tuple(section.get("kinds", ["domains", "hashtags"]))
    spec.groups = [
        GroupSpec(size=size, kinds=kinds,
                  burst_window=timedelta(
                      minutes=section.get("burst_window_minutes", 30)),
                  entity_pool_size=section.get("entity_pool_size", 4))
        for _ in range(n_groups)
    ]
    corpus, truth = generate(spec)
    corpus_path = pipe.path("synthetic.jsonl")
    with open(corpus_path, "w", encoding="utf-8") as fh:
        corpus.to_jsonl(fh)
    truth_path = pipe.path("ground_truth.tsv")
    write_ground_truth(truth, truth_path)
    pipe.write_manifest("synth", [], [corpus_path, truth_path])
    click.echo(f"synth: {len(corpus)} records, {len(truth)} users -> {corpus_path}")


@cli.command()
@click.option("--partition", "partition_stem", default="fused",
              help="Partition artifact stem to score (e.g. fused).")
@pass_pipeline
def score(pipe: Pipeline, partition_stem):
    """Score a clustering against the synthetic ground truth."""
    truth = read_ground_truth(pipe.require("ground_truth.tsv", "synth"))
    part_path = pipe.require(f"partition_{partition_stem}.csv",
                             f"cluster-{partition_stem}")
    assignment = {}
    for line in part_path.read_text("utf-8").splitlines()[1:]:
        user, community = line.rsplit(",", 1)
        assignment[user] = int(community)
    metrics = score_recovery(truth, assignment)
    out = pipe.path("recovery.json")
    _write_json(out, metrics)
    pipe.write_manifest("score", [part_path], [out])
    click.echo(json.dumps(metrics, sort_keys=True))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except (click.UsageError, ConfigError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    except (CoordnetError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except Exception as exc:  # pragma: no cover
        click.echo(f"internal error: {exc}", err=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
