"""coordnet: behavioral-trace similarity networks for detecting
coordinated posting campaigns in multilingual social-media corpora.

The pipeline: ingest a corpus, build per-trace similarity networks
(shared domains, shared hashtags, near-duplicate text), fuse them,
dismantle the fused network (edge filtering, node pruning), cluster with
Louvain, score clustering quality with entropy/JSD, and report on the
high-centrality driver accounts.
"""

from .analysis import (
    DriverSet,
    EngagementStats,
    MbfcRecord,
    driver_language_overlap,
    engagement_stats,
    find_bilingual_users,
    load_mbfc,
    select_drivers,
    sentiment_timeline,
    top_entities,
)
from .dismantle import (
    STRATEGIES,
    DismantleConfig,
    filter_edges_by_sentiment,
    filter_edges_by_time,
    filter_edges_by_weight,
    prune_nodes_by_centrality,
    run_strategy,
)
from .errors import (
    ConfigError,
    ConsistencyError,
    CoordnetError,
    DomainExtractionError,
    EmptyMatrixError,
    EvaluationError,
    ProviderError,
    SchemaError,
)
from .evaluate import (
    ClusterTopicDistribution,
    QualityReport,
    cluster_entropy,
    evaluate_network,
    jsd,
    pairwise_jsd,
    weighted_entropy,
)
from .graphs import (
    CentralityVector,
    Partition,
    SimilarityGraph,
    connected_components,
    eigenvector_centrality,
    fuse,
    louvain,
    modularity,
)
from .ingest import (
    Corpus,
    DomainFilterList,
    TweetRecord,
    balanced_sample,
    extract_base_domain,
    extract_hashtags,
    filter_domains,
    parse_corpus,
)
from .providers import (
    FileEmbeddingProvider,
    FileSentimentProvider,
    FileTopicProvider,
    HashedNgramEmbedder,
    LexiconSentimentProvider,
    TopHashtagTopicProvider,
    TopicAssignment,
    assign_topics,
    classify_sentiment,
    embed_tweets,
)
from .synth import (
    CampaignSpec,
    GroupSpec,
    generate,
    read_ground_truth,
    score_recovery,
    write_ground_truth,
)
from .traces import (
    TraceConfig,
    UserEntityMatrix,
    build_text_similarity_graph,
    build_trace_graph,
    build_user_entity_matrix,
    clean_text,
    project_similarity,
)

__version__ = "0.1.0"
