"""End-to-end per-topic summarization: embed, cluster, select."""
from __future__ import annotations

from .clustering import ClusterAssignment, ClusterConfig, cluster
from .corpus import Corpus
from .embedding import EmbeddingBackendConfig, embed, normalize
from .matching import Matcher, MatcherConfig, build_matcher
from .selection import GeneratedSummary, SelectionConfig, select_representatives


def summarize_topic(
    corpus: Corpus,
    topic_id: str,
    embed_config: EmbeddingBackendConfig,
    cluster_config: ClusterConfig,
    matcher: Matcher | MatcherConfig,
    selection_config: SelectionConfig,
    l2_normalize: bool = True,
) -> tuple[ClusterAssignment, GeneratedSummary]:
    """Cluster a topic's arguments and select one representative per cluster."""
    if isinstance(matcher, MatcherConfig):
        matcher = build_matcher(matcher, corpus)
    embeddings = embed(embed_config, corpus, topic_id)
    if l2_normalize:
        embeddings = normalize(embeddings)
    assignment = cluster(embeddings, cluster_config)
    summary = select_representatives(assignment, corpus, matcher, selection_config)
    return assignment, summary
