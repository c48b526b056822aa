"""kpsum: extractive key-point summarization of argument collections.

The pipeline clusters a topic's arguments by embedding similarity and
selects one representative per cluster as a generated key point; the
evaluation side scores any summary by coverage of reference key points,
redundancy, conciseness, and ROUGE, and can build pseudo-summary suites at
fixed coverage levels for validating metrics.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .clustering import ClusterAssignment, ClusterConfig, RandScores, cluster, rand_index
from .corpus import (
    Argument,
    Corpus,
    GoldLabel,
    KeyPoint,
    Topic,
    attach_catch_all,
    load_argkp,
    load_corpus_json,
    load_debate,
    save_corpus_json,
    split_sentences,
    validate,
)
from .coverage_datasets import (
    CoverageSampleSpec,
    PseudoSummary,
    generate_suite,
    pseudo_to_summary,
    sample_pseudo_summary,
)
from .embedding import EmbeddingBackendConfig, EmbeddingSet, embed, normalize
from .evaluation import (
    CoverageResult,
    EvaluationReport,
    RougeScores,
    avg_words,
    coverage_actual,
    coverage_predicted,
    evaluate_summary,
    redundancy_actual,
    rouge,
    summary_rouge,
)
from .matching import MatcherConfig, MatchScore, Matcher, build_matcher, match, match_count
from .pipeline import summarize_topic
from .selection import (
    GeneratedSummary,
    SelectionConfig,
    SummaryEntry,
    score_smm,
    score_ssf,
    select_representatives,
    word_count,
)

__all__ = [
    "__version__",
    "Argument", "Corpus", "GoldLabel", "KeyPoint", "Topic",
    "attach_catch_all", "load_argkp", "load_corpus_json", "load_debate",
    "save_corpus_json", "split_sentences", "validate",
    "EmbeddingBackendConfig", "EmbeddingSet", "embed", "normalize",
    "ClusterAssignment", "ClusterConfig", "RandScores", "cluster", "rand_index",
    "MatcherConfig", "MatchScore", "Matcher", "build_matcher", "match", "match_count",
    "GeneratedSummary", "SelectionConfig", "SummaryEntry",
    "score_smm", "score_ssf", "select_representatives", "word_count",
    "CoverageResult", "EvaluationReport", "RougeScores",
    "avg_words", "coverage_actual", "coverage_predicted", "evaluate_summary",
    "redundancy_actual", "rouge", "summary_rouge",
    "CoverageSampleSpec", "PseudoSummary", "generate_suite",
    "pseudo_to_summary", "sample_pseudo_summary",
    "summarize_topic",
]
