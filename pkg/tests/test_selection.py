from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpsum.clustering import ClusterAssignment
from kpsum.corpus import Argument, Corpus, GoldLabel, KeyPoint, Topic, validate
from kpsum.errors import ConfigError, InternalError
from kpsum.matching import MatcherConfig, build_matcher
from kpsum.selection import (
    GeneratedSummary,
    SelectionConfig,
    score_smm,
    score_ssf,
    select_representatives,
    word_count,
)


class TestScores:
    @pytest.mark.parametrize("count,expected", [(0, 0.0), (7, 7.0), (50, 50.0)])
    def test_smm(self, count, expected):
        assert score_smm(count) == expected

    def test_ssf_formula(self):
        assert score_ssf(3, 10, 5) == pytest.approx(24.3, abs=1e-12)
        assert score_ssf(0, 12, 5) == 0.0
        assert score_ssf(2, 8, 1) == pytest.approx(0.25, abs=1e-12)

    def test_ssf_rejects_zero_words(self):
        with pytest.raises(ConfigError):
            score_ssf(3, 0, 5)

    @settings(max_examples=80, deadline=None)
    @given(
        matches=st.integers(min_value=1, max_value=40),
        words=st.integers(min_value=1, max_value=60),
        exponent=st.floats(min_value=0.5, max_value=8),
    )
    def test_ssf_monotonicity(self, matches, words, exponent):
        base = score_ssf(matches, words, exponent)
        assert score_ssf(matches + 1, words, exponent) > base
        assert score_ssf(matches, words + 1, exponent) < base


class TestWordCount:
    def test_examples(self):
        assert word_count("vaccines save lives") == 3
        assert word_count("  a  b ") == 2
        assert word_count("state-of-the-art") == 1

    def test_empty_rejected(self):
        with pytest.raises(ConfigError):
            word_count("   ")


def shared_kp_corpus(texts):
    """All arguments labeled to one key point; texts as given."""
    topic = Topic("t0", "topic")
    kp = KeyPoint("k0", "t0", "the point")
    args = [Argument(f"a{i}", "t0", t) for i, t in enumerate(texts)]
    labels = [GoldLabel(a.id, "k0", 1) for a in args]
    return validate(Corpus([topic], args, [kp], labels))


class TestSelectRepresentatives:
    def test_tie_breaks_to_shortest(self):
        texts = [
            "five words are in here",
            "three words only",
            "this sentence has a lot of words inside it",
            "four words right here",
            "two words",
        ]
        corpus = shared_kp_corpus(texts)
        clusters = ClusterAssignment(clusters=[[a.id for a in corpus.arguments]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        summary = select_representatives(clusters, corpus, matcher, SelectionConfig(method="smm"))
        # every candidate matches the other 4; the 2-word argument wins
        assert summary.entries[0].argument_id == "a4"
        assert summary.entries[0].score == 4.0

    def test_text_then_id_tie_breaks(self):
        corpus = shared_kp_corpus(["b b", "a a", "a a"])  # equal scores, equal words
        clusters = ClusterAssignment(clusters=[["a0", "a1", "a2"]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        summary = select_representatives(clusters, corpus, matcher, SelectionConfig())
        # "a a" < "b b" lexicographically; id a1 < a2
        assert summary.entries[0].argument_id == "a1"

    def test_singleton_clusters_pass_through(self, nine_kp_corpus):
        ids = [a.id for a in nine_kp_corpus.arguments[:4]]
        clusters = ClusterAssignment(clusters=[[i] for i in ids])
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        summary = select_representatives(clusters, nine_kp_corpus, matcher, SelectionConfig())
        assert summary.argument_ids() == ids
        assert all(e.score == 0.0 for e in summary.entries)
        assert all(e.cluster_size == 1 for e in summary.entries)

    def test_ssf_prefers_short_over_popular_tie(self):
        corpus = shared_kp_corpus(["one two three four five six", "one two"])
        clusters = ClusterAssignment(clusters=[["a0", "a1"]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        summary = select_representatives(
            clusters, corpus, matcher, SelectionConfig(method="ssf", exponent_i=5),
        )
        # both match 1 other; 1/2 beats 1/6
        assert summary.entries[0].argument_id == "a1"
        assert summary.entries[0].score == pytest.approx(0.5)

    def test_cap_keeps_largest_clusters(self, nine_kp_corpus):
        by_kp = {}
        for arg in nine_kp_corpus.arguments:
            kp = next(iter(nine_kp_corpus.gold_key_points(arg.id)))
            by_kp.setdefault(kp, []).append(arg.id)
        ordered = sorted(by_kp.values(), key=len, reverse=True)
        clusters = ClusterAssignment(clusters=ordered)
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        full = select_representatives(clusters, nine_kp_corpus, matcher, SelectionConfig())
        capped = select_representatives(
            clusters, nine_kp_corpus, matcher, SelectionConfig(max_key_points=4),
        )
        assert capped.argument_ids() == full.argument_ids()[:4]
        assert [e.cluster_size for e in capped.entries] == [50, 30, 20, 15]

    def test_permutation_invariance_of_selected_set(self):
        texts = [f"text with some words {i} " + "pad " * (i % 4) for i in range(8)]
        corpus = shared_kp_corpus(texts)
        ids = [a.id for a in corpus.arguments]
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        rng = random.Random(1)
        baseline = None
        for _ in range(6):
            rng.shuffle(ids)
            clusters = ClusterAssignment(clusters=[list(ids)])
            summary = select_representatives(clusters, corpus, matcher, SelectionConfig())
            chosen = summary.entries[0].argument_id
            baseline = chosen if baseline is None else baseline
            assert chosen == baseline

    def test_scores_against_cluster_minus_candidate(self):
        corpus = shared_kp_corpus(["w " * 5, "w " * 5, "w " * 5])
        clusters = ClusterAssignment(clusters=[["a0", "a1", "a2"]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        summary = select_representatives(clusters, corpus, matcher, SelectionConfig())
        # 3-cluster: each candidate scored against the other 2, never itself
        assert summary.entries[0].score == 2.0

    def test_empty_cluster_is_internal_error(self, nine_kp_corpus):
        clusters = ClusterAssignment(clusters=[[]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        with pytest.raises(InternalError):
            select_representatives(clusters, nine_kp_corpus, matcher, SelectionConfig())

    def test_oracle_end_to_end_property(self, nine_kp_corpus):
        # clusters equal to gold groups: representatives cover all 9 key
        # points exactly once when k = 9
        by_kp = {}
        for arg in nine_kp_corpus.arguments:
            kp = next(iter(nine_kp_corpus.gold_key_points(arg.id)))
            by_kp.setdefault(kp, []).append(arg.id)
        clusters = ClusterAssignment(
            clusters=sorted(by_kp.values(), key=len, reverse=True),
        )
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        summary = select_representatives(
            clusters, nine_kp_corpus, matcher, SelectionConfig(max_key_points=9),
        )
        covered = set()
        for entry in summary.entries:
            covered |= nine_kp_corpus.gold_key_points(entry.argument_id)
        assert len(covered) == 9
        assert len(summary.entries) == 9


class TestSerialization:
    def test_summary_round_trip(self, tmp_path, nine_kp_corpus):
        clusters = ClusterAssignment(clusters=[[nine_kp_corpus.arguments[0].id]])
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        summary = select_representatives(clusters, nine_kp_corpus, matcher, SelectionConfig())
        doc = summary.to_json()
        assert doc["method"] == "smm"
        restored = GeneratedSummary.from_json(doc)
        assert restored.argument_ids() == summary.argument_ids()
        assert restored.entries[0].cluster_size == 1
