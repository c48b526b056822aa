from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpsum.corpus import Argument, Corpus, GoldLabel, KeyPoint, Topic, attach_catch_all, validate
from kpsum.errors import ConfigError, IntegrityError
from kpsum.evaluation import (
    avg_words,
    coverage_actual,
    coverage_predicted,
    evaluate_summary,
    redundancy_actual,
    rouge,
    summary_rouge,
)
from kpsum.matching import MatcherConfig, build_matcher
from kpsum.selection import GeneratedSummary, SummaryEntry
from kpsum.textutil import porter_stem


def summary_of(corpus, arg_ids, topic_id="t0", method="smm"):
    entries = [
        SummaryEntry(
            argument_id=arg_id, text=corpus.argument_by_id[arg_id].text,
            cluster_index=i, cluster_size=1, score=0.0,
        )
        for i, arg_id in enumerate(arg_ids)
    ]
    return GeneratedSummary(topic_id=topic_id, method=method, entries=entries)


def labeled_summary(labels_per_entry, n_kps=10):
    """Build corpus + summary where entry i is gold-labeled to the given
    key point indices."""
    topic = Topic("t0", "topic")
    kps = [KeyPoint(f"k{i:02d}", "t0", f"reference point {i}") for i in range(n_kps)]
    args, labels = [], []
    for i, kp_indices in enumerate(labels_per_entry):
        arg = Argument(f"a{i}", "t0", f"argument number {i}")
        args.append(arg)
        for k in kp_indices:
            labels.append(GoldLabel(arg.id, f"k{k:02d}", 1))
    corpus = validate(Corpus([topic], args, kps, labels))
    return corpus, summary_of(corpus, [a.id for a in args])


class TestCoveragePredicted:
    def test_counting_example(self):
        # 9 reference KPs; entries cover 5 distinct ones
        corpus, summary = labeled_summary([[0], [1], [2], [3], [4], [0]], n_kps=9)
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        refs = corpus.key_points_for_topic("t0")
        result = coverage_predicted(summary, refs, matcher)
        assert result.coverage == pytest.approx(5 / 9, abs=1e-12)
        assert result.covered_key_point_ids == {f"k{i:02d}" for i in range(5)}

    def test_zero_entries(self):
        corpus, _ = labeled_summary([[0]], n_kps=3)
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        empty = summary_of(corpus, [])
        result = coverage_predicted(empty, corpus.key_points_for_topic("t0"), matcher)
        assert result.coverage == 0.0
        assert result.assignments == {}

    def test_one_assignment_per_entry(self):
        # an entry matching two KPs is assigned exactly one of them
        corpus, summary = labeled_summary([[0, 1]], n_kps=3)
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        result = coverage_predicted(summary, corpus.key_points_for_topic("t0"), matcher)
        assert result.coverage == pytest.approx(1 / 3)
        # oracle scores tie at 1.0; smallest key point id wins
        assert result.assignments["a0"] == ("k00", 1.0)

    def test_empty_references_rejected(self):
        corpus, summary = labeled_summary([[0]], n_kps=1)
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        with pytest.raises(ConfigError):
            coverage_predicted(summary, [], matcher)

    def test_monotone_in_entries(self):
        corpus, summary = labeled_summary([[0], [1], [2]], n_kps=5)
        matcher = build_matcher(MatcherConfig(kind="oracle"), corpus)
        refs = corpus.key_points_for_topic("t0")
        values = []
        for upto in range(len(summary.entries) + 1):
            partial = GeneratedSummary("t0", "smm", summary.entries[:upto])
            values.append(coverage_predicted(partial, refs, matcher).coverage)
        assert values == sorted(values)


class TestCoverageActual:
    def test_counting_example(self):
        corpus, summary = labeled_summary([[0], [1], [2], [3], [4], [5]], n_kps=10)
        assert coverage_actual(summary, corpus) == pytest.approx(0.6)

    def test_perfect_cover(self):
        corpus, summary = labeled_summary([[i] for i in range(4)], n_kps=4)
        assert coverage_actual(summary, corpus) == 1.0

    def test_catch_all_counts_in_denominator(self):
        topic = Topic("t0", "topic")
        kps = [KeyPoint("k0", "t0", "point")]
        args = [Argument("a0", "t0", "labeled"), Argument("a1", "t0", "unlabeled")]
        corpus = attach_catch_all(validate(Corpus(
            [topic], args, kps, [GoldLabel("a0", "k0", 1)],
        )))
        # catch-all attached: 2 reference KPs now
        only_labeled = summary_of(corpus, ["a0"])
        assert coverage_actual(only_labeled, corpus) == 0.5
        both = summary_of(corpus, ["a0", "a1"])
        assert coverage_actual(both, corpus) == 1.0

    def test_unlabeled_entry_is_integrity_error(self):
        topic = Topic("t0", "topic")
        kps = [KeyPoint("k0", "t0", "point")]
        args = [Argument("a0", "t0", "no label")]
        corpus = validate(Corpus([topic], args, kps, []))
        with pytest.raises(IntegrityError, match="catch-all"):
            coverage_actual(summary_of(corpus, ["a0"]), corpus)


class TestRedundancy:
    def test_single_sharing_pair_of_nine(self):
        labels = [[0], [0], [1], [2], [3], [4], [5], [6], [7]]
        corpus, summary = labeled_summary(labels, n_kps=9)
        assert redundancy_actual(summary, corpus) == pytest.approx(1 / 36, abs=1e-12)

    def test_all_share_one_kp(self):
        corpus, summary = labeled_summary([[0], [0], [0], [0]], n_kps=2)
        assert redundancy_actual(summary, corpus) == 1.0

    def test_degenerate_sizes(self):
        corpus, summary = labeled_summary([[0]], n_kps=2)
        assert redundancy_actual(summary, corpus) == 0.0
        empty = summary_of(corpus, [])
        assert redundancy_actual(empty, corpus) == 0.0

    def test_zero_iff_no_shared_gold(self):
        rng = random.Random(4)
        for _ in range(20):
            n = rng.randint(2, 8)
            labels = [[rng.randrange(4)] for _ in range(n)]
            corpus, summary = labeled_summary(labels, n_kps=4)
            value = redundancy_actual(summary, corpus)
            has_dup = any(
                labels[i][0] == labels[j][0]
                for i in range(n) for j in range(i + 1, n)
            )
            assert (value == 0.0) == (not has_dup)
            assert 0.0 <= value <= 1.0


class TestAvgWords:
    def test_mean(self):
        topic = Topic("t0", "topic")
        args = [Argument("a0", "t0", "one two three"),
                Argument("a1", "t0", "one two three four five")]
        corpus = validate(Corpus([topic], args, [], []))
        assert avg_words(summary_of(corpus, ["a0", "a1"])) == 4.0
        assert avg_words(summary_of(corpus, ["a1"])) == 5.0

    def test_empty_summary_rejected(self):
        corpus = validate(Corpus([Topic("t0", "x")], [], [], []))
        with pytest.raises(ConfigError):
            avg_words(summary_of(corpus, []))


class TestRouge:
    def test_identical_texts(self):
        scores = rouge("the cat sat on the mat", "the cat sat on the mat")
        assert scores.rouge1 == scores.rouge2 == scores.rougeL == 1.0

    def test_disjoint_vocabularies(self):
        scores = rouge("alpha beta gamma", "delta epsilon zeta")
        assert scores.rouge1 == scores.rouge2 == scores.rougeL == 0.0

    def test_hand_enumerated_example(self):
        # unigrams overlap 2/3 each side; bigrams 1/2 precision and recall;
        # LCS "the cat" of length 2 over length-3 token lists.
        scores = rouge("the cat sat", "the cat ran")
        assert scores.rouge1 == pytest.approx(2 / 3, abs=1e-12)
        assert scores.rouge2 == pytest.approx(0.5, abs=1e-12)
        assert scores.rougeL == pytest.approx(2 / 3, abs=1e-12)

    def test_empty_tokens_flagged(self):
        scores = rouge("!!!", "anything here")
        assert scores.rouge1 == 0.0
        assert scores.empty_input

    def test_clipped_counts(self):
        # repeated candidate token only counts up to its reference count
        scores = rouge("cat cat cat", "cat dog")
        # overlap 1, precision 1/3, recall 1/2 -> F = 0.4
        assert scores.rouge1 == pytest.approx(0.4, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(
        a=st.lists(st.sampled_from("abcde"), min_size=1, max_size=8),
        b=st.lists(st.sampled_from("abcde"), min_size=1, max_size=8),
    )
    def test_f_measure_symmetry(self, a, b):
        left = rouge(" ".join(a), " ".join(b))
        right = rouge(" ".join(b), " ".join(a))
        assert left.rouge1 == pytest.approx(right.rouge1, abs=1e-12)
        assert left.rouge2 == pytest.approx(right.rouge2, abs=1e-12)

    def test_stemming_flag(self):
        plain = rouge("running quickly", "runs quick")
        stemmed = rouge("running quickly", "runs quick", stemming=True)
        assert plain.rouge1 == 0.0
        assert stemmed.rouge1 > 0.0

    def test_porter_vectors(self):
        # classic examples from the algorithm's definition
        for word, expected in [
            ("caresses", "caress"), ("ponies", "poni"), ("cats", "cat"),
            ("motoring", "motor"), ("hopping", "hop"), ("relational", "relat"),
            ("conditional", "condit"), ("formalize", "formal"),
            ("adjustment", "adjust"), ("effective", "effect"),
        ]:
            assert porter_stem(word) == expected, word


class TestOracleEquivalence:
    def test_predicted_equals_actual_under_oracle(self, nine_kp_corpus):
        rng = random.Random(9)
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        refs = nine_kp_corpus.key_points_for_topic("t0")
        ids = [a.id for a in nine_kp_corpus.arguments]
        for _ in range(10):
            chosen = rng.sample(ids, rng.randint(1, 12))
            summary = summary_of(nine_kp_corpus, chosen)
            predicted = coverage_predicted(summary, refs, matcher).coverage
            actual = coverage_actual(summary, nine_kp_corpus)
            assert predicted == actual


class TestEvaluateSummary:
    def test_all_modes_report(self, nine_kp_corpus):
        summary = summary_of(nine_kp_corpus, [nine_kp_corpus.arguments[0].id])
        matcher = build_matcher(MatcherConfig(kind="oracle"), nine_kp_corpus)
        report = evaluate_summary(summary, nine_kp_corpus, mode="all", matcher=matcher)
        assert report.actual_coverage == pytest.approx(1 / 9)
        assert report.predicted_coverage.coverage == pytest.approx(1 / 9)
        assert report.redundancy == 0.0
        assert report.avg_words >= 1
        assert report.rouge is not None
        doc = report.to_json()
        assert doc["topic_id"] == "t0"
        assert 0.0 <= doc["rouge1"] <= 1.0

    def test_predicted_mode_needs_matcher(self, nine_kp_corpus):
        summary = summary_of(nine_kp_corpus, [nine_kp_corpus.arguments[0].id])
        with pytest.raises(ConfigError, match="matcher"):
            evaluate_summary(summary, nine_kp_corpus, mode="predicted")

    def test_unknown_topic(self, nine_kp_corpus):
        summary = GeneratedSummary(topic_id="missing", method="smm", entries=[])
        with pytest.raises(IntegrityError, match="missing"):
            evaluate_summary(summary, nine_kp_corpus, mode="actual")

    def test_summary_rouge_excludes_catch_all_text(self):
        topic = Topic("t0", "topic")
        kps = [KeyPoint("k0", "t0", "alpha beta")]
        args = [Argument("a0", "t0", "alpha beta"), Argument("u0", "t0", "gamma delta")]
        corpus = attach_catch_all(validate(Corpus(
            [topic], args, kps, [GoldLabel("a0", "k0", 1)],
        )))
        refs = corpus.key_points_for_topic("t0")
        scores = summary_rouge(summary_of(corpus, ["a0"]), refs)
        assert scores.rouge1 == 1.0  # sentinel text did not dilute the reference
