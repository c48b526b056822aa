"""Evaluation of key-point summaries.

Metrics:

* predicted coverage - a matcher pairs each summary entry with every
  reference key point; each entry is assigned at most one reference key
  point (the highest-scoring match), and coverage is the fraction of
  distinct reference key points assigned.
* actual coverage - fraction of the topic's reference key points that have
  at least one gold-labeled summary entry. Extractive summaries make this
  exact.
* redundancy - entry pairs sharing a gold key point, divided by all entry
  pairs.
* conciseness - average words per entry.
* ROUGE-1/2/L F-measures over lowercased alphanumeric tokens, with an
  optional Porter-stemming flag for parity experiments. For summary-level
  scores the entries are joined with newlines as the candidate and the
  reference key points likewise as the reference.

All ratios are fractions in [0, 1]; rendering as percentages is left to
the CLI.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, KeyPoint
from .errors import ConfigError, IntegrityError
from .matching import Matcher, MatcherConfig, MatchRequest, build_matcher
from .textutil import alnum_tokens, porter_stem, word_count


@dataclass
class CoverageResult:
    covered_key_point_ids: set[str]
    coverage: float
    # entry argument id -> (assigned reference kp id, score) or None
    assignments: dict[str, tuple[str, float] | None]

    def to_json(self) -> dict:
        return {
            "coverage": self.coverage,
            "covered_key_point_ids": sorted(self.covered_key_point_ids),
            "assignments": {
                arg_id: (None if assigned is None
                         else {"key_point_id": assigned[0], "score": assigned[1]})
                for arg_id, assigned in self.assignments.items()
            },
        }


@dataclass(frozen=True)
class RougeScores:
    rouge1: float
    rouge2: float
    rougeL: float
    empty_input: bool = False  # set when either side tokenized to nothing

    def to_json(self) -> dict:
        return {
            "rouge1": self.rouge1, "rouge2": self.rouge2, "rougeL": self.rougeL,
            "empty_input": self.empty_input,
        }


@dataclass
class EvaluationReport:
    topic_id: str
    predicted_coverage: CoverageResult | None = None
    actual_coverage: float | None = None
    redundancy: float | None = None
    avg_words: float | None = None
    rouge: RougeScores | None = None

    def to_json(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "predicted_coverage": (
                None if self.predicted_coverage is None else self.predicted_coverage.to_json()
            ),
            "actual_coverage": self.actual_coverage,
            "redundancy": self.redundancy,
            "avg_words": self.avg_words,
            "rouge1": None if self.rouge is None else self.rouge.rouge1,
            "rouge2": None if self.rouge is None else self.rouge.rouge2,
            "rougeL": None if self.rouge is None else self.rouge.rougeL,
        }


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------

def coverage_predicted(summary, reference_kps: list[KeyPoint],
                       matcher: Matcher | MatcherConfig,
                       corpus: Corpus | None = None) -> CoverageResult:
    """Matcher-predicted coverage of the reference key points.

    Every entry is paired with every reference key point (entry text in the
    argument slot, key point in the key-point slot). Among matching pairs
    the entry is assigned its highest-scoring reference key point; score
    ties go to the smallest key point id.
    """
    if not reference_kps:
        raise ConfigError("coverage_predicted requires at least one reference key point")
    if isinstance(matcher, MatcherConfig):
        matcher = build_matcher(matcher, corpus)

    assignments: dict[str, tuple[str, float] | None] = {}
    covered: set[str] = set()
    for entry in summary.entries:
        requests_ = [
            MatchRequest(
                argument_text=entry.text, key_point_text=kp.text,
                argument_id=entry.argument_id, key_point_id=kp.id,
            )
            for kp in reference_kps
        ]
        results = matcher.match_batch(requests_)
        matched = [
            (kp, r.score) for kp, r in zip(reference_kps, results) if r.is_match
        ]
        if matched:
            matched.sort(key=lambda pair: (-pair[1], pair[0].id))
            kp, score = matched[0]
            assignments[entry.argument_id] = (kp.id, score)
            covered.add(kp.id)
        else:
            assignments[entry.argument_id] = None
    return CoverageResult(
        covered_key_point_ids=covered,
        coverage=len(covered) / len(reference_kps),
        assignments=assignments,
    )


def _entry_gold(summary, corpus: Corpus) -> list[frozenset[str]]:
    gold_sets = []
    for entry in summary.entries:
        if entry.argument_id not in corpus.argument_by_id:
            raise IntegrityError(f"summary entry references unknown argument {entry.argument_id!r}")
        gold = corpus.gold_key_points(entry.argument_id)
        if not gold:
            raise IntegrityError(
                f"summary entry {entry.argument_id!r} has no gold label; "
                "attach the catch-all key point before evaluating"
            )
        gold_sets.append(gold)
    return gold_sets


def coverage_actual(summary, corpus: Corpus) -> float:
    """Fraction of the topic's key points with a gold-labeled entry.

    The catch-all key point counts like any other, so unmatched arguments
    contribute to coverage too.
    """
    reference = corpus.key_points_for_topic(summary.topic_id)
    if not reference:
        raise ConfigError(f"topic {summary.topic_id!r} has no key points")
    covered: set[str] = set()
    for gold in _entry_gold(summary, corpus):
        covered |= gold
    reference_ids = {k.id for k in reference}
    return len(covered & reference_ids) / len(reference_ids)


def redundancy_actual(summary, corpus: Corpus) -> float:
    """Duplicate entry pairs (sharing a gold key point) over all pairs."""
    gold_sets = _entry_gold(summary, corpus)
    n = len(gold_sets)
    if n < 2:
        return 0.0
    duplicates = sum(
        1
        for i in range(n)
        for j in range(i + 1, n)
        if gold_sets[i] & gold_sets[j]
    )
    return duplicates / (n * (n - 1) // 2)


def avg_words(summary) -> float:
    """Mean whitespace-token count per entry."""
    if not summary.entries:
        raise ConfigError("avg_words requires a non-empty summary")
    return sum(word_count(e.text) for e in summary.entries) / len(summary.entries)


# ---------------------------------------------------------------------------
# ROUGE
# ---------------------------------------------------------------------------

def _tokens(text: str, stemming: bool) -> list[str]:
    tokens = alnum_tokens(text)
    if stemming:
        tokens = [porter_stem(t) for t in tokens]
    return tokens


def _fmeasure(overlap: int, cand_total: int, ref_total: int) -> float:
    if cand_total == 0 or ref_total == 0:
        return 0.0
    precision = overlap / cand_total
    recall = overlap / ref_total
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _ngram_overlap(cand: list[str], ref: list[str], n: int) -> tuple[int, int, int]:
    cand_grams = Counter(tuple(cand[i:i + n]) for i in range(len(cand) - n + 1))
    ref_grams = Counter(tuple(ref[i:i + n]) for i in range(len(ref) - n + 1))
    overlap = sum((cand_grams & ref_grams).values())
    return overlap, sum(cand_grams.values()), sum(ref_grams.values())


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[len(b)]


def rouge(candidate: str, reference: str, stemming: bool = False) -> RougeScores:
    """ROUGE-1/2/L F-measures over lowercased alphanumeric tokens."""
    cand = _tokens(candidate, stemming)
    ref = _tokens(reference, stemming)
    if not cand or not ref:
        return RougeScores(rouge1=0.0, rouge2=0.0, rougeL=0.0, empty_input=True)
    r1 = _fmeasure(*_ngram_overlap(cand, ref, 1))
    r2 = _fmeasure(*_ngram_overlap(cand, ref, 2))
    lcs = _lcs_length(cand, ref)
    rl = _fmeasure(lcs, len(cand), len(ref))
    return RougeScores(rouge1=r1, rouge2=r2, rougeL=rl)


def summary_rouge(summary, reference_kps: list[KeyPoint], stemming: bool = False) -> RougeScores:
    """Summary-level ROUGE: entries and reference key points each joined
    with newlines. Catch-all sentinels are not part of the reference text.
    """
    references = [k.text for k in reference_kps if not k.is_catch_all]
    if not references:
        raise ConfigError("summary_rouge requires non-catch-all reference key points")
    candidate = "\n".join(e.text for e in summary.entries)
    return rouge(candidate, "\n".join(references), stemming=stemming)


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def evaluate_summary(summary, corpus: Corpus, mode: str = "all",
                     matcher: Matcher | MatcherConfig | None = None,
                     stemming: bool = False) -> EvaluationReport:
    """Build an EvaluationReport for one summary.

    Modes: ``predicted`` (needs a matcher), ``actual``, ``rouge``, ``all``
    (everything the inputs allow; predicted only when a matcher is given).
    """
    if mode not in ("predicted", "actual", "rouge", "all"):
        raise ConfigError(f"unknown evaluation mode: {mode!r}")
    if summary.topic_id not in corpus.topic_by_id:
        raise IntegrityError(f"summary references unknown topic {summary.topic_id!r}")
    reference = corpus.key_points_for_topic(summary.topic_id)
    report = EvaluationReport(topic_id=summary.topic_id)

    if mode in ("predicted", "all") and matcher is not None:
        report.predicted_coverage = coverage_predicted(summary, reference, matcher, corpus)
    elif mode == "predicted":
        raise ConfigError("predicted mode requires a matcher")

    if mode in ("actual", "all"):
        report.actual_coverage = coverage_actual(summary, corpus)
        report.redundancy = redundancy_actual(summary, corpus)

    if mode in ("rouge", "all"):
        report.rouge = summary_rouge(summary, reference, stemming=stemming)

    if summary.entries:
        report.avg_words = avg_words(summary)
    return report
