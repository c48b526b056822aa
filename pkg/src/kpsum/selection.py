"""Per-cluster representative selection.

Two scoring methods choose each cluster's representative:

* ``smm`` scores a candidate by the number of cluster-mates it matches.
* ``ssf`` scores matches^i / word_count, trading coverage against length.

Each candidate is scored against its cluster with the candidate itself
removed. Ties are broken by fewest words, then lexicographically smallest
text, then smallest id, so the selected set is independent of the order
arguments appear in. Clusters are processed largest first and the output
may be capped, keeping the largest clusters' representatives.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .clustering import ClusterAssignment
from .corpus import Corpus
from .errors import ConfigError, FormatError, IntegrityError, InternalError
from .matching import Matcher, MatcherConfig, build_matcher, match_count
from .textutil import word_count as _word_count

METHODS = ("smm", "ssf")


@dataclass(frozen=True)
class SelectionConfig:
    method: str = "smm"
    exponent_i: float = 5.0  # only used by ssf
    max_key_points: int | None = None

    def validate(self) -> "SelectionConfig":
        if self.method not in METHODS:
            raise ConfigError(f"unknown selection method: {self.method!r}")
        if not self.exponent_i > 0:
            raise ConfigError("exponent_i must be positive")
        if self.max_key_points is not None and self.max_key_points < 1:
            raise ConfigError("max_key_points must be >= 1")
        return self


@dataclass(frozen=True)
class SummaryEntry:
    argument_id: str
    text: str
    cluster_index: int  # 0-based index into the size-ordered cluster list
    cluster_size: int
    score: float


@dataclass
class GeneratedSummary:
    topic_id: str
    method: str
    entries: list[SummaryEntry] = field(default_factory=list)

    def argument_ids(self) -> list[str]:
        return [e.argument_id for e in self.entries]

    def to_json(self) -> dict:
        return {
            "topic_id": self.topic_id,
            "method": self.method,
            "entries": [
                {
                    "argument_id": e.argument_id,
                    "text": e.text,
                    "cluster_index": e.cluster_index,
                    "cluster_size": e.cluster_size,
                    "score": e.score,
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GeneratedSummary":
        try:
            return cls(
                topic_id=doc["topic_id"],
                method=doc["method"],
                entries=[
                    SummaryEntry(
                        argument_id=e["argument_id"],
                        text=e["text"],
                        cluster_index=e["cluster_index"],
                        cluster_size=e["cluster_size"],
                        score=e["score"],
                    )
                    for e in doc["entries"]
                ],
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed summary document: {exc}") from exc

    @classmethod
    def load(cls, path) -> "GeneratedSummary":
        path = Path(path)
        if not path.exists():
            raise FormatError(f"summary file not found: {path}")
        return cls.from_json(json.loads(path.read_text(encoding="utf-8")))


def word_count(text: str) -> int:
    """Whitespace-token count after trimming; errors on empty text."""
    return _word_count(text)


def score_smm(match_count_: int) -> float:
    """Match count as a real score."""
    return float(match_count_)


def score_ssf(match_count_: int, word_count_: int, exponent_i: float) -> float:
    """matches^i / words; zero matches score zero regardless of length."""
    if word_count_ < 1:
        raise ConfigError("score_ssf requires word_count >= 1")
    return float(match_count_) ** exponent_i / word_count_


def select_representatives(
    clusters: ClusterAssignment,
    corpus: Corpus,
    matcher: Matcher | MatcherConfig,
    config: SelectionConfig,
) -> GeneratedSummary:
    """Pick one representative argument per cluster; see module docstring."""
    config.validate()
    if not clusters.clusters:
        raise ConfigError("cannot select from an empty cluster assignment")
    if isinstance(matcher, MatcherConfig):
        matcher = build_matcher(matcher, corpus)

    topic_id = None
    entries: list[SummaryEntry] = []
    for cluster_index, member_ids in enumerate(clusters.clusters):
        if not member_ids:
            raise InternalError("empty cluster in assignment")
        members = []
        for arg_id in member_ids:
            arg = corpus.argument_by_id.get(arg_id)
            if arg is None:
                raise IntegrityError(f"cluster references unknown argument id {arg_id!r}")
            members.append(arg)
        if topic_id is None:
            topic_id = members[0].topic_id
        for arg in members:
            if arg.topic_id != topic_id:
                raise IntegrityError(
                    f"cluster assignment mixes topics {topic_id!r} and {arg.topic_id!r}"
                )

        best = None
        for candidate in members:
            remainder = [m for m in members if m.id != candidate.id]
            count = match_count(matcher, remainder, candidate)
            words = word_count(candidate.text)
            if config.method == "smm":
                score = score_smm(count)
            else:
                score = score_ssf(count, words, config.exponent_i)
            # Higher score wins; ties fall to fewer words, then smaller
            # text, then smaller id.
            key = (-score, words, candidate.text, candidate.id)
            if best is None or key < best[0]:
                best = (key, candidate, score)
        _, chosen, chosen_score = best
        entries.append(SummaryEntry(
            argument_id=chosen.id,
            text=chosen.text,
            cluster_index=cluster_index,
            cluster_size=len(member_ids),
            score=chosen_score,
        ))

    if config.max_key_points is not None:
        entries = entries[:config.max_key_points]
    return GeneratedSummary(topic_id=topic_id, method=config.method, entries=entries)


def save_summary(summary: GeneratedSummary, path) -> None:
    Path(path).write_text(
        json.dumps(summary.to_json(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
