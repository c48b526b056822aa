"""Pairwise match prediction between an argument and a key point.

All backends answer the same ordered question: does the text in the
argument slot match the text in the key-point slot? Scores live in [0, 1]
and the binary decision is ``score >= decision_threshold``.

* ``oracle``  - answers from gold labels. For argument/key-point pairs the
  label itself decides; pairs absent from the label table are
  non-matching. For argument/argument pairs (cluster-internal selection)
  two arguments match iff their gold key-point sets intersect.
* ``lexical`` - Jaccard similarity over lowercased token sets.
* ``file``    - precomputed JSON Lines ``{"a": ..., "b": ..., "score": f}``
  keyed by the ordered (argument-slot id, key-point-slot id) pair. A
  missing pair is an error, never a silent 0.
* ``remote``  - POST ``/v1/match`` with ``{"pairs": [{"argument": ...,
  "key_point": ...}]}`` expecting ``{"scores": [...]}`` in order.

Within one matcher instance, scores are cached per ordered id pair, so a
cluster's pairwise matrix is computed once. The cache tolerates concurrent
insertion of identical keys.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Argument, Corpus
from .errors import ConfigError, FormatError, PairLookupError
from .textutil import lexical_tokens

_MATCHER_KINDS = ("oracle", "lexical", "file", "remote")


@dataclass(frozen=True)
class MatchScore:
    score: float
    is_match: bool


@dataclass(frozen=True)
class MatcherConfig:
    kind: str
    decision_threshold: float = 0.5
    path: str | Path | None = None   # file kind
    endpoint: str | None = None      # remote kind: base URL
    timeout: float = 30.0
    batch_size: int = 64
    retries: int = 2
    # Slot assignment for argument-to-argument scoring: default puts the
    # cluster member in the argument slot and the candidate representative
    # in the key-point slot; swap_slots reverses this for ablations.
    swap_slots: bool = False

    def validate(self) -> "MatcherConfig":
        if self.kind not in _MATCHER_KINDS:
            raise ConfigError(f"unknown matcher kind: {self.kind!r}")
        if not 0.0 < self.decision_threshold < 1.0:
            raise ConfigError("decision_threshold must be in (0, 1)")
        if self.kind == "file" and self.path is None:
            raise ConfigError("file matcher requires a path")
        if self.kind == "remote" and not self.endpoint:
            raise ConfigError("remote matcher requires an endpoint")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        return self


@dataclass(frozen=True)
class MatchRequest:
    """One ordered (argument slot, key-point slot) scoring request."""
    argument_text: str
    key_point_text: str
    argument_id: str | None = None
    key_point_id: str | None = None


class Matcher:
    """Base backend: scoring plus the per-ordered-id-pair cache."""

    def __init__(self, config: MatcherConfig):
        self.config = config
        self._cache: dict[tuple[str, str], float] = {}
        self._cache_lock = threading.Lock()

    def _decide(self, score: float) -> MatchScore:
        return MatchScore(score=score, is_match=score >= self.config.decision_threshold)

    def _score_batch(self, requests_: Sequence[MatchRequest]) -> list[float]:
        raise NotImplementedError

    def match_batch(self, requests_: Sequence[MatchRequest]) -> list[MatchScore]:
        """Score many ordered pairs, consulting and filling the cache."""
        scores: list[float | None] = [None] * len(requests_)
        pending: list[int] = []
        for i, req in enumerate(requests_):
            key = None
            if req.argument_id is not None and req.key_point_id is not None:
                key = (req.argument_id, req.key_point_id)
            if key is not None:
                with self._cache_lock:
                    if key in self._cache:
                        scores[i] = self._cache[key]
                        continue
            pending.append(i)
        if pending:
            fresh = self._score_batch([requests_[i] for i in pending])
            for i, score in zip(pending, fresh):
                req = requests_[i]
                scores[i] = score
                if req.argument_id is not None and req.key_point_id is not None:
                    with self._cache_lock:
                        self._cache[(req.argument_id, req.key_point_id)] = score
        return [self._decide(s) for s in scores]

    def match(self, argument_text: str, key_point_text: str,
              argument_id: str | None = None, key_point_id: str | None = None) -> MatchScore:
        if not argument_text.strip() or not key_point_text.strip():
            raise ConfigError("match requires non-empty texts")
        return self.match_batch([MatchRequest(
            argument_text=argument_text, key_point_text=key_point_text,
            argument_id=argument_id, key_point_id=key_point_id,
        )])[0]


class OracleMatcher(Matcher):
    """Gold-label matcher; scores are exactly 0.0 or 1.0.

    The key-point-slot id is resolved against key points first, then
    against arguments, so argument/argument requests work transparently.
    """

    def __init__(self, config: MatcherConfig, corpus: Corpus):
        super().__init__(config)
        self._gold = {a.id: corpus.gold_key_points(a.id) for a in corpus.arguments}
        self._kp_ids = {k.id for k in corpus.key_points}

    def _score_one(self, req: MatchRequest) -> float:
        if req.argument_id is None or req.key_point_id is None:
            raise ConfigError("oracle matcher requires both ids on every pair")
        if req.argument_id not in self._gold:
            raise ConfigError(f"oracle matcher: unknown argument id {req.argument_id!r}")
        gold = self._gold[req.argument_id]
        if req.key_point_id in self._kp_ids:
            return 1.0 if req.key_point_id in gold else 0.0
        other = self._gold.get(req.key_point_id)
        if other is None:
            raise ConfigError(f"oracle matcher: unknown id {req.key_point_id!r}")
        return 1.0 if gold & other else 0.0

    def _score_batch(self, requests_):
        return [self._score_one(r) for r in requests_]


class LexicalMatcher(Matcher):
    """Jaccard similarity over lowercased, punctuation-stripped token sets."""

    def _score_batch(self, requests_):
        out = []
        for req in requests_:
            a = set(lexical_tokens(req.argument_text))
            b = set(lexical_tokens(req.key_point_text))
            if not a and not b:
                out.append(1.0)
            elif not a or not b:
                out.append(0.0)
            else:
                out.append(len(a & b) / len(a | b))
        return out


class FileMatcher(Matcher):
    """Precomputed scores for ordered id pairs from a JSON Lines file."""

    def __init__(self, config: MatcherConfig):
        super().__init__(config)
        path = Path(config.path)
        if not path.exists():
            raise FormatError(f"match file not found: {path}")
        self._scores: dict[tuple[str, str], float] = {}
        with path.open(encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                    pair = (str(record["a"]), str(record["b"]))
                    score = float(record["score"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise FormatError(f"bad match record at {path}:{lineno}: {exc}") from exc
                if not 0.0 <= score <= 1.0:
                    raise FormatError(f"score out of [0, 1] at {path}:{lineno}: {score}")
                self._scores[pair] = score

    def _score_batch(self, requests_):
        out = []
        for req in requests_:
            if req.argument_id is None or req.key_point_id is None:
                raise ConfigError("file matcher requires both ids on every pair")
            key = (req.argument_id, req.key_point_id)
            if key not in self._scores:
                raise PairLookupError(f"no precomputed score for ordered pair {key!r}")
            out.append(self._scores[key])
        return out


class RemoteMatcher(Matcher):
    """HTTP matcher speaking the /v1/match protocol."""

    def _score_batch(self, requests_):
        from .embedding import post_json  # shared transport helper

        url = self.config.endpoint.rstrip("/") + "/v1/match"
        scores: list[float] = []
        for start in range(0, len(requests_), self.config.batch_size):
            batch = requests_[start:start + self.config.batch_size]
            payload = {"pairs": [
                {"argument": r.argument_text, "key_point": r.key_point_text}
                for r in batch
            ]}
            body = post_json(url, payload, self.config.timeout, self.config.retries)
            got = body.get("scores")
            if not isinstance(got, list) or len(got) != len(batch):
                raise FormatError(
                    f"remote match answered {0 if not isinstance(got, list) else len(got)} "
                    f"scores for {len(batch)} pairs"
                )
            for value in got:
                score = float(value)
                if not 0.0 <= score <= 1.0:
                    raise FormatError(f"remote match score out of [0, 1]: {score}")
                scores.append(score)
        return scores


def build_matcher(config: MatcherConfig, corpus: Corpus | None = None) -> Matcher:
    config.validate()
    if config.kind == "oracle":
        if corpus is None:
            raise ConfigError("oracle matcher requires a corpus with gold labels")
        return OracleMatcher(config, corpus)
    if config.kind == "lexical":
        return LexicalMatcher(config)
    if config.kind == "file":
        return FileMatcher(config)
    return RemoteMatcher(config)


def match(matcher: Matcher | MatcherConfig, argument_text: str, key_point_text: str,
          argument_id: str | None = None, key_point_id: str | None = None,
          corpus: Corpus | None = None) -> MatchScore:
    """Score one ordered pair; accepts a built matcher or a bare config."""
    if isinstance(matcher, MatcherConfig):
        matcher = build_matcher(matcher, corpus)
    return matcher.match(argument_text, key_point_text, argument_id, key_point_id)


def match_count(matcher: Matcher, cluster: Sequence[Argument], candidate: Argument) -> int:
    """Number of cluster members the candidate matches.

    The caller passes the cluster with the candidate already removed. Each
    member is scored against the candidate with the member in the argument
    slot and the candidate in the key-point slot (reversed under
    swap_slots), and the matching decisions are counted.
    """
    if not cluster:
        return 0
    requests_ = []
    for member in cluster:
        if matcher.config.swap_slots:
            requests_.append(MatchRequest(
                argument_text=candidate.text, key_point_text=member.text,
                argument_id=candidate.id, key_point_id=member.id,
            ))
        else:
            requests_.append(MatchRequest(
                argument_text=member.text, key_point_text=candidate.text,
                argument_id=member.id, key_point_id=candidate.id,
            ))
    results = matcher.match_batch(requests_)
    return sum(1 for r in results if r.is_match)
