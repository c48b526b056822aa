"""Pseudo-summaries at prescribed coverage levels, for metric validation.

For a coverage level L on a topic with K non-catch-all key points,
round_half_up(L * K) key points (at least one) are selected uniformly at
random. The sample then contains exactly ``size`` arguments, all of them
gold-labeled only to selected key points, with every selected key point
represented by at least one argument. Consequently the sample's actual
coverage over the topic's non-catch-all key points is exactly the rounded
fraction.

Randomness comes from a PCG64 generator seeded per (seed, topic, level,
sample index) through a SeedSequence, so each sample is reproducible in
isolation and the suite is byte-identical across reruns. The numpy version
participates in reproducibility and is recorded in run manifests.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import CapacityError, ConfigError, FormatError
from .selection import GeneratedSummary, SummaryEntry

DEFAULT_LEVELS = (1.0, 0.75, 0.5)
DEFAULT_SIZE = 25       # ArgKP-style; Debate-style runs use 75
DEFAULT_N_SAMPLES = 10


@dataclass(frozen=True)
class CoverageSampleSpec:
    topic_id: str
    level: float
    size: int = DEFAULT_SIZE
    n_samples: int = DEFAULT_N_SAMPLES
    seed: int = 0

    def validate(self) -> "CoverageSampleSpec":
        if not 0.0 < self.level <= 1.0:
            raise ConfigError("coverage level must be in (0, 1]")
        if self.size < 1:
            raise ConfigError("size must be >= 1")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        return self


@dataclass
class PseudoSummary:
    spec: CoverageSampleSpec
    sample_index: int
    selected_key_point_ids: list[str]  # sorted
    argument_ids: list[str]            # sampling order

    def to_json(self) -> dict:
        return {
            "topic_id": self.spec.topic_id,
            "level": self.spec.level,
            "size": self.spec.size,
            "n_samples": self.spec.n_samples,
            "seed": self.spec.seed,
            "sample_index": self.sample_index,
            "selected_key_point_ids": list(self.selected_key_point_ids),
            "argument_ids": list(self.argument_ids),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PseudoSummary":
        try:
            return cls(
                spec=CoverageSampleSpec(
                    topic_id=doc["topic_id"], level=doc["level"], size=doc["size"],
                    n_samples=doc["n_samples"], seed=doc["seed"],
                ),
                sample_index=doc["sample_index"],
                selected_key_point_ids=[str(k) for k in doc["selected_key_point_ids"]],
                argument_ids=[str(a) for a in doc["argument_ids"]],
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed pseudo-summary record: {exc}") from exc


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _rng(seed: int, topic_id: str, level: float, sample_index: int) -> np.random.Generator:
    """Stream splitting: one independent PCG64 stream per sample.

    The entropy key is (seed, first 8 bytes of sha256(topic_id),
    round(level * 1e6), sample_index).
    """
    topic_key = int.from_bytes(
        hashlib.sha256(topic_id.encode("utf-8")).digest()[:8], "big"
    )
    seq = np.random.SeedSequence(entropy=[seed, topic_key, round(level * 1e6), sample_index])
    return np.random.Generator(np.random.PCG64(seq))


def sample_pseudo_summary(corpus: Corpus, spec: CoverageSampleSpec,
                          sample_index: int) -> PseudoSummary:
    """Draw one pseudo-summary; fully determined by (seed, topic, level,
    sample_index)."""
    spec.validate()
    if spec.topic_id not in corpus.topic_by_id:
        raise ConfigError(f"unknown topic id: {spec.topic_id!r}")
    kp_ids = sorted(
        k.id for k in corpus.key_points_for_topic(spec.topic_id, include_catch_all=False)
    )
    if not kp_ids:
        raise CapacityError(f"topic {spec.topic_id!r} has no key points to sample from")

    n_selected = max(1, round_half_up(spec.level * len(kp_ids)))
    rng = _rng(spec.seed, spec.topic_id, spec.level, sample_index)

    chosen_idx = rng.choice(len(kp_ids), size=n_selected, replace=False)
    selected = sorted(kp_ids[i] for i in chosen_idx)
    selected_set = set(selected)
    if spec.size < n_selected:
        raise CapacityError(
            f"size {spec.size} cannot represent {n_selected} selected key points"
        )

    # Pool: arguments whose non-catch-all gold set is non-empty and lies
    # entirely inside the selection, so no unselected key point leaks in.
    catch_all_ids = {
        k.id for k in corpus.key_points_for_topic(spec.topic_id) if k.is_catch_all
    }
    pool = []
    by_kp: dict[str, list[str]] = {kp: [] for kp in selected}
    for arg in corpus.arguments_for_topic(spec.topic_id):
        gold = set(corpus.gold_key_points(arg.id)) - catch_all_ids
        if gold and gold <= selected_set:
            pool.append(arg.id)
            for kp in gold:
                by_kp[kp].append(arg.id)

    # Guarantee clause: one argument per selected key point first.
    drawn: list[str] = []
    drawn_set: set[str] = set()
    represented: set[str] = set()
    for kp in selected:
        if kp in represented:
            continue
        candidates = [a for a in by_kp[kp] if a not in drawn_set]
        if not candidates:
            raise CapacityError(
                f"key point {kp!r} on topic {spec.topic_id!r} has no eligible argument"
            )
        pick = candidates[int(rng.integers(len(candidates)))]
        drawn.append(pick)
        drawn_set.add(pick)
        represented |= set(corpus.gold_key_points(pick)) - catch_all_ids

    # Fill up to the requested size from the remaining pool.
    needed = spec.size - len(drawn)
    remaining = [a for a in pool if a not in drawn_set]
    if needed > len(remaining):
        raise CapacityError(
            f"topic {spec.topic_id!r} level {spec.level}: need {spec.size} arguments, "
            f"only {len(drawn) + len(remaining)} available under the selected key points"
        )
    if needed > 0:
        extra_idx = rng.choice(len(remaining), size=needed, replace=False)
        for i in extra_idx:
            drawn.append(remaining[int(i)])

    return PseudoSummary(
        spec=spec, sample_index=sample_index,
        selected_key_point_ids=selected, argument_ids=drawn,
    )


def generate_suite(corpus: Corpus, levels=DEFAULT_LEVELS, size: int = DEFAULT_SIZE,
                   n_samples: int = DEFAULT_N_SAMPLES, seed: int = 0) -> list[PseudoSummary]:
    """n_samples pseudo-summaries per (topic, level), topics in corpus order."""
    suite = []
    for topic in corpus.topics:
        for level in levels:
            spec = CoverageSampleSpec(
                topic_id=topic.id, level=level, size=size,
                n_samples=n_samples, seed=seed,
            )
            for sample_index in range(n_samples):
                try:
                    suite.append(sample_pseudo_summary(corpus, spec, sample_index))
                except CapacityError as exc:
                    raise CapacityError(
                        f"(topic {topic.id!r}, level {level}): {exc}"
                    ) from exc
    return suite


def pseudo_to_summary(pseudo: PseudoSummary, corpus: Corpus) -> GeneratedSummary:
    """View a pseudo-summary as a GeneratedSummary for the evaluation module."""
    entries = []
    for i, arg_id in enumerate(pseudo.argument_ids):
        arg = corpus.argument_by_id[arg_id]
        entries.append(SummaryEntry(
            argument_id=arg.id, text=arg.text,
            cluster_index=i, cluster_size=1, score=0.0,
        ))
    return GeneratedSummary(topic_id=pseudo.spec.topic_id, method="pseudo", entries=entries)


def write_suite_jsonl(suite: list[PseudoSummary], path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for pseudo in suite:
            handle.write(json.dumps(pseudo.to_json(), ensure_ascii=False) + "\n")


def read_suite_jsonl(path) -> list[PseudoSummary]:
    path = Path(path)
    if not path.exists():
        raise FormatError(f"suite file not found: {path}")
    suite = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                suite.append(PseudoSummary.from_json(json.loads(line)))
    return suite
