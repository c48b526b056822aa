"""Argument corpora: loading, validation, and preprocessing.

Two ingestion formats are supported:

* ArgKP-style: three CSV files with headers
  ``arguments.csv``:  arg_id,argument,topic,stance
  ``key_points.csv``: key_point_id,key_point,topic,stance
  ``labels.csv``:     arg_id,key_point_id,label
* Debate-style: one CSV ``arg_id,argument,topic,aspect`` where the aspect
  text doubles as the key-point text. Aspect ids are assigned
  deterministically by first appearance within each topic.

Topic ids are assigned by first appearance (``t0``, ``t1``, ...). The
canonical internal serialization is a single JSON document with ``topics``,
``arguments``, ``key_points`` and ``labels`` arrays.

A loaded Corpus is treated as immutable: every transform returns a new
Corpus and never mutates its input, so corpora are safe to share across
concurrent readers.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

from .errors import IntegrityError, ParseError
from .textutil import split_into_sentences

CATCH_ALL_TEXT = "No matching key point"
CATCH_ALL_ID_SUFFIX = "__none"


@dataclass(frozen=True)
class Topic:
    id: str
    text: str


@dataclass(frozen=True)
class Argument:
    id: str
    topic_id: str
    text: str
    stance: int | None = None
    # Set on arguments derived by split_sentences.
    parent_id: str | None = None
    sentence_index: int | None = None


@dataclass(frozen=True)
class KeyPoint:
    id: str
    topic_id: str
    text: str
    stance: int | None = None
    is_catch_all: bool = False


@dataclass(frozen=True)
class GoldLabel:
    argument_id: str
    key_point_id: str
    label: int  # 1 = matching, 0 = non-matching


@dataclass
class Corpus:
    topics: list[Topic] = field(default_factory=list)
    arguments: list[Argument] = field(default_factory=list)
    key_points: list[KeyPoint] = field(default_factory=list)
    labels: list[GoldLabel] = field(default_factory=list)

    # -- lookup helpers (cached; valid because corpora are never mutated) --

    @cached_property
    def topic_by_id(self) -> dict[str, Topic]:
        return {t.id: t for t in self.topics}

    @cached_property
    def argument_by_id(self) -> dict[str, Argument]:
        return {a.id: a for a in self.arguments}

    @cached_property
    def key_point_by_id(self) -> dict[str, KeyPoint]:
        return {k.id: k for k in self.key_points}

    @cached_property
    def argument_load_position(self) -> dict[str, int]:
        return {a.id: i for i, a in enumerate(self.arguments)}

    @cached_property
    def _positive_kp_ids(self) -> dict[str, frozenset[str]]:
        by_arg: dict[str, set[str]] = {a.id: set() for a in self.arguments}
        for lab in self.labels:
            if lab.label == 1:
                by_arg[lab.argument_id].add(lab.key_point_id)
        return {aid: frozenset(kps) for aid, kps in by_arg.items()}

    def arguments_for_topic(self, topic_id: str) -> list[Argument]:
        return [a for a in self.arguments if a.topic_id == topic_id]

    def key_points_for_topic(self, topic_id: str, include_catch_all: bool = True) -> list[KeyPoint]:
        return [
            k for k in self.key_points
            if k.topic_id == topic_id and (include_catch_all or not k.is_catch_all)
        ]

    def gold_key_points(self, argument_id: str) -> frozenset[str]:
        """Ids of key points the argument is positively labeled to."""
        return self._positive_kp_ids[argument_id]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(corpus: Corpus) -> Corpus:
    """Check referential integrity and uniqueness; return the corpus."""
    seen_topics: set[str] = set()
    for t in corpus.topics:
        if t.id in seen_topics:
            raise IntegrityError(f"duplicate topic id: {t.id!r}")
        seen_topics.add(t.id)
        if not t.text.strip():
            raise IntegrityError(f"topic {t.id!r} has empty text")

    seen_args: set[str] = set()
    for a in corpus.arguments:
        if a.id in seen_args:
            raise IntegrityError(f"duplicate argument id: {a.id!r}")
        seen_args.add(a.id)
        if a.topic_id not in seen_topics:
            raise IntegrityError(f"argument {a.id!r} references unknown topic {a.topic_id!r}")
        if not a.text.strip():
            raise IntegrityError(f"argument {a.id!r} has empty text")
        if a.stance is not None and a.stance not in (-1, 1):
            raise IntegrityError(f"argument {a.id!r} has invalid stance {a.stance!r}")

    seen_kps: set[str] = set()
    catch_all_topics: set[str] = set()
    for k in corpus.key_points:
        if k.id in seen_kps:
            raise IntegrityError(f"duplicate key point id: {k.id!r}")
        seen_kps.add(k.id)
        if k.topic_id not in seen_topics:
            raise IntegrityError(f"key point {k.id!r} references unknown topic {k.topic_id!r}")
        if not k.text.strip():
            raise IntegrityError(f"key point {k.id!r} has empty text")
        if k.is_catch_all:
            if k.topic_id in catch_all_topics:
                raise IntegrityError(f"topic {k.topic_id!r} has more than one catch-all key point")
            catch_all_topics.add(k.topic_id)

    seen_pairs: set[tuple[str, str]] = set()
    for lab in corpus.labels:
        if lab.argument_id not in seen_args:
            raise IntegrityError(f"label references unknown argument id {lab.argument_id!r}")
        if lab.key_point_id not in seen_kps:
            raise IntegrityError(f"label references unknown key point id {lab.key_point_id!r}")
        if lab.label not in (0, 1):
            raise IntegrityError(
                f"label for ({lab.argument_id!r}, {lab.key_point_id!r}) must be 0 or 1, "
                f"got {lab.label!r}"
            )
        pair = (lab.argument_id, lab.key_point_id)
        if pair in seen_pairs:
            raise IntegrityError(f"duplicate label pair {pair!r}")
        seen_pairs.add(pair)
    return corpus


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _parse_stance(raw: str | None, path, line: int) -> int | None:
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ParseError(f"stance must be -1 or 1, got {raw!r}", path, line) from None
    if value not in (-1, 1):
        raise ParseError(f"stance must be -1 or 1, got {raw!r}", path, line)
    return value


def _read_csv(path, required: list[str]):
    path = Path(path)
    if not path.exists():
        raise ParseError("file not found", path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ParseError("missing header row", path)
        missing = [col for col in required if col not in reader.fieldnames]
        if missing:
            raise ParseError(f"missing required columns: {', '.join(missing)}", path)
        for row in reader:
            if any(row.get(col) is None for col in required):
                raise ParseError("row has fewer fields than the header", path, reader.line_num)
            yield reader.line_num, row


class _TopicRegistry:
    """Assigns stable topic ids by first appearance of the topic text."""

    def __init__(self):
        self.topics: list[Topic] = []
        self._by_text: dict[str, str] = {}

    def id_for(self, text: str) -> str:
        text = text.strip()
        if text not in self._by_text:
            topic_id = f"t{len(self.topics)}"
            self._by_text[text] = topic_id
            self.topics.append(Topic(id=topic_id, text=text))
        return self._by_text[text]


def load_argkp(arguments_file, key_points_file, labels_file) -> Corpus:
    """Load the three-file ArgKP CSV layout into a validated Corpus."""
    registry = _TopicRegistry()

    arguments = []
    for line, row in _read_csv(arguments_file, ["arg_id", "argument", "topic"]):
        arguments.append(Argument(
            id=row["arg_id"].strip(),
            topic_id=registry.id_for(row["topic"]),
            text=row["argument"].strip(),
            stance=_parse_stance(row.get("stance"), arguments_file, line),
        ))
    if not arguments:
        raise ParseError("empty corpus: no argument rows", arguments_file)

    key_points = []
    for line, row in _read_csv(key_points_file, ["key_point_id", "key_point", "topic"]):
        key_points.append(KeyPoint(
            id=row["key_point_id"].strip(),
            topic_id=registry.id_for(row["topic"]),
            text=row["key_point"].strip(),
            stance=_parse_stance(row.get("stance"), key_points_file, line),
        ))

    labels = []
    for line, row in _read_csv(labels_file, ["arg_id", "key_point_id", "label"]):
        raw = row["label"].strip()
        if raw not in ("0", "1"):
            raise ParseError(f"label must be 0 or 1, got {raw!r}", labels_file, line)
        labels.append(GoldLabel(
            argument_id=row["arg_id"].strip(),
            key_point_id=row["key_point_id"].strip(),
            label=int(raw),
        ))

    return validate(Corpus(registry.topics, arguments, key_points, labels))


def load_debate(file) -> Corpus:
    """Load the single-file Debate adapter schema into a validated Corpus.

    Every row yields a positive label from its argument to the key point
    derived from its aspect text. Repeated identical (argument, aspect)
    rows collapse to one label; an arg_id reappearing with different
    argument text is an integrity error.
    """
    registry = _TopicRegistry()
    arguments: list[Argument] = []
    arg_text: dict[str, str] = {}
    key_points: list[KeyPoint] = []
    kp_by_topic_aspect: dict[tuple[str, str], str] = {}
    kp_counter: dict[str, int] = {}
    labels: list[GoldLabel] = []
    seen_pairs: set[tuple[str, str]] = set()

    for line, row in _read_csv(file, ["arg_id", "argument", "topic", "aspect"]):
        arg_id = row["arg_id"].strip()
        text = row["argument"].strip()
        topic_id = registry.id_for(row["topic"])
        aspect = row["aspect"].strip()
        if not aspect:
            raise ParseError("empty aspect", file, line)

        if arg_id not in arg_text:
            arg_text[arg_id] = text
            arguments.append(Argument(id=arg_id, topic_id=topic_id, text=text))
        elif arg_text[arg_id] != text:
            raise IntegrityError(
                f"argument id {arg_id!r} appears with conflicting texts"
            )

        key = (topic_id, aspect)
        if key not in kp_by_topic_aspect:
            index = kp_counter.get(topic_id, 0)
            kp_counter[topic_id] = index + 1
            kp_id = f"{topic_id}_kp{index}"
            kp_by_topic_aspect[key] = kp_id
            key_points.append(KeyPoint(id=kp_id, topic_id=topic_id, text=aspect))
        kp_id = kp_by_topic_aspect[key]

        pair = (arg_id, kp_id)
        if pair not in seen_pairs:
            seen_pairs.add(pair)
            labels.append(GoldLabel(argument_id=arg_id, key_point_id=kp_id, label=1))

    if not arguments:
        raise ParseError("empty corpus: no data rows", file)
    return validate(Corpus(registry.topics, arguments, key_points, labels))


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def attach_catch_all(corpus: Corpus) -> Corpus:
    """Give every unlabeled argument a positive label to a per-topic
    catch-all key point.

    For each topic with at least one argument lacking a positive label, one
    catch-all key point (fixed sentinel text, id ``<topic_id>__none``) is
    added unless it already exists, and each such argument gains a positive
    label to it. Idempotent.
    """
    new_kps = list(corpus.key_points)
    new_labels = list(corpus.labels)
    catch_all_for_topic = {
        k.topic_id: k.id for k in corpus.key_points if k.is_catch_all
    }
    existing_kp_ids = {k.id for k in corpus.key_points}

    for topic in corpus.topics:
        unmatched = [
            a for a in corpus.arguments
            if a.topic_id == topic.id and not corpus.gold_key_points(a.id)
        ]
        if not unmatched:
            continue
        kp_id = catch_all_for_topic.get(topic.id)
        if kp_id is None:
            kp_id = f"{topic.id}{CATCH_ALL_ID_SUFFIX}"
            if kp_id in existing_kp_ids:
                raise IntegrityError(
                    f"reserved catch-all id {kp_id!r} is taken by a regular key point"
                )
            new_kps.append(KeyPoint(
                id=kp_id, topic_id=topic.id, text=CATCH_ALL_TEXT, is_catch_all=True,
            ))
        for arg in unmatched:
            new_labels.append(GoldLabel(argument_id=arg.id, key_point_id=kp_id, label=1))

    return validate(Corpus(list(corpus.topics), list(corpus.arguments), new_kps, new_labels))


def split_sentences(corpus: Corpus) -> Corpus:
    """Replace each multi-sentence argument by one argument per sentence.

    Derived arguments get ids ``<parent_id>_s<k>`` (k = 0-based sentence
    index) and record their parent; every label row of a split argument is
    copied to each derived argument. Single-sentence arguments pass through
    unchanged.
    """
    new_arguments: list[Argument] = []
    derived_ids: dict[str, list[str]] = {}
    for arg in corpus.arguments:
        sentences = split_into_sentences(arg.text)
        if len(sentences) <= 1:
            new_arguments.append(arg)
            continue
        ids = []
        for k, sentence in enumerate(sentences):
            child = Argument(
                id=f"{arg.id}_s{k}",
                topic_id=arg.topic_id,
                text=sentence,
                stance=arg.stance,
                parent_id=arg.id,
                sentence_index=k,
            )
            new_arguments.append(child)
            ids.append(child.id)
        derived_ids[arg.id] = ids

    new_labels: list[GoldLabel] = []
    for lab in corpus.labels:
        children = derived_ids.get(lab.argument_id)
        if children is None:
            new_labels.append(lab)
        else:
            for child_id in children:
                new_labels.append(replace(lab, argument_id=child_id))

    return validate(Corpus(
        list(corpus.topics), new_arguments, list(corpus.key_points), new_labels,
    ))


# ---------------------------------------------------------------------------
# Canonical JSON serialization
# ---------------------------------------------------------------------------

def corpus_to_json(corpus: Corpus) -> dict:
    return {
        "topics": [{"id": t.id, "text": t.text} for t in corpus.topics],
        "arguments": [
            {
                "id": a.id, "topic_id": a.topic_id, "text": a.text,
                "stance": a.stance, "parent_id": a.parent_id,
                "sentence_index": a.sentence_index,
            }
            for a in corpus.arguments
        ],
        "key_points": [
            {
                "id": k.id, "topic_id": k.topic_id, "text": k.text,
                "stance": k.stance, "is_catch_all": k.is_catch_all,
            }
            for k in corpus.key_points
        ],
        "labels": [
            {
                "argument_id": lab.argument_id,
                "key_point_id": lab.key_point_id,
                "label": lab.label,
            }
            for lab in corpus.labels
        ],
    }


def corpus_from_json(doc: dict) -> Corpus:
    try:
        corpus = Corpus(
            topics=[Topic(id=t["id"], text=t["text"]) for t in doc["topics"]],
            arguments=[
                Argument(
                    id=a["id"], topic_id=a["topic_id"], text=a["text"],
                    stance=a.get("stance"), parent_id=a.get("parent_id"),
                    sentence_index=a.get("sentence_index"),
                )
                for a in doc["arguments"]
            ],
            key_points=[
                KeyPoint(
                    id=k["id"], topic_id=k["topic_id"], text=k["text"],
                    stance=k.get("stance"),
                    is_catch_all=bool(k.get("is_catch_all", False)),
                )
                for k in doc["key_points"]
            ],
            labels=[
                GoldLabel(
                    argument_id=lab["argument_id"],
                    key_point_id=lab["key_point_id"],
                    label=lab["label"],
                )
                for lab in doc["labels"]
            ],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed corpus document: {exc}") from exc
    return validate(corpus)


def load_corpus_json(path) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise ParseError("file not found", path)
    with path.open(encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", path) from exc
    return corpus_from_json(doc)


def save_corpus_json(corpus: Corpus, path) -> None:
    Path(path).write_text(
        json.dumps(corpus_to_json(corpus), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
