"""ArgKP pair loading for training and evaluation.

Reads the three-file CSV layout (arguments.csv: arg_id,argument,topic,stance;
key_points.csv: key_point_id,key_point,topic,stance; labels.csv:
arg_id,key_point_id,label) into labeled sentence pairs. This file schema is
the contract with the summarization toolkit; nothing here imports it.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class LabeledPair:
    argument_id: str
    key_point_id: str
    argument: str
    key_point: str
    label: int  # 1 matching, 0 non-matching
    topic: str


def _read_rows(path, required):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing CSV: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path} lacks columns: {', '.join(missing)}")
        yield from reader


def load_pairs(arguments_file, key_points_file, labels_file) -> list[LabeledPair]:
    """Labeled (argument, key point) sentence pairs, in labels-file order."""
    arguments: dict[str, tuple[str, str]] = {}
    for row in _read_rows(arguments_file, ["arg_id", "argument", "topic"]):
        arguments[row["arg_id"].strip()] = (row["argument"].strip(), row["topic"].strip())

    key_points: dict[str, str] = {}
    for row in _read_rows(key_points_file, ["key_point_id", "key_point", "topic"]):
        key_points[row["key_point_id"].strip()] = row["key_point"].strip()

    pairs = []
    for row in _read_rows(labels_file, ["arg_id", "key_point_id", "label"]):
        arg_id = row["arg_id"].strip()
        kp_id = row["key_point_id"].strip()
        if arg_id not in arguments:
            raise ValueError(f"label references unknown argument id {arg_id!r}")
        if kp_id not in key_points:
            raise ValueError(f"label references unknown key point id {kp_id!r}")
        label = row["label"].strip()
        if label not in ("0", "1"):
            raise ValueError(f"label must be 0 or 1, got {label!r}")
        text, topic = arguments[arg_id]
        pairs.append(LabeledPair(
            argument_id=arg_id, key_point_id=kp_id,
            argument=text, key_point=key_points[kp_id],
            label=int(label), topic=topic,
        ))
    if not pairs:
        raise ValueError("labels file has no rows; nothing to train on")
    return pairs


def load_argument_texts(arguments_file, topic: str | None = None) -> dict[str, str]:
    """arg_id -> argument text, optionally restricted to one topic text."""
    texts = {}
    for row in _read_rows(arguments_file, ["arg_id", "argument", "topic"]):
        if topic is None or row["topic"].strip() == topic:
            texts[row["arg_id"].strip()] = row["argument"].strip()
    if not texts:
        raise ValueError("no arguments matched" + (f" topic {topic!r}" if topic else ""))
    return texts


# The summarization toolkit assigns topic ids by first appearance (t0, t1,
# ...) and gives each topic a catch-all key point "<topic_id>__none" with a
# fixed sentinel text; exports that should cover its whole query surface
# reproduce that rule here.
CATCH_ALL_ID_SUFFIX = "__none"
CATCH_ALL_TEXT = "No matching key point"


def toolkit_topic_pairs(arguments_file, key_points_file):
    """All ordered pairs the toolkit's pipeline can query, per topic:
    argument/argument pairs (selection), argument/key-point pairs
    (predicted coverage), and argument/catch-all pairs.

    Returns (id_pairs, texts): ordered (argument-slot, key-point-slot) id
    pairs plus the id -> text table covering them.
    """
    topic_order: list[str] = []
    args_by_topic: dict[str, list[str]] = {}
    texts: dict[str, str] = {}
    for row in _read_rows(arguments_file, ["arg_id", "argument", "topic"]):
        topic = row["topic"].strip()
        if topic not in args_by_topic:
            topic_order.append(topic)
            args_by_topic[topic] = []
        arg_id = row["arg_id"].strip()
        args_by_topic[topic].append(arg_id)
        texts[arg_id] = row["argument"].strip()

    kps_by_topic: dict[str, list[str]] = {t: [] for t in topic_order}
    for row in _read_rows(key_points_file, ["key_point_id", "key_point", "topic"]):
        topic = row["topic"].strip()
        if topic not in kps_by_topic:
            topic_order.append(topic)
            kps_by_topic[topic] = []
            args_by_topic.setdefault(topic, [])
        kp_id = row["key_point_id"].strip()
        kps_by_topic[topic].append(kp_id)
        texts[kp_id] = row["key_point"].strip()

    id_pairs: list[tuple[str, str]] = []
    for index, topic in enumerate(topic_order):
        catch_all_id = f"t{index}{CATCH_ALL_ID_SUFFIX}"
        texts[catch_all_id] = CATCH_ALL_TEXT
        arg_ids = args_by_topic[topic]
        targets = arg_ids + kps_by_topic.get(topic, []) + [catch_all_id]
        for a in arg_ids:
            for b in targets:
                if a != b:
                    id_pairs.append((a, b))
    return id_pairs, texts
