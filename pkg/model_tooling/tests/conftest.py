from __future__ import annotations

import csv
import os
import random

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

WORDS = [
    "vaccines", "save", "lives", "parents", "choose", "side", "effects",
    "children", "school", "health", "state", "duty", "safety", "cost",
    "freedom", "risk", "disease", "protect",
]


@pytest.fixture(scope="session")
def tiny_bert_dir(tmp_path_factory):
    """A from-scratch BERT pair classifier + WordPiece tokenizer on disk;
    everything local, nothing downloaded."""
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

    path = tmp_path_factory.mktemp("tinybert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + WORDS
    (path / "vocab.txt").write_text("\n".join(vocab), encoding="utf-8")
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64,
        max_position_embeddings=64, num_labels=2,
    )
    import torch
    torch.manual_seed(0)
    model = BertForSequenceClassification(config)
    tokenizer = BertTokenizer(str(path / "vocab.txt"), model_max_length=64)
    model.save_pretrained(str(path))
    tokenizer.save_pretrained(str(path))
    return str(path)


@pytest.fixture(scope="session")
def training_pairs():
    """Separable labeled pairs: positives share tokens, negatives don't."""
    from model_tooling.argkp import LabeledPair

    rng = random.Random(0)
    pairs = []
    for i in range(12):
        shared = rng.sample(WORDS, 3)
        pairs.append(LabeledPair(
            argument_id=f"a{i}", key_point_id=f"k{i}",
            argument=" ".join(shared + rng.sample(WORDS, 2)),
            key_point=" ".join(shared), label=1, topic="t",
        ))
        pairs.append(LabeledPair(
            argument_id=f"a{i}n", key_point_id=f"k{i}n",
            argument=" ".join(rng.sample(WORDS, 5)),
            key_point=" ".join(rng.sample(WORDS, 3)), label=0, topic="t",
        ))
    return pairs


@pytest.fixture
def argkp_csvs(tmp_path):
    """A miniature three-file ArgKP layout over the tiny vocabulary."""
    rng = random.Random(3)
    arguments, key_points, labels = [], [], []
    topic = "vaccines protect health"
    for k in range(3):
        key_points.append((f"kp{k}", " ".join(rng.sample(WORDS, 3)), topic, "1"))
    for i in range(9):
        kp_index = i % 3
        arguments.append((f"arg{i}", " ".join(rng.sample(WORDS, 5)), topic, "1"))
        labels.append((f"arg{i}", f"kp{kp_index}", "1"))
        labels.append((f"arg{i}", f"kp{(kp_index + 1) % 3}", "0"))

    paths = {}
    for name, header, rows in (
        ("arguments.csv", ["arg_id", "argument", "topic", "stance"], arguments),
        ("key_points.csv", ["key_point_id", "key_point", "topic", "stance"], key_points),
        ("labels.csv", ["arg_id", "key_point_id", "label"], labels),
    ):
        path = tmp_path / name
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
        paths[name.split(".")[0]] = path
    return paths
