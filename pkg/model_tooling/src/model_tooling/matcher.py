"""Pair-classifier fine-tuning, scoring, and match-score export.

The classifier sees "[CLS] argument [SEP] key point [SEP]" and emits two
logits, [non-matching, matching]. Scores exported to the toolkit are the
two-class softmax probability of the matching logit, computed as
sigmoid(logit_match - logit_nonmatch); this keeps the argmax decision rule
(match iff the second logit is the greater) exactly equivalent to
score >= 0.5.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer

from .argkp import LabeledPair
from .recipes import TrainingLog, TrainingRecipe


def load_classifier(name_or_path: str):
    tokenizer = AutoTokenizer.from_pretrained(name_or_path)
    model = AutoModelForSequenceClassification.from_pretrained(name_or_path, num_labels=2)
    model.eval()
    return tokenizer, model


def logits_to_scores(logits: torch.Tensor) -> torch.Tensor:
    """Two-class softmax on the matching logit: sigmoid(l1 - l0)."""
    return torch.sigmoid(logits[:, 1] - logits[:, 0])


def finetune_matcher(recipe: TrainingRecipe, pairs: list[LabeledPair],
                     log_path=None):
    """Cross-entropy fine-tuning on labeled pairs; saves to recipe.output_dir."""
    recipe.validate()
    torch.manual_seed(recipe.seed)
    tokenizer, model = load_classifier(recipe.base_model)
    log = TrainingLog(recipe=recipe)

    if recipe.epochs > 0:
        optimizer = torch.optim.AdamW(model.parameters(), lr=recipe.learning_rate)
        loss_fn = torch.nn.CrossEntropyLoss()
        order = list(range(len(pairs)))
        rng = random.Random(recipe.seed)
        model.train()
        for _ in range(recipe.epochs):
            rng.shuffle(order)
            for start in range(0, len(order), recipe.batch_size):
                batch = [pairs[i] for i in order[start:start + recipe.batch_size]]
                encoded = tokenizer(
                    [p.argument for p in batch], [p.key_point for p in batch],
                    padding=True, truncation=True,
                    max_length=recipe.max_seq_length, return_tensors="pt",
                )
                labels = torch.tensor([p.label for p in batch])
                logits = model(**encoded).logits
                loss = loss_fn(logits, labels)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                log.record(loss.item())
        model.eval()

    out = Path(recipe.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(str(out))
    tokenizer.save_pretrained(str(out))
    log.save(log_path or out / "training_log.json")
    return tokenizer, model, log


def overfit_single_batch(recipe: TrainingRecipe, pairs: list[LabeledPair],
                         steps: int = 20) -> list[float]:
    """Sanity loop: repeat one batch for ``steps`` steps, return the losses."""
    recipe.validate()
    torch.manual_seed(recipe.seed)
    tokenizer, model = load_classifier(recipe.base_model)
    optimizer = torch.optim.AdamW(model.parameters(), lr=recipe.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss()
    batch = pairs[:recipe.batch_size]
    encoded = tokenizer(
        [p.argument for p in batch], [p.key_point for p in batch],
        padding=True, truncation=True, max_length=recipe.max_seq_length,
        return_tensors="pt",
    )
    labels = torch.tensor([p.label for p in batch])
    values = []
    model.train()
    for _ in range(steps):
        loss = loss_fn(model(**encoded).logits, labels)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        values.append(loss.item())
    return values


@torch.no_grad()
def score_pairs(tokenizer, model, pairs: list[tuple[str, str]],
                batch_size: int = 32, max_length: int = 128) -> list[float]:
    """Probability-like match scores in [0, 1], one per (argument, key
    point) text pair, in input order."""
    scores: list[float] = []
    for start in range(0, len(pairs), batch_size):
        batch = pairs[start:start + batch_size]
        encoded = tokenizer(
            [a for a, _ in batch], [k for _, k in batch],
            padding=True, truncation=True, max_length=max_length, return_tensors="pt",
        )
        logits = model(**encoded).logits
        scores.extend(float(s) for s in logits_to_scores(logits))
    return scores


def export_match_scores(tokenizer, model, id_pairs: list[tuple[str, str]],
                        texts: dict[str, str], path,
                        batch_size: int = 32, max_length: int = 128) -> int:
    """Write ordered-pair scores as JSONL ``{"a", "b", "score"}`` lines.

    ``id_pairs`` are (argument-slot id, key-point-slot id); both ids must
    resolve in ``texts``.
    """
    missing = sorted({i for pair in id_pairs for i in pair if i not in texts})
    if missing:
        raise ValueError(f"ids without texts: {', '.join(missing[:10])}")
    text_pairs = [(texts[a], texts[b]) for a, b in id_pairs]
    scores = score_pairs(tokenizer, model, text_pairs, batch_size, max_length)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for (a, b), score in zip(id_pairs, scores):
            handle.write(json.dumps({"a": a, "b": b, "score": score}) + "\n")
    return len(id_pairs)


def micro_precision(tokenizer, model, pairs: list[LabeledPair],
                    batch_size: int = 32, max_length: int = 128) -> float:
    """Micro-averaged precision of the argmax decision over labeled pairs
    (correct decisions / all decisions)."""
    scores = score_pairs(
        tokenizer, model, [(p.argument, p.key_point) for p in pairs],
        batch_size, max_length,
    )
    correct = sum(1 for p, s in zip(pairs, scores) if (s >= 0.5) == (p.label == 1))
    return correct / len(pairs)
