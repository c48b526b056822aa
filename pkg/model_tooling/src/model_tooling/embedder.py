"""Sentence-encoder fine-tuning and embedding export.

Fine-tunes a SentenceTransformer on labeled (argument, key point) pairs
with cosine-similarity loss (MSE between pair cosine and the 0/1 label) or
contrastive loss, then exports per-argument embeddings as JSON Lines
(``{"id": ..., "vector": [...]}``), the format the summarization toolkit
loads with its file backend.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np
import torch
from sentence_transformers import SentenceTransformer

try:  # import paths moved in newer sentence-transformers releases
    from sentence_transformers.sentence_transformer import losses
    from sentence_transformers.sentence_transformer.modules import Pooling, Transformer
except ImportError:  # pragma: no cover - depends on installed version
    from sentence_transformers import losses
    from sentence_transformers.models import Pooling, Transformer

from .argkp import LabeledPair
from .recipes import TrainingLog, TrainingRecipe


def load_encoder(name_or_path: str, max_seq_length: int = 128) -> SentenceTransformer:
    """Load a SentenceTransformer; plain transformer checkpoints get a
    mean-pooling head."""
    path = Path(name_or_path)
    if path.is_dir() and not (path / "modules.json").exists():
        word = Transformer(str(path), max_seq_length=max_seq_length)
        get_dim = getattr(word, "get_embedding_dimension", None) \
            or word.get_word_embedding_dimension
        pooling = Pooling(get_dim(), pooling_mode="mean")
        return SentenceTransformer(modules=[word, pooling])
    return SentenceTransformer(str(name_or_path))


def _features(model: SentenceTransformer, texts: list[str], device) -> dict:
    tokenize = getattr(model, "preprocess", None) or model.tokenize
    features = tokenize(texts)
    return {k: v.to(device) if hasattr(v, "to") else v for k, v in features.items()}


def finetune_embedder(recipe: TrainingRecipe, pairs: list[LabeledPair],
                      log_path=None) -> tuple[SentenceTransformer, TrainingLog]:
    """Fine-tune per the recipe and save the encoder to recipe.output_dir.

    epochs=0 saves the base encoder untouched (behavioral no-op), which is
    handy for before/after comparisons with identical plumbing.
    """
    recipe.validate()
    torch.manual_seed(recipe.seed)
    random.seed(recipe.seed)

    model = load_encoder(recipe.base_model, recipe.max_seq_length)
    device = torch.device("cpu")
    model.to(device)
    log = TrainingLog(recipe=recipe)

    if recipe.epochs > 0:
        if recipe.loss == "cosine-similarity":
            loss_fn = losses.CosineSimilarityLoss(model)
        else:
            loss_fn = losses.ContrastiveLoss(model)
        optimizer = torch.optim.AdamW(model.parameters(), lr=recipe.learning_rate)
        order = list(range(len(pairs)))
        rng = random.Random(recipe.seed)
        model.train()
        for _ in range(recipe.epochs):
            rng.shuffle(order)
            for start in range(0, len(order), recipe.batch_size):
                batch = [pairs[i] for i in order[start:start + recipe.batch_size]]
                features = [
                    _features(model, [p.argument for p in batch], device),
                    _features(model, [p.key_point for p in batch], device),
                ]
                labels = torch.tensor([float(p.label) for p in batch], device=device)
                loss = loss_fn(features, labels)
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                log.record(loss.item())
        model.eval()

    out = Path(recipe.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    model.save(str(out))
    log.save(log_path or out / "training_log.json")
    return model, log


def overfit_single_batch(recipe: TrainingRecipe, pairs: list[LabeledPair],
                         steps: int = 20) -> list[float]:
    """Sanity loop: repeat one batch for ``steps`` steps, return the losses."""
    recipe.validate()
    torch.manual_seed(recipe.seed)
    model = load_encoder(recipe.base_model, recipe.max_seq_length)
    device = torch.device("cpu")
    loss_fn = (losses.CosineSimilarityLoss(model) if recipe.loss == "cosine-similarity"
               else losses.ContrastiveLoss(model))
    optimizer = torch.optim.AdamW(model.parameters(), lr=recipe.learning_rate)
    batch = pairs[:recipe.batch_size]
    labels = torch.tensor([float(p.label) for p in batch], device=device)
    values = []
    model.train()
    for _ in range(steps):
        features = [
            _features(model, [p.argument for p in batch], device),
            _features(model, [p.key_point for p in batch], device),
        ]
        loss = loss_fn(features, labels)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        values.append(loss.item())
    return values


def encode_texts(model: SentenceTransformer, texts: list[str],
                 batch_size: int = 32) -> np.ndarray:
    return model.encode(
        texts, batch_size=batch_size, convert_to_numpy=True, show_progress_bar=False,
    )


def export_embeddings(model: SentenceTransformer, texts_by_id: dict[str, str],
                      path, batch_size: int = 32) -> int:
    """Write one JSONL line per id; returns the line count."""
    ids = list(texts_by_id)
    vectors = encode_texts(model, [texts_by_id[i] for i in ids], batch_size)
    if vectors.ndim != 2:
        raise ValueError(f"encoder returned shape {vectors.shape}, expected 2-D")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for arg_id, vector in zip(ids, vectors):
            record = {"id": arg_id, "vector": [float(x) for x in vector]}
            handle.write(json.dumps(record) + "\n")
    return len(ids)
