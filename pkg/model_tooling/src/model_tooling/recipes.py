"""Training recipes: every knob in one serializable place.

The source publication for this setup fixes only the base encoder and the
loss family; epochs, learning rate, and batch size are recipe fields with
documented defaults, echoed into the training log of every run.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

LOSSES = ("cosine-similarity", "contrastive")


@dataclass
class TrainingRecipe:
    base_model: str = "sentence-transformers/all-mpnet-base-v2"
    loss: str = "cosine-similarity"
    epochs: int = 1
    learning_rate: float = 2e-5
    batch_size: int = 16
    max_seq_length: int = 128
    seed: int = 42
    output_dir: str = "artifacts"

    def validate(self) -> "TrainingRecipe":
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {self.loss!r}")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        return self

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class TrainingLog:
    recipe: TrainingRecipe
    losses: list[float] = field(default_factory=list)
    steps: int = 0

    def record(self, value: float) -> None:
        self.losses.append(float(value))
        self.steps += 1

    def save(self, path) -> None:
        doc = {"recipe": self.recipe.to_json(), "steps": self.steps, "losses": self.losses}
        Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
