"""model_tooling: fine-tune and serve the models behind the summarization
toolkit's file and remote backends."""
from __future__ import annotations

__version__ = "0.1.0"

from .argkp import LabeledPair, load_argument_texts, load_pairs
from .recipes import TrainingLog, TrainingRecipe

__all__ = [
    "__version__",
    "LabeledPair", "load_argument_texts", "load_pairs",
    "TrainingLog", "TrainingRecipe",
]
