"""Sentence-pair scoring service for bioassay semantification.

Hosts a small transformer pair classifier behind the three-endpoint
wire protocol (health, train, score) that the `semantify` package's
remote scorer speaks.
"""

from ._version import __version__
from .app import create_app
from .model import ModelConfig, PairClassifier, scores_for
from .store import ModelStore, UnknownModelError, model_id_for
from .tokenizer import EncodedPair, WordTokenizer
from .training import (
    SCORE_TOLERANCE,
    ResourceExhaustedError,
    TrainedModel,
    TrainingInputError,
    TrainingRequest,
    fine_tune,
)

__all__ = [
    "__version__",
    "create_app",
    "ModelConfig",
    "PairClassifier",
    "scores_for",
    "ModelStore",
    "UnknownModelError",
    "model_id_for",
    "EncodedPair",
    "WordTokenizer",
    "SCORE_TOLERANCE",
    "ResourceExhaustedError",
    "TrainedModel",
    "TrainingInputError",
    "TrainingRequest",
    "fine_tune",
]
