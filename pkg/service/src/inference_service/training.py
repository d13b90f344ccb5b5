"""Fine-tuning: turn labeled text pairs into a persisted pair classifier.

Training is synchronous and seed-deterministic on CPU: the seed fixes
weight initialization, batch shuffling, and dropout draws, so repeated
requests with identical pairs and hyperparameters reproduce the same
weights. Known nondeterminism sources, should they apply, are recorded
in ``REPRODUCIBILITY_NOTES`` and absorbed by ``SCORE_TOLERANCE`` — the
service's declared bound on score drift between identically-seeded
training runs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import torch
from torch import nn

from .model import ModelConfig, PairClassifier, collate
from .tokenizer import WordTokenizer

DEFAULT_EPOCHS = 2
DEFAULT_LEARNING_RATE = 2e-5
DEFAULT_MAX_SEQUENCE_LENGTH = 512
DEFAULT_BATCH_SIZE = 16

# Declared bound on |score(run A) - score(run B)| for two trainings with
# identical pairs, hyperparameters, and seed. CPU runs are expected to
# be bitwise-identical; the tolerance leaves room for BLAS thread-count
# differences between hosts.
SCORE_TOLERANCE = 1e-6

REPRODUCIBILITY_NOTES = (
    "weight init, shuffling, and dropout are driven by the request seed",
    "CPU kernels are run-to-run deterministic for identical shapes",
    "BLAS thread-count or hardware changes may shift rounding; score "
    "drift is bounded by SCORE_TOLERANCE",
)


class TrainingInputError(ValueError):
    """The training set cannot produce a usable classifier."""


class ResourceExhaustedError(RuntimeError):
    """Training ran out of memory; the message carries batch-size advice."""


@dataclass(frozen=True)
class TrainingRequest:
    """One labeled pair set plus the hyperparameters to train with."""

    pairs: tuple[tuple[str, str, bool], ...]  # (assay_text, statement_text, label)
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self) -> None:
        if not self.pairs:
            raise TrainingInputError("training requires at least one pair")
        labels = {label for _, _, label in self.pairs}
        if len(labels) < 2:
            only = "true" if True in labels else "false"
            raise TrainingInputError(
                f"training pairs are all labeled {only}; both classes are "
                "required to fit a classifier"
            )
        if self.epochs < 1:
            raise TrainingInputError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise TrainingInputError("learning_rate must be positive")
        if self.max_sequence_length < 4:
            raise TrainingInputError("max_sequence_length must be >= 4")
        if self.batch_size < 1:
            raise TrainingInputError("batch_size must be >= 1")

    def hyperparams_echo(self) -> dict:
        """The training configuration, recorded with the model."""
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "max_sequence_length": self.max_sequence_length,
            "batch_size": self.batch_size,
        }


@dataclass(frozen=True)
class TrainedModel:
    model: PairClassifier
    tokenizer: WordTokenizer
    config: ModelConfig
    training_record: dict  # hyperparams echo + per-step losses


def fine_tune(request: TrainingRequest, config: ModelConfig | None = None) -> TrainedModel:
    """Train a fresh pair classifier on the request's labeled pairs."""
    config = config or ModelConfig()
    tokenizer = WordTokenizer.fit(
        text for assay_text, statement_text, _ in request.pairs
        for text in (assay_text, statement_text)
    )
    # The position table bounds how long an encoded pair may get, no
    # matter what sequence budget the request asks for.
    max_length = min(request.max_sequence_length, config.max_positions)
    encoded = [
        (tokenizer.encode_pair(assay_text, statement_text, max_length), float(label))
        for assay_text, statement_text, label in request.pairs
    ]

    torch.manual_seed(request.seed)
    model = PairClassifier(len(tokenizer), config)
    optimizer = torch.optim.AdamW(model.parameters(), lr=request.learning_rate)
    # Pair sets are typically negative-heavy (many sampled false statements
    # per true one).  Weight the positive class by the negative:positive
    # ratio so the loss is class-balanced and the classifier cannot settle
    # on the base rate.
    positives = sum(1 for _, _, label in request.pairs if label)
    pos_weight = torch.tensor((len(request.pairs) - positives) / positives)
    loss_fn = nn.BCEWithLogitsLoss(pos_weight=pos_weight)
    shuffler = random.Random(request.seed)

    losses: list[float] = []
    model.train()
    try:
        for _ in range(request.epochs):
            order = list(range(len(encoded)))
            shuffler.shuffle(order)
            for start in range(0, len(order), request.batch_size):
                rows = [encoded[i] for i in order[start : start + request.batch_size]]
                token_ids, segments = collate([pair for pair, _ in rows], max_length)
                labels = torch.tensor([label for _, label in rows])
                optimizer.zero_grad()
                loss = loss_fn(model(token_ids, segments), labels)
                loss.backward()
                optimizer.step()
                losses.append(loss.item())
    except (torch.cuda.OutOfMemoryError, MemoryError) as err:
        raise ResourceExhaustedError(_oom_advice(request.batch_size)) from err
    except RuntimeError as err:
        if "out of memory" in str(err).lower():
            raise ResourceExhaustedError(_oom_advice(request.batch_size)) from err
        raise

    record = {
        "hyperparams": request.hyperparams_echo(),
        "model_config": config.to_payload(),
        "pair_count": len(request.pairs),
        "step_losses": losses,
    }
    return TrainedModel(model, tokenizer, config, record)


def _oom_advice(batch_size: int) -> str:
    return (
        f"training ran out of memory at batch size {batch_size}; retry "
        f"with a smaller batch size (e.g. {max(1, batch_size // 2)}) or a "
        "shorter max_sequence_length"
    )
