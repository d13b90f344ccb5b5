"""Scorers and decision helpers.

Every scorer maps an (assay, statement) pair to a score in [0, 1] once
trained. Two native scorers live here: the assay-independent frequency
baseline and a lexical token-overlap scorer cheap enough to run without
any ML runtime. The remote neural scorer in :mod:`semantify.remote`
implements the same contract over the wire.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np

from .corpus import Bioassay, Corpus, SemanticStatement
from .errors import ModelFormatError
from .pairs import LabeledPair, statement_text

MODEL_FORMAT_VERSION = 1
DEFAULT_THRESHOLD = 0.5


class UnknownStatementWarning(UserWarning):
    """Scored statement is outside the model's known vocabulary."""


class UntrainedModelError(RuntimeError):
    """Scorer used before train() or a model file was loaded."""


@runtime_checkable
class Scorer(Protocol):
    """Behavioral contract shared by all scorers."""

    kind: str
    trained_assay_ids: frozenset[str] | None

    def train(self, pairs: Sequence[LabeledPair], corpus: Corpus) -> None: ...

    def score(self, assay: Bioassay, statement: SemanticStatement) -> float: ...

    def score_batch(
        self, assay: Bioassay, statements: Sequence[SemanticStatement]
    ) -> list[float]: ...


class ScorerBase:
    """Shared trained-state bookkeeping and the unknown-statement rule.

    A statement outside the model's vocabulary scores 0.0 and raises an
    :class:`UnknownStatementWarning`; it is never an exception.
    """

    kind: str = "base"

    def __init__(self) -> None:
        self.trained_assay_ids: frozenset[str] | None = None
        self._vocab_keys: frozenset[tuple[str, str]] | None = None

    @property
    def is_trained(self) -> bool:
        return self._vocab_keys is not None

    def _require_trained(self) -> None:
        if not self.is_trained:
            raise UntrainedModelError(f"{self.kind} scorer is not trained")

    def knows(self, statement: SemanticStatement) -> bool:
        self._require_trained()
        assert self._vocab_keys is not None
        return statement.key in self._vocab_keys

    def known_statements(self) -> tuple[SemanticStatement, ...]:
        """The trained statement vocabulary, in canonical text order."""
        self._require_trained()
        assert self._vocab_keys is not None
        return tuple(
            SemanticStatement(predicate, obj)
            for predicate, obj in sorted(self._vocab_keys)
        )

    def score(self, assay: Bioassay, statement: SemanticStatement) -> float:
        self._require_trained()
        if not self.knows(statement):
            warnings.warn(
                f"statement not in model vocabulary: {statement.text!r}",
                UnknownStatementWarning,
                stacklevel=2,
            )
            return 0.0
        return self._score_known(assay, statement)

    def score_batch(
        self, assay: Bioassay, statements: Sequence[SemanticStatement]
    ) -> list[float]:
        return [self.score(assay, statement) for statement in statements]

    def _score_known(self, assay: Bioassay, statement: SemanticStatement) -> float:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Frequency baseline


class FrequencyScorer(ScorerBase):
    """Assay-independent baseline: score = training frequency / max.

    The decision rule classifies a pair true iff the statement's rank is
    within the fitted cutoff K. Ranks sort by descending frequency with
    ties broken by ascending canonical text. K maximizes pair-level F1 on
    the training pairs when those are supplied; otherwise it falls back
    to the rounded mean annotation length of the training corpus.
    """

    kind = "frequency"

    def __init__(self) -> None:
        super().__init__()
        self._freq: dict[tuple[str, str], int] = {}
        self._max_freq = 0
        self._rank: dict[tuple[str, str], int] = {}
        self.decision_rank: int | None = None

    def train(self, pairs: Sequence[LabeledPair] | None, corpus: Corpus) -> None:
        if len(corpus) == 0:
            raise ValueError("cannot train on an empty corpus")
        vocab = corpus.vocabulary
        self._freq = {
            vocab.statement(sid).key: vocab.frequency(sid) for sid in range(len(vocab))
        }
        self._max_freq = max(self._freq.values(), default=0)
        ranked = sorted(
            vocab,
            key=lambda s: (-self._freq[s.key], s.text),
        )
        self._rank = {s.key: r for r, s in enumerate(ranked, start=1)}
        self._vocab_keys = frozenset(self._freq)
        self.trained_assay_ids = frozenset(corpus.ids())
        if pairs:
            self.decision_rank = self._fit_decision_rank(pairs, corpus)
        else:
            mean_k = sum(len(ann) for _, ann in corpus) / len(corpus)
            self.decision_rank = max(1, round(mean_k))

    def _fit_decision_rank(self, pairs: Sequence[LabeledPair], corpus: Corpus) -> int:
        """Pick the K whose top-K rule maximizes micro-F1 over the pairs."""
        vocab = corpus.vocabulary
        by_rank_true = [0] * (len(self._rank) + 1)
        by_rank_false = [0] * (len(self._rank) + 1)
        total_true = 0
        for pair in pairs:
            rank = self._rank[vocab.statement(pair.statement_id).key]
            if pair.label:
                by_rank_true[rank] += 1
                total_true += 1
            else:
                by_rank_false[rank] += 1
        best_k, best_f1 = 1, -1.0
        tp = fp = 0
        for k in range(1, len(self._rank) + 1):
            tp += by_rank_true[k]
            fp += by_rank_false[k]
            fn = total_true - tp
            denom = 2 * tp + fp + fn
            f1 = (2 * tp / denom) if denom else 0.0
            if f1 > best_f1:
                best_k, best_f1 = k, f1
        return best_k

    def _score_known(self, assay: Bioassay, statement: SemanticStatement) -> float:
        if self._max_freq == 0:
            return 0.0
        return self._freq[statement.key] / self._max_freq

    def rank_of(self, statement: SemanticStatement) -> int:
        """1-based global rank; unknown statements rank last."""
        self._require_trained()
        return self._rank.get(statement.key, len(self._rank) + 1)

    def decide_candidates(
        self, assay: Bioassay, candidates: Sequence[SemanticStatement]
    ) -> set[SemanticStatement]:
        self._require_trained()
        assert self.decision_rank is not None
        return {s for s in candidates if self.rank_of(s) <= self.decision_rank}

    def to_payload(self) -> dict:
        return {
            "frequencies": [[p, o, f] for (p, o), f in sorted(self._freq.items())],
            "decision_rank": self.decision_rank,
            "trained_assay_ids": sorted(self.trained_assay_ids or ()),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "FrequencyScorer":
        scorer = cls()
        scorer._freq = {(p, o): int(f) for p, o, f in payload["frequencies"]}
        scorer._max_freq = max(scorer._freq.values(), default=0)
        ranked = sorted(
            scorer._freq, key=lambda key: (-scorer._freq[key], f"{key[0]} {key[1]}")
        )
        scorer._rank = {key: r for r, key in enumerate(ranked, start=1)}
        scorer._vocab_keys = frozenset(scorer._freq)
        scorer.decision_rank = payload["decision_rank"]
        scorer.trained_assay_ids = frozenset(payload["trained_assay_ids"])
        return scorer


def train_frequency(
    corpus: Corpus, pairs: Sequence[LabeledPair] | None = None
) -> FrequencyScorer:
    scorer = FrequencyScorer()
    scorer.train(pairs, corpus)
    return scorer


# ---------------------------------------------------------------------------
# Lexical scorer


@dataclass(frozen=True)
class LexicalHyperparams:
    epochs: int = 200
    learning_rate: float = 0.5
    seed: int = 0


_TOKEN = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> frozenset[str]:
    return frozenset(_TOKEN.findall(text.lower()))


class LexicalScorer(ScorerBase):
    """Linear scorer over token-overlap features with a sigmoid squash.

    Features per pair: count of statement tokens present in the assay
    text, the same count normalized by statement length, and the
    statement's training-frequency prior. Trained by full-batch gradient
    descent from a zero initialization, so results are reproducible for a
    fixed hyperparameter record regardless of platform.
    """

    kind = "lexical"

    N_FEATURES = 3

    def __init__(self, hyperparams: LexicalHyperparams | None = None) -> None:
        super().__init__()
        self.hyperparams = hyperparams or LexicalHyperparams()
        self._weights = np.zeros(self.N_FEATURES + 1)
        self._freq: dict[tuple[str, str], int] = {}
        self._max_freq = 0

    def _features(self, assay_text: str, statement: SemanticStatement) -> np.ndarray:
        assay_tokens = _tokens(assay_text)
        stmt_tokens = _tokens(statement.text)
        overlap = len(stmt_tokens & assay_tokens)
        ratio = overlap / len(stmt_tokens) if stmt_tokens else 0.0
        prior = self._freq.get(statement.key, 0) / self._max_freq if self._max_freq else 0.0
        return np.array([1.0, float(overlap), ratio, prior])

    def train(self, pairs: Sequence[LabeledPair], corpus: Corpus) -> None:
        if not pairs:
            raise ValueError("lexical scorer needs training pairs")
        vocab = corpus.vocabulary
        self._freq = {
            vocab.statement(sid).key: vocab.frequency(sid) for sid in range(len(vocab))
        }
        self._max_freq = max(self._freq.values(), default=0)
        x = np.stack(
            [
                self._features(
                    corpus.assay(p.assay_id).description, vocab.statement(p.statement_id)
                )
                for p in pairs
            ]
        )
        y = np.array([1.0 if p.label else 0.0 for p in pairs])
        w = np.zeros(x.shape[1])
        lr = self.hyperparams.learning_rate
        for _ in range(self.hyperparams.epochs):
            p = 1.0 / (1.0 + np.exp(-(x @ w)))
            w -= lr * (x.T @ (p - y)) / len(y)
        self._weights = w
        self._vocab_keys = frozenset(self._freq)
        self.trained_assay_ids = frozenset(corpus.ids())

    def _score_known(self, assay: Bioassay, statement: SemanticStatement) -> float:
        z = float(self._features(assay.description, statement) @ self._weights)
        return 1.0 / (1.0 + math.exp(-z))

    def to_payload(self) -> dict:
        return {
            "weights": [float(w) for w in self._weights],
            "frequencies": [[p, o, f] for (p, o), f in sorted(self._freq.items())],
            "hyperparams": {
                "epochs": self.hyperparams.epochs,
                "learning_rate": self.hyperparams.learning_rate,
                "seed": self.hyperparams.seed,
            },
            "trained_assay_ids": sorted(self.trained_assay_ids or ()),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "LexicalScorer":
        hp = payload["hyperparams"]
        scorer = cls(
            LexicalHyperparams(
                epochs=int(hp["epochs"]),
                learning_rate=float(hp["learning_rate"]),
                seed=int(hp["seed"]),
            )
        )
        scorer._weights = np.array([float(w) for w in payload["weights"]])
        scorer._freq = {(p, o): int(f) for p, o, f in payload["frequencies"]}
        scorer._max_freq = max(scorer._freq.values(), default=0)
        scorer._vocab_keys = frozenset(scorer._freq)
        scorer.trained_assay_ids = frozenset(payload["trained_assay_ids"])
        return scorer


# ---------------------------------------------------------------------------
# Decisions and ranking on top of any scorer


def predict(
    model: Scorer,
    assay: Bioassay,
    candidates: Sequence[SemanticStatement],
    threshold: float | None = None,
) -> set[SemanticStatement]:
    """Candidates the model classifies as true for this assay.

    With an explicit threshold the decision is score >= threshold (ties
    at the threshold included). With ``threshold=None`` a model that
    carries its own decision rule (the frequency baseline's rank cutoff)
    applies it; other models fall back to the default 0.5.
    """
    if threshold is None:
        decide = getattr(model, "decide_candidates", None)
        if decide is not None:
            return decide(assay, candidates)
        threshold = DEFAULT_THRESHOLD
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    scores = model.score_batch(assay, candidates)
    return {s for s, value in zip(candidates, scores) if value >= threshold}


def rank_statements(
    model: Scorer, assay: Bioassay, candidates: Sequence[SemanticStatement]
) -> list[tuple[SemanticStatement, float]]:
    """Candidates in descending score order; ties by ascending text."""
    scores = model.score_batch(assay, candidates)
    return sorted(zip(candidates, scores), key=lambda pair: (-pair[1], pair[0].text))


# ---------------------------------------------------------------------------
# Persistence

_LOADERS: dict[str, Callable[[dict], Scorer]] = {
    FrequencyScorer.kind: FrequencyScorer.from_payload,
    LexicalScorer.kind: LexicalScorer.from_payload,
}


def register_model_kind(kind: str, loader: Callable[[dict], Scorer]) -> None:
    _LOADERS[kind] = loader


def save_model(model: Scorer, path: str | Path) -> None:
    payload = model.to_payload()  # type: ignore[attr-defined]
    envelope = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "model": payload,
    }
    Path(path).write_text(
        json.dumps(envelope, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_model(path: str | Path) -> Scorer:
    try:
        envelope = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"{path}: cannot read model file: {exc}") from exc
    version = envelope.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported model format version {version!r}")
    kind = envelope.get("kind")
    loader = _LOADERS.get(kind)
    if loader is None:
        raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    return loader(envelope["model"])
