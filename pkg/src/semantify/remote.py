"""Client for the remote neural scoring service.

The core package never embeds an ML runtime; instead this client speaks
a small JSON-over-HTTP protocol to an inference service that fine-tunes
a sentence-pair classifier and serves scores:

    GET  /healthz    -> {"status": ..., "version": ...}
    POST /v1/train   -> {"model_id": ...}
    POST /v1/score   -> {"scores": [...]}

Malformed responses (wrong score count, out-of-range values) raise
ProtocolError rather than being repaired client-side — clamping would
mask service bugs during acceptance runs. Retries apply only to
idempotent operations (health, score); a train request is sent exactly
once.
"""

from __future__ import annotations

import json
import threading
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import requests

from .corpus import Bioassay, Corpus, SemanticStatement
from .errors import ProtocolError, RemoteServiceError
from .pairs import LabeledPair
from .scoring import ScorerBase, UnknownStatementWarning, register_model_kind

PROTOCOL_MAJOR_VERSION = 1
DEFAULT_CHUNK_SIZE = 64


@dataclass(frozen=True)
class TrainingHyperparams:
    """Hyperparameters echoed to the service verbatim.

    Defaults follow common transformer fine-tuning practice; the
    service may apply its own where a field is omitted.
    """

    epochs: int = 2
    learning_rate: float = 2e-5
    seed: int = 0
    max_sequence_length: int = 512

    def to_wire(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "seed": self.seed,
            "max_sequence_length": self.max_sequence_length,
        }


@dataclass(frozen=True)
class RetryPolicy:
    retries: int = 2
    backoff: float = 0.2

    def __post_init__(self) -> None:
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.backoff < 0:
            raise ValueError("backoff must be >= 0")


@dataclass(frozen=True)
class ServiceEndpoint:
    """Where the inference service lives and how hard to lean on it.

    The timeout default is generous because training is synchronous
    from the client's point of view. ``max_in_flight`` bounds concurrent
    requests through a shared gate, so one endpoint object can be handed
    to many workers.
    """

    base_url: str
    timeout: float = 600.0
    max_in_flight: int = 4
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    _gate: threading.BoundedSemaphore = field(
        init=False, repr=False, compare=False, default=None  # type: ignore[assignment]
    )

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        object.__setattr__(self, "base_url", self.base_url.rstrip("/"))
        object.__setattr__(self, "_gate", threading.BoundedSemaphore(self.max_in_flight))

    @contextmanager
    def slot(self) -> Iterator[None]:
        self._gate.acquire()
        try:
            yield
        finally:
            self._gate.release()

    def url(self, path: str) -> str:
        return f"{self.base_url}/{path.lstrip('/')}"


@dataclass(frozen=True)
class RemoteModelHandle:
    """Service-issued model id plus an echo of what trained it."""

    model_id: str
    hyperparams: TrainingHyperparams
    false_per_assay: int | None = None

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model handle requires a non-empty model id")


@dataclass(frozen=True)
class HealthStatus:
    reachable: bool
    version: str | None = None
    warning: str | None = None


def _raise_for_response(response: requests.Response) -> dict:
    if response.status_code >= 400:
        detail = response.text.strip()
        exc = RemoteServiceError(
            f"service returned {response.status_code}: {detail[:500]}"
        )
        exc.retryable = response.status_code >= 500  # type: ignore[attr-defined]
        raise exc
    try:
        body = response.json()
    except (ValueError, json.JSONDecodeError) as err:
        raise ProtocolError(f"service response is not valid JSON: {err}") from err
    if not isinstance(body, dict):
        raise ProtocolError(f"expected a JSON object, got {type(body).__name__}")
    return body


def _request(
    endpoint: ServiceEndpoint,
    method: str,
    path: str,
    body: dict | None = None,
) -> dict:
    url = endpoint.url(path)
    try:
        with endpoint.slot():
            response = requests.request(
                method, url, json=body, timeout=endpoint.timeout
            )
    except requests.RequestException as err:
        exc = RemoteServiceError(f"cannot reach service at {url}: {err}")
        exc.retryable = True  # type: ignore[attr-defined]
        raise exc from err
    return _raise_for_response(response)


def _request_with_retries(
    endpoint: ServiceEndpoint, method: str, path: str, body: dict | None = None
) -> dict:
    policy = endpoint.retry
    for attempt in range(policy.retries + 1):
        try:
            return _request(endpoint, method, path, body)
        except RemoteServiceError as exc:
            if isinstance(exc, ProtocolError) or not getattr(exc, "retryable", False):
                raise
            if attempt == policy.retries:
                raise
            time.sleep(policy.backoff * (2**attempt))
    raise AssertionError("unreachable")


def health_check(endpoint: ServiceEndpoint) -> HealthStatus:
    """Probe the service; unreachable is a status, never an exception."""
    try:
        body = _request_with_retries(endpoint, "GET", "/healthz")
    except RemoteServiceError as exc:
        return HealthStatus(reachable=False, warning=str(exc))
    version = body.get("version")
    warning = None
    if not isinstance(version, str) or not version:
        version, warning = None, "service did not report a version"
    else:
        major = version.split(".", 1)[0]
        if not major.isdigit() or int(major) != PROTOCOL_MAJOR_VERSION:
            warning = (
                f"service version {version} outside supported protocol"
                f" major {PROTOCOL_MAJOR_VERSION}"
            )
    return HealthStatus(reachable=True, version=version, warning=warning)


PairTextResolver = Callable[[LabeledPair], tuple[str, str]]


def corpus_text_resolver(corpus: Corpus) -> PairTextResolver:
    """Resolve pair ids against a corpus: (assay description, statement text)."""

    def resolve(pair: LabeledPair) -> tuple[str, str]:
        return (
            corpus.assay(pair.assay_id).description,
            corpus.vocabulary.statement(pair.statement_id).text,
        )

    return resolve


def remote_train(
    endpoint: ServiceEndpoint,
    pairs: Sequence[LabeledPair],
    texts: PairTextResolver,
    hyperparams: TrainingHyperparams | None = None,
    *,
    false_per_assay: int | None = None,
) -> RemoteModelHandle:
    """Train a pair classifier on the service; returns its handle.

    Training is not idempotent, so this never retries: a failure
    surfaces immediately with the service's message.
    """
    if not pairs:
        raise ValueError("remote training requires at least one pair")
    hyperparams = hyperparams or TrainingHyperparams()
    wire_pairs = []
    for pair in pairs:
        assay_text, statement_text = texts(pair)
        wire_pairs.append(
            {
                "assay_text": assay_text,
                "statement_text": statement_text,
                "label": bool(pair.label),
            }
        )
    body = {"pairs": wire_pairs, "hyperparams": hyperparams.to_wire()}
    response = _request(endpoint, "POST", "/v1/train", body)
    model_id = response.get("model_id")
    if not isinstance(model_id, str) or not model_id:
        raise ProtocolError(f"train response lacks a model_id: {response!r}")
    return RemoteModelHandle(model_id, hyperparams, false_per_assay)


def remote_score(
    endpoint: ServiceEndpoint,
    handle: RemoteModelHandle,
    batch: Sequence[tuple[str, str]],
    *,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> list[float]:
    """Score (assay_text, statement_text) pairs; order-preserving.

    Requests are chunked to bound memory on both sides. A response whose
    score vector length differs from the request, or that contains a
    non-finite or out-of-range value, is a protocol error — never
    silently truncated or clamped.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    if not batch:
        return []
    scores: list[float] = []
    for start in range(0, len(batch), chunk_size):
        chunk = batch[start : start + chunk_size]
        body = {
            "model_id": handle.model_id,
            "pairs": [
                {"assay_text": assay_text, "statement_text": statement_text}
                for assay_text, statement_text in chunk
            ],
        }
        response = _request_with_retries(endpoint, "POST", "/v1/score", body)
        values = response.get("scores")
        if not isinstance(values, list):
            raise ProtocolError(f"score response lacks a scores list: {response!r}")
        if len(values) != len(chunk):
            raise ProtocolError(
                f"score count mismatch: sent {len(chunk)} pairs, got {len(values)} scores"
            )
        for value in values:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ProtocolError(f"non-numeric score in response: {value!r}")
            value = float(value)
            if value != value or not 0.0 <= value <= 1.0:
                raise ProtocolError(f"score out of range [0, 1]: {value!r}")
            scores.append(value)
    return scores


class RemoteScorer(ScorerBase):
    """Scorer-contract adapter over the wire protocol.

    Knows the statement vocabulary it was trained with, so the unknown-
    statement rule (score 0.0 plus a warning) is applied client-side
    without a round-trip.
    """

    kind = "remote"

    def __init__(
        self,
        endpoint: ServiceEndpoint,
        hyperparams: TrainingHyperparams | None = None,
        *,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
    ) -> None:
        super().__init__()
        self.endpoint = endpoint
        self.hyperparams = hyperparams or TrainingHyperparams()
        self.chunk_size = chunk_size
        self.handle: RemoteModelHandle | None = None

    def train(self, pairs: Sequence[LabeledPair], corpus: Corpus) -> None:
        false_count = sum(1 for p in pairs if not p.label)
        n_assays = len(corpus) or 1
        self.handle = remote_train(
            self.endpoint,
            pairs,
            corpus_text_resolver(corpus),
            self.hyperparams,
            false_per_assay=round(false_count / n_assays),
        )
        vocab = corpus.vocabulary
        self._vocab_keys = frozenset(
            vocab.statement(sid).key for sid in range(len(vocab))
        )
        self.trained_assay_ids = frozenset(corpus.ids())

    def _require_handle(self) -> RemoteModelHandle:
        self._require_trained()
        assert self.handle is not None
        return self.handle

    def _score_known(self, assay: Bioassay, statement: SemanticStatement) -> float:
        return remote_score(
            self.endpoint,
            self._require_handle(),
            [(assay.description, statement.text)],
            chunk_size=self.chunk_size,
        )[0]

    def score_batch(
        self, assay: Bioassay, statements: Sequence[SemanticStatement]
    ) -> list[float]:
        handle = self._require_handle()
        scores = [0.0] * len(statements)
        known_positions: list[int] = []
        known_texts: list[tuple[str, str]] = []
        for i, statement in enumerate(statements):
            if self.knows(statement):
                known_positions.append(i)
                known_texts.append((assay.description, statement.text))
            else:
                warnings.warn(
                    f"statement not in model vocabulary: {statement.text!r}",
                    UnknownStatementWarning,
                    stacklevel=2,
                )
        for position, value in zip(
            known_positions,
            remote_score(self.endpoint, handle, known_texts, chunk_size=self.chunk_size),
        ):
            scores[position] = value
        return scores

    def to_payload(self) -> dict:
        handle = self._require_handle()
        return {
            "model_id": handle.model_id,
            "false_per_assay": handle.false_per_assay,
            "hyperparams": handle.hyperparams.to_wire(),
            "endpoint": {
                "base_url": self.endpoint.base_url,
                "timeout": self.endpoint.timeout,
                "max_in_flight": self.endpoint.max_in_flight,
                "retries": self.endpoint.retry.retries,
                "backoff": self.endpoint.retry.backoff,
            },
            "chunk_size": self.chunk_size,
            "vocabulary": [[p, o] for p, o in sorted(self._vocab_keys or ())],
            "trained_assay_ids": sorted(self.trained_assay_ids or ()),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RemoteScorer":
        ep = payload["endpoint"]
        endpoint = ServiceEndpoint(
            base_url=ep["base_url"],
            timeout=float(ep["timeout"]),
            max_in_flight=int(ep["max_in_flight"]),
            retry=RetryPolicy(retries=int(ep["retries"]), backoff=float(ep["backoff"])),
        )
        hp = payload["hyperparams"]
        hyperparams = TrainingHyperparams(
            epochs=int(hp["epochs"]),
            learning_rate=float(hp["learning_rate"]),
            seed=int(hp["seed"]),
            max_sequence_length=int(hp["max_sequence_length"]),
        )
        scorer = cls(endpoint, hyperparams, chunk_size=int(payload.get("chunk_size", DEFAULT_CHUNK_SIZE)))
        scorer.handle = RemoteModelHandle(
            payload["model_id"], hyperparams, payload.get("false_per_assay")
        )
        scorer._vocab_keys = frozenset((p, o) for p, o in payload["vocabulary"])
        scorer.trained_assay_ids = frozenset(payload["trained_assay_ids"])
        return scorer

    def with_endpoint(self, endpoint: ServiceEndpoint) -> "RemoteScorer":
        """Copy of this scorer pointed at a different service address."""
        clone = RemoteScorer(endpoint, self.hyperparams, chunk_size=self.chunk_size)
        clone.handle = self.handle
        clone._vocab_keys = self._vocab_keys
        clone.trained_assay_ids = self.trained_assay_ids
        return clone


register_model_kind(RemoteScorer.kind, RemoteScorer.from_payload)
