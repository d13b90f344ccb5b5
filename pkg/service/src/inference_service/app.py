"""HTTP surface: the three wire-protocol endpoints.

    GET  /healthz   -> {"status": "ok", "version": "<major.minor.patch>"}
    POST /v1/train  -> {"model_id": "..."}
    POST /v1/score  -> {"scores": [...]}

One training job runs at a time (a plain lock serializes them); scoring
requests run concurrently against immutable loaded models. Error
mapping: unusable training input and empty pair lists are 400, an
unknown model id is 404, malformed bodies are 422 (framework), and an
out-of-memory abort is 500 with batch-size advice in the detail.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ._version import __version__
from .model import ModelConfig, scores_for
from .store import ModelStore, UnknownModelError, model_id_for
from .training import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_SEQUENCE_LENGTH,
    ResourceExhaustedError,
    TrainingInputError,
    TrainingRequest,
    fine_tune,
)


class LabeledPairBody(BaseModel):
    assay_text: str
    statement_text: str
    label: bool


class HyperparamsBody(BaseModel):
    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0
    max_sequence_length: int = DEFAULT_MAX_SEQUENCE_LENGTH


class TrainBody(BaseModel):
    pairs: list[LabeledPairBody]
    hyperparams: HyperparamsBody = Field(default_factory=HyperparamsBody)


class ScorePairBody(BaseModel):
    assay_text: str
    statement_text: str


class ScoreBody(BaseModel):
    model_id: str
    pairs: list[ScorePairBody]


def create_app(
    model_dir: str | Path,
    *,
    model_config: ModelConfig | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> FastAPI:
    """Build the service over a model directory.

    ``model_config`` fixes the architecture for every model this
    instance trains; ``batch_size`` is the training batch size (a
    server-side setting — the wire protocol deliberately does not
    expose it).
    """
    app = FastAPI(title="pair scoring service", version=__version__)
    store = ModelStore(model_dir)
    config = model_config or ModelConfig()
    training_lock = threading.Lock()

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/train")
    def train(body: TrainBody) -> dict:
        try:
            request = TrainingRequest(
                pairs=tuple(
                    (pair.assay_text, pair.statement_text, pair.label)
                    for pair in body.pairs
                ),
                epochs=body.hyperparams.epochs,
                learning_rate=body.hyperparams.learning_rate,
                seed=body.hyperparams.seed,
                max_sequence_length=body.hyperparams.max_sequence_length,
                batch_size=batch_size,
            )
        except TrainingInputError as err:
            raise HTTPException(status_code=400, detail=str(err))
        with training_lock:
            try:
                trained = fine_tune(request, config)
            except ResourceExhaustedError as err:
                raise HTTPException(status_code=500, detail=str(err))
        model_id = model_id_for(request)
        store.save(model_id, trained)
        return {"model_id": model_id}

    @app.post("/v1/score")
    def score(body: ScoreBody) -> dict:
        try:
            trained = store.load(body.model_id)
        except UnknownModelError as err:
            raise HTTPException(status_code=404, detail=str(err.args[0]))
        max_length = min(
            trained.training_record["hyperparams"]["max_sequence_length"],
            trained.config.max_positions,
        )
        encoded = [
            trained.tokenizer.encode_pair(pair.assay_text, pair.statement_text, max_length)
            for pair in body.pairs
        ]
        return {"scores": scores_for(trained.model, encoded)}

    return app
