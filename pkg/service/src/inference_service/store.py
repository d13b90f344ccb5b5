"""Model store: persisted trained models addressable by model id.

Each model lives in its own directory under the store root:

    <root>/<model_id>/
        weights.pt       # state dict
        tokenizer.json   # frozen vocabulary
        record.json      # model config + training config echo + losses

The id is a digest of the exact training request (pairs and
hyperparameters), so retraining the same request lands on the same id
with an equivalent artifact rather than accumulating duplicates.
Loaded models are cached in memory; they are immutable after training,
so concurrent scoring needs no locking.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

import torch

from .model import ModelConfig, PairClassifier
from .tokenizer import WordTokenizer
from .training import TrainedModel, TrainingRequest


class UnknownModelError(KeyError):
    """No stored model under the requested id."""


def model_id_for(request: TrainingRequest) -> str:
    """Deterministic id: digest of the pairs and hyperparameters."""
    payload = {
        "pairs": [list(pair) for pair in request.pairs],
        "hyperparams": request.hyperparams_echo(),
    }
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, ensure_ascii=True).encode("ascii")
    ).hexdigest()
    return f"pc-{digest[:16]}"


class ModelStore:
    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, TrainedModel] = {}
        self._lock = threading.Lock()

    def save(self, model_id: str, trained: TrainedModel) -> None:
        target = self.root / model_id
        target.mkdir(parents=True, exist_ok=True)
        torch.save(trained.model.state_dict(), target / "weights.pt")
        (target / "tokenizer.json").write_text(
            json.dumps(trained.tokenizer.to_payload()), encoding="utf-8"
        )
        (target / "record.json").write_text(
            json.dumps(trained.training_record, indent=2), encoding="utf-8"
        )
        with self._lock:
            self._cache[model_id] = trained

    def load(self, model_id: str) -> TrainedModel:
        with self._lock:
            cached = self._cache.get(model_id)
        if cached is not None:
            return cached
        target = self.root / model_id
        if not (target / "record.json").is_file():
            raise UnknownModelError(f"unknown model id: {model_id}")
        record = json.loads((target / "record.json").read_text(encoding="utf-8"))
        tokenizer = WordTokenizer.from_payload(
            json.loads((target / "tokenizer.json").read_text(encoding="utf-8"))
        )
        # The trained weights on disk supersede any warm-start checkpoint
        # the original config pointed at, which may no longer exist.
        config = ModelConfig.from_payload({**record["model_config"], "checkpoint": None})
        model = PairClassifier(len(tokenizer), config)
        model.load_state_dict(
            torch.load(target / "weights.pt", weights_only=True)
        )
        model.eval()
        trained = TrainedModel(model, tokenizer, config, record)
        with self._lock:
            self._cache.setdefault(model_id, trained)
        return trained

    def ids(self) -> list[str]:
        return sorted(
            path.name for path in self.root.iterdir()
            if (path / "record.json").is_file()
        )
