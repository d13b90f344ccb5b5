"""Pair classifier: a small transformer encoder with a scoring head.

The network reads the tokenized pair (see :mod:`.tokenizer`), runs a
standard transformer encoder over word + segment + position embeddings,
takes the hidden state at the classification token — the first position
— and projects it to a single logit. A sigmoid squashes the logit to a
[0, 1] score.

The encoder is freshly initialized per training request (this sandbox
has no pretrained-weight source); ``ModelConfig.checkpoint`` accepts an
optional state-dict path for deployments that do have one to warm-start
from.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import torch
from torch import nn

from .tokenizer import PAD, EncodedPair


@dataclass(frozen=True)
class ModelConfig:
    """Architecture knobs; the defaults trade accuracy for CPU speed."""

    embedding_dim: int = 64
    layers: int = 2
    heads: int = 4
    feedforward_dim: int = 128
    dropout: float = 0.1
    max_positions: int = 512
    checkpoint: str | None = None

    def __post_init__(self) -> None:
        if self.embedding_dim % self.heads:
            raise ValueError("embedding_dim must be divisible by heads")

    def to_payload(self) -> dict:
        return asdict(self)

    @classmethod
    def from_payload(cls, payload: dict) -> "ModelConfig":
        return cls(**payload)


class PairClassifier(nn.Module):
    def __init__(self, vocab_size: int, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        dim = config.embedding_dim
        self.word_embedding = nn.Embedding(vocab_size, dim, padding_idx=PAD)
        self.segment_embedding = nn.Embedding(2, dim)
        self.position_embedding = nn.Embedding(config.max_positions, dim)
        self.encoder = nn.TransformerEncoder(
            nn.TransformerEncoderLayer(
                d_model=dim,
                nhead=config.heads,
                dim_feedforward=config.feedforward_dim,
                dropout=config.dropout,
                batch_first=True,
            ),
            num_layers=config.layers,
            # The nested-tensor fast path batches rows into one packed
            # tensor, which reintroduces cross-row coupling; keep every
            # row's computation independent.
            enable_nested_tensor=False,
        )
        self.head = nn.Linear(dim, 1)
        if config.checkpoint:
            self.load_state_dict(torch.load(config.checkpoint, weights_only=True))

    def forward(
        self, token_ids: torch.Tensor, segments: torch.Tensor
    ) -> torch.Tensor:
        """Batch of padded id/segment matrices -> one logit per row."""
        positions = torch.arange(token_ids.shape[1], device=token_ids.device)
        hidden = (
            self.word_embedding(token_ids)
            + self.segment_embedding(segments)
            + self.position_embedding(positions)
        )
        padding_mask = token_ids == PAD
        encoded = self.encoder(hidden, src_key_padding_mask=padding_mask)
        return self.head(encoded[:, 0, :]).squeeze(-1)


def collate(batch: list[EncodedPair], max_positions: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Pad a batch of encoded pairs into aligned id and segment matrices."""
    width = min(max(len(pair.token_ids) for pair in batch), max_positions)
    token_ids = torch.full((len(batch), width), PAD, dtype=torch.long)
    segments = torch.zeros((len(batch), width), dtype=torch.long)
    for row, pair in enumerate(batch):
        ids = pair.token_ids[:width]
        token_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        segments[row, : len(ids)] = torch.tensor(pair.segments[: width], dtype=torch.long)
    return token_ids, segments


def scores_for(model: PairClassifier, batch: list[EncodedPair]) -> list[float]:
    """Sigmoid scores for a batch, in input order.

    Each pair runs through the encoder alone, so its score is a pure
    function of the pair and the weights — never of batch neighbors.
    Batched inference would pad rows to a shared width, and the padded
    width shifts float rounding: the same pair could then score
    differently depending on chunking, which the wire contract forbids.
    """
    model.eval()
    scores = []
    with torch.no_grad():
        for pair in batch:
            token_ids, segments = collate([pair], model.config.max_positions)
            scores.append(torch.sigmoid(model(token_ids, segments)).item())
    return scores
