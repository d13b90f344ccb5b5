"""Binary pair construction: positives plus seeded negative samples.

Multi-label semantification is recast as binary classification over
(assay, statement) pairs: every annotated statement yields a true pair,
and each assay is paired with a fixed number of statements drawn
uniformly without replacement from the rest of the vocabulary as false
pairs. All draws are pure functions of (corpus, config).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, SemanticStatement
from .seeds import derive_seed


@dataclass(frozen=True)
class LabeledPair:
    assay_id: str
    statement_id: int
    label: bool


@dataclass(frozen=True)
class SamplingConfig:
    """Negative-sampling knobs.

    ``false_per_assay`` is clamped per assay to the size of the assay's
    complement, so small vocabularies never error. When
    ``redraw_per_epoch`` is set, passing an epoch number to the sampling
    functions yields an independent draw per epoch; by default negatives
    are drawn once per run.
    """

    false_per_assay: int
    seed: int = 0
    redraw_per_epoch: bool = False

    def __post_init__(self) -> None:
        if self.false_per_assay < 0:
            raise ValueError("false_per_assay must be >= 0")


def statement_text(statement: SemanticStatement, separator: str = " ") -> str:
    """Render a statement as the second sentence of a text pair.

    Default joins predicate and object with a single space; pass e.g.
    ``" -> "`` for an arrow variant.
    """
    return f"{statement.predicate}{separator}{statement.object}"


def positive_pairs(corpus: Corpus) -> list[LabeledPair]:
    """One true pair per annotated (assay, statement)."""
    return [
        LabeledPair(assay.id, sid, True)
        for assay, annotation in corpus
        for sid in annotation
    ]


def negatives_for_assay(
    corpus: Corpus, assay_id: str, config: SamplingConfig, epoch: int | None = None
) -> list[LabeledPair]:
    """Sample false pairs for one assay.

    Draws min(false_per_assay, |S| - k) statement ids uniformly without
    replacement from the vocabulary minus the assay's annotation set.
    The draw depends only on (assay_id, config.seed) and, when redraw is
    enabled, the epoch, so it is stable under corpus reordering.
    """
    gold = corpus.gold_ids(assay_id)
    complement = [sid for sid in range(len(corpus.vocabulary)) if sid not in gold]
    n = min(config.false_per_assay, len(complement))
    labels: tuple[object, ...] = ("negatives", assay_id)
    if config.redraw_per_epoch and epoch is not None:
        labels += ("epoch", epoch)
    rng = random.Random(derive_seed(config.seed, *labels))
    return [LabeledPair(assay_id, sid, False) for sid in rng.sample(complement, n)]


def sample_negatives(
    corpus: Corpus, config: SamplingConfig, epoch: int | None = None
) -> list[LabeledPair]:
    """Sample false pairs for every assay in the corpus."""
    out: list[LabeledPair] = []
    for assay, _ in corpus:
        out.extend(negatives_for_assay(corpus, assay.id, config, epoch))
    return out


def build_training_set(
    corpus: Corpus, config: SamplingConfig, epoch: int | None = None
) -> list[LabeledPair]:
    """Positives plus sampled negatives, shuffled deterministically."""
    pairs = positive_pairs(corpus) + sample_negatives(corpus, config, epoch)
    labels: tuple[object, ...] = ("shuffle",)
    if config.redraw_per_epoch and epoch is not None:
        labels += ("epoch", epoch)
    random.Random(derive_seed(config.seed, *labels)).shuffle(pairs)
    return pairs


def write_pairs(pairs: Sequence[LabeledPair], path: str | Path) -> None:
    """Export pairs as one JSON record per line (see docs/data-formats.md)."""
    lines = [
        json.dumps(
            {"assay_id": p.assay_id, "statement_id": p.statement_id, "label": p.label},
            sort_keys=True,
        )
        for p in pairs
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_pairs(path: str | Path) -> list[LabeledPair]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        out.append(
            LabeledPair(
                str(record["assay_id"]), int(record["statement_id"]), bool(record["label"])
            )
        )
    return out
