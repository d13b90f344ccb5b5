"""Word-level tokenizer for sentence-pair classification.

The encoder consumes both texts as one sequence: the classification
token first, then the assay text, a separator, the statement text, and
a closing separator. Segment ids distinguish the two sides so the model
can tell which words belong to the assay and which to the statement:

    [CLS] assay tokens ... [SEP] statement tokens ... [SEP]
    0     0 0 0 ...        0     1 1 1 ...            1

When the pair exceeds ``max_length``, assay tokens are dropped from the
end (the head of the description is kept) and the statement text is
preserved in full — statements are short and carry the label signal,
so truncating them would destroy exactly what the classifier needs.
Only when the statement alone cannot fit is its own tail dropped.

The vocabulary is built from the training pairs and frozen with the
model; words never seen in training map to the unknown token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

PAD, UNK, CLS, SEP = 0, 1, 2, 3
SPECIAL_TOKENS = ("[PAD]", "[UNK]", "[CLS]", "[SEP]")

_WORD = re.compile(r"[a-z0-9]+")


def words(text: str) -> list[str]:
    """Lowercased alphanumeric word sequence; everything else separates."""
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class EncodedPair:
    """One encoded pair: token ids plus the matching segment ids.

    ``segments`` is 0 over the classification token and the assay side,
    1 over the statement side; both tuples always have equal length.
    """

    token_ids: tuple[int, ...]
    segments: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.token_ids) != len(self.segments):
            raise ValueError("token and segment sequences must align")


class WordTokenizer:
    """Maps words to ids over a vocabulary fixed at training time."""

    def __init__(self, vocabulary: Sequence[str]) -> None:
        if tuple(vocabulary[: len(SPECIAL_TOKENS)]) != SPECIAL_TOKENS:
            raise ValueError("vocabulary must start with the special tokens")
        self.vocabulary = tuple(vocabulary)
        self._ids = {word: i for i, word in enumerate(self.vocabulary)}
        if len(self._ids) != len(self.vocabulary):
            raise ValueError("vocabulary contains duplicate words")

    @classmethod
    def fit(cls, texts: Iterable[str]) -> "WordTokenizer":
        """Build a vocabulary from all words occurring in ``texts``."""
        seen: dict[str, None] = {}
        for text in texts:
            for word in words(text):
                seen.setdefault(word)
        return cls(SPECIAL_TOKENS + tuple(sorted(seen)))

    def __len__(self) -> int:
        return len(self.vocabulary)

    def word_id(self, word: str) -> int:
        return self._ids.get(word, UNK)

    def encode_pair(
        self, assay_text: str, statement_text: str, max_length: int
    ) -> EncodedPair:
        """Encode one (assay, statement) pair into at most ``max_length`` ids."""
        if max_length < 4:
            raise ValueError("max_length must be at least 4 ([CLS] w [SEP] [SEP])")
        statement = [self.word_id(w) for w in words(statement_text)]
        # Three specials frame the pair; the statement claims its share
        # first and the assay head fills whatever room remains.
        budget = max_length - 3
        statement = statement[:budget]
        assay = [self.word_id(w) for w in words(assay_text)]
        assay = assay[: budget - len(statement)]
        token_ids = [CLS, *assay, SEP, *statement, SEP]
        segments = [0] * (len(assay) + 2) + [1] * (len(statement) + 1)
        return EncodedPair(tuple(token_ids), tuple(segments))

    def to_payload(self) -> dict:
        return {"vocabulary": list(self.vocabulary)}

    @classmethod
    def from_payload(cls, payload: dict) -> "WordTokenizer":
        return cls(tuple(payload["vocabulary"]))
