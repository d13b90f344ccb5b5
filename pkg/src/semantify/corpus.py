"""Corpus model: annotated bioassays, their statement vocabulary, folds.

A corpus couples a list of bioassays (id + free-text description) with
per-assay annotation sequences of semantic statements and a vocabulary
indexing every distinct statement. All types are immutable; operations
that change a corpus return a new one.

File dialects are documented in docs/data-formats.md.
"""

from __future__ import annotations

import json
import logging
import random
import re
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import CorpusFormatError, CorpusValidationError
from .seeds import derive_seed

logger = logging.getLogger(__name__)

_WS = re.compile(r"\s+")


def canonicalize(value: str) -> str:
    """Trim and collapse internal whitespace; case is preserved."""
    return _WS.sub(" ", value.strip())


@dataclass(frozen=True, order=True)
class SemanticStatement:
    """A predicate/object pair. The implicit subject is always "bioassay".

    Both fields are canonicalized on construction; the canonical pair is
    the statement's identity.
    """

    predicate: str
    object: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicate", canonicalize(self.predicate))
        object.__setattr__(self, "object", canonicalize(self.object))
        if not self.predicate:
            raise CorpusValidationError("statement predicate is empty")
        if not self.object:
            raise CorpusValidationError("statement object is empty")

    @property
    def key(self) -> tuple[str, str]:
        return (self.predicate, self.object)

    @property
    def text(self) -> str:
        """Canonical rendering used for tie-breaking and as pair text."""
        return f"{self.predicate} {self.object}"


@dataclass(frozen=True)
class Bioassay:
    """An identified unstructured assay description."""

    id: str
    description: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "id", self.id.strip())
        object.__setattr__(self, "description", self.description.strip())
        if not self.id:
            raise CorpusValidationError("assay id is empty")
        if not self.description:
            raise CorpusValidationError(f"assay {self.id!r}: description is empty")


@dataclass(frozen=True)
class AnnotationSequence:
    """Ordered, duplicate-free statement ids annotated on one assay."""

    statement_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.statement_ids) == 0:
            raise CorpusValidationError("annotation sequence is empty")
        if len(set(self.statement_ids)) != len(self.statement_ids):
            raise CorpusValidationError("annotation sequence contains duplicates")

    def __len__(self) -> int:
        return len(self.statement_ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.statement_ids)

    @property
    def id_set(self) -> frozenset[int]:
        return frozenset(self.statement_ids)


@dataclass(frozen=True)
class StatementVocabulary:
    """Indexed set of distinct statements with per-statement assay counts.

    Indices are dense and stable for a loaded corpus. Frequencies count
    assays containing the statement, not total occurrences.
    """

    statements: tuple[SemanticStatement, ...]
    frequencies: tuple[int, ...]
    _index: dict[tuple[str, str], int] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if len(self.statements) != len(self.frequencies):
            raise CorpusValidationError("vocabulary statements/frequencies mismatch")
        index = {s.key: i for i, s in enumerate(self.statements)}
        if len(index) != len(self.statements):
            raise CorpusValidationError("vocabulary contains duplicate statements")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.statements)

    def __contains__(self, statement: SemanticStatement) -> bool:
        return statement.key in self._index

    def __iter__(self) -> Iterator[SemanticStatement]:
        return iter(self.statements)

    def index_of(self, statement: SemanticStatement) -> int:
        try:
            return self._index[statement.key]
        except KeyError:
            raise KeyError(f"statement not in vocabulary: {statement.text!r}") from None

    def statement(self, statement_id: int) -> SemanticStatement:
        return self.statements[statement_id]

    def frequency(self, statement_id: int) -> int:
        return self.frequencies[statement_id]


class Fold(NamedTuple):
    train: "Corpus"
    test: "Corpus"


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of annotated assays plus their vocabulary."""

    assays: tuple[tuple[Bioassay, AnnotationSequence], ...]
    vocabulary: StatementVocabulary
    _by_id: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        by_id: dict[str, int] = {}
        for pos, (assay, annotation) in enumerate(self.assays):
            if assay.id in by_id:
                raise CorpusValidationError(f"duplicate assay id: {assay.id!r}")
            by_id[assay.id] = pos
            for sid in annotation:
                if not 0 <= sid < len(self.vocabulary):
                    raise CorpusValidationError(
                        f"assay {assay.id!r} references unknown statement id {sid}"
                    )
        object.__setattr__(self, "_by_id", by_id)

    @classmethod
    def build(
        cls, records: Iterable[tuple[Bioassay, Sequence[SemanticStatement]]]
    ) -> "Corpus":
        """Assemble a corpus, indexing statements in first-seen order.

        Duplicate statements within one assay are collapsed (a warning
        with the total collapse count is logged).
        """
        index: dict[tuple[str, str], int] = {}
        statements: list[SemanticStatement] = []
        assays: list[tuple[Bioassay, AnnotationSequence]] = []
        collapsed = 0
        for assay, stmts in records:
            if not stmts:
                raise CorpusValidationError(f"assay {assay.id!r} has zero statements")
            ids: list[int] = []
            seen: set[int] = set()
            for stmt in stmts:
                sid = index.get(stmt.key)
                if sid is None:
                    sid = len(statements)
                    index[stmt.key] = sid
                    statements.append(stmt)
                if sid in seen:
                    collapsed += 1
                    continue
                seen.add(sid)
                ids.append(sid)
            assays.append((assay, AnnotationSequence(tuple(ids))))
        if collapsed:
            logger.warning("collapsed %d duplicate statement(s) within assays", collapsed)
        frequencies = _recount(len(statements), assays)
        vocabulary = StatementVocabulary(tuple(statements), frequencies)
        return cls(tuple(assays), vocabulary)

    def __len__(self) -> int:
        return len(self.assays)

    def __iter__(self) -> Iterator[tuple[Bioassay, AnnotationSequence]]:
        return iter(self.assays)

    def ids(self) -> tuple[str, ...]:
        return tuple(assay.id for assay, _ in self.assays)

    def assay(self, assay_id: str) -> Bioassay:
        return self.assays[self._pos(assay_id)][0]

    def annotation(self, assay_id: str) -> AnnotationSequence:
        return self.assays[self._pos(assay_id)][1]

    def gold_ids(self, assay_id: str) -> frozenset[int]:
        return self.annotation(assay_id).id_set

    def gold_statements(self, assay_id: str) -> tuple[SemanticStatement, ...]:
        return tuple(
            self.vocabulary.statement(sid) for sid in self.annotation(assay_id)
        )

    def _pos(self, assay_id: str) -> int:
        try:
            return self._by_id[assay_id]
        except KeyError:
            raise KeyError(f"unknown assay id: {assay_id!r}") from None

    def subset(self, assay_ids: Iterable[str]) -> "Corpus":
        """View restricted to the given assays.

        The statement universe (and its indices) is preserved so views of
        one corpus stay comparable; frequencies are recounted over the
        retained assays only.
        """
        keep = set(assay_ids)
        assays = tuple(
            (assay, annotation) for assay, annotation in self.assays if assay.id in keep
        )
        missing = keep - {a.id for a, _ in assays}
        if missing:
            raise KeyError(f"unknown assay ids: {sorted(missing)}")
        frequencies = _recount(len(self.vocabulary), assays)
        vocabulary = StatementVocabulary(self.vocabulary.statements, frequencies)
        return Corpus(assays, vocabulary)


def _recount(
    n_statements: int, assays: Sequence[tuple[Bioassay, AnnotationSequence]]
) -> tuple[int, ...]:
    counts = [0] * n_statements
    for _, annotation in assays:
        for sid in annotation.id_set:
            counts[sid] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# Loading and saving


def load_corpus(
    path: str | Path,
    format: str = "jsonl",
    *,
    annotations_path: str | Path | None = None,
) -> Corpus:
    """Load and validate a corpus file.

    ``format`` selects the dialect: ``jsonl`` (one record per line with
    id, description and statements) or ``two-file`` (descriptions file at
    ``path`` plus a separate annotations file keyed by assay id).
    """
    if format == "jsonl":
        return _load_jsonl(Path(path))
    if format == "two-file":
        if annotations_path is None:
            raise ValueError("two-file format requires annotations_path")
        return _load_two_file(Path(path), Path(annotations_path))
    raise ValueError(f"unknown corpus format: {format!r}")


def _iter_records(path: Path) -> Iterator[tuple[int, dict]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"{path}: {exc}") from exc
    any_record = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}: line {lineno}: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise CorpusFormatError(f"{path}: line {lineno}: record is not an object")
        any_record = True
        yield lineno, record
    if not any_record:
        raise CorpusFormatError(f"{path}: file contains no records")


def _require(record: dict, key: str, path: Path, lineno: int) -> object:
    if key not in record:
        raise CorpusFormatError(f"{path}: line {lineno}: missing field {key!r}")
    return record[key]


def _parse_statements(
    raw: object, path: Path, lineno: int
) -> list[SemanticStatement]:
    if not isinstance(raw, list):
        raise CorpusFormatError(f"{path}: line {lineno}: 'statements' is not a list")
    out: list[SemanticStatement] = []
    for item in raw:
        if not isinstance(item, dict) or "predicate" not in item or "object" not in item:
            raise CorpusFormatError(
                f"{path}: line {lineno}: statement needs 'predicate' and 'object'"
            )
        try:
            out.append(SemanticStatement(str(item["predicate"]), str(item["object"])))
        except CorpusValidationError as exc:
            raise CorpusValidationError(f"{path}: line {lineno}: {exc}") from exc
    return out


def _load_jsonl(path: Path) -> Corpus:
    records: list[tuple[Bioassay, list[SemanticStatement]]] = []
    for lineno, record in _iter_records(path):
        raw_id = _require(record, "id", path, lineno)
        raw_desc = _require(record, "description", path, lineno)
        stmts = _parse_statements(_require(record, "statements", path, lineno), path, lineno)
        if not stmts:
            raise CorpusValidationError(
                f"{path}: line {lineno}: assay {raw_id!r} has zero statements"
            )
        try:
            assay = Bioassay(str(raw_id), str(raw_desc))
        except CorpusValidationError as exc:
            raise CorpusValidationError(f"{path}: line {lineno}: {exc}") from exc
        records.append((assay, stmts))
    return Corpus.build(records)


def _load_two_file(descriptions_path: Path, annotations_path: Path) -> Corpus:
    descriptions: dict[str, str] = {}
    order: list[str] = []
    for lineno, record in _iter_records(descriptions_path):
        raw_id = str(_require(record, "id", descriptions_path, lineno))
        if raw_id in descriptions:
            raise CorpusValidationError(
                f"{descriptions_path}: line {lineno}: duplicate assay id {raw_id!r}"
            )
        descriptions[raw_id] = str(_require(record, "description", descriptions_path, lineno))
        order.append(raw_id)

    annotations: dict[str, list[SemanticStatement]] = {}
    for lineno, record in _iter_records(annotations_path):
        raw_id = str(_require(record, "id", annotations_path, lineno))
        stmts = _parse_statements(
            _require(record, "statements", annotations_path, lineno),
            annotations_path,
            lineno,
        )
        if raw_id not in descriptions:
            raise CorpusValidationError(
                f"{annotations_path}: line {lineno}: no description for assay {raw_id!r}"
            )
        annotations.setdefault(raw_id, []).extend(stmts)

    records: list[tuple[Bioassay, list[SemanticStatement]]] = []
    for assay_id in order:
        stmts = annotations.get(assay_id, [])
        if not stmts:
            raise CorpusValidationError(
                f"{annotations_path}: assay {assay_id!r} has zero statements"
            )
        records.append((Bioassay(assay_id, descriptions[assay_id]), stmts))
    return Corpus.build(records)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the jsonl dialect. load(save(c)) == c."""
    lines = []
    for assay, annotation in corpus:
        record = {
            "id": assay.id,
            "description": assay.description,
            "statements": [
                {
                    "predicate": corpus.vocabulary.statement(sid).predicate,
                    "object": corpus.vocabulary.statement(sid).object,
                }
                for sid in annotation
            ],
        }
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# Filtering


@dataclass(frozen=True)
class FilterPolicy:
    """Rules for dropping non-informative statements.

    ``max_assay_fraction`` drops statements present in strictly more than
    that fraction of assays (None disables the rule, the default).
    """

    predicate_stoplist: frozenset[str] = frozenset()
    object_stoplist: frozenset[str] = frozenset()
    statement_stoplist: frozenset[tuple[str, str]] = frozenset()
    max_assay_fraction: float | None = None

    def __post_init__(self) -> None:
        if self.max_assay_fraction is not None and not (
            0.0 < self.max_assay_fraction <= 1.0
        ):
            raise ValueError("max_assay_fraction must be in (0, 1]")

    def is_empty(self) -> bool:
        return (
            not self.predicate_stoplist
            and not self.object_stoplist
            and not self.statement_stoplist
            and self.max_assay_fraction is None
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "FilterPolicy":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            predicate_stoplist=frozenset(
                canonicalize(p) for p in raw.get("predicate_stoplist", [])
            ),
            object_stoplist=frozenset(
                canonicalize(o) for o in raw.get("object_stoplist", [])
            ),
            statement_stoplist=frozenset(
                (canonicalize(p), canonicalize(o))
                for p, o in raw.get("statement_stoplist", [])
            ),
            max_assay_fraction=raw.get("max_assay_fraction"),
        )


def default_policy() -> FilterPolicy:
    """Shipped default: no rules.

    The filter used to produce published vocabularies is not public, so
    the default keeps every statement; supply an explicit policy file to
    reproduce a specific filtered vocabulary.
    """
    return FilterPolicy()


def filter_noninformative(corpus: Corpus, policy: FilterPolicy) -> Corpus:
    """Drop statements matching the policy and prune annotations.

    Assays left with zero statements are dropped with a warning. The
    ubiquity rule is applied to a fixed point (dropping assays changes
    the fractions), which makes the operation idempotent.
    """
    if policy.is_empty():
        return corpus

    def banned_by_lists(stmt: SemanticStatement) -> bool:
        return (
            stmt.predicate in policy.predicate_stoplist
            or stmt.object in policy.object_stoplist
            or stmt.key in policy.statement_stoplist
        )

    records = [
        (assay, [corpus.vocabulary.statement(sid) for sid in annotation])
        for assay, annotation in corpus
    ]
    records = [
        (assay, [s for s in stmts if not banned_by_lists(s)]) for assay, stmts in records
    ]

    dropped_assays = 0
    while True:
        kept = [(assay, stmts) for assay, stmts in records if stmts]
        dropped_assays += len(records) - len(kept)
        records = kept
        if policy.max_assay_fraction is None or not records:
            break
        counts: dict[tuple[str, str], int] = {}
        for _, stmts in records:
            for key in {s.key for s in stmts}:
                counts[key] = counts.get(key, 0) + 1
        limit = policy.max_assay_fraction * len(records)
        ubiquitous = {key for key, count in counts.items() if count > limit}
        if not ubiquitous:
            break
        records = [
            (assay, [s for s in stmts if s.key not in ubiquitous])
            for assay, stmts in records
        ]

    if dropped_assays:
        logger.warning("filter dropped %d assay(s) left with no statements", dropped_assays)
    return Corpus.build(records)


# ---------------------------------------------------------------------------
# Statistics and folds


@dataclass(frozen=True)
class CorpusStats:
    assay_count: int
    vocabulary_size: int
    min_length: int
    max_length: int
    mean_length: float
    length_histogram: dict[int, int]


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Summary of annotation-length structure across the corpus."""
    if len(corpus) == 0:
        raise CorpusValidationError("cannot summarize an empty corpus")
    lengths = [len(annotation) for _, annotation in corpus]
    histogram: dict[int, int] = {}
    for length in lengths:
        histogram[length] = histogram.get(length, 0) + 1
    return CorpusStats(
        assay_count=len(corpus),
        vocabulary_size=len(corpus.vocabulary),
        min_length=min(lengths),
        max_length=max(lengths),
        mean_length=statistics.fmean(lengths),
        length_histogram=dict(sorted(histogram.items())),
    )


def split_folds(corpus: Corpus, folds: int, seed: int) -> list[Fold]:
    """Deterministic k-fold partition of the assays.

    Assay ids are sorted, shuffled with a seeded generator, and dealt
    round-robin into test sets; each fold's train set is the complement.
    Test sets are disjoint, exhaustive, and size-balanced within one.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if len(corpus) < folds:
        raise CorpusValidationError(
            f"cannot split {len(corpus)} assays into {folds} folds"
        )
    ids = sorted(corpus.ids())
    random.Random(derive_seed(seed, "fold-split")).shuffle(ids)
    out: list[Fold] = []
    for i in range(folds):
        test_ids = ids[i::folds]
        test_set = set(test_ids)
        train_ids = [assay_id for assay_id in ids if assay_id not in test_set]
        out.append(Fold(corpus.subset(train_ids), corpus.subset(test_ids)))
    return out
