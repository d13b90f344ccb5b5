"""Evaluation protocol: pair metrics, cross-validation, sweeps, hit-and-miss.

Two evaluation universes are supported. Sampled-pair mode scores each
test assay against its gold statements plus a seeded sample of false
statements, mirroring how training pairs are built. Full-vocabulary mode
scores every statement in the vocabulary, which is what deployment looks
like. Metrics are micro-averaged over pairs within a fold; fold averages
are unweighted means.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Literal, Sequence

from .corpus import AnnotationSequence, Bioassay, Corpus, Fold, SemanticStatement, split_folds
from .errors import EvaluationError
from .pairs import SamplingConfig, build_training_set, negatives_for_assay
from .scoring import Scorer, predict, rank_statements

logger = logging.getLogger(__name__)

EvaluationMode = Literal["sampled-pair", "full-vocabulary"]

MODES: tuple[EvaluationMode, ...] = ("sampled-pair", "full-vocabulary")


@dataclass(frozen=True)
class MetricsReport:
    """Micro-averaged confusion counts and derived metrics.

    Zero-denominator metrics are defined as 0.0 and flagged rather than
    raising, so sweep tables stay well-formed.
    """

    mode: str
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    flags: tuple[str, ...] = ()

    @classmethod
    def from_counts(cls, mode: str, tp: int, fp: int, fn: int, tn: int) -> "MetricsReport":
        flags: list[str] = []
        if tp + fp > 0:
            precision = tp / (tp + fp)
        else:
            precision, flags = 0.0, flags + ["precision_zero_denominator"]
        if tp + fn > 0:
            recall = tp / (tp + fn)
        else:
            recall, flags = 0.0, flags + ["recall_zero_denominator"]
        if precision + recall > 0:
            f1 = 2 * precision * recall / (precision + recall)
        else:
            f1, flags = 0.0, flags + ["f1_zero_denominator"]
        return cls(mode, tp, fp, fn, tn, precision, recall, f1, tuple(flags))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class AverageMetrics:
    """Unweighted mean of per-fold precision, recall, and F1."""

    precision: float
    recall: float
    f1: float

    @classmethod
    def of(cls, reports: Sequence[MetricsReport]) -> "AverageMetrics":
        n = len(reports)
        return cls(
            precision=sum(r.precision for r in reports) / n,
            recall=sum(r.recall for r in reports) / n,
            f1=sum(r.f1 for r in reports) / n,
        )

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class CrossValidationResult:
    fold_reports: tuple[MetricsReport, ...]
    average: AverageMetrics

    def to_dict(self) -> dict:
        return {
            "folds": [r.to_dict() for r in self.fold_reports],
            "average": self.average.to_dict(),
        }


@dataclass(frozen=True)
class SweepResult:
    """One metrics row per false-instance count, plus the F1 argmax."""

    rows: tuple[tuple[int, MetricsReport], ...]
    best_false_per_assay: int
    best_report: MetricsReport

    def to_dict(self) -> dict:
        return {
            "rows": [
                {"false_per_assay": n, "metrics": report.to_dict()}
                for n, report in self.rows
            ],
            "best_false_per_assay": self.best_false_per_assay,
            "best_metrics": self.best_report.to_dict(),
        }


@dataclass(frozen=True)
class HitMissTrace:
    """Ordered hit/miss marks from the top-suggestion curation simulation.

    The trace ends at the mark that finds the last gold statement, so the
    number of hits always equals the gold annotation size.
    """

    assay_id: str
    marks: tuple[Literal["hit", "miss"], ...]
    gold_size: int

    @property
    def hits(self) -> int:
        return sum(1 for m in self.marks if m == "hit")

    @property
    def misses(self) -> int:
        return sum(1 for m in self.marks if m == "miss")

    def __len__(self) -> int:
        return len(self.marks)


def _check_disjoint(model: Scorer, test: Corpus) -> None:
    claimed = getattr(model, "trained_assay_ids", None)
    if claimed is None:
        return
    overlap = set(claimed) & set(test.ids())
    if overlap:
        raise EvaluationError(
            f"train/test assay overlap: {sorted(overlap)[:5]}"
            f"{'...' if len(overlap) > 5 else ''}"
        )


def _universe_ids(
    corpus: Corpus, assay_id: str, mode: EvaluationMode, sampling: SamplingConfig
) -> list[int]:
    gold = corpus.annotation(assay_id)
    if mode == "full-vocabulary":
        return list(range(len(corpus.vocabulary)))
    if mode == "sampled-pair":
        negatives = negatives_for_assay(corpus, assay_id, sampling)
        return list(gold.statement_ids) + [p.statement_id for p in negatives]
    raise ValueError(f"unknown evaluation mode: {mode!r}")


def evaluate_pairs(
    model: Scorer,
    test: Corpus,
    *,
    mode: EvaluationMode = "sampled-pair",
    sampling: SamplingConfig,
    threshold: float | None = None,
) -> MetricsReport:
    """Micro-averaged P/R/F1 of the model's decisions over the test corpus.

    Raises :class:`EvaluationError` when the model claims training assays
    that overlap the test assays.
    """
    _check_disjoint(model, test)
    tp = fp = fn = tn = 0
    for assay, annotation in test:
        universe = _universe_ids(test, assay.id, mode, sampling)
        candidates = [test.vocabulary.statement(sid) for sid in universe]
        predicted = predict(model, assay, candidates, threshold)
        predicted_keys = {s.key for s in predicted}
        gold_keys = {test.vocabulary.statement(sid).key for sid in annotation}
        for statement in candidates:
            is_gold = statement.key in gold_keys
            is_predicted = statement.key in predicted_keys
            if is_gold and is_predicted:
                tp += 1
            elif is_gold:
                fn += 1
            elif is_predicted:
                fp += 1
            else:
                tn += 1
    return MetricsReport.from_counts(mode, tp, fp, fn, tn)


ScorerFactory = Callable[[], Scorer]


def cross_validate(
    corpus: Corpus,
    scorer_factory: ScorerFactory,
    *,
    folds: int,
    sampling: SamplingConfig,
    threshold: float | None = None,
    split_seed: int = 0,
    mode: EvaluationMode = "sampled-pair",
    fold_splits: Sequence[Fold] | None = None,
) -> CrossValidationResult:
    """Train and evaluate one scorer per fold; report folds plus the mean.

    ``fold_splits`` lets callers reuse one fixed partition (the sweep
    does this so points differ only in the negative count).
    """
    splits = fold_splits if fold_splits is not None else split_folds(corpus, folds, split_seed)
    reports = []
    for i, (train, test) in enumerate(splits, start=1):
        scorer = scorer_factory()
        scorer.train(build_training_set(train, sampling), train)
        report = evaluate_pairs(
            scorer, test, mode=mode, sampling=sampling, threshold=threshold
        )
        logger.info(
            "fold %d: P=%.3f R=%.3f F1=%.3f", i, report.precision, report.recall, report.f1
        )
        reports.append(report)
    return CrossValidationResult(tuple(reports), AverageMetrics.of(reports))


def sweep_false_labels(
    corpus: Corpus,
    scorer_factory: ScorerFactory,
    *,
    start: int,
    stop: int,
    step: int,
    sampling_seed: int = 0,
    threshold: float | None = None,
    split_seed: int = 0,
    folds: int = 3,
    mode: EvaluationMode = "sampled-pair",
    full_cv: bool = False,
) -> SweepResult:
    """Evaluate a range of false-instance counts on one fixed fold split.

    By default each sweep point trains and evaluates on the first fold
    only; ``full_cv=True`` cross-validates every point and reports the
    fold mean as that point's row. The best row is the first F1 maximum.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError("stop must be >= start")
    values = list(range(start, stop + 1, step))
    splits = split_folds(corpus, folds, split_seed)
    rows: list[tuple[int, MetricsReport]] = []
    for n_false in values:
        sampling = SamplingConfig(
            false_per_assay=n_false, seed=sampling_seed
        )
        if full_cv:
            result = cross_validate(
                corpus,
                scorer_factory,
                folds=folds,
                sampling=sampling,
                threshold=threshold,
                mode=mode,
                fold_splits=splits,
            )
            pooled = MetricsReport(
                mode=mode,
                tp=sum(r.tp for r in result.fold_reports),
                fp=sum(r.fp for r in result.fold_reports),
                fn=sum(r.fn for r in result.fold_reports),
                tn=sum(r.tn for r in result.fold_reports),
                precision=result.average.precision,
                recall=result.average.recall,
                f1=result.average.f1,
            )
            rows.append((n_false, pooled))
        else:
            train, test = splits[0]
            scorer = scorer_factory()
            scorer.train(build_training_set(train, sampling), train)
            rows.append(
                (
                    n_false,
                    evaluate_pairs(
                        scorer, test, mode=mode, sampling=sampling, threshold=threshold
                    ),
                )
            )
        logger.info("sweep point %d: F1=%.3f", n_false, rows[-1][1].f1)
    best_n, best_report = max(rows, key=lambda row: (row[1].f1, -row[0]))
    return SweepResult(tuple(rows), best_n, best_report)


def hit_and_miss(
    model: Scorer,
    assay: Bioassay,
    gold: Iterable[SemanticStatement],
    candidates: Sequence[SemanticStatement],
) -> HitMissTrace:
    """Simulate an operator approving or discarding the top suggestion.

    Candidates are ranked once (scores are fixed per trained model, so
    re-ranking after each removal yields the same order); the trace walks
    the ranking, marking gold statements as hits and others as misses,
    and stops when every gold statement has been found.
    """
    gold_keys = {s.key for s in gold}
    candidate_keys = {s.key for s in candidates}
    missing = gold_keys - candidate_keys
    if missing:
        raise EvaluationError(f"gold statements missing from candidates: {sorted(missing)[:3]}")
    remaining = set(gold_keys)
    marks: list[Literal["hit", "miss"]] = []
    for statement, _ in rank_statements(model, assay, candidates):
        if not remaining:
            break
        if statement.key in remaining:
            marks.append("hit")
            remaining.discard(statement.key)
        else:
            marks.append("miss")
    return HitMissTrace(assay.id, tuple(marks), len(gold_keys))


def hit_and_miss_corpus(model: Scorer, corpus: Corpus) -> list[HitMissTrace]:
    """Run the simulation for every assay against the full vocabulary."""
    candidates = list(corpus.vocabulary)
    return [
        hit_and_miss(model, assay, corpus.gold_statements(assay.id), candidates)
        for assay, _ in corpus
    ]


def format_plot_grid(traces: Sequence[HitMissTrace]) -> str:
    """Render traces as the plot-data grid (see docs/data-formats.md).

    Header line holds the column count; one row per assay, shortest
    traces first, cells B (hit), P (miss), or W (blank padding).
    """
    if not traces:
        raise ValueError("no traces to render")
    width = max(len(t) for t in traces)
    ordered = sorted(traces, key=lambda t: (len(t), t.assay_id))
    symbol = {"hit": "B", "miss": "P"}
    lines = [str(width)]
    for trace in ordered:
        row = "".join(symbol[m] for m in trace.marks)
        lines.append(row + "W" * (width - len(row)))
    return "\n".join(lines) + "\n"


def emit_plot_data(traces: Sequence[HitMissTrace], path: str | Path) -> None:
    Path(path).write_text(format_plot_grid(traces), encoding="utf-8")
