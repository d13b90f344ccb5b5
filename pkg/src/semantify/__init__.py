"""Bioassay semantification: corpus handling, pair sampling, scoring,
evaluation, and triple export.

The package turns unstructured assay descriptions plus a statement
vocabulary into trained scorers, cross-validated metrics, and
knowledge-graph-ready triples. Heavier integration pieces (the curation
backend in :mod:`semantify.curation`, wire-protocol contract checks in
:mod:`semantify.contract`) import on demand.
"""

from ._version import __version__
from .corpus import (
    AnnotationSequence,
    Bioassay,
    Corpus,
    CorpusStats,
    FilterPolicy,
    Fold,
    SemanticStatement,
    StatementVocabulary,
    canonicalize,
    corpus_stats,
    default_policy,
    filter_noninformative,
    load_corpus,
    save_corpus,
    split_folds,
)
from .errors import (
    CorpusFormatError,
    CorpusValidationError,
    EvaluationError,
    ModelFormatError,
    ProtocolError,
    RemoteServiceError,
    SemantifyError,
)
from .evaluation import (
    AverageMetrics,
    CrossValidationResult,
    HitMissTrace,
    MetricsReport,
    SweepResult,
    cross_validate,
    emit_plot_data,
    evaluate_pairs,
    format_plot_grid,
    hit_and_miss,
    hit_and_miss_corpus,
    sweep_false_labels,
)
from .kg import (
    ComparisonTable,
    Triple,
    TripleSet,
    compare_assays,
    export_triples,
    parse_triples,
    read_triples,
    serialize_triples,
    write_triples,
)
from .pairs import (
    LabeledPair,
    SamplingConfig,
    build_training_set,
    negatives_for_assay,
    positive_pairs,
    read_pairs,
    sample_negatives,
    statement_text,
    write_pairs,
)
from .remote import (
    HealthStatus,
    RemoteModelHandle,
    RemoteScorer,
    RetryPolicy,
    ServiceEndpoint,
    TrainingHyperparams,
    corpus_text_resolver,
    health_check,
    remote_score,
    remote_train,
)
from .scoring import (
    DEFAULT_THRESHOLD,
    FrequencyScorer,
    LexicalHyperparams,
    LexicalScorer,
    Scorer,
    UnknownStatementWarning,
    UntrainedModelError,
    load_model,
    predict,
    rank_statements,
    register_model_kind,
    save_model,
    train_frequency,
)
from .seeds import derive_seed

__all__ = [
    "__version__",
    # corpus
    "AnnotationSequence",
    "Bioassay",
    "Corpus",
    "CorpusStats",
    "FilterPolicy",
    "Fold",
    "SemanticStatement",
    "StatementVocabulary",
    "canonicalize",
    "corpus_stats",
    "default_policy",
    "filter_noninformative",
    "load_corpus",
    "save_corpus",
    "split_folds",
    # errors
    "CorpusFormatError",
    "CorpusValidationError",
    "EvaluationError",
    "ModelFormatError",
    "ProtocolError",
    "RemoteServiceError",
    "SemantifyError",
    # evaluation
    "AverageMetrics",
    "CrossValidationResult",
    "HitMissTrace",
    "MetricsReport",
    "SweepResult",
    "cross_validate",
    "emit_plot_data",
    "evaluate_pairs",
    "format_plot_grid",
    "hit_and_miss",
    "hit_and_miss_corpus",
    "sweep_false_labels",
    # kg
    "ComparisonTable",
    "Triple",
    "TripleSet",
    "compare_assays",
    "export_triples",
    "parse_triples",
    "read_triples",
    "serialize_triples",
    "write_triples",
    # pairs
    "LabeledPair",
    "SamplingConfig",
    "build_training_set",
    "negatives_for_assay",
    "positive_pairs",
    "read_pairs",
    "sample_negatives",
    "statement_text",
    "write_pairs",
    # remote
    "HealthStatus",
    "RemoteModelHandle",
    "RemoteScorer",
    "RetryPolicy",
    "ServiceEndpoint",
    "TrainingHyperparams",
    "corpus_text_resolver",
    "health_check",
    "remote_score",
    "remote_train",
    # scoring
    "DEFAULT_THRESHOLD",
    "FrequencyScorer",
    "LexicalHyperparams",
    "LexicalScorer",
    "Scorer",
    "UnknownStatementWarning",
    "UntrainedModelError",
    "load_model",
    "predict",
    "rank_statements",
    "register_model_kind",
    "save_model",
    "train_frequency",
    # seeds
    "derive_seed",
]
