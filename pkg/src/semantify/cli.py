"""Command-line entry point.

One `semantify` command with subcommands for corpus stats, training,
evaluation, the false-instance sweep, prediction/export, and the
curation backend. All randomness flows from a single --seed, fanned out
to named sub-seeds, so a run is reproducible from its command line; any
wall-clock information lives in a *.meta.json sidecar, never in the
result files themselves.

Exit codes: 0 success, 2 usage error, 3 data error, 4 remote-service
error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from ._version import __version__
from .corpus import (
    Bioassay,
    Corpus,
    FilterPolicy,
    corpus_stats,
    filter_noninformative,
    load_corpus,
)
from .errors import RemoteServiceError, SemantifyError
from .evaluation import cross_validate, sweep_false_labels
from .kg import export_triples, write_triples
from .pairs import SamplingConfig, build_training_set
from .remote import RemoteScorer, RetryPolicy, ServiceEndpoint, TrainingHyperparams
from .scoring import (
    FrequencyScorer,
    LexicalHyperparams,
    LexicalScorer,
    Scorer,
    load_model,
    predict,
    rank_statements,
    save_model,
)
from .seeds import derive_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_REMOTE = 4

REFERENCE_SECONDS_PER_ASSAY = 4.0


# ---------------------------------------------------------------------------
# Shared plumbing


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _meta_path(out: Path) -> Path:
    return out.with_name(out.stem + ".meta.json")


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _write_meta(out: Path, args: argparse.Namespace) -> None:
    """Sidecar with everything volatile: timestamp, exact invocation."""
    _write_json(
        _meta_path(out),
        {
            "command": args.command,
            "seed": getattr(args, "seed", None),
            "created": _utc_now(),
            "version": __version__,
        },
    )


def _load(args: argparse.Namespace) -> Corpus:
    corpus = load_corpus(
        args.corpus,
        format=args.corpus_format,
        annotations_path=args.annotations,
    )
    if args.filter_policy:
        corpus = filter_noninformative(corpus, FilterPolicy.from_file(args.filter_policy))
    return corpus


def _sampling(args: argparse.Namespace) -> SamplingConfig:
    return SamplingConfig(
        false_per_assay=args.false_per_assay,
        seed=derive_seed(args.seed, "sampling"),
    )


def _scorer_factory(args: argparse.Namespace) -> Callable[[], Scorer]:
    kind = args.scorer
    if kind == "frequency":
        return FrequencyScorer
    if kind == "lexical":
        hyperparams = LexicalHyperparams(seed=derive_seed(args.seed, "lexical"))
        return lambda: LexicalScorer(hyperparams)
    if kind == "remote":
        if not args.endpoint:
            raise ValueError("--endpoint is required when --scorer is remote")
        endpoint = ServiceEndpoint(
            base_url=args.endpoint,
            timeout=args.timeout,
            max_in_flight=args.max_in_flight,
            retry=RetryPolicy(retries=args.retries, backoff=args.backoff),
        )
        hyperparams = TrainingHyperparams(
            epochs=args.epochs,
            learning_rate=args.learning_rate,
            seed=derive_seed(args.seed, "remote") % 2**31,
            max_sequence_length=args.max_sequence_length,
        )
        return lambda: RemoteScorer(endpoint, hyperparams, chunk_size=args.chunk_size)
    raise ValueError(f"unknown scorer kind: {kind!r}")


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus file (jsonl)")
    parser.add_argument(
        "--corpus-format",
        choices=("jsonl", "two-file"),
        default="jsonl",
        help="input dialect (two-file needs --annotations)",
    )
    parser.add_argument(
        "--annotations", default=None, help="annotations file for two-file corpora"
    )
    parser.add_argument(
        "--filter-policy",
        default=None,
        help="JSON stoplist/ubiquity policy applied after loading",
    )


def _add_scorer_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--scorer",
        choices=("frequency", "lexical", "remote"),
        default="frequency",
    )
    parser.add_argument(
        "--false-per-assay",
        type=int,
        default=170,
        help="sampled false statements per assay (default: 170)",
    )
    remote = parser.add_argument_group("remote scorer")
    remote.add_argument("--endpoint", default=None, help="scoring service base URL")
    remote.add_argument("--timeout", type=float, default=600.0)
    remote.add_argument("--max-in-flight", type=int, default=4)
    remote.add_argument("--retries", type=int, default=2)
    remote.add_argument("--backoff", type=float, default=0.2)
    remote.add_argument("--chunk-size", type=int, default=64)
    remote.add_argument("--epochs", type=int, default=2)
    remote.add_argument("--learning-rate", type=float, default=2e-5)
    remote.add_argument("--max-sequence-length", type=int, default=512)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_stats(args: argparse.Namespace) -> int:
    stats = corpus_stats(_load(args))
    print(f"assays: {stats.assay_count}")
    print(f"statements: {stats.vocabulary_size}")
    print(
        "statements per assay: "
        f"min {stats.min_length}, mean {stats.mean_length:.1f}, max {stats.max_length}"
    )
    if args.histogram:
        for length, count in stats.length_histogram.items():
            print(f"{length}\t{count}")
    if args.out:
        out = Path(args.out)
        _write_json(
            out,
            {
                "assays": stats.assay_count,
                "statements": stats.vocabulary_size,
                "min_length": stats.min_length,
                "max_length": stats.max_length,
                "mean_length": stats.mean_length,
                "histogram": [[k, v] for k, v in stats.length_histogram.items()],
            },
        )
        _write_meta(out, args)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    corpus = _load(args)
    sampling = _sampling(args)
    scorer = _scorer_factory(args)()
    scorer.train(build_training_set(corpus, sampling), corpus)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(scorer, out)
    _write_meta(out, args)
    print(f"trained {scorer.kind} model on {len(corpus)} assays -> {out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    corpus = _load(args)
    sampling = _sampling(args)
    factory = _scorer_factory(args)
    modes = (
        ("sampled-pair", "full-vocabulary") if args.mode == "both" else (args.mode,)
    )
    results = {}
    for mode in modes:
        cv = cross_validate(
            corpus,
            factory,
            folds=args.folds,
            sampling=sampling,
            threshold=args.threshold,
            split_seed=derive_seed(args.seed, "folds"),
            mode=mode,
        )
        results[mode] = cv.to_dict()
        for i, report in enumerate(cv.fold_reports, start=1):
            print(
                f"{mode} fold {i}: P={report.precision:.3f} "
                f"R={report.recall:.3f} F1={report.f1:.3f}"
            )
        print(
            f"{mode} avg: P={cv.average.precision:.3f} "
            f"R={cv.average.recall:.3f} F1={cv.average.f1:.3f}"
        )
    if args.out:
        out = Path(args.out)
        _write_json(
            out,
            {
                "config": {
                    "scorer": args.scorer,
                    "folds": args.folds,
                    "false_per_assay": args.false_per_assay,
                    "threshold": args.threshold,
                    "seed": args.seed,
                },
                "results": results,
            },
        )
        _write_meta(out, args)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    corpus = _load(args)
    factory = _scorer_factory(args)
    result = sweep_false_labels(
        corpus,
        factory,
        start=args.start,
        stop=args.stop,
        step=args.step,
        sampling_seed=derive_seed(args.seed, "sampling"),
        threshold=args.threshold,
        split_seed=derive_seed(args.seed, "folds"),
        folds=args.folds,
        full_cv=args.full_cv,
    )
    for n_false, report in result.rows:
        print(
            f"{n_false}\tP={report.precision:.3f}\t"
            f"R={report.recall:.3f}\tF1={report.f1:.3f}"
        )
    print(f"best: false-per-assay={result.best_false_per_assay} F1={result.best_report.f1:.3f}")
    if args.out:
        out = Path(args.out)
        _write_json(out, {"seed": args.seed, "sweep": result.to_dict()})
        _write_meta(out, args)
    return EXIT_OK


def _predict_target(args: argparse.Namespace, corpus: Corpus | None) -> Bioassay:
    if args.assay_id is not None:
        if corpus is None:
            raise ValueError("--assay-id needs --corpus to look the assay up in")
        return corpus.assay(args.assay_id)
    if args.text is not None:
        return Bioassay(args.id, args.text)
    raise ValueError("predict needs either --assay-id or --text")


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    corpus = _load(args) if args.corpus else None
    assay = _predict_target(args, corpus)
    candidates = (
        list(corpus.vocabulary) if corpus is not None else list(model.known_statements())
    )
    started = time.perf_counter()
    ranked = rank_statements(model, assay, candidates)
    elapsed = time.perf_counter() - started
    top = ranked[: args.top_k] if args.top_k else ranked
    for statement, score in top:
        print(f"{score:.6f}\t{statement.predicate}\t{statement.object}")
    print(
        f"semantified {assay.id!r} in {elapsed:.2f} s "
        f"(reference rate: {REFERENCE_SECONDS_PER_ASSAY:.0f} s/assay)",
        file=sys.stderr,
    )
    if args.export:
        decided = predict(model, assay, candidates, args.threshold)
        out = Path(args.export)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_triples(export_triples(assay, decided, provenance="predicted"), out)
        _write_meta(out, args)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .curation import create_curation_app

    corpus = _load(args)
    model = load_model(args.model)
    app = create_curation_app(corpus, model, suggest_threshold=args.suggest_threshold)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semantify",
        description="Turn unstructured bioassay descriptions into semantic statements.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="info-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="corpus summary and length histogram")
    _add_corpus_args(p_stats)
    p_stats.add_argument("--seed", type=int, default=0)
    p_stats.add_argument("--histogram", action="store_true", help="print length histogram")
    p_stats.add_argument("--out", default=None, help="write stats JSON here")
    p_stats.set_defaults(func=cmd_stats)

    p_train = sub.add_parser("train", help="train a scorer on a whole corpus")
    _add_corpus_args(p_train)
    _add_scorer_args(p_train)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", required=True, help="model file to write")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="cross-validated P/R/F1")
    _add_corpus_args(p_eval)
    _add_scorer_args(p_eval)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--folds", type=int, default=3)
    p_eval.add_argument("--threshold", type=float, default=None)
    p_eval.add_argument(
        "--mode",
        choices=("both", "sampled-pair", "full-vocabulary"),
        default="both",
    )
    p_eval.add_argument("--out", default=None, help="write the report JSON here")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="vary the false-statement count")
    _add_corpus_args(p_sweep)
    _add_scorer_args(p_sweep)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--folds", type=int, default=3)
    p_sweep.add_argument("--threshold", type=float, default=None)
    p_sweep.add_argument("--start", type=int, default=100)
    p_sweep.add_argument("--stop", type=int, default=300)
    p_sweep.add_argument("--step", type=int, default=10)
    p_sweep.add_argument(
        "--full-cv",
        action="store_true",
        help="cross-validate each sweep point instead of using the first fold",
    )
    p_sweep.add_argument("--out", default=None, help="write the sweep JSON here")
    p_sweep.set_defaults(func=cmd_sweep)

    p_pred = sub.add_parser("predict", help="rank statements for one assay")
    p_pred.add_argument("--model", required=True, help="model file from `train`")
    p_pred.add_argument("--corpus", default=None, help="corpus for lookups/candidates")
    p_pred.add_argument(
        "--corpus-format", choices=("jsonl", "two-file"), default="jsonl"
    )
    p_pred.add_argument("--annotations", default=None)
    p_pred.add_argument("--filter-policy", default=None)
    p_pred.add_argument("--assay-id", default=None, help="semantify this corpus assay")
    p_pred.add_argument("--text", default=None, help="semantify this ad-hoc description")
    p_pred.add_argument("--id", default="adhoc", help="subject id for --text input")
    p_pred.add_argument("--top-k", type=int, default=None, help="print only the top K")
    p_pred.add_argument("--threshold", type=float, default=None)
    p_pred.add_argument("--seed", type=int, default=0)
    p_pred.add_argument("--export", default=None, help="write predicted triples here")
    p_pred.set_defaults(func=cmd_predict)

    p_serve = sub.add_parser("serve", help="run the curation backend")
    _add_corpus_args(p_serve)
    p_serve.add_argument("--model", required=True, help="model file from `train`")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument(
        "--suggest-threshold",
        type=float,
        default=None,
        help="only suggest statements scoring at least this",
    )
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyError as exc:
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_DATA
    except RemoteServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REMOTE
    except SemantifyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
