import random

import pytest

from semantify.corpus import split_folds
from semantify.errors import EvaluationError
from semantify.evaluation import (
    MetricsReport,
    cross_validate,
    evaluate_pairs,
    format_plot_grid,
    hit_and_miss,
    hit_and_miss_corpus,
    sweep_false_labels,
)
from semantify.pairs import SamplingConfig, build_training_set, negatives_for_assay
from semantify.scoring import FrequencyScorer, predict, train_frequency

from corpus_fixtures import ConstantScorer, OracleScorer, TableScorer, make_random_corpus, stmt
from oracles import confusion_counts, pooled_metrics, replay_hit_and_miss


def oracle_report_for(model, test, mode, sampling, threshold):
    """Brute-force twin of evaluate_pairs built from set algebra."""
    per_assay = []
    for assay, annotation in test:
        if mode == "full-vocabulary":
            universe_ids = list(range(len(test.vocabulary)))
        else:
            universe_ids = list(annotation) + [
                p.statement_id for p in negatives_for_assay(test, assay.id, sampling)
            ]
        universe = [test.vocabulary.statement(sid) for sid in universe_ids]
        predicted = {s.key for s in predict(model, assay, universe, threshold)}
        gold = {test.vocabulary.statement(sid).key for sid in annotation}
        per_assay.append(confusion_counts(gold, predicted, [s.key for s in universe]))
    return pooled_metrics(per_assay)


class TestMetricsReport:
    def test_zero_denominators_flagged(self):
        report = MetricsReport.from_counts("sampled-pair", 0, 0, 0, 5)
        assert report.precision == report.recall == report.f1 == 0.0
        assert set(report.flags) == {
            "precision_zero_denominator",
            "recall_zero_denominator",
            "f1_zero_denominator",
        }

    def test_f1_is_harmonic_mean(self):
        report = MetricsReport.from_counts("sampled-pair", 6, 4, 1, 0)
        p, r = report.precision, report.recall
        assert report.f1 == pytest.approx(2 * p * r / (p + r))
        assert report.flags == ()


class TestEvaluatePairs:
    def test_perfect_scorer_is_all_ones(self, six_corpus):
        model = OracleScorer(six_corpus)
        report = evaluate_pairs(
            model,
            six_corpus,
            sampling=SamplingConfig(false_per_assay=2, seed=0),
            threshold=0.5,
        )
        assert (report.precision, report.recall, report.f1) == (1.0, 1.0, 1.0)
        assert report.fp == report.fn == 0

    def test_predict_everything_with_one_gold_one_negative(self):
        # |S| = 2, k = 1: one sampled negative completes the universe.
        corpus = make_random_corpus(4, 2, 1, 1, seed=0)
        model = ConstantScorer(1.0)
        report = evaluate_pairs(
            model,
            corpus,
            sampling=SamplingConfig(false_per_assay=1, seed=0),
            threshold=0.5,
        )
        assert report.precision == pytest.approx(0.5)
        assert report.recall == pytest.approx(1.0)
        assert report.f1 == pytest.approx(2 / 3)

    def test_hand_labeled_fixture_matches_brute_force(self, six_corpus):
        rng = random.Random(13)
        table = {
            (assay.id, statement.key): rng.random()
            for assay, _ in six_corpus
            for statement in six_corpus.vocabulary
        }
        model = TableScorer(table)
        sampling = SamplingConfig(false_per_assay=2, seed=4)
        for mode in ("sampled-pair", "full-vocabulary"):
            report = evaluate_pairs(
                model, six_corpus, mode=mode, sampling=sampling, threshold=0.5
            )
            tp, fp, fn, tn, p, r, f1 = oracle_report_for(
                model, six_corpus, mode, sampling, 0.5
            )
            assert (report.tp, report.fp, report.fn, report.tn) == (tp, fp, fn, tn)
            assert report.precision == pytest.approx(p)
            assert report.recall == pytest.approx(r)
            assert report.f1 == pytest.approx(f1)

    def test_universe_sizes(self, six_corpus):
        model = ConstantScorer(0.0)
        sampling = SamplingConfig(false_per_assay=2, seed=0)
        sampled = evaluate_pairs(model, six_corpus, sampling=sampling, threshold=0.5)
        total_pairs = sampled.tp + sampled.fp + sampled.fn + sampled.tn
        expected = sum(
            len(ann) + min(2, len(six_corpus.vocabulary) - len(ann))
            for _, ann in six_corpus
        )
        assert total_pairs == expected
        full = evaluate_pairs(
            model,
            six_corpus,
            mode="full-vocabulary",
            sampling=sampling,
            threshold=0.5,
        )
        assert full.tp + full.fp + full.fn + full.tn == len(six_corpus) * len(
            six_corpus.vocabulary
        )

    def test_train_test_overlap_rejected(self, six_corpus):
        model = TableScorer({}, trained_assay_ids=frozenset({"a1", "zz"}))
        with pytest.raises(EvaluationError, match="overlap"):
            evaluate_pairs(
                model,
                six_corpus,
                sampling=SamplingConfig(false_per_assay=1, seed=0),
                threshold=0.5,
            )

    def test_disjoint_trained_ids_accepted(self, six_corpus):
        model = TableScorer({}, trained_assay_ids=frozenset({"other-1", "other-2"}))
        report = evaluate_pairs(
            model,
            six_corpus,
            sampling=SamplingConfig(false_per_assay=1, seed=0),
            threshold=0.5,
        )
        assert report.recall == 0.0


class TestCrossValidate:
    def test_average_is_arithmetic_mean(self, six_corpus):
        result = cross_validate(
            six_corpus,
            FrequencyScorer,
            folds=3,
            sampling=SamplingConfig(false_per_assay=2, seed=1),
        )
        n = len(result.fold_reports)
        assert n == 3
        assert result.average.precision == pytest.approx(
            sum(r.precision for r in result.fold_reports) / n
        )
        assert result.average.recall == pytest.approx(
            sum(r.recall for r in result.fold_reports) / n
        )
        assert result.average.f1 == pytest.approx(
            sum(r.f1 for r in result.fold_reports) / n
        )

    def test_constant_zero_scorer(self, six_corpus):
        result = cross_validate(
            six_corpus,
            lambda: ConstantScorer(0.0),
            folds=2,
            sampling=SamplingConfig(false_per_assay=2, seed=1),
            threshold=0.5,
        )
        for report in result.fold_reports:
            assert report.recall == 0.0
            assert report.f1 == 0.0

    def test_fold_metrics_match_brute_force(self):
        corpus = make_random_corpus(9, 14, 2, 5, seed=21)
        sampling = SamplingConfig(false_per_assay=3, seed=2)
        split_seed = 77
        result = cross_validate(
            corpus,
            FrequencyScorer,
            folds=3,
            sampling=sampling,
            split_seed=split_seed,
        )
        for fold, report in zip(split_folds(corpus, 3, split_seed), result.fold_reports):
            scorer = FrequencyScorer()
            scorer.train(build_training_set(fold.train, sampling), fold.train)
            tp, fp, fn, tn, p, r, f1 = oracle_report_for(
                scorer, fold.test, "sampled-pair", sampling, None
            )
            assert (report.tp, report.fp, report.fn, report.tn) == (tp, fp, fn, tn)
            assert report.f1 == pytest.approx(f1)

    def test_reproducible_end_to_end(self, six_corpus):
        kwargs = dict(
            folds=3,
            sampling=SamplingConfig(false_per_assay=2, seed=9),
            split_seed=4,
        )
        a = cross_validate(six_corpus, FrequencyScorer, **kwargs)
        b = cross_validate(six_corpus, FrequencyScorer, **kwargs)
        assert a == b


class TestSweep:
    def test_single_point(self, six_corpus):
        result = sweep_false_labels(
            six_corpus, FrequencyScorer, start=2, stop=2, step=1, folds=2
        )
        assert len(result.rows) == 1
        assert result.best_false_per_assay == 2

    def test_rows_strictly_increasing(self, six_corpus):
        result = sweep_false_labels(
            six_corpus, FrequencyScorer, start=1, stop=4, step=1, folds=2
        )
        values = [n for n, _ in result.rows]
        assert values == sorted(set(values)) == [1, 2, 3, 4]

    def test_each_point_matches_independent_recomputation(self):
        corpus = make_random_corpus(8, 12, 1, 4, seed=31)
        split_seed, sampling_seed = 5, 6
        result = sweep_false_labels(
            corpus,
            FrequencyScorer,
            start=1,
            stop=3,
            step=1,
            sampling_seed=sampling_seed,
            split_seed=split_seed,
            folds=2,
        )
        train, test = split_folds(corpus, 2, split_seed)[0]
        for n_false, report in result.rows:
            sampling = SamplingConfig(false_per_assay=n_false, seed=sampling_seed)
            scorer = FrequencyScorer()
            scorer.train(build_training_set(train, sampling), train)
            expected = evaluate_pairs(scorer, test, sampling=sampling)
            assert report == expected

    def test_argmax_takes_first_maximum(self):
        # A constant all-true scorer has recall 1 everywhere and its
        # precision cannot rise as negatives are added, so F1 ties or
        # falls across points — the reported best must be the first row
        # among equals.
        corpus = make_random_corpus(6, 10, 2, 3, seed=8)
        result = sweep_false_labels(
            corpus,
            lambda: ConstantScorer(1.0),
            start=1,
            stop=3,
            step=1,
            threshold=0.5,
            folds=2,
        )
        best_f1 = max(report.f1 for _, report in result.rows)
        first_best = next(n for n, report in result.rows if report.f1 == best_f1)
        assert result.best_false_per_assay == first_best

    def test_invalid_range(self, six_corpus):
        with pytest.raises(ValueError):
            sweep_false_labels(six_corpus, FrequencyScorer, start=3, stop=1, step=1)
        with pytest.raises(ValueError):
            sweep_false_labels(six_corpus, FrequencyScorer, start=1, stop=3, step=0)

    def test_full_cv_averages_folds(self, six_corpus):
        result = sweep_false_labels(
            six_corpus,
            FrequencyScorer,
            start=2,
            stop=2,
            step=1,
            folds=2,
            full_cv=True,
        )
        cv = cross_validate(
            six_corpus,
            FrequencyScorer,
            folds=2,
            sampling=SamplingConfig(false_per_assay=2, seed=0),
        )
        assert result.rows[0][1].f1 == pytest.approx(cv.average.f1)


class TestHitAndMiss:
    def test_single_gold_on_top(self, six_corpus, table_scorer):
        a = stmt("p", "a")
        b = stmt("p", "b")
        assay = six_corpus.assay("a1")
        model = table_scorer({("a1", a.key): 0.9, ("a1", b.key): 0.5})
        trace = hit_and_miss(model, assay, [a], [a, b])
        assert trace.marks == ("hit",)
        assert trace.hits == 1 and trace.misses == 0

    def test_gold_ranked_second(self, six_corpus, table_scorer):
        a = stmt("p", "a")
        b = stmt("p", "b")
        assay = six_corpus.assay("a1")
        model = table_scorer({("a1", a.key): 0.9, ("a1", b.key): 0.5})
        trace = hit_and_miss(model, assay, [b], [a, b])
        assert trace.marks == ("miss", "hit")

    def test_matches_literal_replay(self, six_corpus):
        rng = random.Random(3)
        candidates = list(six_corpus.vocabulary)
        for assay, annotation in six_corpus:
            table = {
                (assay.id, s.key): round(rng.random(), 3) for s in candidates
            }
            model = TableScorer(table)
            gold = [six_corpus.vocabulary.statement(sid) for sid in annotation]
            trace = hit_and_miss(model, assay, gold, candidates)
            expected = replay_hit_and_miss(
                lambda s: table[(assay.id, s.key)], gold, candidates
            )
            assert list(trace.marks) == expected

    def test_oracle_scorer_all_hits(self, six_corpus):
        model = OracleScorer(six_corpus)
        for trace in hit_and_miss_corpus(model, six_corpus):
            k = len(six_corpus.annotation(trace.assay_id))
            assert trace.marks == ("hit",) * k
            assert trace.hits == trace.gold_size == k

    def test_exactly_k_hits_always(self, six_corpus):
        model = train_frequency(six_corpus)
        for trace in hit_and_miss_corpus(model, six_corpus):
            assert trace.hits == len(six_corpus.annotation(trace.assay_id))
            assert len(trace) <= len(six_corpus.vocabulary)

    def test_gold_missing_from_candidates(self, six_corpus, table_scorer):
        assay = six_corpus.assay("a1")
        inside = stmt("p", "here")
        outside = stmt("p", "elsewhere")
        model = table_scorer({})
        with pytest.raises(EvaluationError, match="missing"):
            hit_and_miss(model, assay, [outside], [inside])


class TestPlotGrid:
    def test_single_hit_cell(self, six_corpus, table_scorer):
        from semantify.evaluation import HitMissTrace

        grid = format_plot_grid([HitMissTrace("x", ("hit",), 1)])
        assert grid == "1\nB\n"

    def test_padding_to_longest_trace(self):
        from semantify.evaluation import HitMissTrace

        traces = [
            HitMissTrace("long", ("miss", "miss", "hit"), 1),
            HitMissTrace("short", ("hit",), 1),
        ]
        grid = format_plot_grid(traces)
        assert grid == "3\nBWW\nPPB\n"

    def test_rows_sorted_by_length_then_id(self):
        from semantify.evaluation import HitMissTrace

        traces = [
            HitMissTrace("b", ("hit", "hit"), 2),
            HitMissTrace("a", ("hit", "miss", "hit"), 2),
            HitMissTrace("c", ("miss", "hit"), 1),
        ]
        lines = format_plot_grid(traces).splitlines()
        assert lines[0] == "3"
        assert lines[1:] == ["BBW", "PBW", "BPB"]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            format_plot_grid([])

    def test_emit_writes_file(self, six_corpus, tmp_path):
        from semantify.evaluation import emit_plot_data

        model = OracleScorer(six_corpus)
        traces = hit_and_miss_corpus(model, six_corpus)
        path = tmp_path / "grid.txt"
        emit_plot_data(traces, path)
        lines = path.read_text().splitlines()
        assert lines[0] == str(max(len(t) for t in traces))
        assert len(lines) == 1 + len(six_corpus)
