"""Scoring semantics: determinism, range, order, and learned separation."""

import math
import random

import pytest

from service_fixtures import SMALL_CONFIG, TOY_TEXTS, toy_pairs
from inference_service import TrainingRequest, fine_tune, scores_for


@pytest.fixture(scope="module")
def trained():
    """Three epochs on the toy set: enough to separate true from false."""
    request = TrainingRequest(
        pairs=toy_pairs(), epochs=3, learning_rate=2e-3, seed=11
    )
    return fine_tune(request, SMALL_CONFIG)


def encode(trained_model, texts):
    return [
        trained_model.tokenizer.encode_pair(assay_text, statement_text, 64)
        for assay_text, statement_text in texts
    ]


class TestDeterminism:
    def test_identical_pair_scores_identically_on_repeat_calls(self, trained):
        pair = encode(trained, [("kinase inhibition", "measures kinase activity")])
        assert scores_for(trained.model, pair) == scores_for(trained.model, pair)

    def test_score_is_independent_of_batch_neighbors(self, trained):
        texts = [(a, s) for a, s, _ in toy_pairs(3)]
        alone = [scores_for(trained.model, encode(trained, [t]))[0] for t in texts]
        together = scores_for(trained.model, encode(trained, texts))
        assert together == alone

    def test_order_is_preserved_under_permutation(self, trained):
        texts = [(a, s) for a, s, _ in toy_pairs(2)]
        rng = random.Random(5)
        shuffled = texts[:]
        rng.shuffle(shuffled)
        by_pair = dict(zip(texts, scores_for(trained.model, encode(trained, texts))))
        for text, score in zip(shuffled, scores_for(trained.model, encode(trained, shuffled))):
            assert score == by_pair[text]


class TestRange:
    def test_scores_are_finite_and_within_the_unit_interval(self, trained):
        texts = [(a, s) for a, s, _ in toy_pairs(5)]
        for score in scores_for(trained.model, encode(trained, texts)):
            assert math.isfinite(score)
            assert 0.0 <= score <= 1.0

    def test_score_count_matches_input_count(self, trained):
        texts = [(a, s) for a, s, _ in toy_pairs(4)]
        assert len(scores_for(trained.model, encode(trained, texts))) == len(texts)
        assert scores_for(trained.model, []) == []


class TestTruncation:
    def test_overlong_assay_text_is_scored_without_error(self, trained):
        long_text = "kinase inhibition profiling " * 300
        [score] = scores_for(
            trained.model, encode(trained, [(long_text, "measures kinase activity")])
        )
        assert 0.0 <= score <= 1.0


class TestLearnedSeparation:
    def test_held_out_positives_outscore_negatives_on_average(self, trained):
        held_out_true = [
            (f"{assay} replicate 99", statement)
            for assay, statement, label in TOY_TEXTS
            if label
        ]
        held_out_false = [
            (f"{assay} replicate 99", statement)
            for assay, statement, label in TOY_TEXTS
            if not label
        ]
        mean_true = sum(scores_for(trained.model, encode(trained, held_out_true))) / len(held_out_true)
        mean_false = sum(scores_for(trained.model, encode(trained, held_out_false))) / len(held_out_false)
        assert mean_true > mean_false
