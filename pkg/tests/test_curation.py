import pytest
from fastapi.testclient import TestClient

from semantify.corpus import Corpus
from semantify.curation import assay_title, create_curation_app
from semantify.evaluation import hit_and_miss
from semantify.kg import export_triples, serialize_triples
from semantify.pairs import SamplingConfig, build_training_set
from semantify.scoring import FrequencyScorer

from corpus_fixtures import OracleScorer


@pytest.fixture
def oracle_client(six_corpus):
    app = create_curation_app(six_corpus, OracleScorer(six_corpus))
    with TestClient(app) as client:
        yield client


@pytest.fixture
def suggesting_client(six_corpus):
    """Only statements at or above 0.5 are offered: the oracle's gold set."""
    app = create_curation_app(
        six_corpus, OracleScorer(six_corpus), suggest_threshold=0.5
    )
    with TestClient(app) as client:
        yield client


def decide(client, assay_id, statement_id, decision, session="default"):
    return client.post(
        f"/api/assays/{assay_id}/decision",
        json={"statement_id": statement_id, "decision": decision, "session": session},
    )


def drain(client, assay_id, choose, session="default"):
    """Walk the queue to exhaustion; returns the (statement_id, decision) log."""
    taken = []
    while True:
        payload = client.get(
            f"/api/assays/{assay_id}/next", params={"session": session}
        ).json()
        if payload["statement"] is None:
            assert payload["done"]
            return taken
        statement = payload["statement"]
        decision = choose(statement)
        response = decide(client, assay_id, statement["statement_id"], decision, session)
        assert response.status_code == 200
        taken.append((statement["statement_id"], decision))


class TestBasics:
    def test_healthz(self, oracle_client):
        body = oracle_client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["role"] == "curation"
        assert body["version"]

    def test_assay_listing(self, oracle_client, six_corpus):
        body = oracle_client.get("/api/assays").json()
        ids = [a["id"] for a in body["assays"]]
        assert ids == list(six_corpus.ids())
        titles = {a["id"]: a["title"] for a in body["assays"]}
        assert titles["a1"] == assay_title(six_corpus.assay("a1").description)

    def test_title_clipping(self):
        assert assay_title("short description") == "short description"
        assert assay_title("first line\nsecond line") == "first line"
        long = "x" * 200
        clipped = assay_title(long)
        assert len(clipped) <= 81 and clipped.endswith("…")

    def test_next_offers_top_ranked_statement(self, oracle_client, six_corpus):
        payload = oracle_client.get("/api/assays/a1/next").json()
        statement = payload["statement"]
        gold_texts = {s.text for s in six_corpus.gold_statements("a1")}
        assert statement["text"] in gold_texts
        assert statement["score"] == 1.0
        # ties broken by statement text, so the first gold one alphabetically
        assert statement["text"] == min(gold_texts)

    def test_unknown_assay_404(self, oracle_client):
        assert oracle_client.get("/api/assays/nope/next").status_code == 404
        assert decide(oracle_client, "nope", 0, "approve").status_code == 404

    def test_unknown_statement_404(self, oracle_client):
        assert decide(oracle_client, "a1", 10_000, "approve").status_code == 404

    def test_bad_decision_value_422(self, oracle_client):
        payload = oracle_client.get("/api/assays/a1/next").json()
        sid = payload["statement"]["statement_id"]
        response = oracle_client.post(
            "/api/assays/a1/decision",
            json={"statement_id": sid, "decision": "maybe", "session": "default"},
        )
        assert response.status_code == 422


class TestDecisionFlow:
    def test_decision_advances_queue(self, oracle_client):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        response = decide(oracle_client, "a1", first["statement_id"], "approve")
        body = response.json()
        assert body["ok"]
        assert body["recorded"]["statement_id"] == first["statement_id"]
        following = body["next"]["statement"]
        assert following["statement_id"] != first["statement_id"]

    def test_duplicate_decision_409(self, oracle_client):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        assert decide(oracle_client, "a1", first["statement_id"], "approve").status_code == 200
        assert decide(oracle_client, "a1", first["statement_id"], "reject").status_code == 409

    def test_decided_statement_never_reoffered(self, oracle_client, six_corpus):
        seen = drain(oracle_client, "a1", lambda s: "approve")
        offered = [sid for sid, _ in seen]
        assert len(offered) == len(set(offered))
        assert len(offered) == len(six_corpus.vocabulary)

    def test_sessions_are_isolated(self, oracle_client):
        first = oracle_client.get(
            "/api/assays/a1/next", params={"session": "alice"}
        ).json()["statement"]
        decide(oracle_client, "a1", first["statement_id"], "approve", session="alice")
        bob = oracle_client.get(
            "/api/assays/a1/next", params={"session": "bob"}
        ).json()
        assert bob["statement"]["statement_id"] == first["statement_id"]
        assert bob["decided"] == 0

    def test_assays_are_isolated(self, oracle_client):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        decide(oracle_client, "a1", first["statement_id"], "approve")
        other = oracle_client.get("/api/assays/a2/next").json()
        assert other["decided"] == 0

    def test_refresh_rebuilds_from_log(self, oracle_client):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        decide(oracle_client, "a1", first["statement_id"], "approve")
        second = oracle_client.get("/api/assays/a1/next").json()["statement"]
        decide(oracle_client, "a1", second["statement_id"], "reject")
        # a fresh GET (new tab, reload) reports everything decided so far
        refreshed = oracle_client.get("/api/assays/a1/next").json()
        assert refreshed["decided"] == 2
        assert refreshed["approved"] == 1
        assert [(e["statement_id"], e["decision"]) for e in refreshed["log"]] == [
            (first["statement_id"], "approve"),
            (second["statement_id"], "reject"),
        ]


class TestTriplesExport:
    def test_approve_all_suggestions_recovers_gold(self, suggesting_client, six_corpus):
        for assay_id in six_corpus.ids():
            taken = drain(suggesting_client, assay_id, lambda s: "approve")
            assert len(taken) == len(six_corpus.gold_ids(assay_id))
            body = suggesting_client.get(f"/api/assays/{assay_id}/triples").json()
            expected = export_triples(
                six_corpus.assay(assay_id),
                six_corpus.gold_statements(assay_id),
                provenance="curated",
            )
            assert body["subject"] == expected.subject
            got = {(t["predicate"], t["object"]) for t in body["triples"]}
            assert got == {(t.predicate, t.object) for t in expected}
            assert body["file"] == serialize_triples(expected)

    def test_rejected_statements_stay_out(self, oracle_client, six_corpus):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        decide(oracle_client, "a1", first["statement_id"], "reject")
        body = oracle_client.get("/api/assays/a1/triples").json()
        assert body["triples"] == []

    def test_export_is_session_scoped(self, oracle_client):
        first = oracle_client.get("/api/assays/a1/next").json()["statement"]
        decide(oracle_client, "a1", first["statement_id"], "approve", session="alice")
        alice = oracle_client.get(
            "/api/assays/a1/triples", params={"session": "alice"}
        ).json()
        fresh = oracle_client.get(
            "/api/assays/a1/triples", params={"session": "carol"}
        ).json()
        assert len(alice["triples"]) == 1
        assert fresh["triples"] == []


class TestReplayMatchesEvaluation:
    def test_scripted_curation_replays_ranking_walk(self, six_corpus):
        scorer = FrequencyScorer()
        scorer.train(
            build_training_set(six_corpus, SamplingConfig(false_per_assay=2, seed=3)),
            six_corpus,
        )
        app = create_curation_app(six_corpus, scorer)
        gold = set(six_corpus.gold_statements("a1"))
        candidates = list(six_corpus.vocabulary)
        trace = hit_and_miss(scorer, six_corpus.assay("a1"), gold, candidates)

        with TestClient(app) as client:

            def choose(statement):
                key = (statement["predicate"], statement["object"])
                return "approve" if any(s.key == key for s in gold) else "reject"

            taken = drain(client, "a1", choose)

        decisions = [
            "hit" if decision == "approve" else "miss" for _, decision in taken
        ]
        # the curator sees the same ranked walk the evaluation traced,
        # which stops once every gold statement has been found
        assert decisions[: len(trace.marks)] == list(trace.marks)
        assert decisions.count("hit") == len(gold)
        assert all(mark == "miss" for mark in decisions[len(trace.marks) :])
