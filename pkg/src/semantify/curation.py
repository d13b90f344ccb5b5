"""Curation backend: serve ranked suggestions, record approve/reject.

This is the interactive analog of the hit-and-miss simulation: a human
replaces the gold-membership check. The backend owns all session state
(keyed by session token and assay) so the browser UI stays a stateless
projection — a page reload rebuilds the identical view from the API.

Routes:
    GET  /healthz
    GET  /api/assays
    GET  /api/assays/{assay_id}/next?session=...
    POST /api/assays/{assay_id}/decision   {statement_id, decision, session}
    GET  /api/assays/{assay_id}/triples?session=...
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from ._version import __version__
from .corpus import Corpus
from .kg import export_triples, serialize_triples
from .scoring import Scorer, rank_statements

TITLE_LENGTH = 80


def assay_title(description: str) -> str:
    """Short display title: the first line, clipped."""
    first_line = description.splitlines()[0] if description else ""
    if len(first_line) <= TITLE_LENGTH:
        return first_line
    return first_line[: TITLE_LENGTH - 1].rstrip() + "…"


@dataclass
class SessionState:
    approved: set[int] = field(default_factory=set)
    rejected: set[int] = field(default_factory=set)
    log: list[dict] = field(default_factory=list)

    def decided(self, statement_id: int) -> bool:
        return statement_id in self.approved or statement_id in self.rejected


class DecisionRequest(BaseModel):
    statement_id: int
    decision: Literal["approve", "reject"]
    session: str


def create_curation_app(
    corpus: Corpus,
    scorer: Scorer,
    *,
    suggest_threshold: float | None = None,
) -> FastAPI:
    """Build the curation API over a corpus and a trained scorer.

    With ``suggest_threshold`` set, only statements scoring at or above
    it enter the suggestion stream; by default the stream is the full
    ranked vocabulary, exactly the simulated-operator protocol.
    """
    app = FastAPI(title="bioassay curation backend", version=__version__)
    vocab = corpus.vocabulary
    sessions: dict[tuple[str, str], SessionState] = {}
    rankings: dict[str, list[dict]] = {}
    lock = threading.Lock()

    def get_assay_or_404(assay_id: str):
        try:
            return corpus.assay(assay_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown assay id: {assay_id}")

    def ranking_for(assay_id: str) -> list[dict]:
        with lock:
            cached = rankings.get(assay_id)
        if cached is not None:
            return cached
        assay = corpus.assay(assay_id)
        ranked = rank_statements(scorer, assay, list(vocab))
        entries = []
        for statement, score in ranked:
            if suggest_threshold is not None and score < suggest_threshold:
                continue
            entries.append(
                {
                    "statement_id": vocab.index_of(statement),
                    "predicate": statement.predicate,
                    "object": statement.object,
                    "text": statement.text,
                    "score": score,
                }
            )
        with lock:
            rankings.setdefault(assay_id, entries)
        return entries

    def session_state(session: str, assay_id: str) -> SessionState:
        with lock:
            return sessions.setdefault((session, assay_id), SessionState())

    def next_payload(assay_id: str, session: str) -> dict:
        state = session_state(session, assay_id)
        suggestion = next(
            (
                entry
                for entry in ranking_for(assay_id)
                if not state.decided(entry["statement_id"])
            ),
            None,
        )
        return {
            "assay_id": assay_id,
            "session": session,
            "statement": suggestion,
            "done": suggestion is None,
            "decided": len(state.log),
            "approved": len(state.approved),
            "log": list(state.log),
        }

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "version": __version__, "role": "curation"}

    @app.get("/api/assays")
    def list_assays() -> dict:
        return {
            "assays": [
                {"id": assay.id, "title": assay_title(assay.description)}
                for assay, _ in corpus
            ]
        }

    @app.get("/api/assays/{assay_id}/next")
    def next_suggestion(assay_id: str, session: str = Query(default="default")) -> dict:
        get_assay_or_404(assay_id)
        return next_payload(assay_id, session)

    @app.post("/api/assays/{assay_id}/decision")
    def record_decision(assay_id: str, body: DecisionRequest) -> dict:
        get_assay_or_404(assay_id)
        if not 0 <= body.statement_id < len(vocab):
            raise HTTPException(
                status_code=404, detail=f"unknown statement id: {body.statement_id}"
            )
        state = session_state(body.session, assay_id)
        statement = vocab.statement(body.statement_id)
        entry = next(
            (e for e in ranking_for(assay_id) if e["statement_id"] == body.statement_id),
            None,
        )
        with lock:
            if state.decided(body.statement_id):
                raise HTTPException(
                    status_code=409,
                    detail=f"statement {body.statement_id} already decided in this session",
                )
            if body.decision == "approve":
                state.approved.add(body.statement_id)
            else:
                state.rejected.add(body.statement_id)
            state.log.append(
                {
                    "statement_id": body.statement_id,
                    "text": statement.text,
                    "decision": body.decision,
                    "score": entry["score"] if entry else None,
                }
            )
        return {
            "ok": True,
            "recorded": {"statement_id": body.statement_id, "decision": body.decision},
            "next": next_payload(assay_id, body.session),
        }

    @app.get("/api/assays/{assay_id}/triples")
    def curated_triples(assay_id: str, session: str = Query(default="default")) -> dict:
        assay = get_assay_or_404(assay_id)
        state = session_state(session, assay_id)
        statements = [vocab.statement(sid) for sid in sorted(state.approved)]
        tset = export_triples(assay, statements, provenance="curated")
        return {
            "assay_id": assay_id,
            "session": session,
            "subject": tset.subject,
            "triples": [
                {"subject": t.subject, "predicate": t.predicate, "object": t.object}
                for t in tset
            ],
            "file": serialize_triples(tset),
        }

    return app
