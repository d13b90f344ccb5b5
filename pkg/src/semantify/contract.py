"""Shared contract checks for the scoring-service wire protocol.

Both sides of the wire run this exact suite: the client package runs it
against a stub server, and the real inference service runs it against
itself. Each check raises ContractViolation with a readable message on
failure; run_contract_checks collects results for reporting.

The checks exercise the client code paths (remote_train, remote_score,
health_check), so a passing run certifies field names, score-vector
length, value range, and order preservation end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .errors import RemoteServiceError
from .pairs import LabeledPair
from .remote import (
    RemoteModelHandle,
    ServiceEndpoint,
    TrainingHyperparams,
    health_check,
    remote_score,
    remote_train,
)


class ContractViolation(AssertionError):
    """A service response broke the wire-protocol contract."""


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ContractViolation(message)


# A tiny, fully deterministic training set: four assay texts with
# strongly word-correlated true statements and mismatched false ones.
_FIXTURE_TEXTS = {
    ("a-kinase", 0): ("kinase inhibition profiling in buffer", "measures kinase activity"),
    ("a-kinase", 1): ("kinase inhibition profiling in buffer", "uses live zebrafish embryos"),
    ("b-cell", 0): ("cell viability screen on tumor lines", "measures cell viability"),
    ("b-cell", 1): ("cell viability screen on tumor lines", "uses purified kinase protein"),
    ("c-binding", 0): ("radioligand binding displacement test", "measures binding affinity"),
    ("c-binding", 1): ("radioligand binding displacement test", "uses reporter gene readout"),
    ("d-reporter", 0): ("luciferase reporter gene activation", "uses reporter gene readout"),
    ("d-reporter", 1): ("luciferase reporter gene activation", "measures binding affinity"),
}


def fixture_pairs() -> tuple[list[LabeledPair], Callable[[LabeledPair], tuple[str, str]]]:
    """Deterministic labeled pairs plus their text resolver."""
    pairs = [
        LabeledPair(assay_id, statement_id, statement_id == 0)
        for assay_id, statement_id in sorted(_FIXTURE_TEXTS)
    ]

    def resolve(pair: LabeledPair) -> tuple[str, str]:
        return _FIXTURE_TEXTS[(pair.assay_id, pair.statement_id)]

    return pairs, resolve


_PROBE_PAIRS = [
    ("kinase inhibition profiling in buffer", "measures kinase activity"),
    ("cell viability screen on tumor lines", "uses live zebrafish embryos"),
    ("luciferase reporter gene activation", "uses reporter gene readout"),
]


def check_health(endpoint: ServiceEndpoint) -> None:
    """GET /healthz: reachable, reports a status and a version."""
    status = health_check(endpoint)
    _expect(status.reachable, f"service not reachable: {status.warning}")
    _expect(status.version is not None, "health response carries no version")
    _expect(status.warning is None, f"health warning: {status.warning}")


def check_train(endpoint: ServiceEndpoint) -> RemoteModelHandle:
    """POST /v1/train on the fixture issues a usable model id."""
    pairs, resolve = fixture_pairs()
    handle = remote_train(
        endpoint, pairs, resolve, TrainingHyperparams(epochs=1, seed=7)
    )
    _expect(bool(handle.model_id), "train response returned an empty model id")
    return handle


def check_score_shape(endpoint: ServiceEndpoint, handle: RemoteModelHandle) -> None:
    """Score vector matches the batch: one score per pair, all in [0, 1]."""
    scores = remote_score(endpoint, handle, _PROBE_PAIRS)
    _expect(len(scores) == len(_PROBE_PAIRS), f"expected 3 scores, got {len(scores)}")
    for value in scores:
        _expect(0.0 <= value <= 1.0, f"score out of range: {value}")
    _expect(remote_score(endpoint, handle, []) == [], "empty batch must score to []")


def check_score_order(endpoint: ServiceEndpoint, handle: RemoteModelHandle) -> None:
    """Scores follow input order and do not depend on batch position."""
    forward = remote_score(endpoint, handle, _PROBE_PAIRS)
    backward = remote_score(endpoint, handle, list(reversed(_PROBE_PAIRS)))
    _expect(
        forward == list(reversed(backward)),
        f"scores depend on batch order: {forward} vs reversed {backward}",
    )


def check_score_determinism(endpoint: ServiceEndpoint, handle: RemoteModelHandle) -> None:
    """The same pair scores identically on repeated calls."""
    first = remote_score(endpoint, handle, _PROBE_PAIRS[:1])
    second = remote_score(endpoint, handle, _PROBE_PAIRS[:1])
    _expect(first == second, f"inference is not deterministic: {first} vs {second}")


def check_chunking(endpoint: ServiceEndpoint, handle: RemoteModelHandle) -> None:
    """Chunked transport is invisible: tiny chunks give identical scores."""
    batch = _PROBE_PAIRS * 3
    whole = remote_score(endpoint, handle, batch)
    chunked = remote_score(endpoint, handle, batch, chunk_size=2)
    _expect(len(whole) == len(batch), "full batch score count mismatch")
    _expect(whole == chunked, "chunk size changed the scores")


@dataclass(frozen=True)
class ContractResult:
    name: str
    passed: bool
    detail: str = ""


_CHECK_FAILURES = (ContractViolation, RemoteServiceError)


def run_contract_checks(endpoint: ServiceEndpoint) -> list[ContractResult]:
    """Run the whole suite in order; later checks reuse the trained model.

    A transport or protocol error inside a check counts as that check
    failing — the point of the suite is to report misbehavior, not to
    crash on it.
    """
    try:
        check_health(endpoint)
    except _CHECK_FAILURES as exc:
        return [ContractResult("health", False, str(exc))]
    results = [ContractResult("health", True)]
    try:
        handle = check_train(endpoint)
        results.append(ContractResult("train", True))
    except _CHECK_FAILURES as exc:
        results.append(ContractResult("train", False, str(exc)))
        return results
    for name, check in (
        ("score-shape", check_score_shape),
        ("score-order", check_score_order),
        ("score-determinism", check_score_determinism),
        ("score-chunking", check_chunking),
    ):
        try:
            check(endpoint, handle)
            results.append(ContractResult(name, True))
        except _CHECK_FAILURES as exc:
            results.append(ContractResult(name, False, str(exc)))
    return results
