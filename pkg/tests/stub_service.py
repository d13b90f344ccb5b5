"""A tiny in-process stand-in for the scoring service, used by network tests.

The stub speaks just enough of the wire protocol to exercise the client:
deterministic hash-derived scores, per-path request counters, and a set of
switches that make it misbehave on demand (truncated score lists, values
outside the unit interval, transient 500s, a foreign protocol version).
"""

from __future__ import annotations

import hashlib
import json
import socket
import threading
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Iterator


def closed_port() -> int:
    """A port number nothing is listening on (grabbed, then released)."""
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def stub_score(model_id: str, assay_text: str, statement_text: str) -> float:
    """The deterministic score the stub assigns to one text pair."""
    digest = hashlib.sha256(
        "\x1f".join((model_id, assay_text, statement_text)).encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


@dataclass
class StubState:
    """Mutable knobs and counters shared between a test and the handler."""

    version: str = "1.0.0"
    requests: Counter = field(default_factory=Counter)
    bodies: list = field(default_factory=list)
    fail_next: int = 0
    short_scores: bool = False
    out_of_range: bool = False
    non_numeric: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)


class _StubHandler(BaseHTTPRequestHandler):
    state: StubState

    def log_message(self, *args):  # silence per-request stderr noise
        pass

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _count(self) -> None:
        with self.state.lock:
            self.state.requests[self.path.split("?")[0]] += 1

    def _should_fail(self) -> bool:
        with self.state.lock:
            if self.state.fail_next > 0:
                self.state.fail_next -= 1
                return True
        return False

    def do_GET(self) -> None:
        self._count()
        if self.path == "/healthz":
            self._send(200, {"status": "ok", "version": self.state.version})
        else:
            self._send(404, {"detail": "not found"})

    def do_POST(self) -> None:
        self._count()
        if self._should_fail():
            self._send(500, {"detail": "synthetic outage"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length).decode("utf-8"))
        with self.state.lock:
            self.state.bodies.append((self.path, body))
        if self.path == "/v1/train":
            pairs = body["pairs"]
            if not pairs:
                self._send(400, {"detail": "empty training set"})
                return
            seed = body.get("hyperparams", {}).get("seed", 0)
            fingerprint = hashlib.sha256(
                json.dumps([p["assay_text"] for p in pairs]).encode()
            ).hexdigest()[:12]
            self._send(200, {"model_id": f"stub-{seed}-{fingerprint}"})
        elif self.path == "/v1/score":
            scores = [
                stub_score(body["model_id"], p["assay_text"], p["statement_text"])
                for p in body["pairs"]
            ]
            if self.state.short_scores and scores:
                scores = scores[:-1]
            if self.state.out_of_range and scores:
                scores[0] = 1.5
            if self.state.non_numeric and scores:
                scores[0] = "high"
            self._send(200, {"scores": scores})
        else:
            self._send(404, {"detail": "not found"})


@contextmanager
def run_stub(**overrides) -> Iterator[tuple[str, StubState]]:
    """Serve the stub on an ephemeral port; yield (base_url, state)."""
    state = StubState(**overrides)
    handler = type("Handler", (_StubHandler,), {"state": state})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(
        target=lambda: server.serve_forever(poll_interval=0.02), daemon=True
    )
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_address[1]}", state
    finally:
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)
