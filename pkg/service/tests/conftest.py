"""Service test fixtures; importable helpers live in service_fixtures.py.

Also hosts the secondary acceptance reporter: tests wrap a criterion in
the `service_criterion` fixture and a terminal-summary hook prints one
PASS/FAIL line per criterion at the end of the run.
"""

from __future__ import annotations

from contextlib import contextmanager

import pytest
from fastapi.testclient import TestClient

from inference_service import TrainingRequest, create_app
from service_fixtures import SMALL_CONFIG, live_server, toy_pairs

# ---------------------------------------------------------------------------
# Secondary acceptance reporting

SECONDARY_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def service_criterion():
    """Record the enclosed block as one secondary acceptance criterion."""

    @contextmanager
    def runner(name: str):
        try:
            yield
        except BaseException as exc:
            SECONDARY_RESULTS.append((name, False, f"{type(exc).__name__}: {exc}"))
            raise
        else:
            SECONDARY_RESULTS.append((name, True, ""))

    return runner


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not SECONDARY_RESULTS:
        return
    terminalreporter.section("acceptance criteria (secondary)")
    for name, passed, detail in SECONDARY_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}: {name}"
        if detail:
            line += f" ({detail.splitlines()[0][:160]})"
        terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# Fixtures


@pytest.fixture(scope="session")
def toy_request() -> TrainingRequest:
    return TrainingRequest(pairs=toy_pairs(), epochs=1, learning_rate=1e-3, seed=7)


@pytest.fixture
def client(tmp_path) -> TestClient:
    """In-process API client over a fresh model directory."""
    return TestClient(create_app(tmp_path / "models", model_config=SMALL_CONFIG))


@pytest.fixture(scope="module")
def live_endpoint(tmp_path_factory):
    """Module-scoped live service URL over a throwaway model directory."""
    app = create_app(
        tmp_path_factory.mktemp("models"), model_config=SMALL_CONFIG
    )
    with live_server(app) as base_url:
        yield base_url
