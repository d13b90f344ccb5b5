"""Shared fixtures: hand-built corpora, scorer stand-ins, random corpora.

Importable helpers (corpus builders, scorer stand-ins) live in
corpus_fixtures.py; this file only declares fixtures and hooks.

Also hosts the acceptance-criteria reporter: tests in
test_acceptance.py wrap each criterion in the `criterion` fixture, and
a terminal-summary hook prints one PASS/FAIL line per criterion at the
end of the run regardless of output capturing.
"""

from __future__ import annotations

from contextlib import contextmanager

import pytest

from corpus_fixtures import (
    ConstantScorer,
    OracleScorer,
    TableScorer,
    make_random_corpus,
    stmt,
)
from semantify.corpus import Bioassay, Corpus, SemanticStatement

# ---------------------------------------------------------------------------
# Acceptance reporting

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record the enclosed block as one acceptance criterion."""

    @contextmanager
    def runner(name: str):
        try:
            yield
        except BaseException as exc:
            ACCEPTANCE_RESULTS.append((name, False, f"{type(exc).__name__}: {exc}"))
            raise
        else:
            ACCEPTANCE_RESULTS.append((name, True, ""))

    return runner


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}: {name}"
        if detail:
            line += f" ({detail.splitlines()[0][:160]})"
        terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# Corpus fixtures


@pytest.fixture
def random_corpus_factory():
    return make_random_corpus


@pytest.fixture
def tiny_corpus() -> Corpus:
    """Three assays with annotation lengths 2, 3, 4 over six statements."""
    s = [
        stmt("has assay format", "biochemical format"),
        stmt("has assay format", "cell-based format"),
        stmt("has assay measurement type", "endpoint assay"),
        stmt("has assay measurement type", "kinetic assay"),
        stmt("has detection method", "luminescence"),
        stmt("has detection method", "fluorescence"),
    ]
    return Corpus.build(
        [
            (Bioassay("t1", "biochemical endpoint readout"), [s[0], s[2]]),
            (Bioassay("t2", "cell-based kinetic fluorescence screen"), [s[1], s[3], s[5]]),
            (
                Bioassay("t3", "biochemical endpoint luminescence and fluorescence"),
                [s[0], s[2], s[4], s[5]],
            ),
        ]
    )


@pytest.fixture
def six_corpus() -> Corpus:
    """Six assays whose descriptions carry their statements' tokens."""
    fmt_bio = stmt("has assay format", "biochemical format")
    fmt_cell = stmt("has assay format", "cell-based format")
    meas_end = stmt("has assay measurement type", "endpoint assay")
    meas_kin = stmt("has assay measurement type", "kinetic assay")
    det_lum = stmt("has detection method", "luminescence")
    det_flu = stmt("has detection method", "fluorescence")
    return Corpus.build(
        [
            (
                Bioassay("a1", "biochemical endpoint assay with luminescence readout"),
                [fmt_bio, meas_end, det_lum],
            ),
            (
                Bioassay("a2", "cell-based kinetic assay using fluorescence"),
                [fmt_cell, meas_kin, det_flu],
            ),
            (
                Bioassay("a3", "biochemical endpoint assay measured by fluorescence"),
                [fmt_bio, meas_end, det_flu],
            ),
            (
                Bioassay("a4", "cell-based endpoint assay with luminescence"),
                [fmt_cell, meas_end, det_lum],
            ),
            (Bioassay("a5", "biochemical kinetic assay"), [fmt_bio, meas_kin]),
            (
                Bioassay("a6", "cell-based endpoint fluorescence assay"),
                [fmt_cell, meas_end, det_flu],
            ),
        ]
    )


@pytest.fixture
def aid346_statements() -> list[SemanticStatement]:
    return [
        stmt("has assay format", "biochemical format"),
        stmt("has assay format", "protein format"),
        stmt("has assay format", "single protein format"),
        stmt("has assay measurement type", "endpoint assay"),
    ]


@pytest.fixture
def aid346_corpus(aid346_statements) -> Corpus:
    """AID-346-style fixture plus two neighbors for comparison tables."""
    extra = [
        stmt("has assay format", "cell-based format"),
        stmt("has detection method", "fluorescence"),
        stmt("has assay measurement type", "kinetic assay"),
    ]
    return Corpus.build(
        [
            (
                Bioassay(
                    "346",
                    "single protein biochemical assay measuring endpoint inhibition "
                    "of a purified enzyme",
                ),
                aid346_statements,
            ),
            (
                Bioassay("347", "cell-based fluorescence readout"),
                [extra[0], extra[1]],
            ),
            (
                Bioassay("348", "kinetic biochemical profiling"),
                [aid346_statements[0], extra[2]],
            ),
        ]
    )


# ---------------------------------------------------------------------------
# Scorer fixtures


@pytest.fixture
def oracle_scorer_for():
    return OracleScorer


@pytest.fixture
def table_scorer():
    return TableScorer


@pytest.fixture
def constant_scorer():
    return ConstantScorer
