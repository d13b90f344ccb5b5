"""Triple export and cross-assay comparison tables.

Semantified assays become (subject, predicate, object) triples whose
subject is always ``bioassay:<id>``. Serialization is a deliberately
plain three-column tab-separated format with backslash escaping — easy
to diff, easy to parse, no RDF machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Bioassay, SemanticStatement
from .errors import CorpusFormatError

PROVENANCE_TAGS = ("gold", "predicted", "curated")

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def subject_for(assay_id: str) -> str:
    return f"bioassay:{assay_id}"


def escape_field(value: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in value)


def unescape_field(value: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            if i + 1 >= len(value) or value[i + 1] not in _UNESCAPES:
                raise CorpusFormatError(f"bad escape sequence in field: {value!r}")
            out.append(_UNESCAPES[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: str
    provenance: str = "gold"

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(
                f"provenance must be one of {PROVENANCE_TAGS}, got {self.provenance!r}"
            )

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.predicate, self.object)


@dataclass(frozen=True)
class TripleSet:
    """All triples for one assay; constant subject, no duplicates.

    Triples are stored sorted by (predicate, object) so equal sets
    compare equal regardless of construction order.
    """

    assay_id: str
    triples: tuple[Triple, ...] = field(default=())

    def __post_init__(self) -> None:
        subject = subject_for(self.assay_id)
        for triple in self.triples:
            if triple.subject != subject:
                raise ValueError(
                    f"triple subject {triple.subject!r} does not match set subject {subject!r}"
                )
        keys = [t.sort_key for t in self.triples]
        if len(set(keys)) != len(keys):
            raise ValueError(f"duplicate triples in set for assay {self.assay_id}")
        ordered = tuple(sorted(self.triples, key=lambda t: t.sort_key))
        object.__setattr__(self, "triples", ordered)

    @property
    def subject(self) -> str:
        return subject_for(self.assay_id)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self):
        return iter(self.triples)

    def predicates(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for triple in self.triples:
            seen.setdefault(triple.predicate, None)
        return tuple(seen)

    def objects_for(self, predicate: str) -> tuple[str, ...]:
        return tuple(t.object for t in self.triples if t.predicate == predicate)


def export_triples(
    assay: Bioassay | str,
    statements: Iterable[SemanticStatement],
    provenance: str = "gold",
) -> TripleSet:
    """Build the TripleSet for one assay from its semantic statements.

    Input order does not matter; the resulting set is sorted.
    """
    assay_id = assay.id if isinstance(assay, Bioassay) else assay
    subject = subject_for(assay_id)
    unique = {s.key: s for s in statements}
    triples = tuple(
        Triple(subject, s.predicate, s.object, provenance) for s in unique.values()
    )
    return TripleSet(assay_id, triples)


def serialize_triples(tset: TripleSet) -> str:
    """Render a TripleSet in the three-column triple file format.

    Header comments carry the subject; a ``# provenance:`` comment
    applies to every data line until the next such comment, so mixed
    provenance survives a round-trip.
    """
    lines = [f"# subject: {tset.subject}"]
    current_provenance: str | None = None
    for triple in tset.triples:
        if triple.provenance != current_provenance:
            lines.append(f"# provenance: {triple.provenance}")
            current_provenance = triple.provenance
        lines.append(
            "\t".join(
                (
                    escape_field(triple.subject),
                    escape_field(triple.predicate),
                    escape_field(triple.object),
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_triples(text: str) -> TripleSet:
    """Inverse of :func:`serialize_triples`."""
    assay_id: str | None = None
    provenance = "gold"
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            comment = line.lstrip("#").strip()
            if comment.startswith("subject:"):
                subject = comment[len("subject:"):].strip()
                if not subject.startswith("bioassay:"):
                    raise CorpusFormatError(
                        f"line {lineno}: subject must start with 'bioassay:', got {subject!r}"
                    )
                assay_id = subject[len("bioassay:"):]
            elif comment.startswith("provenance:"):
                provenance = comment[len("provenance:"):].strip()
            continue
        columns = line.split("\t")
        if len(columns) != 3:
            raise CorpusFormatError(
                f"line {lineno}: expected 3 tab-separated columns, got {len(columns)}"
            )
        subject, predicate, obj = (unescape_field(c) for c in columns)
        triples.append(Triple(subject, predicate, obj, provenance))
    if assay_id is None:
        if not triples:
            raise CorpusFormatError("triple file has no subject header")
        assay_id = triples[0].subject.split(":", 1)[1]
    return TripleSet(assay_id, tuple(triples))


def write_triples(tset: TripleSet, path: str | Path) -> None:
    Path(path).write_text(serialize_triples(tset), encoding="utf-8")


def read_triples(path: str | Path) -> TripleSet:
    return parse_triples(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ComparisonTable:
    """Predicates × assays grid of object values (the survey-style view).

    ``cells[i][j]`` holds the ordered object values of ``predicates[i]``
    for ``assay_ids[j]``; an empty tuple means the assay lacks that
    predicate.
    """

    assay_ids: tuple[str, ...]
    predicates: tuple[str, ...]
    cells: tuple[tuple[tuple[str, ...], ...], ...]

    def cell(self, predicate: str, assay_id: str) -> tuple[str, ...]:
        return self.cells[self.predicates.index(predicate)][self.assay_ids.index(assay_id)]

    def to_tsv(self) -> str:
        header = "\t".join(["predicate"] + [escape_field(a) for a in self.assay_ids])
        lines = [header]
        for predicate, row in zip(self.predicates, self.cells):
            rendered = [
                "; ".join(escape_field(v) for v in values) for values in row
            ]
            lines.append("\t".join([escape_field(predicate)] + rendered))
        return "\n".join(lines) + "\n"

    def format_text(self) -> str:
        """Aligned plain-text table for terminals."""
        header = ["predicate"] + list(self.assay_ids)
        rows = [header]
        for predicate, row in zip(self.predicates, self.cells):
            rows.append([predicate] + ["; ".join(values) or "-" for values in row])
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def compare_assays(triple_sets: Sequence[TripleSet]) -> ComparisonTable:
    """Join triple sets into a predicate-by-assay comparison table.

    Requires at least two sets; a comparison of one assay is just its
    triple file.
    """
    if len(triple_sets) < 2:
        raise ValueError("comparison requires at least 2 triple sets")
    ids = [t.assay_id for t in triple_sets]
    if len(set(ids)) != len(ids):
        raise ValueError("comparison inputs contain duplicate assay ids")
    predicates = sorted({p for tset in triple_sets for p in tset.predicates()})
    cells = tuple(
        tuple(tset.objects_for(predicate) for tset in triple_sets)
        for predicate in predicates
    )
    return ComparisonTable(tuple(ids), tuple(predicates), cells)
