"""Deterministic seed fan-out.

All randomness in a run flows from one master seed. Sub-seeds for named
purposes (fold split, per-assay negative sampling, shuffling) are derived
by hashing the master seed together with the purpose labels, so every
consumer gets an independent, reproducible stream and no consumer's draw
depends on iteration order elsewhere.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *labels: object) -> int:
    """Derive a 64-bit sub-seed from a master seed and a label path."""
    h = hashlib.sha256()
    h.update(str(int(master)).encode("ascii"))
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "big")
