"""Service version, reported by /healthz.

The major component is the wire-protocol major version: clients accept
major 1 without warning, so this stays 1.x.y until the protocol breaks.
"""

__version__ = "1.0.0"
