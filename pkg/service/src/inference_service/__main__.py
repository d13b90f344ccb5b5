"""Command-line launcher: ``semantify-inference --port 8900``."""

from __future__ import annotations

import argparse

import uvicorn

from ._version import __version__
from .app import create_app
from .model import ModelConfig
from .training import DEFAULT_BATCH_SIZE


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="semantify-inference",
        description="Sentence-pair scoring service for bioassay semantification",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8900)
    parser.add_argument(
        "--model-dir", default="models", help="where trained models are stored"
    )
    parser.add_argument(
        "--batch-size", type=int, default=DEFAULT_BATCH_SIZE,
        help="training batch size",
    )
    parser.add_argument(
        "--checkpoint", default=None,
        help="optional state-dict path to warm-start new trainings from",
    )
    args = parser.parse_args(argv)
    app = create_app(
        args.model_dir,
        model_config=ModelConfig(checkpoint=args.checkpoint),
        batch_size=args.batch_size,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
