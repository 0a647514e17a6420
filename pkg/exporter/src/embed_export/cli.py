"""Command line: encode a TSV corpus into an embedding-store directory.

Exit codes: 0 success, 1 corpus/encoder problem, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ExportError
from .exporter import export_embeddings


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export", description=__doc__.splitlines()[0]
    )
    parser.add_argument("--corpus", required=True, help="TSV file: <docid>\\t<text>")
    parser.add_argument(
        "--model",
        required=True,
        help="encoder name: hashing/<dim>, a sentence-transformers or HF checkpoint",
    )
    parser.add_argument("--out", required=True, help="output store directory")
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--pooling", choices=["mean", "cls"], default="mean")
    parser.add_argument("--max-length", type=int, default=None)
    parser.add_argument("--device", default=None, help="pass-through device selection")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        summary = export_embeddings(
            corpus_path=args.corpus,
            encoder_name=args.model,
            out_dir=args.out,
            batch_size=args.batch_size,
            pooling=args.pooling,
            max_length=args.max_length,
            device=args.device,
        )
    except ExportError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        line = getattr(exc, "line_number", None)
        if line is not None:
            payload["line_number"] = line
        print(json.dumps(payload), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 3
    print(
        json.dumps(
            {
                "out": str(summary.out_dir),
                "count": summary.count,
                "dim": summary.dim,
                "encoder": summary.encoder,
                "pooling": summary.pooling,
                "truncated": summary.truncated,
            }
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
