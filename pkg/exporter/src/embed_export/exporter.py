"""Batched corpus encoding into the on-disk embedding-store layout.

The output directory follows the consumer toolkit's documented contract
bit for bit:

- ``meta.json``    JSON object with integer ``dim`` and ``count``, the
                   ``encoder`` name, the ``pooling`` actually applied and a
                   ``truncated`` document count.
- ``ids.tsv``      one doc-id per line, corpus order.
- ``vectors.f32``  count*dim*4 bytes, float32 little-endian, row-major,
                   row i belonging to ids line i.

Rows are written strictly in corpus order regardless of batching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import read_corpus
from .encoders import resolve_encoder
from .errors import ExportError

META_FILE = "meta.json"
IDS_FILE = "ids.tsv"
VECTORS_FILE = "vectors.f32"


@dataclass(frozen=True)
class ExportSummary:
    out_dir: Path
    count: int
    dim: int
    encoder: str
    pooling: str
    truncated: int


def export_embeddings(
    corpus_path: str | Path,
    encoder_name: str,
    out_dir: str | Path,
    batch_size: int = 32,
    pooling: str = "mean",
    max_length: int | None = None,
    device: str | None = None,
) -> ExportSummary:
    """Encode every corpus row and write a loadable store directory."""
    if batch_size < 1:
        raise ExportError(f"batch_size must be >= 1, got {batch_size}")
    rows = read_corpus(corpus_path)
    encoder = resolve_encoder(encoder_name, pooling=pooling, max_length=max_length, device=device)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ids = [doc_id for doc_id, _ in rows]
    texts = [text for _, text in rows]

    with open(out_dir / VECTORS_FILE, "wb") as payload:
        written = 0
        for start in range(0, len(texts), batch_size):
            batch = encoder.encode(texts[start : start + batch_size])
            batch = np.ascontiguousarray(batch, dtype="<f4")
            if batch.ndim != 2 or batch.shape[1] != encoder.dim:
                raise ExportError(
                    f"encoder returned shape {batch.shape}, expected (n, {encoder.dim})"
                )
            if not np.isfinite(batch).all():
                bad = ids[start + int(np.flatnonzero(~np.isfinite(batch).all(axis=1))[0])]
                raise ExportError(f"encoder produced a non-finite component for doc {bad!r}")
            payload.write(batch.tobytes(order="C"))
            written += batch.shape[0]
    if written != len(ids):
        raise ExportError(f"encoded {written} rows for {len(ids)} documents")

    (out_dir / IDS_FILE).write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")
    meta = {
        "dim": int(encoder.dim),
        "count": len(ids),
        "encoder": encoder_name,
        "pooling": encoder.pooling,
        "truncated": int(encoder.truncated),
    }
    (out_dir / META_FILE).write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return ExportSummary(
        out_dir=out_dir,
        count=len(ids),
        dim=int(encoder.dim),
        encoder=encoder_name,
        pooling=encoder.pooling,
        truncated=int(encoder.truncated),
    )
