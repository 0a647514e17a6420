"""On-disk document-embedding store.

A store directory holds three files:

- ``meta.json``    UTF-8 JSON with integer ``dim`` and ``count`` plus a
                   free-form ``encoder`` provenance string (extra keys kept).
- ``ids.tsv``      one doc-id per line, exactly ``count`` lines; line i
                   labels row i of the vector payload.
- ``vectors.f32``  exactly count*dim*4 bytes of little-endian IEEE-754
                   float32, row-major.

Vectors are stored float32 and promoted to float64 when gathered, so all
downstream covariance work runs in double precision. A loaded store is
immutable; concurrent gathers are safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = ["EmbeddingStore", "load_store", "write_store", "gather"]

META_FILE = "meta.json"
IDS_FILE = "ids.tsv"
VECTORS_FILE = "vectors.f32"


@dataclass(frozen=True)
class EmbeddingStore:
    """Lookup table from doc-id to a p-dimensional embedding row."""

    dim: int
    count: int
    encoder: str
    ids: tuple[str, ...]
    matrix: np.ndarray  # (count, dim) float32, read-only
    meta: dict = field(default_factory=dict)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._index

    def __len__(self) -> int:
        return self.count

    def vector(self, doc_id: str) -> np.ndarray:
        """Float64 copy of one document's embedding; KeyError if absent."""
        return self.matrix[self._index[doc_id]].astype(np.float64)

    def row_indices(self, doc_ids: list[str]) -> tuple[np.ndarray, list[str]]:
        """Store-row index for each present id (input order) plus missing ids."""
        rows: list[int] = []
        missing: list[str] = []
        index = self._index
        for doc_id in doc_ids:
            row = index.get(doc_id)
            if row is None:
                missing.append(doc_id)
            else:
                rows.append(row)
        return np.asarray(rows, dtype=np.int64), missing

    def gather(self, doc_ids: list[str]) -> tuple[np.ndarray, list[str]]:
        """Stack embeddings for `doc_ids` into an (n, dim) float64 matrix.

        Rows follow the input order with absent ids skipped; the second
        return value lists every absent id, preserving order. Missing ids
        are reported, never fatal; callers decide the policy.
        """
        rows, missing = self.row_indices(doc_ids)
        return self.matrix[rows].astype(np.float64), missing


def gather(store: EmbeddingStore, doc_ids: list[str]) -> tuple[np.ndarray, list[str]]:
    return store.gather(doc_ids)


def load_store(directory: str | Path) -> EmbeddingStore:
    """Load and fully validate a store directory.

    Raises FileNotFoundError for missing files and ValidationError for any
    meta/payload inconsistency, duplicate id, or non-finite component.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"embedding store directory not found: {directory}")
    for name in (META_FILE, IDS_FILE, VECTORS_FILE):
        if not (directory / name).is_file():
            raise FileNotFoundError(f"embedding store is missing {name}: {directory}")

    try:
        meta = json.loads((directory / META_FILE).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{META_FILE} is not valid JSON: {exc}") from exc
    if not isinstance(meta, dict):
        raise ValidationError(f"{META_FILE} must hold a JSON object")
    dim = meta.get("dim")
    count = meta.get("count")
    encoder = meta.get("encoder")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValidationError(f"meta field 'dim' must be a positive integer, got {dim!r}")
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise ValidationError(f"meta field 'count' must be a non-negative integer, got {count!r}")
    if not isinstance(encoder, str):
        raise ValidationError(f"meta field 'encoder' must be a string, got {encoder!r}")

    ids_text = (directory / IDS_FILE).read_text(encoding="utf-8")
    id_lines = ids_text.splitlines()
    if len(id_lines) != count:
        raise ValidationError(
            f"{IDS_FILE} has {len(id_lines)} lines but meta declares count={count}"
        )
    ids: list[str] = []
    index: dict[str, int] = {}
    for i, line in enumerate(id_lines):
        doc_id = line.strip()
        if not doc_id or any(c.isspace() for c in doc_id):
            raise ValidationError(f"{IDS_FILE} line {i + 1}: invalid doc-id {line!r}")
        if doc_id in index:
            raise ValidationError(f"duplicate doc-id in store: {doc_id}")
        index[doc_id] = i
        ids.append(doc_id)

    payload = (directory / VECTORS_FILE).read_bytes()
    expected = count * dim * 4
    if len(payload) != expected:
        raise ValidationError(
            f"{VECTORS_FILE} holds {len(payload)} bytes, expected "
            f"count*dim*4 = {count}*{dim}*4 = {expected}"
        )
    matrix = np.frombuffer(payload, dtype="<f4").reshape(count, dim)

    finite_rows = np.isfinite(matrix).all(axis=1) if count else np.ones(0, dtype=bool)
    if not finite_rows.all():
        bad = int(np.flatnonzero(~finite_rows)[0])
        raise ValidationError(f"non-finite component in embedding of doc {ids[bad]!r}")

    matrix = matrix.copy()
    matrix.setflags(write=False)
    return EmbeddingStore(
        dim=dim,
        count=count,
        encoder=encoder,
        ids=tuple(ids),
        matrix=matrix,
        meta=meta,
        _index=index,
    )


def write_store(
    directory: str | Path,
    ids: list[str],
    vectors: np.ndarray,
    encoder: str,
    extra_meta: dict | None = None,
) -> Path:
    """Write a store directory in the documented binary layout.

    `vectors` is cast to little-endian float32; row i must belong to ids[i].
    """
    vectors = np.asarray(vectors)
    if vectors.ndim != 2:
        raise ValidationError(f"vectors must be 2-dimensional, got shape {vectors.shape}")
    n, dim = vectors.shape
    if len(ids) != n:
        raise ValidationError(f"{len(ids)} ids for {n} vector rows")
    if len(set(ids)) != len(ids):
        raise ValidationError("doc-ids must be unique")
    if n and not np.isfinite(vectors).all():
        bad = int(np.flatnonzero(~np.isfinite(vectors).all(axis=1))[0])
        raise ValidationError(f"non-finite component in embedding of doc {ids[bad]!r}")

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {"dim": int(dim), "count": int(n), "encoder": encoder}
    if extra_meta:
        meta.update(extra_meta)
    (directory / META_FILE).write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (directory / IDS_FILE).write_text(
        "".join(f"{doc_id}\n" for doc_id in ids), encoding="utf-8"
    )
    (directory / VECTORS_FILE).write_bytes(vectors.astype("<f4").tobytes(order="C"))
    return directory
