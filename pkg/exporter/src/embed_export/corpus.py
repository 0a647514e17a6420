"""Corpus TSV reading: one ``<docid>\\t<text>`` row per line, UTF-8."""

from __future__ import annotations

from pathlib import Path
from typing import Iterator

from .errors import CorpusError


def read_corpus(path: str | Path) -> list[tuple[str, str]]:
    """Load the whole corpus, validating ids and text.

    Doc-ids must be unique, non-empty and whitespace-free; text must be
    non-empty. Blank lines are skipped. Text keeps any further tabs intact
    (only the first tab separates the columns).
    """
    rows: list[tuple[str, str]] = []
    seen: set[str] = set()
    for lineno, line in _numbered_lines(Path(path)):
        if "\t" not in line:
            raise CorpusError(f"expected '<docid>\\t<text>', got {line!r}", lineno)
        doc_id, text = line.split("\t", 1)
        if not doc_id or any(c.isspace() for c in doc_id):
            raise CorpusError(f"invalid doc-id {doc_id!r}", lineno)
        if not text.strip():
            raise CorpusError(f"empty text for doc {doc_id!r}", lineno)
        if doc_id in seen:
            raise CorpusError(f"duplicate doc-id {doc_id!r}", lineno)
        seen.add(doc_id)
        rows.append((doc_id, text))
    if not rows:
        raise CorpusError(f"corpus {path} contains no documents")
    return rows


def _numbered_lines(path: Path) -> Iterator[tuple[int, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            yield lineno, line
