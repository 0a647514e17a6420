"""Parsing, validation and serialization of TREC qrels and run files.

Formats handled:

- qrels: ``<qid> <iter> <docid> <grade>`` whitespace-separated, one judgment
  per line. The iteration column is ignored on input and written as ``0``.
- run:   ``<qid> Q0 <docid> <rank> <score> <tag>``, one entry per line.

Any run of spaces/tabs separates fields; blank lines and lines starting with
``#`` are skipped. Rank order is authoritative when ranks and scores disagree
(score violations are a warning, not an error).

Parsed structures are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import ParseError, TrecFormatWarning, ValidationError

__all__ = [
    "Qrels",
    "RunEntry",
    "RunFile",
    "QuerySet",
    "parse_qrels",
    "parse_run",
    "serialize_qrels",
    "serialize_run",
    "truncate",
]


def _check_token(token: str, what: str) -> str:
    if not token or any(c.isspace() for c in token):
        raise ValidationError(f"{what} must be a non-empty string without whitespace: {token!r}")
    return token


@dataclass(frozen=True)
class Qrels:
    """Graded relevance judgments: query-id -> doc-id -> grade (int >= 0)."""

    entries: dict[str, dict[str, int]]

    def __post_init__(self):
        for qid, docs in self.entries.items():
            _check_token(qid, "query-id")
            for doc_id, grade in docs.items():
                _check_token(doc_id, "doc-id")
                if not isinstance(grade, int) or isinstance(grade, bool) or grade < 0:
                    raise ValidationError(
                        f"grade for ({qid}, {doc_id}) must be a non-negative integer, got {grade!r}"
                    )

    def query_ids(self) -> list[str]:
        return list(self.entries)

    def num_judgments(self) -> int:
        return sum(len(docs) for docs in self.entries.values())

    def relevant_docs(self, qid: str, threshold: int = 1) -> dict[str, int]:
        """Judged docs for `qid` with grade >= threshold."""
        return {d: g for d, g in self.entries.get(qid, {}).items() if g >= threshold}

    def judged_doc_ids(self) -> set[str]:
        """Every doc-id that carries a judgment under any query, any grade."""
        judged: set[str] = set()
        for docs in self.entries.values():
            judged.update(docs)
        return judged


@dataclass(frozen=True)
class RunEntry:
    doc_id: str
    rank: int
    score: float


@dataclass(frozen=True)
class RunFile:
    """One system's ranked output: query-id -> entries sorted by rank."""

    system_tag: str
    rankings: dict[str, list[RunEntry]]

    def __post_init__(self):
        _check_token(self.system_tag, "system tag")
        for qid, entries in self.rankings.items():
            _check_token(qid, "query-id")
            prev_rank = 0
            seen: set[str] = set()
            for e in entries:
                if e.rank <= prev_rank:
                    raise ValidationError(
                        f"ranks for query {qid} must be strictly increasing "
                        f"(saw {e.rank} after {prev_rank})"
                    )
                if e.doc_id in seen:
                    raise ValidationError(f"duplicate doc {e.doc_id} for query {qid}")
                seen.add(e.doc_id)
                prev_rank = e.rank

    def query_ids(self) -> list[str]:
        return list(self.rankings)


@dataclass(frozen=True)
class QuerySet:
    """An ordered set of query ids defining an evaluation query population."""

    ids: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValidationError("query ids must be unique")
        for qid in self.ids:
            _check_token(qid, "query-id")

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[str]:
        return iter(self.ids)


def _iter_lines(source) -> Iterator[tuple[int, str]]:
    """Yield (1-based line number, stripped line), skipping blanks and # comments."""

    def lines_of(stream) -> Iterator[str]:
        for raw in stream:
            yield raw.decode("utf-8") if isinstance(raw, bytes) else raw

    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from _numbered(lines_of(fh))
    else:
        yield from _numbered(lines_of(source))


def _numbered(lines: Iterator[str]) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def _source_name(source) -> str | None:
    if isinstance(source, (str, Path)):
        return str(source)
    return getattr(source, "name", None)


def parse_qrels(source) -> Qrels:
    """Parse a TREC qrels file into a `Qrels`.

    Accepts a path or an open text/byte stream. Lines need at least four
    fields; the grade is taken from the fourth and must be a non-negative
    integer. Duplicate (query, doc) pairs are a parse error.
    """
    path = _source_name(source)
    entries: dict[str, dict[str, int]] = {}
    for lineno, line in _iter_lines(source):
        fields = line.split()
        if len(fields) < 4:
            raise ParseError(
                f"expected at least 4 fields, got {len(fields)}: {line!r}", lineno, path
            )
        qid, _iteration, doc_id, grade_token = fields[0], fields[1], fields[2], fields[3]
        try:
            grade = int(grade_token)
        except ValueError:
            raise ParseError(f"grade is not an integer: {grade_token!r}", lineno, path) from None
        if grade < 0:
            raise ParseError(f"grade is negative: {grade}", lineno, path)
        docs = entries.setdefault(qid, {})
        if doc_id in docs:
            raise ParseError(f"duplicate judgment for ({qid}, {doc_id})", lineno, path)
        docs[doc_id] = grade
    return Qrels(entries=entries)


def parse_run(source) -> RunFile:
    """Parse a TREC run file into a `RunFile`.

    Lines must have exactly six fields. Per-query entries are re-sorted by
    ascending rank; the system tag comes from the first line (mixed tags are
    a warning). Score decreases are checked after sorting and warned about,
    never rejected.
    """
    path = _source_name(source)
    per_query: dict[str, list[RunEntry]] = {}
    docs_seen: dict[str, set[str]] = {}
    ranks_seen: dict[str, set[int]] = {}
    tag: str | None = None
    other_tags: set[str] = set()

    for lineno, line in _iter_lines(source):
        fields = line.split()
        if len(fields) != 6:
            raise ParseError(f"expected 6 fields, got {len(fields)}: {line!r}", lineno, path)
        qid, _q0, doc_id, rank_token, score_token, line_tag = fields
        try:
            rank = int(rank_token)
        except ValueError:
            raise ParseError(f"rank is not an integer: {rank_token!r}", lineno, path) from None
        if rank < 1:
            raise ParseError(f"rank must be positive: {rank}", lineno, path)
        try:
            score = float(score_token)
        except ValueError:
            raise ParseError(f"score is not numeric: {score_token!r}", lineno, path) from None
        if not math.isfinite(score):
            raise ParseError(f"score is not finite: {score_token!r}", lineno, path)

        if tag is None:
            tag = line_tag
        elif line_tag != tag:
            other_tags.add(line_tag)

        entries = per_query.setdefault(qid, [])
        seen_docs = docs_seen.setdefault(qid, set())
        if doc_id in seen_docs:
            raise ParseError(f"duplicate doc {doc_id} for query {qid}", lineno, path)
        seen_docs.add(doc_id)
        seen_ranks = ranks_seen.setdefault(qid, set())
        if rank in seen_ranks:
            raise ParseError(f"duplicate rank {rank} for query {qid}", lineno, path)
        seen_ranks.add(rank)
        entries.append(RunEntry(doc_id=doc_id, rank=rank, score=score))

    if tag is None:
        raise ParseError("run file contains no entries", 1, path)
    if other_tags:
        warnings.warn(
            f"run {path or tag!r} mixes system tags: {tag!r} plus {sorted(other_tags)}",
            TrecFormatWarning,
            stacklevel=2,
        )

    unsorted_score_queries = []
    for qid, entries in per_query.items():
        entries.sort(key=lambda e: e.rank)
        if any(a.score < b.score for a, b in zip(entries, entries[1:])):
            unsorted_score_queries.append(qid)
    if unsorted_score_queries:
        shown = ", ".join(unsorted_score_queries[:5])
        warnings.warn(
            f"scores increase down the ranking for {len(unsorted_score_queries)} "
            f"queries (e.g. {shown}); rank order kept as authoritative",
            TrecFormatWarning,
            stacklevel=2,
        )

    return RunFile(system_tag=tag, rankings=per_query)


def truncate(run: RunFile, k: int) -> RunFile:
    """Keep at most the first `k` entries (by rank) of every query's list."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return RunFile(
        system_tag=run.system_tag,
        rankings={qid: entries[:k] for qid, entries in run.rankings.items()},
    )


def _format_score(score: float) -> str:
    # repr gives the shortest exact round-trip form ("12.5", not "12.500000")
    return repr(score)


def serialize_qrels(qrels: Qrels) -> str:
    lines = [
        f"{qid} 0 {doc_id} {grade}"
        for qid, docs in qrels.entries.items()
        for doc_id, grade in docs.items()
    ]
    return "\n".join(lines) + "\n" if lines else ""


def serialize_run(run: RunFile) -> str:
    lines = [
        f"{qid} Q0 {e.doc_id} {e.rank} {_format_score(e.score)} {run.system_tag}"
        for qid, entries in run.rankings.items()
        for e in entries
    ]
    return "\n".join(lines) + "\n" if lines else ""
