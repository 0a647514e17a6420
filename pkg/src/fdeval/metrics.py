"""Classical rank-based baselines: MRR@k and graded nDCG@k.

Conventions follow trec-eval: log2 discount, linear gain by default
(exponential 2^g - 1 available for cross-checking other tooling), rank
order authoritative. Queries present in the qrels but absent from the run
score 0 rather than being skipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .trec_io import Qrels, RunFile

__all__ = ["MetricConfig", "MetricResult", "mrr_at_k", "ndcg_at_k"]

GAIN_ALIASES = {"linear": "linear", "exponential": "exponential", "exp": "exponential"}


@dataclass(frozen=True)
class MetricConfig:
    """Cutoff and relevance conventions shared by the rank metrics."""

    k: int = 10
    relevance_threshold: int = 1
    gain: str = "linear"

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.relevance_threshold < 1:
            raise ValidationError(
                f"relevance_threshold must be >= 1, got {self.relevance_threshold}"
            )
        canonical = GAIN_ALIASES.get(self.gain)
        if canonical is None:
            raise ValidationError(f"gain must be one of {sorted(set(GAIN_ALIASES))}, got {self.gain!r}")
        object.__setattr__(self, "gain", canonical)


@dataclass(frozen=True)
class MetricResult:
    mean: float
    per_query: dict[str, float]
    skipped_queries: tuple[str, ...] = ()


def _mean(per_query: dict[str, float]) -> float:
    return sum(per_query.values()) / len(per_query) if per_query else 0.0


def mrr_at_k(run: RunFile, qrels: Qrels, cfg: MetricConfig) -> MetricResult:
    """Mean reciprocal rank of the first relevant doc within the top k.

    A doc counts as relevant when its grade >= cfg.relevance_threshold.
    Every query in the qrels contributes; no relevant doc in the top k
    (or no ranking at all) scores 0.
    """
    if not qrels.entries:
        raise ValidationError("qrels contain no queries")
    per_query: dict[str, float] = {}
    for qid, judged in qrels.entries.items():
        relevant = {d for d, g in judged.items() if g >= cfg.relevance_threshold}
        score = 0.0
        for position, entry in enumerate(run.rankings.get(qid, [])[: cfg.k], start=1):
            if entry.doc_id in relevant:
                score = 1.0 / position
                break
        per_query[qid] = score
    return MetricResult(mean=_mean(per_query), per_query=per_query)


def _gain(grade: int, kind: str) -> float:
    return float(grade) if kind == "linear" else float(2**grade - 1)


def ndcg_at_k(run: RunFile, qrels: Qrels, cfg: MetricConfig) -> MetricResult:
    """Graded nDCG@k with 1/log2(rank+1) discount.

    The ideal DCG ranks that query's judged docs by descending grade.
    Queries whose ideal DCG is zero (no positive grades) cannot be
    normalized; they are excluded from the mean and listed in
    `skipped_queries`.
    """
    if not qrels.entries:
        raise ValidationError("qrels contain no queries")
    per_query: dict[str, float] = {}
    skipped: list[str] = []
    for qid, judged in qrels.entries.items():
        ideal = 0.0
        for position, grade in enumerate(
            sorted(judged.values(), reverse=True)[: cfg.k], start=1
        ):
            ideal += _gain(grade, cfg.gain) / math.log2(position + 1)
        if ideal == 0.0:
            skipped.append(qid)
            continue
        dcg = 0.0
        for position, entry in enumerate(run.rankings.get(qid, [])[: cfg.k], start=1):
            dcg += _gain(judged.get(entry.doc_id, 0), cfg.gain) / math.log2(position + 1)
        per_query[qid] = dcg / ideal
    return MetricResult(
        mean=_mean(per_query), per_query=per_query, skipped_queries=tuple(skipped)
    )
