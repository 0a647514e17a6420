"""Evaluation procedures built on the parsers, the store and the Gaussian core.

The central quantity is the pooled distance at cutoff k: embeddings of every
relevant-judged document across the query set form one sample, embeddings of
every top-k retrieved document form the other, and the score is the Frechet
distance between Gaussians fitted to the two samples. Both pools are
multisets over (query, doc) occurrences, so a document relevant to several
queries contributes one row per occurrence and a perfect run can reach
distance zero.

Also here: the unjudged-only retrieval filter, qrel sparsification by grade
tier, query bootstrap resampling, and tie-corrected Kendall rank correlation
between system orderings.
"""

from __future__ import annotations

import hashlib
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    InsufficientSamplesError,
    MissingEmbeddingsError,
    NumericalError,
    NumericalWarning,
    PoolTooSmallError,
    ValidationError,
)
from .gaussian import fit_gaussian, frechet_distance_full
from .metrics import GAIN_ALIASES, MetricConfig, mrr_at_k, ndcg_at_k
from .report import EvalReport
from .store import EmbeddingStore
from .trec_io import Qrels, RunFile

__all__ = [
    "FdResult",
    "BootstrapResult",
    "CorrelationResult",
    "EvalConfig",
    "fd_at_k",
    "fd_urr_at_k",
    "sparsify_qrels",
    "bootstrap_metric",
    "bootstrap_fd",
    "kendall_tau",
    "evaluate_run",
    "compare_systems",
]

DEFAULT_MISSING_ABORT_RATE = 0.01
# Below this many paired systems the normal-approximation p-value is rough.
SMALL_SAMPLE_P_VALUE = 10


@dataclass(frozen=True)
class FdResult:
    """Pooled Frechet distance plus the bookkeeping needed to interpret it."""

    value: float
    k: int
    mode: str  # "standard" or "urr"
    queries_used: int
    relevant_pool_size: int
    retrieved_pool_size: int
    missing_embedding_count: int
    regularized: bool

    def __post_init__(self):
        if self.mode not in ("standard", "urr"):
            raise ValidationError(f"mode must be 'standard' or 'urr', got {self.mode!r}")
        if self.relevant_pool_size < 2 or self.retrieved_pool_size < 2:
            raise PoolTooSmallError(
                f"pools must hold at least 2 rows each, got "
                f"{self.relevant_pool_size} relevant / {self.retrieved_pool_size} retrieved"
            )
        if self.value < 0.0 or not math.isfinite(self.value):
            raise ValidationError(f"distance must be finite and non-negative, got {self.value}")


@dataclass(frozen=True)
class BootstrapResult:
    metric_name: str
    mean: float
    lower: float
    upper: float
    n_resamples: int
    confidence: float
    seed: int

    def __post_init__(self):
        if not (self.lower <= self.mean <= self.upper):
            raise NumericalError(
                f"bootstrap interval is inconsistent: "
                f"lower={self.lower!r} mean={self.mean!r} upper={self.upper!r}"
            )


@dataclass(frozen=True)
class CorrelationResult:
    tau: float
    p_value: float
    n_systems: int

    def __post_init__(self):
        if not -1.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau out of range: {self.tau}")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValidationError(f"p-value out of range: {self.p_value}")


METRIC_FAMILIES = ("mrr", "ndcg", "fd", "fd-urr")


@dataclass(frozen=True)
class EvalConfig:
    """Settings shared by the report-producing entry points.

    `families` restricts which metric families run (default: mrr, ndcg and
    fd, plus fd-urr when `urr` is set).
    """

    k_list: tuple[int, ...] = (10,)
    urr: bool = False
    relevance_threshold: int = 1
    gain: str = "linear"
    seed: int = 0
    missing_abort_rate: float = DEFAULT_MISSING_ABORT_RATE
    families: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.k_list:
            raise ValidationError("k_list must not be empty")
        if any(k < 1 for k in self.k_list):
            raise ValidationError(f"every cutoff must be >= 1, got {self.k_list}")
        if len(set(self.k_list)) != len(self.k_list):
            raise ValidationError(f"cutoffs must be unique, got {self.k_list}")
        if self.relevance_threshold < 1:
            raise ValidationError("relevance_threshold must be >= 1")
        if self.gain not in GAIN_ALIASES:
            raise ValidationError(f"unknown gain {self.gain!r}")
        if not 0.0 <= self.missing_abort_rate <= 1.0:
            raise ValidationError("missing_abort_rate must lie in [0, 1]")
        if self.families is not None:
            if not self.families:
                raise ValidationError("families must not be empty when given")
            unknown = set(self.families) - set(METRIC_FAMILIES)
            if unknown:
                raise ValidationError(f"unknown metric families: {sorted(unknown)}")
            if len(set(self.families)) != len(self.families):
                raise ValidationError("families must be unique")
            object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "k_list", tuple(self.k_list))
        object.__setattr__(self, "gain", GAIN_ALIASES[self.gain])

    def active_families(self) -> tuple[str, ...]:
        if self.families is not None:
            return self.families
        return ("mrr", "ndcg", "fd", "fd-urr") if self.urr else ("mrr", "ndcg", "fd")


# ---------------------------------------------------------------------------
# pooled Frechet distance


@dataclass
class _Pools:
    """Gathered rows for both pools with per-query row groups (for resampling)."""

    rows_a: np.ndarray
    rows_b: np.ndarray
    qmap_a: np.ndarray  # query index owning each row of rows_a
    qmap_b: np.ndarray
    n_queries: int
    queries_used: int
    missing: int
    requested: int


def _gather_grouped(
    ids_by_query: list[list[str]], store: EmbeddingStore
) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Gather per-query id lists into one matrix plus a row->query map."""
    flat_rows: list[np.ndarray] = []
    qmap_parts: list[np.ndarray] = []
    missing = 0
    requested = 0
    for qi, ids in enumerate(ids_by_query):
        requested += len(ids)
        rows, absent = store.row_indices(ids)
        missing += len(absent)
        flat_rows.append(rows)
        qmap_parts.append(np.full(rows.size, qi, dtype=np.int64))
    row_idx = np.concatenate(flat_rows) if flat_rows else np.zeros(0, dtype=np.int64)
    qmap = np.concatenate(qmap_parts) if qmap_parts else np.zeros(0, dtype=np.int64)
    matrix = store.matrix[row_idx].astype(np.float64)
    return matrix, qmap, missing, requested


def _build_pools(
    run: RunFile,
    qrels: Qrels,
    store: EmbeddingStore,
    k: int,
    relevance_threshold: int,
    urr: bool,
    missing_abort_rate: float,
) -> _Pools:
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    query_ids = qrels.query_ids()
    if not query_ids:
        raise ValidationError("qrels contain no queries")

    a_ids = [
        [d for d, g in qrels.entries[q].items() if g >= relevance_threshold]
        for q in query_ids
    ]
    judged = qrels.judged_doc_ids() if urr else None
    b_ids: list[list[str]] = []
    for q in query_ids:
        entries = run.rankings.get(q, [])
        if judged is not None:
            kept = [e.doc_id for e in entries if e.doc_id not in judged][:k]
        else:
            kept = [e.doc_id for e in entries[:k]]
        b_ids.append(kept)

    rows_a, qmap_a, missing_a, requested_a = _gather_grouped(a_ids, store)
    rows_b, qmap_b, missing_b, requested_b = _gather_grouped(b_ids, store)

    missing = missing_a + missing_b
    requested = requested_a + requested_b
    if requested and missing / requested > missing_abort_rate:
        raise MissingEmbeddingsError(
            f"{missing} of {requested} pool rows have no embedding "
            f"({missing / requested:.2%} > abort threshold {missing_abort_rate:.2%})"
        )

    return _Pools(
        rows_a=rows_a,
        rows_b=rows_b,
        qmap_a=qmap_a,
        qmap_b=qmap_b,
        n_queries=len(query_ids),
        queries_used=sum(1 for ids in b_ids if ids),
        missing=missing,
        requested=requested,
    )


def _fd_from_rows(rows_a: np.ndarray, rows_b: np.ndarray) -> tuple[float, bool]:
    if rows_a.shape[0] < 2:
        raise PoolTooSmallError(
            f"relevant pool has only {rows_a.shape[0]} embedded rows (need >= 2)"
        )
    if rows_b.shape[0] < 2:
        raise PoolTooSmallError(
            f"retrieved pool has only {rows_b.shape[0]} embedded rows (need >= 2)"
        )
    value, diag = frechet_distance_full(fit_gaussian(rows_a), fit_gaussian(rows_b))
    return value, diag.regularized


def _fd(
    run: RunFile,
    qrels: Qrels,
    store: EmbeddingStore,
    k: int,
    relevance_threshold: int,
    urr: bool,
    missing_abort_rate: float,
) -> FdResult:
    pools = _build_pools(run, qrels, store, k, relevance_threshold, urr, missing_abort_rate)
    value, regularized = _fd_from_rows(pools.rows_a, pools.rows_b)
    return FdResult(
        value=value,
        k=k,
        mode="urr" if urr else "standard",
        queries_used=pools.queries_used,
        relevant_pool_size=pools.rows_a.shape[0],
        retrieved_pool_size=pools.rows_b.shape[0],
        missing_embedding_count=pools.missing,
        regularized=regularized,
    )


def fd_at_k(
    run: RunFile,
    qrels: Qrels,
    store: EmbeddingStore,
    k: int,
    relevance_threshold: int = 1,
    missing_abort_rate: float = DEFAULT_MISSING_ABORT_RATE,
) -> FdResult:
    """Pooled Frechet distance between relevant-judged and top-k retrieved docs.

    Pool A holds one embedding row per (query, doc) judgment with grade >=
    `relevance_threshold`; pool B holds one row per (query, doc) occurrence
    in the top k of the run, over the queries of the qrels. Missing
    embeddings are dropped and counted, aborting above `missing_abort_rate`.
    """
    return _fd(run, qrels, store, k, relevance_threshold, False, missing_abort_rate)


def fd_urr_at_k(
    run: RunFile,
    qrels: Qrels,
    store: EmbeddingStore,
    k: int,
    relevance_threshold: int = 1,
    missing_abort_rate: float = DEFAULT_MISSING_ABORT_RATE,
) -> FdResult:
    """Pooled distance where only unjudged retrieved documents count.

    Documents carrying any judgment (grade 0 included) are removed from every
    ranking; the first k survivors per query form the retrieved pool. Queries
    whose filtered list is empty are skipped and excluded from queries_used.
    """
    return _fd(run, qrels, store, k, relevance_threshold, True, missing_abort_rate)


# ---------------------------------------------------------------------------
# qrel sparsification


def _per_query_rng(seed: int, qid: str) -> np.random.Generator:
    # keyed derivation: per-query streams stay independent of iteration order
    digest = hashlib.blake2b(qid.encode("utf-8"), digest_size=8).digest()
    return np.random.default_rng([seed, int.from_bytes(digest, "little")])


def sparsify_qrels(qrels: Qrels, max_per_query: int, seed: int) -> Qrels:
    """Cap each query at `max_per_query` relevant docs, preferring high grades.

    The quota fills tier by tier from the highest grade present; a tier
    larger than the remaining quota is sampled uniformly without replacement.
    Grade-0 judgments never survive. Deterministic for a fixed seed, with
    per-query draws independent of query iteration order.
    """
    if max_per_query < 1:
        raise ValidationError(f"max_per_query must be >= 1, got {max_per_query}")
    out: dict[str, dict[str, int]] = {}
    for qid, judged in qrels.entries.items():
        tiers: dict[int, list[str]] = {}
        for doc_id, grade in judged.items():
            if grade >= 1:
                tiers.setdefault(grade, []).append(doc_id)
        if not tiers:
            continue
        quota = max_per_query
        kept: list[str] = []
        rng: np.random.Generator | None = None
        for grade in sorted(tiers, reverse=True):
            if quota == 0:
                break
            members = sorted(tiers[grade])
            if len(members) <= quota:
                kept.extend(members)
                quota -= len(members)
            else:
                if rng is None:
                    rng = _per_query_rng(seed, qid)
                picks = rng.choice(len(members), size=quota, replace=False)
                kept.extend(members[i] for i in sorted(picks))
                quota = 0
        out[qid] = {doc_id: judged[doc_id] for doc_id in kept}
    return Qrels(entries=out)


# ---------------------------------------------------------------------------
# bootstrap resampling


def _interval(values: np.ndarray, confidence: float) -> tuple[float, float, float]:
    tail = 100.0 * (1.0 - confidence) / 2.0
    lower = float(np.percentile(values, tail))
    upper = float(np.percentile(values, 100.0 - tail))
    return float(values.mean()), lower, upper


def _check_bootstrap_args(n_resamples: int, confidence: float) -> None:
    if n_resamples < 1:
        raise ValidationError(f"n_resamples must be >= 1, got {n_resamples}")
    if not 0.0 < confidence < 1.0:
        raise ValidationError(f"confidence must lie in (0, 1), got {confidence}")


def bootstrap_metric(
    per_query_scores: dict[str, float],
    n_resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
    metric_name: str = "metric",
) -> BootstrapResult:
    """Percentile bootstrap over per-query scores of a query-averaged metric.

    Each resample draws query ids with replacement (sample size = original
    count) and takes the mean score; the interval is the empirical
    (1-confidence)/2 and 1-(1-confidence)/2 percentiles with linear
    interpolation. Bitwise reproducible for a fixed seed.
    """
    _check_bootstrap_args(n_resamples, confidence)
    n = len(per_query_scores)
    if n < 2:
        raise InsufficientSamplesError(f"bootstrap needs at least 2 queries, got {n}")
    values = np.fromiter(per_query_scores.values(), dtype=np.float64, count=n)
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, n, size=(n_resamples, n))
    means = values[draws].mean(axis=1)
    mean, lower, upper = _interval(means, confidence)
    return BootstrapResult(
        metric_name=metric_name,
        mean=mean,
        lower=lower,
        upper=upper,
        n_resamples=n_resamples,
        confidence=confidence,
        seed=seed,
    )


def bootstrap_fd(
    run: RunFile,
    qrels: Qrels,
    store: EmbeddingStore,
    k: int,
    n_resamples: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
    relevance_threshold: int = 1,
    urr: bool = False,
    missing_abort_rate: float = DEFAULT_MISSING_ABORT_RATE,
) -> BootstrapResult:
    """Percentile bootstrap of the pooled distance over resampled query sets.

    The distance is set-level, so each resample rebuilds both pools from the
    drawn query multiset (a query drawn twice contributes its rows twice)
    and recomputes the full statistic.
    """
    _check_bootstrap_args(n_resamples, confidence)
    pools = _build_pools(run, qrels, store, k, relevance_threshold, urr, missing_abort_rate)
    if pools.n_queries < 2:
        raise InsufficientSamplesError(
            f"bootstrap needs at least 2 queries, got {pools.n_queries}"
        )

    rng = np.random.default_rng(seed)
    draws = rng.integers(0, pools.n_queries, size=(n_resamples, pools.n_queries))
    arange_a = np.arange(pools.rows_a.shape[0])
    arange_b = np.arange(pools.rows_b.shape[0])
    values = np.empty(n_resamples, dtype=np.float64)
    for r in range(n_resamples):
        counts = np.bincount(draws[r], minlength=pools.n_queries)
        sample_a = pools.rows_a[np.repeat(arange_a, counts[pools.qmap_a])]
        sample_b = pools.rows_b[np.repeat(arange_b, counts[pools.qmap_b])]
        values[r], _ = _fd_from_rows(sample_a, sample_b)

    mean, lower, upper = _interval(values, confidence)
    name = f"FD@{k}-URR" if urr else f"FD@{k}"
    return BootstrapResult(
        metric_name=name,
        mean=mean,
        lower=lower,
        upper=upper,
        n_resamples=n_resamples,
        confidence=confidence,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# rank correlation between system orderings


def kendall_tau(scores_a: list[float], scores_b: list[float]) -> CorrelationResult:
    """Tie-corrected Kendall tau-b with a normal-approximation p-value.

    Inputs are aligned by system. All values tied in either list leaves the
    coefficient undefined and raises DegenerateInputError. The p-value uses
    the tie-adjusted variance of the concordance statistic; it is a rough
    guide below 10 systems (a warning says so).
    """
    n = len(scores_a)
    if n != len(scores_b):
        raise ValidationError(f"length mismatch: {n} vs {len(scores_b)}")
    if n < 2:
        raise ValidationError(f"need at least 2 paired values, got {n}")
    a = [float(v) for v in scores_a]
    b = [float(v) for v in scores_b]
    if any(not math.isfinite(v) for v in a + b):
        raise ValidationError("scores must be finite")

    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            s = (a[i] - a[j]) * (b[i] - b[j])
            if s > 0:
                concordant += 1
            elif s < 0:
                discordant += 1

    def tie_sizes(values: list[float]) -> list[int]:
        counts: dict[float, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        return [c for c in counts.values() if c > 1]

    ties_a = tie_sizes(a)
    ties_b = tie_sizes(b)
    n0 = n * (n - 1) // 2
    n1 = sum(t * (t - 1) // 2 for t in ties_a)
    n2 = sum(t * (t - 1) // 2 for t in ties_b)
    if n0 == n1 or n0 == n2:
        raise DegenerateInputError("tau is undefined when all values in a list are tied")

    s_stat = concordant - discordant
    tau = s_stat / math.sqrt(float(n0 - n1) * float(n0 - n2))
    # guard against round-off pushing |tau| past 1
    tau = max(-1.0, min(1.0, tau))

    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in ties_a)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ties_b)
    var_s = (v0 - vt - vu) / 18.0
    var_s += (
        sum(t * (t - 1) for t in ties_a) * sum(t * (t - 1) for t in ties_b)
    ) / (2.0 * n * (n - 1))
    if n > 2:
        var_s += (
            sum(t * (t - 1) * (t - 2) for t in ties_a)
            * sum(t * (t - 1) * (t - 2) for t in ties_b)
        ) / (9.0 * n * (n - 1) * (n - 2))
    z = s_stat / math.sqrt(var_s)
    p_value = math.erfc(abs(z) / math.sqrt(2.0))

    if n < SMALL_SAMPLE_P_VALUE:
        warnings.warn(
            f"normal-approximation p-value with only {n} systems is approximate",
            NumericalWarning,
            stacklevel=2,
        )
    return CorrelationResult(tau=tau, p_value=p_value, n_systems=n)


# ---------------------------------------------------------------------------
# multi-system comparison


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get("FD_EVAL_THREADS")
    if raw is not None:
        try:
            cap = max(1, int(raw))
        except ValueError:
            cap = 1
    else:
        cap = min(4, os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


_FAMILY_NAME = {
    "mrr": "MRR@{k}",
    "ndcg": "nDCG@{k}",
    "fd": "FD@{k}",
    "fd-urr": "FD@{k}-URR",
}


def _metric_names(config: EvalConfig) -> list[str]:
    return [
        _FAMILY_NAME[family].format(k=k)
        for family in config.active_families()
        for k in config.k_list
    ]


def _system_metrics(
    run: RunFile, qrels: Qrels, store: EmbeddingStore, config: EvalConfig
) -> tuple[dict[str, float], dict]:
    """All configured metric values for one run, plus its diagnostics."""
    values: dict[str, float] = {}
    diagnostics: dict = {"fd": {}, "ndcg_skipped_queries": {}}
    for family in config.active_families():
        for k in config.k_list:
            name = _FAMILY_NAME[family].format(k=k)
            if family == "mrr":
                cfg = MetricConfig(
                    k=k, relevance_threshold=config.relevance_threshold, gain=config.gain
                )
                values[name] = mrr_at_k(run, qrels, cfg).mean
            elif family == "ndcg":
                cfg = MetricConfig(
                    k=k, relevance_threshold=config.relevance_threshold, gain=config.gain
                )
                ndcg = ndcg_at_k(run, qrels, cfg)
                values[name] = ndcg.mean
                if ndcg.skipped_queries:
                    diagnostics["ndcg_skipped_queries"][name] = list(ndcg.skipped_queries)
            else:
                compute = fd_urr_at_k if family == "fd-urr" else fd_at_k
                result = compute(
                    run, qrels, store, k, config.relevance_threshold, config.missing_abort_rate
                )
                values[name] = result.value
                diagnostics["fd"][name] = _fd_diag(result)
    return values, diagnostics


def _fd_diag(result: FdResult) -> dict:
    return {
        "queries_used": result.queries_used,
        "relevant_pool_size": result.relevant_pool_size,
        "retrieved_pool_size": result.retrieved_pool_size,
        "missing_embedding_count": result.missing_embedding_count,
        "regularized": result.regularized,
    }


def _settings_dict(store: EmbeddingStore, config: EvalConfig) -> dict:
    return {
        "k_list": list(config.k_list),
        "urr": config.urr,
        "relevance_threshold": config.relevance_threshold,
        "gain": config.gain,
        "seed": config.seed,
        "missing_abort_rate": config.missing_abort_rate,
        "metrics": _metric_names(config),
        "store": {"encoder": store.encoder, "dim": store.dim, "count": store.count},
    }


def _unique_tags(runs: list[RunFile]) -> tuple[list[str], dict[str, str]]:
    tags: list[str] = []
    renamed: dict[str, str] = {}
    seen: set[str] = set()
    for run in runs:
        tag = run.system_tag
        if tag in seen:
            base, n = tag, 2
            while f"{base}#{n}" in seen:
                n += 1
            renamed[f"{base}#{n}"] = base
            tag = f"{base}#{n}"
        seen.add(tag)
        tags.append(tag)
    return tags, renamed


def evaluate_run(
    run: RunFile, qrels: Qrels, store: EmbeddingStore, config: EvalConfig
) -> EvalReport:
    """Report every configured metric for a single system."""
    values, diagnostics = _system_metrics(run, qrels, store, config)
    return EvalReport(
        systems={run.system_tag: values},
        correlations={},
        settings=_settings_dict(store, config),
        diagnostics={run.system_tag: diagnostics},
    )


def compare_systems(
    runs: list[RunFile], qrels: Qrels, store: EmbeddingStore, config: EvalConfig
) -> EvalReport:
    """Evaluate several systems and correlate every pair of metrics.

    The correlation block holds Kendall tau-b between the per-system score
    vectors of each metric pair. Pairs whose tau is undefined (a metric that
    ties every system) are reported as null and listed in the diagnostics
    instead of failing the whole comparison.
    """
    if len(runs) < 2:
        raise ValidationError(f"compare needs at least 2 runs, got {len(runs)}")

    workers = _worker_count(len(runs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            computed = list(
                pool.map(lambda r: _system_metrics(r, qrels, store, config), runs)
            )
    else:
        computed = [_system_metrics(run, qrels, store, config) for run in runs]

    tags, renamed = _unique_tags(runs)
    systems = {tag: values for tag, (values, _) in zip(tags, computed)}
    diagnostics: dict = {tag: diag for tag, (_, diag) in zip(tags, computed)}
    if renamed:
        diagnostics["renamed_tags"] = renamed

    metric_names = _metric_names(config)
    vectors = {
        name: [systems[tag][name] for tag in tags] for name in metric_names
    }
    correlations: dict[str, dict] = {}
    degenerate: list[str] = []
    for i, name_a in enumerate(metric_names):
        for name_b in metric_names[i:]:
            key = f"{name_a}|{name_b}"
            if name_a == name_b:
                correlations[key] = {"tau": 1.0, "p_value": 0.0, "n_systems": len(tags)}
                continue
            try:
                corr = kendall_tau(vectors[name_a], vectors[name_b])
            except DegenerateInputError:
                correlations[key] = {"tau": None, "p_value": None, "n_systems": len(tags)}
                degenerate.append(key)
                continue
            correlations[key] = {
                "tau": corr.tau,
                "p_value": corr.p_value,
                "n_systems": corr.n_systems,
            }
    if degenerate:
        diagnostics["degenerate_correlations"] = degenerate

    return EvalReport(
        systems=systems,
        correlations=correlations,
        settings=_settings_dict(store, config),
        diagnostics=diagnostics,
    )
