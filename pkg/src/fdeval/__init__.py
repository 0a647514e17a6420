"""Distribution-based IR evaluation toolkit.

Scores a retrieval system by the Frechet distance between the embedding
distribution of its top-k results and that of the relevant-judged documents,
next to classical MRR@k / nDCG@k, with bootstrap intervals, qrel
sparsification, an unjudged-only protocol and Kendall correlation between
metric-induced system orderings.
"""

from .errors import (
    DegenerateInputError,
    FdEvalError,
    InsufficientSamplesError,
    MissingEmbeddingsError,
    NumericalError,
    NumericalWarning,
    ParseError,
    PoolTooSmallError,
    TrecFormatWarning,
    ValidationError,
)
from .gaussian import (
    FrechetDiagnostics,
    GaussianStats,
    fit_gaussian,
    frechet_distance,
    frechet_distance_full,
    matrix_sqrt_psd,
)
from .metrics import MetricConfig, MetricResult, mrr_at_k, ndcg_at_k
from .pipeline import (
    BootstrapResult,
    CorrelationResult,
    EvalConfig,
    FdResult,
    bootstrap_fd,
    bootstrap_metric,
    compare_systems,
    evaluate_run,
    fd_at_k,
    fd_urr_at_k,
    kendall_tau,
    sparsify_qrels,
)
from .report import EvalReport, write_report
from .store import EmbeddingStore, gather, load_store, write_store
from .trec_io import (
    Qrels,
    QuerySet,
    RunEntry,
    RunFile,
    parse_qrels,
    parse_run,
    serialize_qrels,
    serialize_run,
    truncate,
)

__version__ = "0.1.0"

__all__ = [
    "BootstrapResult",
    "CorrelationResult",
    "DegenerateInputError",
    "EmbeddingStore",
    "EvalConfig",
    "EvalReport",
    "FdEvalError",
    "FdResult",
    "FrechetDiagnostics",
    "GaussianStats",
    "InsufficientSamplesError",
    "MetricConfig",
    "MetricResult",
    "MissingEmbeddingsError",
    "NumericalError",
    "NumericalWarning",
    "ParseError",
    "PoolTooSmallError",
    "Qrels",
    "QuerySet",
    "RunEntry",
    "RunFile",
    "TrecFormatWarning",
    "ValidationError",
    "bootstrap_fd",
    "bootstrap_metric",
    "compare_systems",
    "evaluate_run",
    "fd_at_k",
    "fd_urr_at_k",
    "fit_gaussian",
    "frechet_distance",
    "frechet_distance_full",
    "gather",
    "kendall_tau",
    "load_store",
    "matrix_sqrt_psd",
    "mrr_at_k",
    "ndcg_at_k",
    "parse_qrels",
    "parse_run",
    "serialize_qrels",
    "serialize_run",
    "sparsify_qrels",
    "truncate",
    "write_report",
    "write_store",
]
