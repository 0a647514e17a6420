"""Command-line surface.

Subcommands:

- ``eval``            metrics for one run -> report.json / report.txt
- ``compare``         metrics for several runs plus the metric-pair Kendall
                      tau matrix -> report.json / report.txt
- ``bootstrap``       percentile bootstrap intervals for one run
                      -> bootstrap.json / bootstrap.txt
- ``sparsify``        cap relevant judgments per query -> sparsified.qrels
- ``validate-store``  check an embedding-store directory, print a summary

Every command is deterministic given its inputs and --seed (default 0; no
wall-clock entropy anywhere). Exit codes: 0 success, 1 parse/validation or
usage failure, 2 numerical failure, 3 I/O failure. Failures also emit one
JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    DegenerateInputError,
    FdEvalError,
    NumericalError,
    ParseError,
    PoolTooSmallError,
    ValidationError,
)
from .pipeline import (
    EvalConfig,
    bootstrap_fd,
    bootstrap_metric,
    compare_systems,
    evaluate_run,
    sparsify_qrels,
)
from .metrics import MetricConfig, mrr_at_k, ndcg_at_k
from .report import EvalReport, round_sig, write_report
from .store import load_store
from .trec_io import parse_qrels, parse_run, serialize_qrels

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class UsageError(FdEvalError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default; usage problems are input errors here
    def error(self, message):
        raise UsageError(message)


def _k_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"--k expects a comma-separated integer list, got {text!r}") from None
    if not values:
        raise UsageError("--k list is empty")
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="fdeval", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, runs: bool = True):
        p.add_argument("--qrels", required=True, help="qrels file path")
        if runs:
            p.add_argument(
                "--run", action="append", required=True, help="run file path (repeatable)"
            )
            p.add_argument("--store", required=True, help="embedding store directory")
            p.add_argument("--k", type=_k_list, default=(10,), help="comma-separated cutoffs")
            p.add_argument("--urr", action="store_true", help="also score unjudged-only pools")
            p.add_argument("--threshold", type=int, default=1, help="min relevant grade")
            p.add_argument("--gain", choices=["linear", "exp"], default="linear")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")

    add_common(sub.add_parser("eval", help="evaluate a single run"))
    add_common(sub.add_parser("compare", help="evaluate and correlate several runs"))

    boot = sub.add_parser("bootstrap", help="bootstrap intervals for a single run")
    add_common(boot)
    boot.add_argument("--resamples", type=int, default=1000)
    boot.add_argument("--confidence", type=float, default=0.95)

    sparsify = sub.add_parser("sparsify", help="cap relevant judgments per query")
    add_common(sparsify, runs=False)
    sparsify.add_argument("--max-per-query", type=int, required=True)

    validate = sub.add_parser("validate-store", help="validate a store directory")
    validate.add_argument("--store", required=True)

    return parser


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"{what} not found: {path}")
    return p


def _config(args, k_list) -> EvalConfig:
    return EvalConfig(
        k_list=k_list,
        urr=args.urr,
        relevance_threshold=args.threshold,
        gain=args.gain,
        seed=args.seed,
    )


def _load_inputs(args):
    qrels = parse_qrels(_require_file(args.qrels, "qrels file"))
    runs = [parse_run(_require_file(path, "run file")) for path in args.run]
    store = load_store(args.store)
    return qrels, runs, store


def _provenance(report: EvalReport, args) -> EvalReport:
    settings = dict(report.settings)
    settings["inputs"] = {
        "qrels": args.qrels,
        "runs": list(args.run),
        "store": args.store,
    }
    return EvalReport(
        systems=report.systems,
        correlations=report.correlations,
        settings=settings,
        diagnostics=report.diagnostics,
    )


def _cmd_eval(args) -> int:
    if len(args.run) != 1:
        raise UsageError("eval takes exactly one --run; use compare for several")
    qrels, runs, store = _load_inputs(args)
    report = _provenance(evaluate_run(runs[0], qrels, store, _config(args, args.k)), args)
    write_report(report, args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    if len(args.run) < 2:
        raise UsageError("compare needs at least two --run files")
    qrels, runs, store = _load_inputs(args)
    report = _provenance(compare_systems(runs, qrels, store, _config(args, args.k)), args)
    write_report(report, args.out)
    return EXIT_OK


def _cmd_bootstrap(args) -> int:
    if len(args.run) != 1:
        raise UsageError("bootstrap takes exactly one --run")
    qrels, runs, store = _load_inputs(args)
    run = runs[0]

    results = []
    for k in args.k:
        cfg = MetricConfig(k=k, relevance_threshold=args.threshold, gain=args.gain)
        results.append(
            bootstrap_metric(
                mrr_at_k(run, qrels, cfg).per_query,
                n_resamples=args.resamples,
                confidence=args.confidence,
                seed=args.seed,
                metric_name=f"MRR@{k}",
            )
        )
        ndcg = ndcg_at_k(run, qrels, cfg)
        if ndcg.per_query:
            results.append(
                bootstrap_metric(
                    ndcg.per_query,
                    n_resamples=args.resamples,
                    confidence=args.confidence,
                    seed=args.seed,
                    metric_name=f"nDCG@{k}",
                )
            )
        for urr in ([False, True] if args.urr else [False]):
            results.append(
                bootstrap_fd(
                    run,
                    qrels,
                    store,
                    k,
                    n_resamples=args.resamples,
                    confidence=args.confidence,
                    seed=args.seed,
                    relevance_threshold=args.threshold,
                    urr=urr,
                )
            )

    payload = {
        "system": run.system_tag,
        "intervals": {
            r.metric_name: {
                "mean": round_sig(r.mean),
                "lower": round_sig(r.lower),
                "upper": round_sig(r.upper),
                "n_resamples": r.n_resamples,
                "confidence": r.confidence,
                "seed": r.seed,
            }
            for r in results
        },
        "settings": {
            "k_list": list(args.k),
            "urr": args.urr,
            "relevance_threshold": args.threshold,
            "gain": args.gain,
            "inputs": {"qrels": args.qrels, "runs": list(args.run), "store": args.store},
        },
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "bootstrap.json").write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    width = max(len(r.metric_name) for r in results)
    lines = [f"Bootstrap intervals for {run.system_tag} "
             f"(N={args.resamples}, confidence={args.confidence})"]
    for r in results:
        lines.append(
            f"{r.metric_name.ljust(width)}  mean={r.mean:.3f}  "
            f"[{r.lower:.3f}, {r.upper:.3f}]"
        )
    (out_dir / "bootstrap.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_sparsify(args) -> int:
    if args.max_per_query < 1:
        raise UsageError("--max-per-query must be >= 1")
    qrels = parse_qrels(_require_file(args.qrels, "qrels file"))
    sparsified = sparsify_qrels(qrels, args.max_per_query, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "sparsified.qrels"
    out_path.write_text(serialize_qrels(sparsified), encoding="utf-8")
    return EXIT_OK


def _cmd_validate_store(args) -> int:
    store = load_store(args.store)
    print(
        json.dumps(
            {
                "valid": True,
                "dim": store.dim,
                "count": store.count,
                "encoder": store.encoder,
            }
        )
    )
    return EXIT_OK


_COMMANDS = {
    "eval": _cmd_eval,
    "compare": _cmd_compare,
    "bootstrap": _cmd_bootstrap,
    "sparsify": _cmd_sparsify,
    "validate-store": _cmd_validate_store,
}


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    line_number = getattr(exc, "line_number", None)
    if line_number is not None:
        payload["line_number"] = line_number
    path = getattr(exc, "path", None)
    if path is not None:
        payload["path"] = path
    print(json.dumps(payload), file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (UsageError, ParseError, ValidationError) as exc:
        _emit_error(exc)
        return EXIT_INPUT
    except (NumericalError, PoolTooSmallError, DegenerateInputError) as exc:
        _emit_error(exc)
        return EXIT_NUMERICAL
    except OSError as exc:
        _emit_error(exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
