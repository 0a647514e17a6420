"""Report structure and its JSON / plain-text renderings.

JSON numbers carry 10 significant digits; the text table rounds to 3
decimals. Neither rendering embeds timestamps, so re-running a command on
the same inputs reproduces the files byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["EvalReport", "round_sig", "write_report"]

JSON_SIGNIFICANT_DIGITS = 10
TABLE_DECIMALS = 3


def round_sig(value: float, digits: int = JSON_SIGNIFICANT_DIGITS) -> float:
    """Round to `digits` significant digits (stable serialization form)."""
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")


def _rounded(obj):
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


@dataclass(frozen=True)
class EvalReport:
    """Per-system metric values plus correlations, settings and diagnostics."""

    systems: dict[str, dict[str, float]]
    correlations: dict[str, dict]
    settings: dict
    diagnostics: dict = field(default_factory=dict)

    def metric_names(self) -> list[str]:
        names = self.settings.get("metrics")
        if names:
            return list(names)
        seen: list[str] = []
        for values in self.systems.values():
            for name in values:
                if name not in seen:
                    seen.append(name)
        return seen

    def to_json_dict(self) -> dict:
        return {
            "systems": _rounded(self.systems),
            "correlations": _rounded(self.correlations),
            "settings": _rounded(self.settings),
            "diagnostics": _rounded(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        """Fixed-width table: one row per system, one column per metric."""
        metrics = self.metric_names()
        name_width = max([len("System")] + [len(tag) for tag in self.systems])
        col_widths = [max(len(m), TABLE_DECIMALS + 4) for m in metrics]

        lines = []
        header = "System".ljust(name_width) + "".join(
            f"  {m:>{w}}" for m, w in zip(metrics, col_widths)
        )
        lines.append(header)
        lines.append("-" * len(header))
        for tag, values in self.systems.items():
            row = tag.ljust(name_width)
            for m, w in zip(metrics, col_widths):
                value = values.get(m)
                cell = f"{value:.{TABLE_DECIMALS}f}" if value is not None else "n/a"
                row += f"  {cell:>{w}}"
            lines.append(row)

        if self.correlations:
            lines.append("")
            lines.append("Kendall tau between metrics (tau, p-value):")
            pair_width = max(len(k) for k in self.correlations)
            for key, entry in self.correlations.items():
                tau = entry.get("tau")
                p = entry.get("p_value")
                if tau is None:
                    lines.append(f"{key.ljust(pair_width)}  undefined (all systems tied)")
                else:
                    lines.append(
                        f"{key.ljust(pair_width)}  "
                        f"{tau:+.{TABLE_DECIMALS}f}  (p={p:.3g})"
                    )
        return "\n".join(lines) + "\n"


def write_report(report: EvalReport, out_dir: str | Path, basename: str = "report") -> tuple[Path, Path]:
    """Write `<basename>.json` and `<basename>.txt` under `out_dir`."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / f"{basename}.json"
    text_path = out_dir / f"{basename}.txt"
    json_path.write_text(report.to_json(), encoding="utf-8")
    text_path.write_text(report.to_text(), encoding="utf-8")
    return json_path, text_path
