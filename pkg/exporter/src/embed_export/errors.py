"""Exporter error types."""

from __future__ import annotations


class ExportError(Exception):
    """Base class for exporter failures."""


class CorpusError(ExportError):
    """Corpus file violates the TSV contract (carries the 1-based line)."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}{message}")


class UnresolvableEncoderError(ExportError):
    """The requested encoder name could not be resolved to a usable model."""
