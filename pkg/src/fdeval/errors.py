"""Exception and warning types shared across the toolkit."""

from __future__ import annotations


class FdEvalError(Exception):
    """Base class for all toolkit errors."""


class ParseError(FdEvalError):
    """A qrels or run file line could not be parsed.

    Carries the 1-based line number and, when known, the source path.
    """

    def __init__(self, message: str, line_number: int, path: str | None = None):
        self.line_number = line_number
        self.path = path
        where = f"{path}:{line_number}" if path else f"line {line_number}"
        super().__init__(f"{where}: {message}")


class ValidationError(FdEvalError):
    """Input data violates a structural invariant (sizes, finiteness, ids)."""


class InsufficientSamplesError(ValidationError):
    """Fewer samples than the operation requires (Gaussian fits need n >= 2)."""


class MissingEmbeddingsError(ValidationError):
    """Missing-embedding rate exceeded the configured abort threshold."""


class PoolTooSmallError(FdEvalError):
    """A document pool ended up with fewer than 2 embedded rows."""


class DegenerateInputError(FdEvalError):
    """Rank correlation is undefined (all values tied in one input)."""


class NumericalError(FdEvalError):
    """A linear-algebra routine failed even after regularization.

    `diagnostics` holds whatever context was available at the failure site.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class TrecFormatWarning(UserWarning):
    """Tolerated irregularity in a TREC file (score order, mixed tags)."""


class NumericalWarning(UserWarning):
    """Numerical result required an unusually large correction."""
