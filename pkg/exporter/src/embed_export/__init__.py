"""Corpus-to-embedding-store export tool."""

from .corpus import read_corpus
from .encoders import HashingEncoder, resolve_encoder
from .errors import CorpusError, ExportError, UnresolvableEncoderError
from .exporter import ExportSummary, export_embeddings

__version__ = "0.1.0"

__all__ = [
    "CorpusError",
    "ExportError",
    "ExportSummary",
    "HashingEncoder",
    "UnresolvableEncoderError",
    "export_embeddings",
    "read_corpus",
    "resolve_encoder",
]
