"""Encoder resolution and batched text encoding.

Three encoder families, picked by name:

- ``hashing/<dim>``   built-in deterministic character n-gram feature
                      hashing (no model download, bit-for-bit reproducible;
                      meant for tests, CI and offline smoke runs).
- sentence-transformers checkpoints (pooling baked into the model).
- any Hugging Face ``AutoModel`` checkpoint, with masked-mean or CLS
  pooling applied here.

The transformer families require their libraries installed and the weights
available locally or downloadable; otherwise resolution raises
UnresolvableEncoderError and names the missing piece.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .errors import UnresolvableEncoderError

HASHING_PREFIX = "hashing/"
_NGRAM_SIZES = (3, 4, 5)


class HashingEncoder:
    """Character n-gram feature hashing with signed buckets, L2-normalized.

    Deterministic across processes and platforms (blake2b-based), so
    repeated exports agree exactly. Texts shorter than the smallest n-gram
    fall back to hashing the whole string.
    """

    pooling = "hashing"

    def __init__(self, dim: int):
        if dim < 1:
            raise UnresolvableEncoderError(f"hashing dimension must be >= 1, got {dim}")
        self.dim = dim
        self.truncated = 0

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            self._accumulate(out[row], text.lower())
            norm = np.linalg.norm(out[row])
            if norm > 0:
                out[row] /= norm
        return out.astype(np.float32)

    def _accumulate(self, vec: np.ndarray, text: str) -> None:
        grams = [
            text[i : i + n]
            for n in _NGRAM_SIZES
            for i in range(len(text) - n + 1)
        ] or [text]
        for gram in grams:
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=9).digest()
            index = int.from_bytes(digest[:8], "little") % self.dim
            sign = 1.0 if digest[8] & 1 else -1.0
            vec[index] += sign


class SentenceTransformerEncoder:
    """Wrapper around a sentence-transformers checkpoint."""

    def __init__(self, name: str, device: str | None, max_length: int | None):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise UnresolvableEncoderError(
                "sentence-transformers is not installed; install the "
                "'transformers' extra or use a hashing/<dim> encoder"
            ) from exc
        try:
            self._model = SentenceTransformer(name, device=device)
        except Exception as exc:
            raise UnresolvableEncoderError(f"cannot load encoder {name!r}: {exc}") from exc
        if max_length is not None:
            self._model.max_seq_length = max_length
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.pooling = "model-default"
        self.truncated = 0

    def encode(self, texts: list[str]) -> np.ndarray:
        emb = self._model.encode(
            texts, batch_size=len(texts), convert_to_numpy=True, show_progress_bar=False
        )
        return np.asarray(emb, dtype=np.float32)


class TransformerEncoder:
    """Raw Hugging Face model with masked-mean or CLS pooling."""

    def __init__(self, name: str, device: str | None, max_length: int | None, pooling: str):
        if pooling not in ("mean", "cls"):
            raise UnresolvableEncoderError(f"pooling must be 'mean' or 'cls', got {pooling!r}")
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise UnresolvableEncoderError(
                "transformers/torch are not installed; install the "
                "'transformers' extra or use a hashing/<dim> encoder"
            ) from exc
        self._torch = torch
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(name)
            self._model = AutoModel.from_pretrained(name)
        except Exception as exc:
            raise UnresolvableEncoderError(f"cannot load encoder {name!r}: {exc}") from exc
        self._device = device or ("cuda" if torch.cuda.is_available() else "cpu")
        self._model.to(self._device)
        self._model.eval()
        self._max_length = max_length or self._tokenizer.model_max_length
        self.dim = int(self._model.config.hidden_size)
        self.pooling = pooling
        self.truncated = 0

    def encode(self, texts: list[str]) -> np.ndarray:
        torch = self._torch
        lengths = [
            len(ids) for ids in self._tokenizer(texts, truncation=False)["input_ids"]
        ]
        self.truncated += sum(1 for n in lengths if n > self._max_length)
        batch = self._tokenizer(
            texts,
            truncation=True,
            max_length=self._max_length,
            padding=True,
            return_tensors="pt",
        ).to(self._device)
        with torch.no_grad():
            hidden = self._model(**batch).last_hidden_state
        if self.pooling == "cls":
            pooled = hidden[:, 0]
        else:
            mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1e-9)
        return pooled.cpu().numpy().astype(np.float32)


def resolve_encoder(
    name: str,
    pooling: str = "mean",
    max_length: int | None = None,
    device: str | None = None,
):
    """Turn an encoder name into a ready-to-use encoder object."""
    match = re.fullmatch(rf"{HASHING_PREFIX}(\d+)", name)
    if match:
        return HashingEncoder(dim=int(match.group(1)))
    if name.startswith(HASHING_PREFIX):
        raise UnresolvableEncoderError(
            f"hashing encoder names look like 'hashing/<dim>', got {name!r}"
        )
    try:
        return SentenceTransformerEncoder(name, device=device, max_length=max_length)
    except UnresolvableEncoderError as st_error:
        try:
            return TransformerEncoder(
                name, device=device, max_length=max_length, pooling=pooling
            )
        except UnresolvableEncoderError:
            raise UnresolvableEncoderError(
                f"encoder {name!r} could not be resolved "
                f"(sentence-transformers: {st_error})"
            ) from st_error
