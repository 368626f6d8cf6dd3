"""Sentence encoders producing unit-normalized embeddings.

Two implementations: a neural one backed by sentence-transformers (loaded
lazily so the package works without it), and a deterministic hashed
bag-of-words encoder used as the CI-safe stand-in.  Both return float
matrices with one L2-normalized row per sentence, so cosine similarity is
a plain dot product downstream.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np


class Encoder(Protocol):
    def encode(self, sentences: Sequence[str]) -> np.ndarray: ...


def _normalize(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


class HashingEncoder:
    """Deterministic hashed token-count embeddings.

    Identical sentences map to identical vectors (cosine exactly 1), which
    is all the mock needs; unrelated sentences land nearly orthogonal for
    reasonable dimensionality.
    """

    def __init__(self, dimensions: int = 512):
        if dimensions <= 0:
            raise ValueError("dimensions must be > 0")
        self.dimensions = dimensions

    def _bucket(self, token: str) -> int:
        digest = hashlib.blake2s(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little") % self.dimensions

    def encode(self, sentences: Sequence[str]) -> np.ndarray:
        matrix = np.zeros((len(sentences), self.dimensions))
        for row, sentence in enumerate(sentences):
            for token in sentence.lower().split():
                matrix[row, self._bucket(token)] += 1.0
        return _normalize(matrix)


class SentenceTransformerEncoder:
    """Neural embeddings via sentence-transformers (optional dependency)."""

    def __init__(self, model_name: str, batch_size: int = 32):
        from sentence_transformers import SentenceTransformer  # lazy: heavy import

        self._model = SentenceTransformer(model_name)
        self.batch_size = batch_size

    def encode(self, sentences: Sequence[str]) -> np.ndarray:
        embeddings = self._model.encode(
            list(sentences), batch_size=self.batch_size, convert_to_numpy=True
        )
        return _normalize(np.asarray(embeddings, dtype=float))


def build_encoder(kind: str, model_name: str, batch_size: int = 32) -> Encoder:
    if kind == "hashing":
        return HashingEncoder()
    if kind == "neural":
        return SentenceTransformerEncoder(model_name, batch_size)
    raise ValueError(f"unknown encoder kind {kind!r}")
