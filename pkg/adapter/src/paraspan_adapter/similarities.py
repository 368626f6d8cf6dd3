"""Similarity-matrix export in the primary toolkit's file format."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from paraspan.corpus import ParaphraseRecord
from paraspan.segment import split_sentences

from .encoders import Encoder


def record_similarity_matrix(record: ParaphraseRecord, encoder: Encoder) -> np.ndarray:
    """Full matrix: paraphrased sentences (rows) x original sentences (columns)."""
    paraphrased = list(split_sentences(record.paraphrased_text).sentences)
    original = list(split_sentences(record.original.text).sentences)
    # one encode call per record keeps batching effective
    embedded = encoder.encode(paraphrased + original)
    rows = embedded[: len(paraphrased)]
    columns = embedded[len(paraphrased) :]
    return rows @ columns.T


def emit_similarities(
    records: Sequence[ParaphraseRecord], encoder: Encoder, path: str | Path
) -> int:
    """Write {"record_id", "rows"} JSONL consumable by the primary loader."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            matrix = record_similarity_matrix(record, encoder)
            obj = {"record_id": record.id, "rows": [[float(v) for v in row] for row in matrix]}
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
            count += 1
    return count
