"""Greedy alignment of paraphrased sentences onto original-sentence spans.

Each paraphrased sentence is aligned independently against the original
sentences using a similarity matrix.  When the best single-sentence
similarity does not exceed the threshold, the sentence is aligned to that
argmax sentence alone.  Otherwise it is aligned to the widest window of
consecutive original sentences whose mean similarity strictly exceeds the
threshold, scanning window widths from the full width down and starts left
to right, so the result is the widest-then-leftmost qualifying window.
Termination is guaranteed: the width-1 window at the argmax qualifies.

The default threshold of 0.75 was calibrated for neural sentence-embedding
cosine similarities; calibrate_threshold re-derives one for other providers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import MissingInputError, ValidationError

DEFAULT_THRESHOLD = 0.75


@dataclass(frozen=True)
class SimilarityMatrix:
    """n paraphrased sentences (rows) scored against m original sentences."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValidationError("similarity matrix must be 2-D with both dimensions >= 1")
        if not np.all(np.isfinite(values)):
            raise ValidationError("similarity matrix has non-finite entries")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Alignment:
    """One (paraphrased index, [start, end) original span) pair per sentence."""

    pairs: tuple[tuple[int, tuple[int, int]], ...]

    def span_for(self, i: int) -> tuple[int, int]:
        for idx, span in self.pairs:
            if idx == i:
                return span
        raise KeyError(i)


def as_similarity_matrix(mat) -> SimilarityMatrix:
    return mat if isinstance(mat, SimilarityMatrix) else SimilarityMatrix(np.asarray(mat, dtype=float))


def align_greedy(mat, threshold: float = DEFAULT_THRESHOLD) -> Alignment:
    """Align every row of the matrix per the widest-then-leftmost window rule."""
    sim = as_similarity_matrix(mat)
    m = sim.m
    pairs: list[tuple[int, tuple[int, int]]] = []
    for i in range(sim.n):
        # plain left-to-right summation keeps window means bit-identical to a
        # naive reference when a mean lands exactly on the threshold
        row = [float(v) for v in sim.values[i]]
        best = max(row)
        if best <= threshold:
            j = row.index(best)  # argmax ties resolve to the smallest index
            pairs.append((i, (j, j + 1)))
            continue
        found: tuple[int, int] | None = None
        for width in range(m, 0, -1):
            for start in range(0, m - width + 1):
                if sum(row[start : start + width]) / width > threshold:
                    found = (start, start + width)
                    break
            if found is not None:
                break
        assert found is not None  # width-1 window at argmax always qualifies
        pairs.append((i, found))
    return Alignment(tuple(pairs))


# ---------------------------------------------------------------------------
# Similarity providers
# ---------------------------------------------------------------------------


def _count_vector(sentence: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    for token in sentence.lower().split():
        counts[token] = counts.get(token, 0) + 1
    return counts


def _cosine(a: dict[str, int], b: dict[str, int]) -> float:
    dot = sum(count * b.get(token, 0) for token, count in a.items())
    if dot == 0:
        return 0.0
    norm_a = sum(c * c for c in a.values()) ** 0.5
    norm_b = sum(c * c for c in b.values()) ** 0.5
    return dot / (norm_a * norm_b)


def lexical_similarity_provider(a_sentences, b_sentences) -> SimilarityMatrix:
    """Cosine similarity of lowercased token-count vectors, in [0, 1].

    Fallback provider for when no embedding file is supplied.
    """
    if not a_sentences or not b_sentences:
        raise ValidationError("both sentence lists must be non-empty")
    a_vecs = [_count_vector(s) for s in a_sentences]
    b_vecs = [_count_vector(s) for s in b_sentences]
    values = np.array([[_cosine(a, b) for b in b_vecs] for a in a_vecs])
    return SimilarityMatrix(values)


class FileSimilarityProvider:
    """Serves per-record matrices stored as JSONL {"record_id", "rows"}.

    Rows index paraphrased sentences, columns original sentences.  Lookup
    validates stored dimensions against the caller's sentence counts.
    """

    def __init__(self, matrices: dict[str, np.ndarray]):
        self._matrices = matrices

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._matrices

    def matrix_for(self, record_id: str, n: int | None = None, m: int | None = None) -> SimilarityMatrix:
        if record_id not in self._matrices:
            raise MissingInputError(f"no similarity matrix for record {record_id!r}")
        values = self._matrices[record_id]
        if n is not None and values.shape[0] != n:
            raise ValidationError(
                f"record {record_id!r}: stored matrix has {values.shape[0]} rows, "
                f"expected {n} paraphrased sentences"
            )
        if m is not None and values.shape[1] != m:
            raise ValidationError(
                f"record {record_id!r}: stored matrix has {values.shape[1]} columns, "
                f"expected {m} original sentences"
            )
        return SimilarityMatrix(values)


def file_similarity_provider(path: str | Path) -> FileSimilarityProvider:
    """Load a similarity-matrix JSONL file into a record-keyed provider."""
    from .corpus import iter_jsonl  # local import keeps module deps one-way

    matrices: dict[str, np.ndarray] = {}
    for lineno, obj in iter_jsonl(path):
        try:
            record_id = obj["record_id"]
            rows = np.asarray(obj["rows"], dtype=float)
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: malformed similarity entry") from exc
        if rows.ndim != 2:
            raise ValidationError(f"{path}:{lineno}: rows must form a rectangular matrix")
        matrices[record_id] = rows
    return FileSimilarityProvider(matrices)


def calibrate_threshold(matched_similarities, unmatched_similarities) -> float:
    """Best single cut separating matched from unmatched similarity scores.

    Scans midpoints between adjacent distinct pooled scores (plus the two
    degenerate all-on-one-side cuts) and returns the cut with the highest
    accuracy for the rule "score > threshold means matched".  Accuracy ties
    resolve to the highest qualifying cut, which keeps the calibrated
    threshold conservative about calling pairs matched.
    """
    matched = np.asarray(matched_similarities, dtype=float)
    unmatched = np.asarray(unmatched_similarities, dtype=float)
    if matched.size == 0 or unmatched.size == 0:
        raise ValidationError("both score lists must be non-empty")
    pooled = np.unique(np.concatenate([matched, unmatched]))
    candidates = [float(pooled[0]) - 1.0, float(pooled[-1])]
    candidates.extend((float(a) + float(b)) / 2.0 for a, b in zip(pooled, pooled[1:]))
    total = matched.size + unmatched.size
    best_threshold = None
    best_accuracy = -1.0
    for threshold in sorted(candidates):
        accuracy = (int((matched > threshold).sum()) + int((unmatched <= threshold).sum())) / total
        if accuracy >= best_accuracy:
            best_accuracy = accuracy
            best_threshold = threshold
    return float(best_threshold)
