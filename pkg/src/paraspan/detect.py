"""Per-sentence scorer contract, the two reference baselines, and score I/O.

Every scorer is "paraphrasing degree" oriented: higher means more likely
paraphrased.  The oracle baseline scores each paraphrased sentence by its
lexical divergence against the truly aligned original span (unmodified
sentences score exactly 0); the random baseline scores every sentence
against a uniformly chosen original sentence, which is what makes it
uninformative.  Neural model outputs are ingested from score files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .align import DEFAULT_THRESHOLD, lexical_similarity_provider
from .corpus import ParaphraseRecord, iter_jsonl
from .divergence import annotation_from_text, bleu_tokens, sentence_bleu
from .errors import ValidationError
from .labels import build_labels, span_divergences
from .segment import split_sentences


@dataclass(frozen=True)
class SentenceScores:
    """One score per sentence of a paraphrased text."""

    record_id: str
    scores: tuple[float, ...]
    scorer_name: str = "external"

    def __post_init__(self) -> None:
        if not all(math.isfinite(s) for s in self.scores):
            raise ValidationError(f"record {self.record_id!r}: non-finite score")


def oracle_scorer(
    record: ParaphraseRecord,
    annotations=None,
    provider=lexical_similarity_provider,
    threshold: float = DEFAULT_THRESHOLD,
) -> SentenceScores:
    """Lexical divergence against the truly aligned span (labels code path)."""
    labels = build_labels(record, annotations, provider, threshold)
    return SentenceScores(
        record_id=record.id,
        scores=tuple(vector.lexical for vector in labels.regression),
        scorer_name="oracle",
    )


def random_scorer(record: ParaphraseRecord, rng_seed: int = 0) -> SentenceScores:
    """Divergence against a uniformly random original sentence, per sentence.

    The draw may land on the sentence's own counterpart; that is part of the
    baseline's noise.  Deterministic under the seed.
    """
    para_sentences = split_sentences(record.paraphrased_text).sentences
    orig_tokens = [bleu_tokens(s) for s in split_sentences(record.original.text).sentences]
    rng = np.random.default_rng(rng_seed)
    scores = []
    for sentence in para_sentences:
        pick = int(rng.integers(0, len(orig_tokens)))
        scores.append(1.0 - sentence_bleu(bleu_tokens(sentence), orig_tokens[pick]))
    return SentenceScores(record_id=record.id, scores=tuple(scores), scorer_name="random")


def whole_text_scores(
    original_text: str,
    altered_text: str,
    provider=lexical_similarity_provider,
    threshold: float = DEFAULT_THRESHOLD,
    record_id: str = "",
    scorer_name: str = "oracle",
) -> SentenceScores:
    """Oracle-style scoring of a whole altered text against its original.

    Used by the robustness harness, where a perturbation (reordering, word
    replacement) touches the entire text rather than a marked span: every
    altered sentence is aligned against the full original and scored by
    lexical divergence.
    """
    altered_sentences = list(split_sentences(altered_text).sentences)
    original_sentences = list(split_sentences(original_text).sentences)
    para_anns = [annotation_from_text(s) for s in altered_sentences]
    orig_anns = [annotation_from_text(s) for s in original_sentences]
    matrix = provider(altered_sentences, original_sentences)
    _, vectors, _ = span_divergences(para_anns, orig_anns, matrix, threshold)
    return SentenceScores(
        record_id=record_id,
        scores=tuple(vector.lexical for vector in vectors),
        scorer_name=scorer_name,
    )


def load_external_scores(
    path: str | Path, records: Sequence[ParaphraseRecord] | None = None
) -> list[SentenceScores]:
    """Load {"record_id", "scores"} JSONL; validate counts when records given."""
    expected: dict[str, int] = {}
    if records is not None:
        for record in records:
            expected[record.id] = len(split_sentences(record.paraphrased_text).sentences)
    loaded: list[SentenceScores] = []
    for lineno, obj in iter_jsonl(path):
        try:
            scores = SentenceScores(
                record_id=obj["record_id"], scores=tuple(float(s) for s in obj["scores"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: malformed score entry") from exc
        if expected and scores.record_id in expected:
            want = expected[scores.record_id]
            if len(scores.scores) != want:
                raise ValidationError(
                    f"record {scores.record_id!r}: {len(scores.scores)} scores "
                    f"for {want} sentences"
                )
        loaded.append(scores)
    return loaded


def save_scores(path: str | Path, scores: Sequence[SentenceScores]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for item in scores:
            obj = {"record_id": item.record_id, "scores": list(item.scores)}
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
