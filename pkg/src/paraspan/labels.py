"""Per-sentence supervision: binary classes and divergence regression targets.

Sentences outside the paraphrased spans are class 0 with an all-zero
divergence vector (an unmodified sentence is its own aligned span).  Inside
a span, alignment runs between that span's paraphrased sentences and the
corresponding original span's sentences only, never across spans, and every
sentence gets class 1 plus its divergence against the aligned span.

Sentence-level flags record the documented edge cases: "identical_paraphrase"
for spans the paraphraser returned verbatim (they keep class 1 but score 0),
"missing_parse" when the syntactic component had no parse to use, and
"virtual_root_span" when a multi-sentence aligned span was parsed under a
synthetic root.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .align import (
    DEFAULT_THRESHOLD,
    Alignment,
    FileSimilarityProvider,
    align_greedy,
    lexical_similarity_provider,
)
from .corpus import ParaphraseRecord, SentenceAnnotation
from .divergence import (
    ZERO_DIVERGENCE,
    DivergenceVector,
    annotation_from_text,
    divergence_vector,
    span_annotation,
)
from .errors import MissingInputError, ValidationError
from .segment import split_sentences

EXPORT_MODES = (
    "classification",
    "regression_lexical",
    "regression_grammatical",
    "regression_syntactic",
    "regression_aggregate_vector",
)


@dataclass(frozen=True)
class SentenceLabels:
    """Classes, regression targets and alignment for one paraphrased text."""

    record_id: str
    classes: tuple[int, ...]
    regression: tuple[DivergenceVector, ...]
    alignment: Alignment | None = None
    flags: tuple[frozenset[str], ...] = ()

    def __post_init__(self) -> None:
        if len(self.classes) != len(self.regression):
            raise ValidationError("classes and regression lengths differ")
        if self.flags and len(self.flags) != len(self.classes):
            raise ValidationError("flags length differs from sentence count")
        for cls, vector in zip(self.classes, self.regression):
            if cls not in (0, 1):
                raise ValidationError("classes must be 0 or 1")
            if cls == 0 and not vector.is_zero():
                raise ValidationError("class-0 sentence with non-zero divergence")


def span_divergences(
    para_annotations: Sequence[SentenceAnnotation],
    orig_annotations: Sequence[SentenceAnnotation],
    matrix,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[Alignment, list[DivergenceVector], list[set[str]]]:
    """Align one span pair and score every paraphrased sentence against its span.

    Shared by label construction and the oracle-style scorers; the returned
    flag sets use span-local indices.
    """
    alignment = align_greedy(matrix, threshold)
    vectors: list[DivergenceVector] = []
    flags: list[set[str]] = []
    for i, (j_start, j_end) in alignment.pairs:
        sentence_flags: set[str] = set()
        target = span_annotation(list(orig_annotations[j_start:j_end]))
        if j_end - j_start > 1 and target.parse is not None:
            sentence_flags.add("virtual_root_span")
        vector = divergence_vector(para_annotations[i], target)
        if vector.syntactic_missing:
            sentence_flags.add("missing_parse")
        if vector.is_zero():
            sentence_flags.add("identical_paraphrase")
        vectors.append(vector)
        flags.append(sentence_flags)
    return alignment, vectors, flags


def _span_matrix(provider, record, para_sentences, orig_sentences, p_span, o_span):
    para_slice = para_sentences[p_span.start_sentence : p_span.end_sentence]
    orig_slice = orig_sentences[o_span.start_sentence : o_span.end_sentence]
    if isinstance(provider, FileSimilarityProvider):
        full = provider.matrix_for(record.id, n=len(para_sentences), m=len(orig_sentences))
        return full.values[
            p_span.start_sentence : p_span.end_sentence,
            o_span.start_sentence : o_span.end_sentence,
        ]
    return provider(para_slice, orig_slice)


def build_labels(
    record: ParaphraseRecord,
    annotations: dict[tuple[str, str], Sequence[SentenceAnnotation]] | None,
    provider=lexical_similarity_provider,
    threshold: float = DEFAULT_THRESHOLD,
) -> SentenceLabels:
    """Construct classes and regression targets for one record.

    ``annotations`` is the sidecar map; when None, tokens fall back to the
    built-in tokenizer with untagged POS (regression then reflects lexical
    structure only).  Sentence counts must match the sidecar entries.
    """
    para_sentences = list(split_sentences(record.paraphrased_text).sentences)
    orig_sentences = list(split_sentences(record.original.text).sentences)

    def side_annotations(side: str, sentences: list[str]) -> list[SentenceAnnotation]:
        if annotations is None:
            return [annotation_from_text(s) for s in sentences]
        key = (record.id, side)
        if key not in annotations:
            raise MissingInputError(f"missing annotations for record {record.id!r} ({side})")
        anns = list(annotations[key])
        if len(anns) != len(sentences):
            raise ValidationError(
                f"record {record.id!r}: {side} annotations cover {len(anns)} sentences, "
                f"segmenter found {len(sentences)}"
            )
        return anns

    para_anns = side_annotations("paraphrased", para_sentences)
    orig_anns = side_annotations("original", orig_sentences)

    n = len(para_sentences)
    classes = [0] * n
    regression: list[DivergenceVector] = [ZERO_DIVERGENCE] * n
    flags: list[set[str]] = [set() for _ in range(n)]
    global_pairs: list[tuple[int, tuple[int, int]]] = []

    for o_span, p_span in zip(record.original_spans, record.paraphrased_spans):
        if p_span.end_sentence > n or o_span.end_sentence > len(orig_sentences):
            raise ValidationError(f"record {record.id!r}: span exceeds sentence count")
        matrix = _span_matrix(provider, record, para_sentences, orig_sentences, p_span, o_span)
        local = span_divergences(
            para_anns[p_span.start_sentence : p_span.end_sentence],
            orig_anns[o_span.start_sentence : o_span.end_sentence],
            matrix,
            threshold,
        )
        alignment, vectors, local_flags = local
        for (i, (a, b)), vector, sentence_flags in zip(alignment.pairs, vectors, local_flags):
            global_i = p_span.start_sentence + i
            classes[global_i] = 1
            regression[global_i] = vector
            flags[global_i] = sentence_flags
            global_pairs.append(
                (global_i, (o_span.start_sentence + a, o_span.start_sentence + b))
            )

    return SentenceLabels(
        record_id=record.id,
        classes=tuple(classes),
        regression=tuple(regression),
        alignment=Alignment(tuple(global_pairs)) if global_pairs else None,
        flags=tuple(frozenset(f) for f in flags),
    )


def class_only_labels(record: ParaphraseRecord) -> SentenceLabels:
    """Classes from the span lists alone; regression left all-zero."""
    n = len(split_sentences(record.paraphrased_text).sentences)
    classes = [0] * n
    for span in record.paraphrased_spans:
        if span.end_sentence > n:
            raise ValidationError(f"record {record.id!r}: span exceeds sentence count")
        for i in range(span.start_sentence, span.end_sentence):
            classes[i] = 1
    flags = tuple(
        frozenset(["classes_only"]) if cls == 1 else frozenset() for cls in classes
    )
    return SentenceLabels(
        record_id=record.id,
        classes=tuple(classes),
        regression=(ZERO_DIVERGENCE,) * n,
        alignment=None,
        flags=flags,
    )


def _target_for(labels: SentenceLabels, index: int, mode: str):
    vector = labels.regression[index]
    if mode == "classification":
        return labels.classes[index]
    if mode == "regression_lexical":
        return vector.lexical
    if mode == "regression_grammatical":
        return vector.grammatical
    if mode == "regression_syntactic":
        return vector.syntactic
    if mode == "regression_aggregate_vector":
        return vector.as_list()
    raise ValidationError(f"unknown export mode {mode!r}")


def export_training_file(
    path: str | Path, labels: Sequence[SentenceLabels], mode: str = "classification"
) -> int:
    """Write one JSONL line per sentence; returns the line count."""
    if mode not in EXPORT_MODES:
        raise ValidationError(f"unknown export mode {mode!r}")
    lines = 0
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for item in labels:
            for index in range(len(item.classes)):
                obj = {
                    "record_id": item.record_id,
                    "sentence_index": index,
                    "target": _target_for(item, index, mode),
                }
                handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
                lines += 1
    return lines
