"""Data model, JSONL ingestion/emission, and dataset-construction helpers.

A dataset file holds one ParaphraseRecord per line (UTF-8, LF endings):

    {"id": str, "source": "human"|"machine", "domain": str, "generator": str,
     "original_text": str, "paraphrased_text": str,
     "original_spans": [[int, int], ...], "paraphrased_spans": [[int, int], ...],
     "method": "context_agnostic"|"context_aware"|"none", "prompt_id": str?}

The annotation sidecar carries externally produced tokens, POS tags and
constituency parses per sentence:

    {"record_id": str, "side": "original"|"paraphrased",
     "sentences": [{"tokens": [str], "pos": [str], "parse": str?}]}

All sampling is deterministic under a seed (PCG64 via numpy's default_rng).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, ValidationError
from .segment import split_sentences

SOURCES = frozenset(["human", "machine"])
METHODS = frozenset(["context_agnostic", "context_aware", "none"])

SPAN_MIN_SENTENCES = 1
SPAN_MAX_SENTENCES = 10
MULTI_SPAN_COUNT_RANGE = (2, 5)
MULTI_SPAN_LEN_RANGE = (1, 3)
_MULTI_SPAN_RETRIES = 100


@dataclass(frozen=True)
class Document:
    """A source text, either human-authored or machine-generated."""

    id: str
    text: str
    source: str
    domain: str = ""
    generator: str = "human"

    def __post_init__(self) -> None:
        if not self.text:
            raise ValidationError(f"document {self.id!r}: empty text")
        if self.source not in SOURCES:
            raise ValidationError(f"document {self.id!r}: unknown source {self.source!r}")


@dataclass(frozen=True, order=True)
class SpanSelection:
    """Half-open sentence range [start_sentence, end_sentence)."""

    start_sentence: int
    end_sentence: int

    def __post_init__(self) -> None:
        if self.start_sentence < 0 or self.start_sentence >= self.end_sentence:
            raise ValidationError(
                f"invalid span [{self.start_sentence}, {self.end_sentence})"
            )

    def __len__(self) -> int:
        return self.end_sentence - self.start_sentence

    def as_pair(self) -> list[int]:
        return [self.start_sentence, self.end_sentence]


def _check_span_list(spans: Sequence[SpanSelection], what: str, record_id: str) -> None:
    for prev, cur in zip(spans, spans[1:]):
        if cur.start_sentence < prev.end_sentence:
            raise ValidationError(f"record {record_id!r}: overlapping {what} spans")
        if cur.start_sentence == prev.end_sentence:
            raise ValidationError(f"record {record_id!r}: adjacent {what} spans")


@dataclass(frozen=True)
class ParaphraseRecord:
    """An original document plus its (partially) paraphrased counterpart."""

    id: str
    original: Document
    paraphrased_text: str
    original_spans: tuple[SpanSelection, ...] = ()
    paraphrased_spans: tuple[SpanSelection, ...] = ()
    method: str = "none"
    prompt_id: str | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"record {self.id!r}: unknown method {self.method!r}")
        if not self.paraphrased_text:
            raise ValidationError(f"record {self.id!r}: empty paraphrased text")
        if len(self.original_spans) != len(self.paraphrased_spans):
            raise ValidationError(f"record {self.id!r}: span list lengths differ")
        if self.method == "none":
            if self.original_spans or self.paraphrased_spans:
                raise ValidationError(f"record {self.id!r}: method=none with spans")
            if self.paraphrased_text != self.original.text:
                raise ValidationError(
                    f"record {self.id!r}: method=none but texts differ"
                )
        elif not self.original_spans:
            raise ValidationError(f"record {self.id!r}: paraphrase method without spans")
        _check_span_list(self.original_spans, "original", self.id)
        _check_span_list(self.paraphrased_spans, "paraphrased", self.id)


@dataclass(frozen=True)
class SentenceAnnotation:
    """Externally produced per-sentence tokens, POS tags and optional parse."""

    tokens: tuple[str, ...]
    pos_tags: tuple[str, ...]
    parse: str | None = None

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.pos_tags):
            raise ValidationError("tokens and pos_tags lengths differ")


# ---------------------------------------------------------------------------
# JSONL I/O
# ---------------------------------------------------------------------------


def _spans_from_json(raw, what: str, record_id: str) -> tuple[SpanSelection, ...]:
    try:
        return tuple(SpanSelection(int(a), int(b)) for a, b in raw)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"record {record_id!r}: malformed {what} spans") from exc


def record_from_dict(obj: dict) -> ParaphraseRecord:
    record_id = obj.get("id", "<missing id>")
    for key in ("id", "source", "original_text", "paraphrased_text", "method"):
        if key not in obj:
            raise ValidationError(f"record {record_id!r}: missing field {key!r}")
    doc = Document(
        id=obj["id"],
        text=obj["original_text"],
        source=obj["source"],
        domain=obj.get("domain", ""),
        generator=obj.get("generator", "human"),
    )
    return ParaphraseRecord(
        id=obj["id"],
        original=doc,
        paraphrased_text=obj["paraphrased_text"],
        original_spans=_spans_from_json(obj.get("original_spans", []), "original", record_id),
        paraphrased_spans=_spans_from_json(
            obj.get("paraphrased_spans", []), "paraphrased", record_id
        ),
        method=obj["method"],
        prompt_id=obj.get("prompt_id"),
    )


def record_to_dict(record: ParaphraseRecord) -> dict:
    obj = {
        "id": record.id,
        "source": record.original.source,
        "domain": record.original.domain,
        "generator": record.original.generator,
        "original_text": record.original.text,
        "paraphrased_text": record.paraphrased_text,
        "original_spans": [s.as_pair() for s in record.original_spans],
        "paraphrased_spans": [s.as_pair() for s in record.paraphrased_spans],
        "method": record.method,
    }
    if record.prompt_id is not None:
        obj["prompt_id"] = record.prompt_id
    return obj


def iter_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    """Yield (line number, parsed object) pairs; blank lines are skipped."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: malformed JSON line: {exc}") from exc
            if not isinstance(obj, dict):
                raise FormatError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def write_jsonl(path: str | Path, objects: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for obj in objects:
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[ParaphraseRecord]:
    """Load and validate records in file order.

    Structural invariants (span ordering, method consistency, unique ids)
    are enforced here.  Sentence-level invariants that require segmenting
    the texts are checked by verify_record_sentences.
    """
    records: list[ParaphraseRecord] = []
    seen: set[str] = set()
    for lineno, obj in iter_jsonl(path):
        try:
            record = record_from_dict(obj)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
        if record.id in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate record id {record.id!r}")
        seen.add(record.id)
        records.append(record)
    return records


def save_records(path: str | Path, records: Iterable[ParaphraseRecord]) -> None:
    write_jsonl(path, (record_to_dict(r) for r in records))


def verify_record_sentences(record: ParaphraseRecord) -> None:
    """Segmentation-dependent invariants: span bounds and outside-span equality."""
    original = split_sentences(record.original.text).sentences
    paraphrased = split_sentences(record.paraphrased_text).sentences
    for spans, count, what in (
        (record.original_spans, len(original), "original"),
        (record.paraphrased_spans, len(paraphrased), "paraphrased"),
    ):
        for span in spans:
            if span.end_sentence > count:
                raise ValidationError(
                    f"record {record.id!r}: {what} span {span.as_pair()} exceeds "
                    f"{count} sentences"
                )
    # Outside the spans the two sides must agree sentence by sentence.
    i = j = 0
    o_spans = list(record.original_spans)
    p_spans = list(record.paraphrased_spans)
    for o_span, p_span in zip(o_spans + [None], p_spans + [None]):
        o_stop = o_span.start_sentence if o_span else len(original)
        p_stop = p_span.start_sentence if p_span else len(paraphrased)
        if o_stop - i != p_stop - j:
            raise ValidationError(f"record {record.id!r}: unmodified regions differ in length")
        for oi, pj in zip(range(i, o_stop), range(j, p_stop)):
            if original[oi] != paraphrased[pj]:
                raise ValidationError(
                    f"record {record.id!r}: sentence outside spans differs "
                    f"(original #{oi} vs paraphrased #{pj})"
                )
        if o_span is None:
            break
        i, j = o_span.end_sentence, p_span.end_sentence


# ---------------------------------------------------------------------------
# Annotation sidecar
# ---------------------------------------------------------------------------


def annotation_from_dict(obj: dict) -> SentenceAnnotation:
    return SentenceAnnotation(
        tokens=tuple(obj["tokens"]),
        pos_tags=tuple(obj["pos"]),
        parse=obj.get("parse"),
    )


def annotation_to_dict(ann: SentenceAnnotation) -> dict:
    obj = {"tokens": list(ann.tokens), "pos": list(ann.pos_tags)}
    if ann.parse is not None:
        obj["parse"] = ann.parse
    return obj


def load_annotations(path: str | Path) -> dict[tuple[str, str], tuple[SentenceAnnotation, ...]]:
    """Load a sidecar file into a {(record_id, side): annotations} map."""
    store: dict[tuple[str, str], tuple[SentenceAnnotation, ...]] = {}
    for lineno, obj in iter_jsonl(path):
        side = obj.get("side")
        if side not in ("original", "paraphrased"):
            raise ValidationError(f"{path}:{lineno}: bad side {side!r}")
        try:
            sentences = tuple(annotation_from_dict(s) for s in obj["sentences"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"{path}:{lineno}: malformed annotation") from exc
        store[(obj["record_id"], side)] = sentences
    return store


def save_annotations(
    path: str | Path,
    store: dict[tuple[str, str], Sequence[SentenceAnnotation]],
) -> None:
    write_jsonl(
        path,
        (
            {
                "record_id": record_id,
                "side": side,
                "sentences": [annotation_to_dict(a) for a in sentences],
            }
            for (record_id, side), sentences in store.items()
        ),
    )


# ---------------------------------------------------------------------------
# Sampling and splicing
# ---------------------------------------------------------------------------


def sample_span(
    sentence_count: int,
    min_len: int = SPAN_MIN_SENTENCES,
    max_len: int = SPAN_MAX_SENTENCES,
    rng_seed: int = 0,
) -> SpanSelection:
    """Uniformly sample a span length in [min_len, min(max_len, n)], then a start."""
    if sentence_count < min_len:
        raise ValidationError("text too short")
    rng = np.random.default_rng(rng_seed)
    high = min(max_len, sentence_count)
    length = int(rng.integers(min_len, high + 1))
    start = int(rng.integers(0, sentence_count - length + 1))
    return SpanSelection(start, start + length)


def sample_multi_spans(
    sentence_count: int,
    num_spans_range: tuple[int, int] = MULTI_SPAN_COUNT_RANGE,
    span_len_range: tuple[int, int] = MULTI_SPAN_LEN_RANGE,
    rng_seed: int = 0,
) -> list[SpanSelection]:
    """Sample several non-adjacent spans (>= 1 unmodified sentence between them).

    Draws the span count, then per-span lengths, then places spans left to
    right with uniformly chosen starts.  A drawn configuration must leave at
    least one sentence of slack beyond the minimal packing; infeasible draws
    are retried up to a fixed bound before erroring.
    """
    k_min, k_max = num_spans_range
    l_min, l_max = span_len_range
    # Even the smallest drawable configuration needs slack, so impossibility
    # is decidable up front.
    if sentence_count < k_min * l_min + (k_min - 1) + 1:
        raise ValidationError("cannot place spans")
    rng = np.random.default_rng(rng_seed)
    for _ in range(_MULTI_SPAN_RETRIES):
        count = int(rng.integers(k_min, k_max + 1))
        lengths = [int(rng.integers(l_min, l_max + 1)) for _ in range(count)]
        if sum(lengths) + (count - 1) + 1 > sentence_count:
            continue
        spans: list[SpanSelection] = []
        cursor = 0  # first sentence the next span may start at
        feasible = True
        for idx, length in enumerate(lengths):
            remaining = lengths[idx + 1 :]
            tail = sum(remaining) + len(remaining)  # each later span needs a gap
            latest = sentence_count - length - tail
            if latest < cursor:
                feasible = False
                break
            start = int(rng.integers(cursor, latest + 1))
            spans.append(SpanSelection(start, start + length))
            cursor = start + length + 1
        if feasible:
            return spans
    raise ValidationError("cannot place spans")


def splice_paraphrase(
    original_sentences: Sequence[str],
    span: SpanSelection,
    replacement_sentences: Sequence[str],
) -> tuple[str, SpanSelection]:
    """Replace the sentences in ``span`` and rejoin with single spaces.

    Returns the new text plus the span covering the replacement in the new
    sentence indexing (the replacement may change the sentence count).
    """
    if span.end_sentence > len(original_sentences):
        raise ValidationError(f"span {span.as_pair()} exceeds {len(original_sentences)} sentences")
    if not replacement_sentences:
        raise ValidationError("empty replacement")
    prefix = list(original_sentences[: span.start_sentence])
    suffix = list(original_sentences[span.end_sentence :])
    new_sentences = prefix + list(replacement_sentences) + suffix
    new_span = SpanSelection(
        span.start_sentence, span.start_sentence + len(replacement_sentences)
    )
    return " ".join(new_sentences), new_span


def splice_multi(
    original_sentences: Sequence[str],
    spans: Sequence[SpanSelection],
    replacements: Sequence[Sequence[str]],
) -> tuple[str, list[SpanSelection]]:
    """Splice several sorted, non-adjacent spans at once.

    Returns the rebuilt text and the replacement spans in the new indexing.
    """
    if len(spans) != len(replacements):
        raise ValidationError("spans and replacements lengths differ")
    pieces: list[str] = []
    new_spans: list[SpanSelection] = []
    cursor = 0
    for span, replacement in zip(spans, replacements):
        if span.start_sentence < cursor:
            raise ValidationError("spans must be sorted and non-overlapping")
        if not replacement:
            raise ValidationError("empty replacement")
        pieces.extend(original_sentences[cursor : span.start_sentence])
        new_start = len(pieces)
        pieces.extend(replacement)
        new_spans.append(SpanSelection(new_start, len(pieces)))
        cursor = span.end_sentence
    pieces.extend(original_sentences[cursor:])
    return " ".join(pieces), new_spans


def split_records(
    records: Sequence[ParaphraseRecord],
    rng_seed: int = 0,
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
) -> tuple[list[ParaphraseRecord], list[ParaphraseRecord], list[ParaphraseRecord]]:
    """Seeded train/validation/test partition (default 80/10/10)."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationError("ratios must sum to 1")
    order = np.random.default_rng(rng_seed).permutation(len(records))
    n_train = int(round(len(records) * ratios[0]))
    n_val = int(round(len(records) * ratios[1]))
    shuffled = [records[i] for i in order]
    return (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_val],
        shuffled[n_train + n_val :],
    )
