"""Detection metrics, corpus statistics, perplexity profiles, and the defense.

Conventions fixed here so results are reproducible to the bit:

  - AUROC uses the rank-based (Mann-Whitney) estimator with midranks, i.e.
    ties count half.
  - A prediction is positive iff score > threshold (strictly) everywhere.
  - threshold_at_fpr returns the smallest observed score (or +inf) whose
    realized false positive rate on the calibration negatives does not
    exceed the target; the guarantee FPR <= target is exact, not asymptotic.
  - Word-distribution KL is in nats over the union of the two sides' top-k
    vocabularies.  Add-0.5 smoothing is engaged only when some union word
    has a zero count on either side; otherwise the raw relative frequencies
    are compared (identical corpora therefore give exactly 0).
  - Per-token perplexity is exp(-logprob); profile positions beyond the
    text bounds are skipped, and each relative position reports the
    arithmetic mean over everything collected there.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import ParaphraseRecord, iter_jsonl
from .errors import ValidationError
from .segment import split_sentences

DEFAULT_FPR_TARGET = 0.01
DEFAULT_TOP_K = 100
DEFAULT_KL_SEEDS = (0, 1, 2, 3, 4)

_WORD = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)?")


@dataclass(frozen=True)
class EvalReport:
    """Everything one detection run reports."""

    auroc: float
    accuracy_at_fpr: float
    fpr_target: float
    threshold: float
    lexical_corr: float | None
    syntactic_corr: float | None
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "auroc": self.auroc,
            "accuracy_at_fpr": self.accuracy_at_fpr,
            "fpr_target": self.fpr_target,
            "threshold": self.threshold,
            "lexical_corr": self.lexical_corr,
            "syntactic_corr": self.syntactic_corr,
            "counts": dict(self.counts),
        }


@dataclass(frozen=True)
class DefenseReport:
    """Recall triple for the two-stage defense."""

    human_rec: float
    machine_rec: float
    avg_rec: float

    def __post_init__(self) -> None:
        if abs(self.avg_rec - (self.human_rec + self.machine_rec) / 2.0) > 1e-12:
            raise ValidationError("avg_rec must be the mean of the two recalls")

    def to_dict(self) -> dict:
        return {
            "human_rec": self.human_rec,
            "machine_rec": self.machine_rec,
            "avg_rec": self.avg_rec,
        }


def _check_scores_labels(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValidationError("scores and labels must be equal-length 1-D sequences")
    if not np.all(np.isfinite(scores)):
        raise ValidationError("non-finite score")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValidationError("labels must be 0 or 1")
    return scores, labels


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def auroc(scores, labels) -> float:
    """Probability a random positive outranks a random negative (ties half)."""
    scores, labels = _check_scores_labels(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("degenerate labels: both classes must be present")
    ranks = _midranks(scores)
    rank_sum = float(ranks[labels == 1].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def threshold_at_fpr(negative_scores, fpr_target: float = DEFAULT_FPR_TARGET) -> float:
    """Smallest observed threshold keeping FPR on these negatives <= target."""
    negatives = np.asarray(negative_scores, dtype=float)
    if negatives.size == 0:
        raise ValidationError("no negative scores to calibrate on")
    ordered = np.sort(negatives)
    for candidate in np.unique(ordered):
        above = negatives.size - int(np.searchsorted(ordered, candidate, side="right"))
        if above / negatives.size <= fpr_target:
            return float(candidate)
    return math.inf


def accuracy_at_threshold(scores, labels, threshold: float) -> tuple[float, dict[str, int]]:
    """Accuracy and confusion counts for the rule "positive iff score > threshold"."""
    scores, labels = _check_scores_labels(scores, labels)
    predictions = scores > threshold
    positives = labels == 1
    counts = {
        "tp": int(np.sum(predictions & positives)),
        "fp": int(np.sum(predictions & ~positives)),
        "tn": int(np.sum(~predictions & ~positives)),
        "fn": int(np.sum(~predictions & positives)),
    }
    accuracy = (counts["tp"] + counts["tn"]) / len(labels)
    return accuracy, counts


def pearson(pred, ref) -> float | None:
    """Pearson r; None when either side has zero variance (undefined)."""
    pred = np.asarray(pred, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if pred.shape != ref.shape or pred.ndim != 1 or pred.size < 2:
        raise ValidationError("need two equal-length sequences of length >= 2")
    pred_centered = pred - pred.mean()
    ref_centered = ref - ref.mean()
    denom = math.sqrt(float(pred_centered @ pred_centered) * float(ref_centered @ ref_centered))
    if denom == 0.0:
        return None
    return float(pred_centered @ ref_centered) / denom


def evaluate_scores(
    scores,
    labels,
    validation_negative_scores=None,
    fpr_target: float = DEFAULT_FPR_TARGET,
    lexical_refs=None,
    syntactic_refs=None,
    pool_all_sentences: bool = False,
) -> EvalReport:
    """Full report: AUROC, thresholded accuracy, and degree correlations.

    The decision threshold is calibrated on the validation negatives when
    given, else on this set's own negatives.  Correlations pool paraphrased
    sentences only unless pool_all_sentences is set.
    """
    scores_arr, labels_arr = _check_scores_labels(scores, labels)
    if validation_negative_scores is None:
        validation_negative_scores = scores_arr[labels_arr == 0]
    threshold = threshold_at_fpr(validation_negative_scores, fpr_target)
    accuracy, counts = accuracy_at_threshold(scores_arr, labels_arr, threshold)

    def correlation(refs) -> float | None:
        if refs is None:
            return None
        refs = np.asarray(refs, dtype=float)
        if refs.shape != scores_arr.shape:
            raise ValidationError("reference scores length mismatch")
        mask = np.ones(len(refs), dtype=bool) if pool_all_sentences else labels_arr == 1
        if int(mask.sum()) < 2:
            return None
        return pearson(scores_arr[mask], refs[mask])

    return EvalReport(
        auroc=auroc(scores_arr, labels_arr),
        accuracy_at_fpr=accuracy,
        fpr_target=fpr_target,
        threshold=threshold,
        lexical_corr=correlation(lexical_refs),
        syntactic_corr=correlation(syntactic_refs),
        counts=counts,
    )


# ---------------------------------------------------------------------------
# Word-distribution statistics
# ---------------------------------------------------------------------------


def word_tokens(text: str) -> list[str]:
    """Word-frequency tokenization: lowercase, punctuation dropped."""
    return _WORD.findall(text.lower())


def _top_k_counts(texts: Sequence[str], top_k: int) -> Counter:
    counts: Counter = Counter()
    for text in texts:
        counts.update(word_tokens(text))
    return counts


def _kl_between(counts_a: Counter, counts_b: Counter, top_k: int) -> float:
    top_a = [w for w, _ in counts_a.most_common(top_k)]
    top_b = [w for w, _ in counts_b.most_common(top_k)]
    vocabulary = sorted(set(top_a) | set(top_b))
    if len(vocabulary) < 2:
        raise ValidationError("union vocabulary smaller than 2 words")
    a = np.array([counts_a[w] for w in vocabulary], dtype=float)
    b = np.array([counts_b[w] for w in vocabulary], dtype=float)
    # Unsmoothed KL is infinite as soon as one side misses a word; only then
    # is Jeffreys add-0.5 engaged, so exact self-comparisons stay at 0.
    if np.any(a == 0.0) or np.any(b == 0.0):
        a = a + 0.5
        b = b + 0.5
    p = a / a.sum()
    q = b / b.sum()
    return float(np.sum(p * np.log(p / q)))


def word_distribution_kl(
    corpus_a: Sequence[str],
    corpus_b: Sequence[str],
    top_k: int = DEFAULT_TOP_K,
    seeds: Sequence[int] = DEFAULT_KL_SEEDS,
    split: str = "paired",
) -> float:
    """Mean KL(a || b) over seeds between top-k word-frequency distributions.

    split="paired" treats the corpora as aligned record pairs: per seed, the
    record indices are shuffled and side a takes corpus_a texts from one half
    while side b takes corpus_b texts from the other half, so no text is
    compared against its own counterpart.  split="halves" pools both corpora
    and compares two random halves of the pool (a noise floor).  split="none"
    disables splitting and compares the full corpora directly.
    """
    if not corpus_a or not corpus_b:
        raise ValidationError("corpora must be non-empty")
    if split not in ("paired", "halves", "none"):
        raise ValidationError(f"unknown split mode {split!r}")
    if split == "paired" and len(corpus_a) != len(corpus_b):
        raise ValidationError("paired split needs equal-length corpora")

    values = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        if split == "none":
            side_a: Sequence[str] = corpus_a
            side_b: Sequence[str] = corpus_b
        elif split == "paired":
            order = rng.permutation(len(corpus_a))
            half = len(corpus_a) // 2
            side_a = [corpus_a[i] for i in order[:half]]
            side_b = [corpus_b[i] for i in order[half:]]
        else:
            pool = list(corpus_a) + list(corpus_b)
            order = rng.permutation(len(pool))
            half = len(pool) // 2
            side_a = [pool[i] for i in order[:half]]
            side_b = [pool[i] for i in order[half:]]
        if not side_a or not side_b:
            raise ValidationError("a split produced an empty side")
        values.append(_kl_between(_top_k_counts(side_a, top_k), _top_k_counts(side_b, top_k), top_k))
    return float(np.mean(values))


# ---------------------------------------------------------------------------
# Boundary perplexity profile
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryProfile:
    """Mean per-token perplexity around span starts and span ends.

    Position 0 is the first span token for the start profile and the last
    span token for the end profile.  Positions nothing contributed to hold
    NaN.
    """

    positions: tuple[int, ...]
    start_mean: tuple[float, ...]
    end_mean: tuple[float, ...]
    start_counts: tuple[int, ...]
    end_counts: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "positions": list(self.positions),
            "start_mean": [None if math.isnan(v) else v for v in self.start_mean],
            "end_mean": [None if math.isnan(v) else v for v in self.end_mean],
            "start_counts": list(self.start_counts),
            "end_counts": list(self.end_counts),
        }


def _char_spans_to_token_spans(char_spans, offsets) -> list[tuple[int, int]]:
    token_spans = []
    for c_start, c_end in char_spans:
        first = last = None
        for index, (t_start, t_end) in enumerate(offsets):
            if t_end > c_start and t_start < c_end:  # token overlaps the span
                if first is None:
                    first = index
                last = index
        if first is None:
            raise ValidationError(f"span [{c_start}, {c_end}) covers no tokens")
        token_spans.append((first, last + 1))
    return token_spans


def boundary_perplexity_profile(
    token_logprobs: Sequence[Sequence[float]],
    span_boundaries: Sequence[Sequence[tuple[int, int]]],
    window: int,
    token_offsets: Sequence[Sequence[tuple[int, int]]] | None = None,
) -> BoundaryProfile:
    """Average exp(-logprob) at relative positions around every span boundary.

    ``span_boundaries`` holds per-record [start, end) spans in token indices,
    or in character offsets when ``token_offsets`` is supplied.
    """
    if window < 0:
        raise ValidationError("window must be >= 0")
    if len(token_logprobs) != len(span_boundaries):
        raise ValidationError("records and boundaries differ in length")
    if token_offsets is not None and len(token_offsets) != len(token_logprobs):
        raise ValidationError("records and token offsets differ in length")

    width = 2 * window + 1
    start_sum = np.zeros(width)
    start_count = np.zeros(width, dtype=int)
    end_sum = np.zeros(width)
    end_count = np.zeros(width, dtype=int)

    for index, (logprobs, spans) in enumerate(zip(token_logprobs, span_boundaries)):
        perplexities = [math.exp(-lp) for lp in logprobs]
        if token_offsets is not None:
            offsets = list(token_offsets[index])
            if len(offsets) != len(perplexities):
                raise ValidationError(
                    f"record #{index}: {len(offsets)} token offsets for "
                    f"{len(perplexities)} logprobs"
                )
            spans = _char_spans_to_token_spans(spans, offsets)
        for t_start, t_end in spans:
            if not (0 <= t_start < t_end <= len(perplexities)):
                raise ValidationError(f"record #{index}: token span out of range")
            for anchor, sums, counts in (
                (t_start, start_sum, start_count),
                (t_end - 1, end_sum, end_count),
            ):
                for rel in range(-window, window + 1):
                    pos = anchor + rel
                    if 0 <= pos < len(perplexities):
                        sums[rel + window] += perplexities[pos]
                        counts[rel + window] += 1

    def means(sums, counts):
        return tuple(
            sums[i] / counts[i] if counts[i] else math.nan for i in range(width)
        )

    return BoundaryProfile(
        positions=tuple(range(-window, window + 1)),
        start_mean=means(start_sum, start_count),
        end_mean=means(end_sum, end_count),
        start_counts=tuple(int(c) for c in start_count),
        end_counts=tuple(int(c) for c in end_count),
    )


def load_token_logprobs(path: str | Path) -> dict[str, tuple[list[str], list[float]]]:
    """Load {"record_id", "tokens", "logprobs"} JSONL keyed by record id."""
    loaded: dict[str, tuple[list[str], list[float]]] = {}
    for lineno, obj in iter_jsonl(path):
        try:
            tokens = [str(t) for t in obj["tokens"]]
            logprobs = [float(x) for x in obj["logprobs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: malformed logprob entry") from exc
        if len(tokens) != len(logprobs):
            raise ValidationError(f"{path}:{lineno}: tokens and logprobs differ in length")
        loaded[obj["record_id"]] = (tokens, logprobs)
    return loaded


def locate_tokens(text: str, tokens: Sequence[str]) -> list[tuple[int, int]]:
    """Character offsets of externally produced tokens by in-order scanning."""
    offsets: list[tuple[int, int]] = []
    cursor = 0
    for token in tokens:
        found = text.find(token, cursor)
        if found < 0:
            raise ValidationError(f"token {token!r} not found in text from offset {cursor}")
        offsets.append((found, found + len(token)))
        cursor = found + len(token)
    return offsets


def record_span_char_ranges(record: ParaphraseRecord) -> list[tuple[int, int]]:
    """Character ranges of the paraphrased spans inside the paraphrased text."""
    segmented = split_sentences(record.paraphrased_text)
    ranges = []
    for span in record.paraphrased_spans:
        if span.end_sentence > len(segmented):
            raise ValidationError(f"record {record.id!r}: span exceeds sentence count")
        start = segmented.char_offsets[span.start_sentence][0]
        end = segmented.char_offsets[span.end_sentence - 1][1]
        ranges.append((start, end))
    return ranges


# ---------------------------------------------------------------------------
# Two-stage defense and robustness
# ---------------------------------------------------------------------------


def text_scores(sentence_scores: Sequence[Sequence[float]]) -> list[float]:
    """Per-text mean of sentence scores."""
    return [float(np.mean(scores)) for scores in sentence_scores]


def two_stage_defense(
    text_level_scores: Sequence[float],
    paraphrase_threshold: float,
    ai_detector_verdicts: Sequence[str],
    gold: Sequence[str],
) -> DefenseReport:
    """Flag texts above the paraphrase threshold as machine; else defer.

    A text whose mean sentence score exceeds the threshold is predicted
    "machine" outright; otherwise the conventional AI-generation detector's
    verdict stands.  Recalls are reported per gold class.
    """
    if not (len(text_level_scores) == len(ai_detector_verdicts) == len(gold)):
        raise ValidationError("defense inputs differ in length")
    for value in list(ai_detector_verdicts) + list(gold):
        if value not in ("human", "machine"):
            raise ValidationError(f"verdicts must be 'human' or 'machine', got {value!r}")
    hits = {"human": 0, "machine": 0}
    totals = {"human": 0, "machine": 0}
    for score, verdict, truth in zip(text_level_scores, ai_detector_verdicts, gold):
        predicted = "machine" if score > paraphrase_threshold else verdict
        totals[truth] += 1
        if predicted == truth:
            hits[truth] += 1
    human_rec = hits["human"] / totals["human"] if totals["human"] else 0.0
    machine_rec = hits["machine"] / totals["machine"] if totals["machine"] else 0.0
    return DefenseReport(
        human_rec=human_rec,
        machine_rec=machine_rec,
        avg_rec=(human_rec + machine_rec) / 2.0,
    )


def robustness_eval(perturbed_scores: Sequence[float], threshold: float) -> float:
    """Fraction of perturbed sentences kept below the decision threshold.

    Perturbed texts count as non-paraphrased, so a prediction of
    "paraphrased" (score > threshold) is an error here.
    """
    scores = np.asarray(perturbed_scores, dtype=float)
    if scores.size == 0:
        raise ValidationError("no perturbed scores")
    return float(np.mean(scores <= threshold))
