"""Difference quantification between a paraphrased sentence and its aligned span.

Three component scores, each in [0, 1] with 0 meaning identical:

  lexical      1 - sentence-level BLEU over tokens (4-gram)
  grammatical  1 - sentence-level BLEU over POS tag sequences (4-gram)
  syntactic    tree edit distance between depth-3-truncated parse trees,
               divided by the larger truncated node count, clamped to [0, 1]

The aggregate score is their arithmetic mean.  BLEU here is the sentence
variant: clipped n-gram precisions with a geometric mean over the effective
order min(4, candidate length), a 0.1 epsilon replacing zero clipped counts,
and the brevity penalty min(1, exp(1 - |ref| / |cand|)).  The effective-order
rule keeps identical inputs at exactly 1.0 regardless of length.

BLEU is directional: the paraphrased sentence is the candidate and the
aligned original span is the reference.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import SentenceAnnotation
from .errors import ValidationError
from .trees import ParseTree, parse_bracketed, tree_edit_distance, truncate_tree

BLEU_MAX_N = 4
BLEU_EPSILON = 0.1
TREE_TRUNCATION_LEVEL = 3
SPAN_ROOT_LABEL = "SPAN"

_TOKEN_SPLIT = re.compile(r"([.!?。！？])$")


def bleu_tokens(text: str) -> tuple[str, ...]:
    """Fallback tokenizer: lowercase, whitespace split, detach terminal marks."""
    tokens: list[str] = []
    for piece in text.lower().split():
        match = _TOKEN_SPLIT.search(piece)
        if match and len(piece) > 1:
            tokens.append(piece[: -len(match.group(1))])
            tokens.append(match.group(1))
        else:
            tokens.append(piece)
    return tuple(tokens)


def sentence_bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = BLEU_MAX_N) -> float:
    """Sentence-level BLEU of ``candidate`` against a single ``reference``."""
    if not candidate or not reference:
        raise ValidationError("empty token list")
    effective_n = min(max_n, len(candidate))
    log_sum = 0.0
    for order in range(1, effective_n + 1):
        cand_counts = Counter(
            tuple(candidate[i : i + order]) for i in range(len(candidate) - order + 1)
        )
        ref_counts = Counter(
            tuple(reference[i : i + order]) for i in range(len(reference) - order + 1)
        )
        clipped = sum(min(count, ref_counts[gram]) for gram, count in cand_counts.items())
        total = max(1, len(candidate) - order + 1)
        numerator = clipped if clipped > 0 else BLEU_EPSILON
        log_sum += math.log(numerator / total)
    brevity = min(1.0, math.exp(1.0 - len(reference) / len(candidate)))
    return brevity * math.exp(log_sum / effective_n)


def lexical_divergence(candidate_tokens: Sequence[str], reference_tokens: Sequence[str]) -> float:
    """1 - BLEU over word tokens; 0 for identical sequences."""
    return 1.0 - sentence_bleu(candidate_tokens, reference_tokens)


def grammatical_divergence(candidate_pos: Sequence[str], reference_pos: Sequence[str]) -> float:
    """1 - BLEU over POS tag sequences, tags treated as tokens."""
    return 1.0 - sentence_bleu(candidate_pos, reference_pos)


def syntactic_divergence(t1: ParseTree, t2: ParseTree, max_level: int = TREE_TRUNCATION_LEVEL) -> float:
    """Normalized edit distance between depth-truncated trees, clamped to [0, 1].

    Unit-cost distance can exceed the larger node count for shape-divergent
    trees, hence the clamp.
    """
    a = truncate_tree(t1, max_level)
    b = truncate_tree(t2, max_level)
    distance = tree_edit_distance(a, b)
    return min(1.0, distance / max(a.node_count(), b.node_count()))


@dataclass(frozen=True)
class DivergenceVector:
    """Per-sentence divergence components plus their mean."""

    lexical: float
    grammatical: float
    syntactic: float
    aggregate: float
    syntactic_missing: bool = False

    def __post_init__(self) -> None:
        for name in ("lexical", "grammatical", "syntactic", "aggregate"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValidationError(f"non-finite {name} divergence")
        expected = (self.lexical + self.grammatical + self.syntactic) / 3.0
        if abs(self.aggregate - expected) > 1e-12:
            raise ValidationError("aggregate is not the component mean")

    @classmethod
    def from_components(
        cls, lexical: float, grammatical: float, syntactic: float, syntactic_missing: bool = False
    ) -> "DivergenceVector":
        return cls(
            lexical=lexical,
            grammatical=grammatical,
            syntactic=syntactic,
            aggregate=(lexical + grammatical + syntactic) / 3.0,
            syntactic_missing=syntactic_missing,
        )

    def is_zero(self) -> bool:
        return self.lexical == 0.0 and self.grammatical == 0.0 and self.syntactic == 0.0

    def as_list(self) -> list[float]:
        return [self.lexical, self.grammatical, self.syntactic]


ZERO_DIVERGENCE = DivergenceVector(0.0, 0.0, 0.0, 0.0)


def annotation_from_text(sentence: str) -> SentenceAnnotation:
    """Annotation stub for un-annotated text: tokens only, untagged POS."""
    tokens = bleu_tokens(sentence)
    return SentenceAnnotation(tokens=tokens, pos_tags=("X",) * len(tokens))


def span_annotation(parts: Sequence[SentenceAnnotation]) -> SentenceAnnotation:
    """Concatenate per-sentence annotations into one aligned-span annotation.

    A multi-sentence span gets a virtual root over the per-sentence parses;
    the parse is absent if any member parse is absent.
    """
    if not parts:
        raise ValidationError("empty span annotation")
    if len(parts) == 1:
        return parts[0]
    tokens: list[str] = []
    pos: list[str] = []
    parses: list[str] = []
    for part in parts:
        tokens.extend(part.tokens)
        pos.extend(part.pos_tags)
        if part.parse is not None:
            parses.append(part.parse)
    parse: str | None = None
    if len(parses) == len(parts):
        parse = "(" + SPAN_ROOT_LABEL + " " + " ".join(parses) + ")"
    return SentenceAnnotation(tokens=tuple(tokens), pos_tags=tuple(pos), parse=parse)


def divergence_vector(s: SentenceAnnotation, t: SentenceAnnotation) -> DivergenceVector:
    """All three components of sentence ``s`` against aligned span ``t``.

    When either parse is absent the syntactic component is 0 and the vector
    carries a missing-parse flag.
    """
    lexical = lexical_divergence(s.tokens, t.tokens)
    grammatical = grammatical_divergence(s.pos_tags, t.pos_tags)
    if s.parse is None or t.parse is None:
        return DivergenceVector.from_components(lexical, grammatical, 0.0, syntactic_missing=True)
    syntactic = syntactic_divergence(parse_bracketed(s.parse), parse_bracketed(t.parse))
    return DivergenceVector.from_components(lexical, grammatical, syntactic)
