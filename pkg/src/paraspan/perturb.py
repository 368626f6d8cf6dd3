"""Minor-modification fixtures: sentence reordering and word replacement.

These produce texts that must NOT be treated as paraphrases.  Word
replacement swaps a bounded fraction of tokens through a static synonym
lexicon (no neural infill), and a BLEU filter drops any perturbation that
drifted too far from the original: only outputs with sentence BLEU >= 0.70
against the original are kept as "minor".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .divergence import bleu_tokens, sentence_bleu
from .errors import ValidationError
from .segment import split_sentences

DEFAULT_REPLACE_RATE = 0.10
DEFAULT_BLEU_FLOOR = 0.70
PERTURBATION_KINDS = ("sentence_reorder", "word_replace")


@dataclass(frozen=True)
class Perturbation:
    """A reproducible minor modification."""

    kind: str
    rng_seed: int
    rate: float = DEFAULT_REPLACE_RATE

    def __post_init__(self) -> None:
        if self.kind not in PERTURBATION_KINDS:
            raise ValidationError(f"unknown perturbation kind {self.kind!r}")
        if self.kind == "word_replace" and not 0.0 < self.rate <= 0.5:
            raise ValidationError("word replacement rate must be in (0, 0.5]")


def load_lexicon(path: str | Path | None = None) -> dict[str, str]:
    """Load a substitution lexicon from TSV "token<TAB>substitute" lines."""
    if path is None:
        data = resources.files("paraspan").joinpath("data/substitutions.tsv").read_text("utf-8")
    else:
        data = Path(path).read_text("utf-8")
    lexicon: dict[str, str] = {}
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValidationError(f"lexicon line {lineno}: expected 'token<TAB>substitute'")
        lexicon[parts[0]] = parts[1]
    if not lexicon:
        raise ValidationError("empty lexicon")
    return lexicon


def reorder_sentences(text: str, rng_seed: int = 0) -> str:
    """Apply a random non-identity permutation of the sentences."""
    sentences = list(split_sentences(text).sentences)
    if len(sentences) < 2:
        raise ValidationError("need at least 2 sentences to reorder")
    rng = np.random.default_rng(rng_seed)
    while True:
        order = rng.permutation(len(sentences))
        if any(int(i) != pos for pos, i in enumerate(order)):
            break
    return " ".join(sentences[int(i)] for i in order)


def _strip_wrap(token: str) -> tuple[str, str, str]:
    """Split a raw token into (leading punct, core, trailing punct)."""
    start = 0
    end = len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[:start], token[start:end], token[end:]


def _recase(replacement: str, template: str) -> str:
    if template.isupper() and len(template) > 1:
        return replacement.upper()
    if template[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def replace_words(
    text: str,
    rate: float = DEFAULT_REPLACE_RATE,
    lexicon: dict[str, str] | None = None,
    rng_seed: int = 0,
) -> str:
    """Replace ceil(rate * tokens) uniformly chosen lexicon-covered tokens.

    Tokens without a lexicon entry are skipped and the target is redrawn
    until eligible tokens are exhausted.  Punctuation attached to a token
    and leading capitalization are preserved.
    """
    Perturbation(kind="word_replace", rng_seed=rng_seed, rate=rate)  # validates rate
    if not lexicon:
        raise ValidationError("lexicon must be non-empty")
    tokens = text.split()
    if not tokens:
        raise ValidationError("empty text")
    eligible = [
        i for i, token in enumerate(tokens) if _strip_wrap(token)[1].lower() in lexicon
    ]
    if not eligible:
        raise ValidationError("no replaceable token")
    budget = math.ceil(rate * len(tokens))
    rng = np.random.default_rng(rng_seed)
    chosen = rng.permutation(len(eligible))[: min(budget, len(eligible))]
    for index in chosen:
        i = eligible[int(index)]
        lead, core, trail = _strip_wrap(tokens[i])
        substitute = _recase(lexicon[core.lower()], core)
        tokens[i] = lead + substitute + trail
    return " ".join(tokens)


def filter_minor(original: str, perturbed: str, bleu_floor: float = DEFAULT_BLEU_FLOOR) -> bool:
    """Keep a perturbation iff BLEU(perturbed against original) >= floor."""
    return sentence_bleu(bleu_tokens(perturbed), bleu_tokens(original)) >= bleu_floor
