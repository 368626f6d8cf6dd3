"""Rule-based sentence segmentation and boundary-symbol insertion.

The splitter is deliberately deterministic: a sentence break happens after a
terminal punctuation mark (``. ! ?`` plus the CJK ``。 ！ ？``)
when the following context looks like the start of a new sentence.  A fixed
abbreviation list suppresses false breaks after titles and Latin shorthand.
There is no learned component and no runtime model dependency; divergence
from trained tokenizers (e.g. punkt) is accepted and documented.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

# Words whose trailing period never ends a sentence.  Matching is
# case-sensitive: "No." (the abbreviation) is protected, "no." is not.
ABBREVIATIONS = frozenset(
    [
        "Dr.", "Mr.", "Mrs.", "Ms.", "Prof.", "Rev.", "Gen.", "Sen.", "Rep.",
        "St.", "Mt.", "Jr.", "Sr.", "Capt.", "Lt.", "Col.", "Sgt.",
        "etc.", "e.g.", "i.e.", "vs.", "cf.", "al.", "approx.",
        "U.S.", "U.K.", "U.N.", "No.", "Fig.", "Eq.", "Vol.", "Ch.", "pp.",
        "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.",
        "Sept.", "Oct.", "Nov.", "Dec.",
    ]
)

# Terminal punctuation that needs whitespace + sentence-start context.
_SPACED_TERMINALS = ".!?"
# CJK terminals split unconditionally (no inter-word whitespace in CJK text).
_CJK_TERMINALS = "。！？"
# Closing marks that may trail the terminal and stay with the sentence.
_CLOSERS = "\"'’”»)]}"
# Marks that can open a sentence.
_OPENERS = "\"'‘“«([{"

DEFAULT_BOUNDARY_SYMBOL = "</s>"


@dataclass(frozen=True)
class SentenceList:
    """Sentences plus their (start, end) character offsets into the source."""

    sentences: tuple[str, ...]
    char_offsets: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if len(self.sentences) != len(self.char_offsets):
            raise ValidationError("sentences and char_offsets lengths differ")
        prev_end = -1
        for sent, (start, end) in zip(self.sentences, self.char_offsets):
            if start >= end:
                raise ValidationError("empty sentence span")
            if start < prev_end or start < 0:
                raise ValidationError("offsets overlap or are not increasing")
            if not sent.strip():
                raise ValidationError("sentence is whitespace-only")
            prev_end = end

    def __len__(self) -> int:
        return len(self.sentences)


def _word_before(text: str, period_index: int) -> str:
    """Maximal non-whitespace run ending at (and including) text[period_index]."""
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : period_index + 1]


def _is_sentence_start(ch: str) -> bool:
    return ch.isupper() or ch.isdigit() or ch in _OPENERS


def _break_after(text: str, i: int) -> int | None:
    """Return the index one past the sentence end if a break occurs at text[i].

    ``text[i]`` must be a terminal mark.  The returned index includes any
    closing quotes/brackets that trail the terminal.
    """
    ch = text[i]
    if ch == ".":
        # Ellipses never split; runs of periods are kept together.
        if (i + 1 < len(text) and text[i + 1] == ".") or (i > 0 and text[i - 1] == "."):
            return None
        if _word_before(text, i) in ABBREVIATIONS:
            return None
    end = i + 1
    while end < len(text) and text[end] in _CLOSERS:
        end += 1
    if ch in _CJK_TERMINALS:
        return end if end < len(text) else None
    # Latin terminals require whitespace and then a sentence-start character.
    j = end
    while j < len(text) and text[j].isspace():
        j += 1
    if j == end or j >= len(text):
        return None
    return end if _is_sentence_start(text[j]) else None


def split_sentences(text: str) -> SentenceList:
    """Split ``text`` into sentences with exact character offsets.

    Raises ValidationError on empty or all-whitespace input.  Slicing the
    source with the returned offsets reproduces each sentence verbatim;
    only inter-sentence whitespace falls outside the offsets.
    """
    if not text or not text.strip():
        raise ValidationError("empty text")

    breaks: list[int] = []
    i = 0
    while i < len(text):
        if text[i] in _SPACED_TERMINALS or text[i] in _CJK_TERMINALS:
            end = _break_after(text, i)
            if end is not None:
                breaks.append(end)
                i = end
                continue
        i += 1

    sentences: list[str] = []
    offsets: list[tuple[int, int]] = []
    cursor = 0
    for boundary in breaks + [len(text)]:
        start = cursor
        while start < boundary and text[start].isspace():
            start += 1
        end = boundary
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            sentences.append(text[start:end])
            offsets.append((start, end))
        cursor = boundary
    return SentenceList(tuple(sentences), tuple(offsets))


def mark_boundaries(sentences: SentenceList | list[str] | tuple[str, ...],
                    boundary_symbol: str = DEFAULT_BOUNDARY_SYMBOL) -> str:
    """Join sentences with ``boundary_symbol`` appended to each one.

    The output feeds model-input files; splitting it on the symbol recovers
    the sentence list, which is why the symbol may not occur in any sentence.
    """
    sents = sentences.sentences if isinstance(sentences, SentenceList) else tuple(sentences)
    if not sents:
        raise ValidationError("no sentences to mark")
    for sent in sents:
        if boundary_symbol in sent:
            raise ValidationError(f"symbol collision: {boundary_symbol!r} occurs in a sentence")
    return "".join(sent + boundary_symbol for sent in sents)
