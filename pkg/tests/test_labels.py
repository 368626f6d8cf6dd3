"""Sentence-label construction and training-export tests."""

import json

import pytest

from paraspan.corpus import (
    Document,
    ParaphraseRecord,
    SentenceAnnotation,
    SpanSelection,
    splice_multi,
    splice_paraphrase,
)
from paraspan.divergence import annotation_from_text, divergence_vector, span_annotation
from paraspan.errors import MissingInputError, ValidationError
from paraspan.labels import (
    build_labels,
    class_only_labels,
    export_training_file,
)
from paraspan.segment import split_sentences

ORIGINAL_SENTS = [
    "Alpha starts the story.",
    "Beta keeps it moving.",
    "Gamma adds some detail.",
    "Delta turns the plot.",
    "Epsilon slows it down.",
    "Zeta wraps everything up.",
]


def make_record(rec_id, original_sents, span, replacement, method="context_agnostic"):
    text, new_span = splice_paraphrase(original_sents, span, replacement)
    return ParaphraseRecord(
        id=rec_id,
        original=Document(id=rec_id, text=" ".join(original_sents), source="human"),
        paraphrased_text=text,
        original_spans=(span,),
        paraphrased_spans=(new_span,),
        method=method,
    )


def identity_record(rec_id, sentences):
    text = " ".join(sentences)
    return ParaphraseRecord(
        id=rec_id,
        original=Document(id=rec_id, text=text, source="human"),
        paraphrased_text=text,
        method="none",
    )


def auto_annotations(record):
    """Sidecar built with the fallback tokenizer, for both sides."""
    store = {}
    for side, text in (
        ("original", record.original.text),
        ("paraphrased", record.paraphrased_text),
    ):
        store[(record.id, side)] = tuple(
            annotation_from_text(s) for s in split_sentences(text).sentences
        )
    return store


class TestBuildLabels:
    def test_method_none_all_zero(self):
        record = identity_record("r0", ORIGINAL_SENTS)
        labels = build_labels(record, auto_annotations(record))
        assert labels.classes == (0,) * 6
        assert all(vector.is_zero() for vector in labels.regression)
        assert labels.alignment is None

    def test_identical_paraphrase_flagged_but_class_one(self):
        span = SpanSelection(1, 3)
        record = make_record("r1", ORIGINAL_SENTS, span, ORIGINAL_SENTS[1:3])
        labels = build_labels(record, auto_annotations(record))
        assert labels.classes == (0, 1, 1, 0, 0, 0)
        for i in (1, 2):
            assert labels.regression[i].is_zero()
            assert "identical_paraphrase" in labels.flags[i]

    def test_six_sentence_fixture_classes_and_vectors(self):
        replacement = [
            "Newly minted words replace things.",
            "Another novel sentence appears.",
            "Third invented sentence lands.",
        ]
        record = make_record("r2", ORIGINAL_SENTS, SpanSelection(2, 4), replacement)
        annotations = auto_annotations(record)
        labels = build_labels(record, annotations)
        # 6 original sentences, span [2,4) -> 3 replacement sentences, 7 total
        assert labels.classes == (0, 0, 1, 1, 1, 0, 0)
        # vectors must reproduce a by-hand alignment + divergence composition
        para_anns = annotations[("r2", "paraphrased")]
        orig_anns = annotations[("r2", "original")]
        for global_i in (2, 3, 4):
            a, b = labels.alignment.span_for(global_i)
            expected = divergence_vector(
                para_anns[global_i], span_annotation(list(orig_anns[a:b]))
            )
            assert labels.regression[global_i] == expected
        for global_i in (0, 1, 5, 6):
            assert labels.regression[global_i].is_zero()

    def test_class_zero_iff_zero_vector_outside_degenerate(self):
        record = make_record(
            "r3", ORIGINAL_SENTS, SpanSelection(0, 2), ["Fresh phrasing here arrives."]
        )
        labels = build_labels(record, auto_annotations(record))
        for cls, vector, flags in zip(labels.classes, labels.regression, labels.flags):
            if cls == 0:
                assert vector.is_zero()
            else:
                assert (not vector.is_zero()) or "identical_paraphrase" in flags

    def test_multi_span_class_union(self):
        spans = [SpanSelection(0, 1), SpanSelection(2, 4)]
        replacements = [["Opening rewritten entirely."], ["Middle rewritten once.", "Middle rewritten twice."]]
        text, new_spans = splice_multi(ORIGINAL_SENTS, spans, replacements)
        record = ParaphraseRecord(
            id="r4",
            original=Document(id="r4", text=" ".join(ORIGINAL_SENTS), source="human"),
            paraphrased_text=text,
            original_spans=tuple(spans),
            paraphrased_spans=tuple(new_spans),
            method="context_agnostic",
        )
        labels = build_labels(record, auto_annotations(record))
        expected = set()
        for span in new_spans:
            expected.update(range(span.start_sentence, span.end_sentence))
        assert {i for i, cls in enumerate(labels.classes) if cls == 1} == expected

    def test_missing_annotations_error(self):
        record = make_record("r5", ORIGINAL_SENTS, SpanSelection(1, 2), ["Changed words appear."])
        with pytest.raises(MissingInputError, match="missing annotations"):
            build_labels(record, {})

    def test_annotation_count_mismatch_error(self):
        record = make_record("r6", ORIGINAL_SENTS, SpanSelection(1, 2), ["Changed words appear."])
        annotations = auto_annotations(record)
        annotations[("r6", "original")] = annotations[("r6", "original")][:-1]
        with pytest.raises(ValidationError, match="annotations cover"):
            build_labels(record, annotations)

    def test_no_annotations_falls_back_to_tokenizer(self):
        record = make_record("r7", ORIGINAL_SENTS, SpanSelection(1, 2), ["Changed words appear."])
        labels = build_labels(record, None)
        assert labels.classes == (0, 1, 0, 0, 0, 0)
        assert labels.regression[1].lexical > 0.0

    def test_label_count_matches_segmenter(self):
        record = make_record(
            "r8", ORIGINAL_SENTS, SpanSelection(3, 5), ["One replacement only stays."]
        )
        labels = build_labels(record, auto_annotations(record))
        assert len(labels.classes) == len(split_sentences(record.paraphrased_text))


class TestClassOnlyLabels:
    def test_classes_without_annotations(self):
        record = make_record("r9", ORIGINAL_SENTS, SpanSelection(2, 4), ["Single new sentence."])
        labels = class_only_labels(record)
        assert labels.classes == (0, 0, 1, 0, 0)
        assert all(vector.is_zero() for vector in labels.regression)


class TestExportTrainingFile:
    def build(self, tmp_path):
        record = make_record(
            "r10", ORIGINAL_SENTS, SpanSelection(1, 3), ["Different content here now.", "More different content."]
        )
        labels = build_labels(record, auto_annotations(record))
        return record, labels, tmp_path / "out.jsonl"

    def read(self, path):
        return [json.loads(line) for line in path.read_text().splitlines()]

    def test_classification_mode(self, tmp_path):
        record, labels, path = self.build(tmp_path)
        count = export_training_file(path, [labels], "classification")
        rows = self.read(path)
        assert count == len(rows) == len(labels.classes)
        assert [row["target"] for row in rows] == list(labels.classes)
        assert all(row["record_id"] == "r10" for row in rows)

    def test_classification_of_identity_record_all_zero(self, tmp_path):
        record = identity_record("r11", ORIGINAL_SENTS)
        labels = build_labels(record, auto_annotations(record))
        path = tmp_path / "out.jsonl"
        export_training_file(path, [labels], "classification")
        assert all(row["target"] == 0 for row in self.read(path))

    def test_regression_lexical_projection(self, tmp_path):
        record, labels, path = self.build(tmp_path)
        export_training_file(path, [labels], "regression_lexical")
        rows = self.read(path)
        assert [row["target"] for row in rows] == [v.lexical for v in labels.regression]

    def test_aggregate_vector_length_three(self, tmp_path):
        record, labels, path = self.build(tmp_path)
        export_training_file(path, [labels], "regression_aggregate_vector")
        for row in self.read(path):
            assert isinstance(row["target"], list) and len(row["target"]) == 3

    def test_unknown_mode_rejected(self, tmp_path):
        record, labels, path = self.build(tmp_path)
        with pytest.raises(ValidationError, match="unknown export mode"):
            export_training_file(path, [labels], "nope")


class TestShrinkingSplice:
    def test_fewer_replacement_sentences(self):
        # span [1,4) collapses to 2 sentences: paraphrased text has 5 total
        replacement = ["Condensed replacement arrives.", "Second condensed line lands."]
        record = make_record("r12", ORIGINAL_SENTS, SpanSelection(1, 4), replacement)
        labels = build_labels(record, auto_annotations(record))
        assert labels.classes == (0, 1, 1, 0, 0)
        # each paraphrased sentence aligned within the original span [1,4)
        for global_i in (1, 2):
            a, b = labels.alignment.span_for(global_i)
            assert 1 <= a < b <= 4

    def test_multi_sentence_aligned_span_flagged(self):
        # one replacement sentence for a three-sentence span: the aligned
        # span may be wider than one sentence when similarities qualify
        sents = [
            "Alpha shared words here.",
            "Beta shared words here.",
            "Gamma shared words here.",
            "Delta closes it out.",
        ]
        record = make_record(
            "r13", sents, SpanSelection(0, 3), ["Alpha beta gamma shared words here."]
        )
        labels = build_labels(record, auto_annotations(record))
        assert labels.classes == (1, 0)
        a, b = labels.alignment.span_for(0)
        assert b - a >= 1
