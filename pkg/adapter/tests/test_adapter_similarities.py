"""Similarity export tests, including the adapter acceptance round-trip."""

import numpy as np
import pytest

from paraspan.align import align_greedy, file_similarity_provider
from paraspan.corpus import Document, ParaphraseRecord, SpanSelection, splice_paraphrase
from paraspan.labels import build_labels
from paraspan.segment import split_sentences
from paraspan_adapter.encoders import HashingEncoder
from paraspan_adapter.similarities import emit_similarities, record_similarity_matrix

SENTS = [
    "Alice audits the yearly ledger.",
    "Bob bakes sourdough every morning.",
    "Carol codes the streaming parser.",
    "Dave drafts the quarterly memo.",
    "Erin edits the final draft.",
]


def identity_record(rec_id):
    text = " ".join(SENTS)
    return ParaphraseRecord(
        id=rec_id, original=Document(id=rec_id, text=text, source="human"),
        paraphrased_text=text, method="none",
    )


def paraphrased_record(rec_id):
    replacement = ["Someone rewrote this sentence completely.", "Fresh words appear here too."]
    text, span = splice_paraphrase(SENTS, SpanSelection(1, 3), replacement)
    return ParaphraseRecord(
        id=rec_id, original=Document(id=rec_id, text=" ".join(SENTS), source="human"),
        paraphrased_text=text,
        original_spans=(SpanSelection(1, 3),), paraphrased_spans=(span,),
        method="context_agnostic",
    )


class TestRecordSimilarityMatrix:
    def test_shape_is_n_by_m(self):
        record = paraphrased_record("p")
        matrix = record_similarity_matrix(record, HashingEncoder())
        n = len(split_sentences(record.paraphrased_text))
        m = len(split_sentences(record.original.text))
        assert matrix.shape == (n, m)

    def test_identical_sentences_score_one(self):
        record = identity_record("i")
        matrix = record_similarity_matrix(record, HashingEncoder())
        assert np.allclose(np.diag(matrix), 1.0)

    def test_values_are_cosines_in_unit_range(self):
        record = paraphrased_record("p")
        matrix = record_similarity_matrix(record, HashingEncoder())
        assert np.all(matrix <= 1.0 + 1e-12) and np.all(matrix >= -1.0 - 1e-12)


class TestAcceptanceRoundTrip:
    def test_ten_record_round_trip_through_primary_loader(self, tmp_path):
        records = [identity_record(f"r{i}") for i in range(10)]
        path = tmp_path / "sims.jsonl"
        assert emit_similarities(records, HashingEncoder(), path) == 10

        provider = file_similarity_provider(path)  # zero validation errors
        for record in records:
            n = len(split_sentences(record.paraphrased_text))
            m = len(split_sentences(record.original.text))
            matrix = provider.matrix_for(record.id, n=n, m=m)
            assert np.all(np.diag(matrix.values) > 0.99)
        print("[PASS] adapter round-trip (10 records, diagonals > 0.99)")

    def test_exported_matrices_drive_alignment_and_labels(self, tmp_path):
        records = [paraphrased_record(f"p{i}") for i in range(3)]
        path = tmp_path / "sims.jsonl"
        emit_similarities(records, HashingEncoder(), path)
        provider = file_similarity_provider(path)
        for record in records:
            labels = build_labels(record, None, provider)
            assert labels.classes == (0, 1, 1, 0, 0)

    def test_alignment_on_identity_matrix_is_diagonal(self, tmp_path):
        record = identity_record("diag")
        matrix = record_similarity_matrix(record, HashingEncoder())
        alignment = align_greedy(matrix, 0.75)
        assert alignment.pairs == tuple((i, (i, i + 1)) for i in range(len(SENTS)))
