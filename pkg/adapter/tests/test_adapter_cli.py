"""Adapter CLI smoke tests."""

import json

from paraspan.corpus import Document, ParaphraseRecord, load_records, save_records
from paraspan_adapter.cli import main

TEXT = (
    "The committee met on Tuesday morning. They discussed the yearly budget. "
    "Several members raised new concerns. The chair promised a written summary."
)


def write_records(path, count=3):
    records = [
        ParaphraseRecord(
            id=f"c{i}",
            original=Document(id=f"c{i}", text=TEXT, source="human"),
            paraphrased_text=TEXT,
            method="none",
        )
        for i in range(count)
    ]
    save_records(path, records)
    return records


def test_similarities_command(tmp_path):
    src = tmp_path / "records.jsonl"
    write_records(src)
    out = tmp_path / "sims.jsonl"
    assert main(["similarities", "--input", str(src), "--output", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 3
    assert len(rows[0]["rows"]) == 4  # 4 sentences per side


def test_paraphrase_mock_command(tmp_path):
    src = tmp_path / "records.jsonl"
    write_records(src)
    out = tmp_path / "paraphrased.jsonl"
    assert main(
        ["paraphrase", "--input", str(src), "--output", str(out), "--mock", "--seed", "5"]
    ) == 0
    loaded = load_records(out)
    assert len(loaded) == 3
    assert all(r.method == "context_agnostic" for r in loaded)


def test_live_without_endpoint_fails(tmp_path):
    src = tmp_path / "records.jsonl"
    write_records(src)
    out = tmp_path / "paraphrased.jsonl"
    assert main(["paraphrase", "--input", str(src), "--output", str(out)]) == 3
