"""Paraphrase-API driver: builds records by splicing API output into texts.

The transport is just a callable prompt -> reply, so tests run against
mocks and the HTTP client is only constructed for live runs.  All calls go
through a rate limiter with exponential backoff, and every emitted record
passes the primary toolkit's validation before it is written.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from paraspan.corpus import (
    Document,
    ParaphraseRecord,
    SpanSelection,
    sample_span,
    save_records,
    splice_paraphrase,
    verify_record_sentences,
)
from paraspan.segment import split_sentences

from .config import AdapterConfig

log = logging.getLogger("paraspan_adapter")

Transport = Callable[[str], str]


class RateLimitedClient:
    """Wraps a transport with request spacing and exponential-backoff retries."""

    def __init__(
        self,
        transport: Transport,
        requests_per_second: float = 1.0,
        max_retries: int = 5,
        base_delay: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ):
        if requests_per_second <= 0:
            raise ValueError("rate limit must be > 0")
        self._transport = transport
        self._interval = 1.0 / requests_per_second
        self._max_retries = max_retries
        self._base_delay = base_delay
        self._sleep = sleep
        self._clock = clock
        self._last_call: float | None = None

    def __call__(self, prompt: str) -> str:
        attempt = 0
        while True:
            now = self._clock()
            if self._last_call is not None:
                wait = self._interval - (now - self._last_call)
                if wait > 0:
                    self._sleep(wait)
            self._last_call = self._clock()
            try:
                return self._transport(prompt)
            except Exception as exc:  # transport decides what is retryable by raising
                attempt += 1
                if attempt > self._max_retries:
                    raise
                delay = self._base_delay * 2 ** (attempt - 1)
                log.warning("paraphrase call failed (%s); retry %d in %.1fs", exc, attempt, delay)
                self._sleep(delay)


class MockParaphraseApi:
    """Test transport: fixed reply, or echo when no reply is configured."""

    def __init__(self, reply: str | None = None):
        self.reply = reply
        self.prompts: list[str] = []

    def __call__(self, prompt: str) -> str:
        self.prompts.append(prompt)
        if self.reply is not None:
            return self.reply
        # echo the text part back: everything after the blank line
        return prompt.split("\n\n", 1)[1] if "\n\n" in prompt else prompt


def http_transport(config: AdapterConfig, model: str = "gpt-3.5-turbo") -> Transport:
    """OpenAI-style chat-completions transport (live runs only)."""
    import requests  # lazy: live runs only

    api_key = os.environ.get(config.api_key_env, "")
    if not api_key:
        raise RuntimeError(f"environment variable {config.api_key_env} is not set")

    def call(prompt: str) -> str:
        response = requests.post(
            config.api_endpoint,
            headers={"Authorization": f"Bearer {api_key}"},
            json={"model": model, "messages": [{"role": "user", "content": prompt}]},
            timeout=60,
        )
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]

    return call


@dataclass(frozen=True)
class SpanSample:
    """Pairs a document with the span to paraphrase (sampled when absent)."""

    document: Document
    span: SpanSelection | None = None


def paraphrase_spans(
    samples: Sequence[SpanSample],
    prompt_id: str,
    api: Transport,
    config: AdapterConfig | None = None,
    rng_seed: int = 0,
    method: str = "context_agnostic",
) -> list[ParaphraseRecord]:
    """Paraphrase one span per document and build validated records."""
    config = config or AdapterConfig()
    template = config.template(prompt_id)
    records = []
    for index, sample in enumerate(samples):
        sentences = list(split_sentences(sample.document.text).sentences)
        span = sample.span or sample_span(len(sentences), rng_seed=rng_seed + index)
        span_text = " ".join(sentences[span.start_sentence : span.end_sentence])
        reply = api(template.format(text=span_text))
        replacement = list(split_sentences(reply).sentences)
        text, p_span = splice_paraphrase(sentences, span, replacement)
        record = ParaphraseRecord(
            id=sample.document.id,
            original=sample.document,
            paraphrased_text=text,
            original_spans=(span,),
            paraphrased_spans=(p_span,),
            method=method,
            prompt_id=prompt_id,
        )
        verify_record_sentences(record)
        records.append(record)
    return records


def emit_paraphrase_records(
    samples: Sequence[SpanSample],
    prompt_id: str,
    api: Transport,
    path: str | Path,
    config: AdapterConfig | None = None,
    rng_seed: int = 0,
) -> int:
    records = paraphrase_spans(samples, prompt_id, api, config, rng_seed)
    save_records(path, records)
    return len(records)
