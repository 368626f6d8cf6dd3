"""Adapter configuration."""

from __future__ import annotations

import string
from dataclasses import dataclass, field

from .prompts import PROMPT_TEMPLATES

DEFAULT_ENCODER_MODEL = "sentence-transformers/all-MiniLM-L6-v2"


def _placeholders(template: str) -> list[str]:
    return [name for _, name, _, _ in string.Formatter().parse(template) if name is not None]


@dataclass(frozen=True)
class AdapterConfig:
    """Encoder, API, and prompt settings for one adapter run."""

    encoder_model: str = DEFAULT_ENCODER_MODEL
    api_endpoint: str = ""
    api_key_env: str = "PARAPHRASE_API_KEY"
    prompt_templates: dict[str, str] = field(default_factory=lambda: dict(PROMPT_TEMPLATES))
    batch_size: int = 32
    requests_per_second: float = 1.0
    max_retries: int = 5

    def __post_init__(self) -> None:
        if self.requests_per_second <= 0:
            raise ValueError("rate limit must be > 0")
        if self.batch_size <= 0:
            raise ValueError("batch size must be > 0")
        for prompt_id, template in self.prompt_templates.items():
            names = _placeholders(template)
            if names != ["text"]:
                raise ValueError(
                    f"prompt {prompt_id!r} must contain exactly one {{text}} placeholder"
                )

    def template(self, prompt_id: str) -> str:
        if prompt_id not in self.prompt_templates:
            raise KeyError(f"unknown prompt id {prompt_id!r}")
        return self.prompt_templates[prompt_id]
