"""Adapter package: neural similarity export and paraphrase-API driving.

Consumes and produces only the primary toolkit's file formats.
"""

__version__ = "0.1.0"

from .config import AdapterConfig
from .encoders import HashingEncoder, SentenceTransformerEncoder, build_encoder
from .paraphrase import (
    MockParaphraseApi,
    RateLimitedClient,
    SpanSample,
    emit_paraphrase_records,
    paraphrase_spans,
)
from .prompts import DEFAULT_PROMPT_ID, PROMPT_TEMPLATES
from .similarities import emit_similarities, record_similarity_matrix
