"""Adapter CLI: similarity export and paraphrase-record construction."""

from __future__ import annotations

import argparse
import logging
import sys

from paraspan.corpus import load_records

from .config import DEFAULT_ENCODER_MODEL, AdapterConfig
from .encoders import build_encoder
from .paraphrase import (
    MockParaphraseApi,
    RateLimitedClient,
    SpanSample,
    emit_paraphrase_records,
    http_transport,
)
from .prompts import DEFAULT_PROMPT_ID, PROMPT_TEMPLATES
from .similarities import emit_similarities


def cmd_similarities(args) -> int:
    records = load_records(args.input)
    encoder = build_encoder(args.encoder, args.model, args.batch_size)
    count = emit_similarities(records, encoder, args.output)
    print(f"wrote {count} similarity matrices")
    return 0


def cmd_paraphrase(args) -> int:
    records = load_records(args.input)
    config = AdapterConfig(
        api_endpoint=args.endpoint or "",
        requests_per_second=args.rate_limit,
    )
    if args.mock:
        transport = MockParaphraseApi()
    else:
        if not args.endpoint:
            print("error: --endpoint required unless --mock is set", file=sys.stderr)
            return 3
        transport = RateLimitedClient(
            http_transport(config, args.model),
            requests_per_second=config.requests_per_second,
            max_retries=config.max_retries,
        )
    samples = [SpanSample(document=record.original) for record in records]
    count = emit_paraphrase_records(
        samples, args.prompt_id, transport, args.output, config, rng_seed=args.seed
    )
    print(f"wrote {count} paraphrase records")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paraspan-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("similarities", help="emit similarity matrices for records")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    p.add_argument("--encoder", choices=["hashing", "neural"], default="hashing")
    p.add_argument("--model", default=DEFAULT_ENCODER_MODEL)
    p.add_argument("--batch-size", type=int, default=32)
    p.set_defaults(func=cmd_similarities)

    p = sub.add_parser("paraphrase", help="build paraphrase records via an API")
    p.add_argument("--input", required=True, help="records JSONL supplying original documents")
    p.add_argument("--output", required=True)
    p.add_argument("--prompt-id", choices=sorted(PROMPT_TEMPLATES), default=DEFAULT_PROMPT_ID)
    p.add_argument("--mock", action="store_true", help="echo transport, no network")
    p.add_argument("--endpoint", help="chat-completions endpoint for live runs")
    p.add_argument("--model", default="gpt-3.5-turbo")
    p.add_argument("--rate-limit", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_paraphrase)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level="WARNING")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: report and exit non-zero
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
