"""Command-line surface wiring the modules into pipelines.

Every command is a pure function of its inputs, flags and seed: identical
invocations write byte-identical outputs.  Exit codes: 0 success, 1
validation failure (bad data), 2 IO/parse error, 3 missing required
external input.  Set PTD_LOG to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .align import DEFAULT_THRESHOLD, align_greedy, file_similarity_provider, lexical_similarity_provider
from .corpus import iter_jsonl, load_annotations, load_records, write_jsonl
from .detect import load_external_scores, oracle_scorer, random_scorer, save_scores, whole_text_scores
from .errors import FormatError, MissingInputError, ValidationError
from .evaluation import (
    DEFAULT_FPR_TARGET,
    DEFAULT_KL_SEEDS,
    DEFAULT_TOP_K,
    boundary_perplexity_profile,
    evaluate_scores,
    load_token_logprobs,
    locate_tokens,
    record_span_char_ranges,
    robustness_eval,
    two_stage_defense,
    word_distribution_kl,
)
from .labels import EXPORT_MODES, build_labels, class_only_labels, export_training_file
from .perturb import (
    DEFAULT_BLEU_FLOOR,
    PERTURBATION_KINDS,
    filter_minor,
    load_lexicon,
    reorder_sentences,
    replace_words,
)
from .segment import split_sentences

log = logging.getLogger("paraspan")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_MISSING = 3


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def _validate_args(args) -> None:
    """Run-config invariants: distinct paths, numeric flags in range."""
    paths = [
        getattr(args, name, None)
        for name in ("input", "output", "scores", "labels", "similarities",
                     "annotations", "refs", "logprobs", "lexicon")
    ]
    paths = [p for p in paths if p]
    if len(paths) != len(set(paths)):
        raise ValidationError("input and output paths must be distinct")
    threshold = getattr(args, "threshold", None)
    if threshold is not None and args.command in ("align", "label", "score"):
        if not 0.0 < threshold < 1.0:
            raise ValidationError("alignment threshold must lie in (0, 1)")
    fpr = getattr(args, "fpr", None)
    if fpr is not None and not 0.0 <= fpr < 1.0:
        raise ValidationError("FPR target must lie in [0, 1)")
    rate = getattr(args, "rate", None)
    if rate is not None and not 0.0 < rate <= 0.5:
        raise ValidationError("replacement rate must lie in (0, 0.5]")
    window = getattr(args, "window", None)
    if window is not None and window < 0:
        raise ValidationError("window must be >= 0")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_segment(args) -> int:
    rows = []
    for lineno, obj in iter_jsonl(args.input):
        if "text" in obj:
            text = obj["text"]
        elif args.side == "paraphrased" and "paraphrased_text" in obj:
            text = obj["paraphrased_text"]
        elif "original_text" in obj:
            text = obj[args.side + "_text"]
        else:
            raise FormatError(f"{args.input}:{lineno}: no text field")
        segmented = split_sentences(text)
        rows.append(
            {
                "id": obj.get("id", obj.get("record_id", str(lineno))),
                "sentences": list(segmented.sentences),
                "offsets": [list(pair) for pair in segmented.char_offsets],
            }
        )
    write_jsonl(args.output, rows)
    return EXIT_OK


def cmd_align(args) -> int:
    records = load_records(args.input)
    provider = None
    if args.similarities:
        provider = file_similarity_provider(args.similarities)
    elif args.require_embeddings:
        raise MissingInputError("--require-embeddings set but no --similarities file given")
    rows = []
    for record in records:
        pairs = []
        para_sentences = list(split_sentences(record.paraphrased_text).sentences)
        orig_sentences = list(split_sentences(record.original.text).sentences)
        for o_span, p_span in zip(record.original_spans, record.paraphrased_spans):
            para_slice = para_sentences[p_span.start_sentence : p_span.end_sentence]
            orig_slice = orig_sentences[o_span.start_sentence : o_span.end_sentence]
            if provider is not None and record.id not in provider:
                if args.require_embeddings:
                    raise MissingInputError(f"no similarity matrix for record {record.id!r}")
                matrix = lexical_similarity_provider(para_slice, orig_slice).values
            elif provider is not None:
                full = provider.matrix_for(record.id, n=len(para_sentences), m=len(orig_sentences))
                matrix = full.values[
                    p_span.start_sentence : p_span.end_sentence,
                    o_span.start_sentence : o_span.end_sentence,
                ]
            else:
                matrix = lexical_similarity_provider(para_slice, orig_slice).values
            alignment = align_greedy(matrix, args.threshold)
            for i, (a, b) in alignment.pairs:
                pairs.append(
                    [
                        p_span.start_sentence + i,
                        o_span.start_sentence + a,
                        o_span.start_sentence + b,
                    ]
                )
        rows.append({"record_id": record.id, "pairs": pairs})
    write_jsonl(args.output, rows)
    return EXIT_OK


def cmd_label(args) -> int:
    records = load_records(args.input)
    annotations = load_annotations(args.annotations) if args.annotations else None
    if args.mode != "classification" and annotations is None:
        raise MissingInputError(f"mode {args.mode!r} requires --annotations")
    provider = (
        file_similarity_provider(args.similarities)
        if args.similarities
        else lexical_similarity_provider
    )
    labels = []
    for record in records:
        if args.mode == "classification" and annotations is None:
            labels.append(class_only_labels(record))
        else:
            labels.append(build_labels(record, annotations, provider, args.threshold))
    count = export_training_file(args.output, labels, args.mode)
    log.info("wrote %d sentence targets", count)
    return EXIT_OK


def cmd_score(args) -> int:
    records = load_records(args.input)
    annotations = load_annotations(args.annotations) if args.annotations else None
    provider = (
        file_similarity_provider(args.similarities)
        if args.similarities
        else lexical_similarity_provider
    )
    scores = []
    for record in records:
        if args.scorer == "oracle":
            scores.append(oracle_scorer(record, annotations, provider, args.threshold))
        else:
            scores.append(random_scorer(record, args.seed))
    save_scores(args.output, scores)
    return EXIT_OK


def _load_indexed(path):
    """Training-export JSONL -> {record_id: {sentence_index: target}}."""
    table: dict[str, dict[int, object]] = {}
    order: list[str] = []
    for lineno, obj in iter_jsonl(path):
        try:
            record_id = obj["record_id"]
            index = int(obj["sentence_index"])
            target = obj["target"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}:{lineno}: malformed target line") from exc
        if record_id not in table:
            table[record_id] = {}
            order.append(record_id)
        table[record_id][index] = target
    return table, order


def _flatten_scores_with(table, order, score_rows) -> tuple[list[float], list]:
    scores_by_record = {row.record_id: row.scores for row in score_rows}
    flat_scores: list[float] = []
    flat_targets: list = []
    for record_id in order:
        targets = table[record_id]
        if record_id not in scores_by_record:
            raise MissingInputError(f"no scores for record {record_id!r}")
        row = scores_by_record[record_id]
        if len(row) != len(targets):
            raise ValidationError(
                f"record {record_id!r}: {len(row)} scores for {len(targets)} labels"
            )
        for index in range(len(targets)):
            if index not in targets:
                raise ValidationError(
                    f"record {record_id!r}: sentence index {index} missing from targets"
                )
            flat_scores.append(float(row[index]))
            flat_targets.append(targets[index])
    return flat_scores, flat_targets


def cmd_eval(args) -> int:
    score_rows = load_external_scores(args.scores)
    labels_table, order = _load_indexed(args.labels)
    flat_scores, flat_labels = _flatten_scores_with(labels_table, order, score_rows)
    flat_labels = [int(v) for v in flat_labels]

    validation_negatives = None
    if args.validation_scores and args.validation_labels:
        val_rows = load_external_scores(args.validation_scores)
        val_table, val_order = _load_indexed(args.validation_labels)
        val_scores, val_targets = _flatten_scores_with(val_table, val_order, val_rows)
        validation_negatives = [
            s for s, t in zip(val_scores, val_targets) if int(t) == 0
        ]

    lexical_refs = syntactic_refs = None
    if args.refs:
        refs_table, _ = _load_indexed(args.refs)
        lexical_refs = []
        syntactic_refs = []
        for record_id in order:
            if record_id not in refs_table:
                raise MissingInputError(f"no reference scores for record {record_id!r}")
            for index in range(len(labels_table[record_id])):
                vector = refs_table[record_id][index]
                if not isinstance(vector, list) or len(vector) != 3:
                    raise ValidationError(
                        f"record {record_id!r}: --refs must be an aggregate-vector export"
                    )
                lexical_refs.append(float(vector[0]))
                syntactic_refs.append(float(vector[2]))

    report = evaluate_scores(
        flat_scores,
        flat_labels,
        validation_negative_scores=validation_negatives,
        fpr_target=args.fpr,
        lexical_refs=lexical_refs,
        syntactic_refs=syntactic_refs,
    )
    _write_json(args.output, report.to_dict())
    name = Path(args.scores).stem

    def fmt(value) -> str:
        return "   n/a" if value is None else f"{value:6.3f}"

    accuracy_header = f"Acc (FPR {args.fpr * 100:g}%)"
    print(f"{'Model':<16} {'AUROC':>6} {accuracy_header:>14} {'Lex Corr.':>10} {'Syn Corr.':>10}")
    print(f"{name:<16} {report.auroc:6.3f} {report.accuracy_at_fpr:14.2%} "
          f"{fmt(report.lexical_corr):>10} {fmt(report.syntactic_corr):>10}")
    return EXIT_OK


def cmd_stats(args) -> int:
    records = load_records(args.input)
    if args.profile:
        if not args.logprobs:
            raise MissingInputError("--profile requires --logprobs")
        logprobs = load_token_logprobs(args.logprobs)
        per_record_logprobs = []
        per_record_spans = []
        per_record_offsets = []
        for record in records:
            if record.id not in logprobs:
                raise MissingInputError(f"no token logprobs for record {record.id!r}")
            tokens, values = logprobs[record.id]
            per_record_logprobs.append(values)
            per_record_offsets.append(locate_tokens(record.paraphrased_text, tokens))
            per_record_spans.append(record_span_char_ranges(record))
        profile = boundary_perplexity_profile(
            per_record_logprobs, per_record_spans, args.window, per_record_offsets
        )
        _write_json(args.output, profile.to_dict())
        return EXIT_OK

    paraphrased = [r for r in records if r.method != "none"]
    if not paraphrased:
        raise ValidationError("no paraphrased records for KL statistics")
    seeds = [args.seed + i for i in range(len(DEFAULT_KL_SEEDS))]
    if args.scope == "span":
        originals = []
        replacements = []
        for record in paraphrased:
            orig_sents = split_sentences(record.original.text).sentences
            para_sents = split_sentences(record.paraphrased_text).sentences
            originals.append(
                " ".join(
                    " ".join(orig_sents[s.start_sentence : s.end_sentence])
                    for s in record.original_spans
                )
            )
            replacements.append(
                " ".join(
                    " ".join(para_sents[s.start_sentence : s.end_sentence])
                    for s in record.paraphrased_spans
                )
            )
        value = word_distribution_kl(originals, replacements, args.top_k, seeds, args.split)
    else:
        value = word_distribution_kl(
            [r.original.text for r in paraphrased],
            [r.paraphrased_text for r in paraphrased],
            args.top_k,
            seeds,
            args.split,
        )
    _write_json(args.output, {"kl_divergence": value, "scope": args.scope, "top_k": args.top_k})
    print(f"KL divergence ({args.scope}, top-{args.top_k}): {value:.6f} nats")
    return EXIT_OK


def cmd_defend(args) -> int:
    scores = []
    verdicts = []
    gold = []
    for lineno, obj in iter_jsonl(args.input):
        try:
            scores.append(float(obj["score"]))
            verdicts.append(obj["detector"])
            gold.append(obj["gold"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{args.input}:{lineno}: malformed defense line") from exc
    report = two_stage_defense(scores, args.threshold, verdicts, gold)
    _write_json(args.output, report.to_dict())
    print(
        f"HumanRec {report.human_rec:.2%}  MachineRec {report.machine_rec:.2%}  "
        f"AvgRec {report.avg_rec:.2%}"
    )
    return EXIT_OK


def cmd_perturb(args) -> int:
    records = load_records(args.input)
    lexicon = load_lexicon(args.lexicon) if args.kind == "word_replace" else None
    rows = []
    for offset, record in enumerate(records):
        text = record.original.text
        if args.kind == "sentence_reorder":
            perturbed = reorder_sentences(text, args.seed + offset)
        else:
            perturbed = replace_words(text, args.rate, lexicon, args.seed + offset)
        kept = filter_minor(text, perturbed, args.bleu_floor)
        rows.append(
            {
                "id": record.id,
                "kind": args.kind,
                "original_text": text,
                "perturbed_text": perturbed,
                "kept": kept,
            }
        )
    write_jsonl(args.output, rows)
    return EXIT_OK


def cmd_robustness(args) -> int:
    all_scores: list[float] = []
    for lineno, obj in iter_jsonl(args.input):
        if not obj.get("kept", True):
            continue
        row = whole_text_scores(
            obj["original_text"], obj["perturbed_text"], threshold=args.align_threshold,
            record_id=obj.get("id", str(lineno)),
        )
        all_scores.extend(row.scores)
    accuracy = robustness_eval(all_scores, args.threshold)
    _write_json(args.output, {"accuracy": accuracy, "sentences": len(all_scores)})
    print(f"Robustness accuracy: {accuracy:.2%} over {len(all_scores)} sentences")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paraspan", description="Paraphrased text-span detection toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="split texts into sentences")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--side", choices=["original", "paraphrased"], default="original")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("align", help="align paraphrased spans to original spans")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    p.add_argument("--similarities", help="similarity-matrix JSONL")
    p.add_argument("--require-embeddings", action="store_true")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("label", help="build sentence labels / training exports")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    p.add_argument("--annotations")
    p.add_argument("--similarities")
    p.add_argument("--mode", choices=list(EXPORT_MODES), default="classification")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("score", help="run a baseline scorer over records")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    p.add_argument("--scorer", choices=["oracle", "random"], default="oracle")
    p.add_argument("--annotations")
    p.add_argument("--similarities")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="detection metrics for a score file")
    p.add_argument("--scores", required=True)
    p.add_argument("--labels", required=True, help="classification training export")
    p.add_argument("--validation-scores")
    p.add_argument("--validation-labels")
    p.add_argument("--refs", help="aggregate-vector training export for correlations")
    p.add_argument("--fpr", type=float, default=DEFAULT_FPR_TARGET)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="word-distribution KL / perplexity profile")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--kl", action="store_true", default=True)
    group.add_argument("--profile", action="store_true")
    p.add_argument("--scope", choices=["full", "span"], default="full")
    p.add_argument("--split", choices=["paired", "halves", "none"], default="paired")
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--logprobs", help="token logprob JSONL (profile mode)")
    p.add_argument("--window", type=int, default=10)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("defend", help="two-stage defense recalls")
    p.add_argument("--input", required=True, help="JSONL with score/detector/gold per text")
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.set_defaults(func=cmd_defend)

    p = sub.add_parser("perturb", help="generate minor-modification fixtures")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--output", required=True)
    p.add_argument("--kind", choices=list(PERTURBATION_KINDS), required=True)
    p.add_argument("--rate", type=float, default=0.10)
    p.add_argument("--lexicon", help="substitution TSV (defaults to the shipped one)")
    p.add_argument("--bleu-floor", type=float, default=DEFAULT_BLEU_FLOOR)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("robustness", help="score perturbation fixtures and report accuracy")
    p.add_argument("--input", required=True, help="perturbation JSONL from 'perturb'")
    p.add_argument("--output", required=True)
    p.add_argument("--threshold", type=float, required=True, help="decision threshold")
    p.add_argument("--align-threshold", type=float, default=DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_robustness)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("PTD_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_args(args)
        return args.func(args)
    except MissingInputError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (FormatError, OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
