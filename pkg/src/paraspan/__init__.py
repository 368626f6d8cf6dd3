"""Paraphrased text-span detection toolkit.

Library + CLI for building and evaluating detectors of AI-paraphrased
sentence spans inside longer texts: deterministic sentence segmentation,
greedy span alignment over similarity matrices, divergence scoring
(lexical / grammatical / syntactic), sentence-label construction,
reference baselines, and the full evaluation protocol.
"""

__version__ = "0.1.0"

from .align import (
    DEFAULT_THRESHOLD,
    Alignment,
    FileSimilarityProvider,
    SimilarityMatrix,
    align_greedy,
    calibrate_threshold,
    file_similarity_provider,
    lexical_similarity_provider,
)
from .corpus import (
    Document,
    ParaphraseRecord,
    SentenceAnnotation,
    SpanSelection,
    load_annotations,
    load_records,
    sample_multi_spans,
    sample_span,
    save_annotations,
    save_records,
    splice_multi,
    splice_paraphrase,
    split_records,
    verify_record_sentences,
)
from .detect import (
    SentenceScores,
    load_external_scores,
    oracle_scorer,
    random_scorer,
    save_scores,
    whole_text_scores,
)
from .divergence import (
    DivergenceVector,
    bleu_tokens,
    divergence_vector,
    grammatical_divergence,
    lexical_divergence,
    sentence_bleu,
    syntactic_divergence,
)
from .errors import FormatError, MissingInputError, ParaspanError, ValidationError
from .evaluation import (
    BoundaryProfile,
    DefenseReport,
    EvalReport,
    accuracy_at_threshold,
    auroc,
    boundary_perplexity_profile,
    evaluate_scores,
    pearson,
    robustness_eval,
    threshold_at_fpr,
    two_stage_defense,
    word_distribution_kl,
)
from .labels import SentenceLabels, build_labels, class_only_labels, export_training_file
from .perturb import Perturbation, filter_minor, load_lexicon, reorder_sentences, replace_words
from .segment import SentenceList, mark_boundaries, split_sentences
from .trees import ParseTree, parse_bracketed, tree_edit_distance, truncate_tree
