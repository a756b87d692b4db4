"""Evaluation toolkit for simultaneous machine translation.

Metrics over recorded READ/WRITE streams (average lagging, normalized
erasure, prefix-paired BLEU), word-alignment monotonicity scoring with
monotonic-subset extraction, and a session service implementing the
streaming annotation protocol.
"""

from .annotation import (
    AnnotationSession,
    RatingRecord,
    SessionStore,
    ap_rate,
    export_annotations,
    per_rater_ap,
)
from .core import (
    Action,
    MetricReport,
    Read,
    SentencePair,
    Snapshot,
    StreamLog,
    TokenSeq,
    Write,
    parse_stream_log,
    serialize_stream_log,
)
from .corpus import (
    AAReport,
    Corpus,
    FilterStats,
    dataset_stats,
    filter_monotonic,
    load_parallel,
    score_corpus,
)
from .errors import (
    EmptyAlignmentError,
    EmptyProfileError,
    FormatError,
    IllegalTransitionError,
    MonostreamError,
    UndefinedNEError,
    UnknownSessionError,
)
from .latency_stability import (
    DelayProfile,
    HypothesisTrace,
    al,
    delays_from_log,
    delays_from_trace,
    erasure,
    ne,
    trace_from_log,
    validate_log,
    waitk_path,
)
from .monotonicity import Alignment, aa, is_monotonic, parse_pharaoh
from .quality import BleuScore, bleu_stream, corpus_bleu, drop_rate, norm_score

__version__ = "0.1.0"

__all__ = [
    "AAReport",
    "Action",
    "Alignment",
    "AnnotationSession",
    "BleuScore",
    "Corpus",
    "DelayProfile",
    "EmptyAlignmentError",
    "EmptyProfileError",
    "FilterStats",
    "FormatError",
    "HypothesisTrace",
    "IllegalTransitionError",
    "MetricReport",
    "MonostreamError",
    "RatingRecord",
    "Read",
    "SentencePair",
    "SessionStore",
    "Snapshot",
    "StreamLog",
    "TokenSeq",
    "UndefinedNEError",
    "UnknownSessionError",
    "Write",
    "aa",
    "al",
    "ap_rate",
    "bleu_stream",
    "corpus_bleu",
    "dataset_stats",
    "delays_from_log",
    "delays_from_trace",
    "drop_rate",
    "erasure",
    "export_annotations",
    "filter_monotonic",
    "is_monotonic",
    "load_parallel",
    "ne",
    "norm_score",
    "parse_pharaoh",
    "parse_stream_log",
    "per_rater_ap",
    "score_corpus",
    "serialize_stream_log",
    "trace_from_log",
    "validate_log",
    "waitk_path",
]
