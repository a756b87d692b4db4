"""Batch ingestion, corpus-wide anticipation scoring, and monotonic filtering.

Everything here is built to run over training-corpus-sized inputs (hundreds
of thousands of lines): the path-based entry points stream line by line and
score in fixed-size chunks through the batch kernels, so peak memory stays
bounded by the chunk size no matter how large the corpus. The in-memory
variants exist for small corpora and tests.

Unscoreable pairs (no alignment links) are never silently kept: they are
excluded from means, dropped by the filter, and counted in the stats.
"""

from __future__ import annotations

import math
import random
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any

from . import _kernels
from .core import MetricReport, SentencePair, StreamLog, TokenSeq
from .errors import FormatError
from .latency_stability import al, delays_from_log
from .monotonicity import Alignment, parse_pharaoh

CHUNK_LINES = 8192


@dataclass(frozen=True)
class Corpus:
    pairs: tuple[SentencePair, ...]
    provenance: dict[str, str] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class PairScore:
    """Anticipation score of one pair, or the reason it could not be scored."""

    id: str
    aa: float | None
    error: str | None = None


@dataclass(frozen=True)
class AAReport:
    per_pair: tuple[PairScore, ...]
    mean_aa: float | None
    monotonic_count: int
    scored: int
    total: int

    def summary(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "scored": self.scored,
            "errors": self.total - self.scored,
            "monotonic": self.monotonic_count,
            "mean_aa": self.mean_aa,
        }


@dataclass(frozen=True)
class FilterStats:
    total: int
    kept: int
    dropped: int
    unscoreable: int
    threshold: float
    sample_size: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "total": self.total,
            "kept": self.kept,
            "dropped": self.dropped,
            "unscoreable": self.unscoreable,
            "threshold": self.threshold,
        }
        if self.sample_size is not None:
            out["sample_size"] = self.sample_size
            out["seed"] = self.seed
        return out


@dataclass(frozen=True)
class ParallelLine:
    """One line of a parallel corpus as read off disk.

    raw_source/raw_target keep the exact line content (sans newline) so that
    filtered output files are byte-identical to their inputs.
    """

    lineno: int
    id: str
    source: TokenSeq
    target: TokenSeq
    alignment: Alignment | None
    raw_source: str
    raw_target: str


def _count_remaining(fh) -> int:
    return sum(1 for _ in fh)


def iter_parallel(source_path, target_path, alignment_path=None) -> Iterator[ParallelLine]:
    """Stream aligned lines from the corpus files, one at a time.

    Raises FormatError on line-count mismatch (naming every file's count) and
    on malformed or out-of-range alignments (naming the line).
    """
    src_fh = open(source_path, encoding="utf-8")
    tgt_fh = open(target_path, encoding="utf-8")
    aln_fh = open(alignment_path, encoding="utf-8") if alignment_path else None
    try:
        lineno = 0
        while True:
            src_line = src_fh.readline()
            tgt_line = tgt_fh.readline()
            aln_line = aln_fh.readline() if aln_fh else None
            ended = [src_line == "", tgt_line == ""]
            if aln_fh:
                ended.append(aln_line == "")
            if all(ended):
                return
            if any(ended):
                src_count = lineno + (src_line != "") + _count_remaining(src_fh)
                tgt_count = lineno + (tgt_line != "") + _count_remaining(tgt_fh)
                msg = (
                    f"line count mismatch: {source_path} has {src_count} lines, "
                    f"{target_path} has {tgt_count}"
                )
                if aln_fh:
                    aln_count = lineno + (aln_line != "") + _count_remaining(aln_fh)
                    msg += f", {alignment_path} has {aln_count}"
                raise FormatError(msg)
            lineno += 1
            source = TokenSeq(src_line.split())
            target = TokenSeq(tgt_line.split())
            alignment = None
            if aln_fh:
                alignment = parse_pharaoh(
                    aln_line,
                    len(source),
                    len(target),
                    source=str(alignment_path),
                    lineno=lineno,
                )
            yield ParallelLine(
                lineno,
                f"line-{lineno}",
                source,
                target,
                alignment,
                src_line.rstrip("\n"),
                tgt_line.rstrip("\n"),
            )
    finally:
        src_fh.close()
        tgt_fh.close()
        if aln_fh:
            aln_fh.close()


def load_parallel(
    source_path, target_path, alignment_path=None
) -> tuple[Corpus, list[Alignment] | None]:
    """Materialize a parallel corpus (and alignments, if given) in memory."""
    pairs: list[SentencePair] = []
    alignments: list[Alignment] | None = [] if alignment_path else None
    for line in iter_parallel(source_path, target_path, alignment_path):
        pairs.append(SentencePair(line.id, line.source, line.target))
        if alignments is not None:
            alignments.append(line.alignment)
    provenance = {"source": str(source_path), "target": str(target_path)}
    if alignment_path:
        provenance["alignment"] = str(alignment_path)
    return Corpus(tuple(pairs), provenance), alignments


def score_pairs(
    items: Iterable[tuple[str, Alignment | None]],
    chunk_lines: int = CHUNK_LINES,
    backend: str | None = None,
) -> Iterator[PairScore]:
    """Score (id, alignment) pairs in chunked batches through the kernels."""
    buf: list[tuple[str, Alignment | None]] = []
    for item in items:
        buf.append(item)
        if len(buf) >= chunk_lines:
            yield from _score_chunk(buf, backend)
            buf = []
    if buf:
        yield from _score_chunk(buf, backend)


def _score_chunk(chunk: Sequence[tuple[str, Alignment | None]], backend: str | None) -> Iterator[PairScore]:
    link_lists = [() if aln is None else tuple(aln.links) for _, aln in chunk]
    link_i, link_j, offsets = _kernels.pack_links(link_lists)
    values = _kernels.aa_batch(link_i, link_j, offsets, backend=backend)
    for (pair_id, aln), value in zip(chunk, values):
        if aln is None:
            yield PairScore(pair_id, None, "no alignment")
        elif math.isnan(value):
            yield PairScore(pair_id, None, "unscoreable: alignment has no links")
        else:
            yield PairScore(pair_id, float(value))


class AAAccumulator:
    """Running aggregate over pair scores; mean is unweighted over scored pairs."""

    def __init__(self) -> None:
        self.total = 0
        self.scored = 0
        self.monotonic = 0
        self.sum_aa = 0.0

    def add(self, score: PairScore) -> None:
        self.total += 1
        if score.aa is None:
            return
        self.scored += 1
        self.sum_aa += score.aa
        if score.aa == 0.0:
            self.monotonic += 1

    @property
    def mean_aa(self) -> float | None:
        return self.sum_aa / self.scored if self.scored else None


def score_corpus(
    corpus: Corpus,
    alignments: Sequence[Alignment | None],
    backend: str | None = None,
) -> AAReport:
    """Score every pair of an in-memory corpus; per-pair failures stay in the report."""
    if len(corpus.pairs) != len(alignments):
        raise ValueError(
            f"corpus has {len(corpus.pairs)} pairs but {len(alignments)} alignments"
        )
    acc = AAAccumulator()
    per_pair: list[PairScore] = []
    items = ((pair.id, aln) for pair, aln in zip(corpus.pairs, alignments))
    for score in score_pairs(items, backend=backend):
        per_pair.append(score)
        acc.add(score)
    return AAReport(
        per_pair=tuple(per_pair),
        mean_aa=acc.mean_aa,
        monotonic_count=acc.monotonic,
        scored=acc.scored,
        total=acc.total,
    )


def filter_monotonic(
    corpus: Corpus,
    alignments: Sequence[Alignment | None],
    threshold: float = 0.0,
    sample_size: int | None = None,
    seed: int | None = None,
    backend: str | None = None,
) -> tuple[Corpus, FilterStats]:
    """Keep the pairs scoring at or below the threshold, in input order.

    Unscoreable pairs are dropped, never kept. When sample_size is given and
    fewer than the kept count, a seeded uniform subsample (still in input
    order) is returned.
    """
    report = score_corpus(corpus, alignments, backend=backend)
    kept_idx = [
        idx
        for idx, score in enumerate(report.per_pair)
        if score.aa is not None and score.aa <= threshold
    ]
    unscoreable = report.total - report.scored
    if sample_size is not None and sample_size < len(kept_idx):
        rng = random.Random(seed)
        kept_idx = sorted(rng.sample(kept_idx, sample_size))
    kept_pairs = tuple(corpus.pairs[i] for i in kept_idx)
    stats = FilterStats(
        total=len(corpus.pairs),
        kept=len(kept_pairs),
        dropped=len(corpus.pairs) - len(kept_pairs),
        unscoreable=unscoreable,
        threshold=threshold,
        sample_size=sample_size,
        seed=seed if sample_size is not None else None,
    )
    return Corpus(kept_pairs, dict(corpus.provenance)), stats


def dataset_stats(
    corpus: Corpus,
    alignments: Sequence[Alignment | None] | None = None,
    annotation_logs: Sequence[StreamLog] | None = None,
    inputs: dict[str, Any] | None = None,
) -> MetricReport:
    """Corpus-level statistics: mean source length, mean anticipation, mean lagging.

    The mean source length doubles as the full-read lagging of the corpus (a
    reader that consumes the whole sentence before translating lags by exactly
    its length). Annotation-log lagging is merged into per-sentence entries by
    log id.
    """
    per_sentence: dict[str, dict[str, float]] = {}
    source_len_sum = 0
    for pair in corpus.pairs:
        per_sentence[pair.id] = {"source_len": float(len(pair.source))}
        source_len_sum += len(pair.source)
    corpus_stats: dict[str, float] = {"pairs": float(len(corpus.pairs))}
    if corpus.pairs:
        corpus_stats["mean_source_len"] = source_len_sum / len(corpus.pairs)

    if alignments is not None:
        report = score_corpus(corpus, alignments)
        for pair, score in zip(corpus.pairs, report.per_pair):
            if score.aa is not None:
                per_sentence[pair.id]["aa"] = score.aa
        corpus_stats["aa_scored"] = float(report.scored)
        if report.mean_aa is not None:
            corpus_stats["mean_aa"] = report.mean_aa

    if annotation_logs is not None:
        al_sum = 0.0
        counted = 0
        for log in annotation_logs:
            value = float(al(delays_from_log(log)))
            per_sentence.setdefault(log.id, {})["al"] = value
            al_sum += value
            counted += 1
        corpus_stats["al_logs"] = float(counted)
        if counted:
            corpus_stats["mean_al"] = al_sum / counted

    return MetricReport(
        per_sentence=per_sentence,
        corpus=corpus_stats,
        inputs=dict(inputs or {}),
    )


def score_paths(
    source_path,
    target_path,
    alignment_path,
    tsv_out,
    chunk_lines: int = CHUNK_LINES,
    backend: str | None = None,
) -> dict[str, Any]:
    """Stream a corpus off disk, writing `id<TAB>aa` per pair; returns the summary.

    Unscoreable pairs are written with an empty value column and an error
    note, and excluded from the mean.
    """
    acc = AAAccumulator()
    lines = iter_parallel(source_path, target_path, alignment_path)
    items = ((pl.id, pl.alignment) for pl in lines)
    for score in score_pairs(items, chunk_lines=chunk_lines, backend=backend):
        acc.add(score)
        if score.aa is None:
            tsv_out.write(f"{score.id}\t\t{score.error}\n")
        else:
            tsv_out.write(f"{score.id}\t{score.aa!r}\n")
    return {
        "total": acc.total,
        "scored": acc.scored,
        "errors": acc.total - acc.scored,
        "monotonic": acc.monotonic,
        "mean_aa": acc.mean_aa,
    }


def filter_paths(
    source_path,
    target_path,
    alignment_path,
    out_prefix: str,
    threshold: float = 0.0,
    sample_size: int | None = None,
    seed: int | None = None,
    chunk_lines: int = CHUNK_LINES,
    backend: str | None = None,
) -> FilterStats:
    """Stream-filter a corpus into `<prefix>.kept.src` / `<prefix>.kept.tgt`.

    Without sampling, kept lines are written as they pass, so memory stays
    constant. With a sample size, a seeded reservoir holds at most that many
    kept lines, then writes them in input order.
    """
    kept_src = open(f"{out_prefix}.kept.src", "w", encoding="utf-8")
    kept_tgt = open(f"{out_prefix}.kept.tgt", "w", encoding="utf-8")
    total = 0
    kept = 0
    unscoreable = 0
    rng = random.Random(seed) if sample_size is not None else None
    reservoir: list[tuple[int, str, str]] = []
    seen_kept = 0
    try:
        lines = iter_parallel(source_path, target_path, alignment_path)
        chunked = _chunked(lines, chunk_lines)
        for chunk in chunked:
            scores = _score_chunk([(pl.id, pl.alignment) for pl in chunk], backend)
            for pl, score in zip(chunk, scores):
                total += 1
                if score.aa is None:
                    unscoreable += 1
                    continue
                if score.aa > threshold:
                    continue
                if rng is None:
                    kept += 1
                    kept_src.write(pl.raw_source + "\n")
                    kept_tgt.write(pl.raw_target + "\n")
                else:
                    seen_kept += 1
                    entry = (pl.lineno, pl.raw_source, pl.raw_target)
                    if len(reservoir) < sample_size:
                        reservoir.append(entry)
                    else:
                        slot = rng.randrange(seen_kept)
                        if slot < sample_size:
                            reservoir[slot] = entry
        if rng is not None:
            reservoir.sort()
            kept = len(reservoir)
            for _, raw_src, raw_tgt in reservoir:
                kept_src.write(raw_src + "\n")
                kept_tgt.write(raw_tgt + "\n")
    finally:
        kept_src.close()
        kept_tgt.close()
    return FilterStats(
        total=total,
        kept=kept,
        dropped=total - kept,
        unscoreable=unscoreable,
        threshold=threshold,
        sample_size=sample_size,
        seed=seed if sample_size is not None else None,
    )


def _chunked(iterable: Iterable, size: int) -> Iterator[list]:
    buf: list = []
    for item in iterable:
        buf.append(item)
        if len(buf) >= size:
            yield buf
            buf = []
    if buf:
        yield buf
