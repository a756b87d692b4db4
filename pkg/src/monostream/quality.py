"""Corpus BLEU and the derived quality scores.

Single-reference, pre-tokenized corpus BLEU-4: clipped n-gram matches are
pooled over the whole corpus before the precision ratio is taken, and the
brevity penalty compares pooled hypothesis and reference lengths. `exp`
smoothing (the standard scorer's default) replaces a zero-match precision at
order n by 1/(s * total_n) with s doubling at each smoothed order; `none`
leaves zeros in place, which zeroes the whole score. Any order with no
hypothesis n-grams at all also zeroes the score; there is no effective-order
fallback.

On top of plain BLEU sit three comparisons: a score normalized by the
full-sentence baseline of its own test set, the relative drop between a
high-resource and a low-resource operating point, and a prefix-paired BLEU
over recorded source/target streams.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .core import (
    STREAMING,
    Read,
    Snapshot,
    StreamLog,
    Tokens,
    Write,
    as_tokens,
)

NGRAM_ORDER = 4

Smoothing = Literal["none", "exp"]


@dataclass(frozen=True)
class BleuScore:
    """Corpus BLEU with its sufficient statistics.

    score is on the 0-100 scale; precisions are the four clipped n-gram
    precision ratios in [0, 1]. Whenever all precisions are positive,
    score == brevity_penalty * exp(mean ln p_n) * 100.
    """

    score: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int

    def format(self, decimals: int = 1) -> str:
        precs = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return (
            f"BLEU = {self.score:.{decimals}f} {precs} "
            f"(BP = {self.brevity_penalty:.3f} hyp_len = {self.hyp_len} ref_len = {self.ref_len})"
        )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    hypotheses: Sequence[Tokens],
    references: Sequence[Tokens],
    smoothing: Smoothing = "exp",
) -> BleuScore:
    """Score a corpus of tokenized hypotheses against one reference each."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference length mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if len(hypotheses) == 0:
        raise ValueError("empty corpus")
    if smoothing not in ("none", "exp"):
        raise ValueError(f"unknown smoothing {smoothing!r}")

    matches = [0] * NGRAM_ORDER
    totals = [0] * NGRAM_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = as_tokens(hyp)
        r = as_tokens(ref)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, NGRAM_ORDER + 1):
            hyp_ngrams = _ngrams(h, n)
            if not hyp_ngrams:
                continue
            ref_ngrams = _ngrams(r, n)
            totals[n - 1] += sum(hyp_ngrams.values())
            matches[n - 1] += sum((hyp_ngrams & ref_ngrams).values())

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1 - ref_len / hyp_len)

    precisions = [0.0] * NGRAM_ORDER
    smooth_scale = 1
    for n in range(1, NGRAM_ORDER + 1):
        if totals[n - 1] == 0:
            continue
        if matches[n - 1] == 0 and smoothing == "exp":
            smooth_scale *= 2
            precisions[n - 1] = 1.0 / (smooth_scale * totals[n - 1])
        else:
            precisions[n - 1] = matches[n - 1] / totals[n - 1]

    if hyp_len == 0 or any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / NGRAM_ORDER) * 100.0

    return BleuScore(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_len=hyp_len,
        ref_len=ref_len,
    )


def norm_score(model_score: float, base_score: float) -> float:
    """Model score divided by its test set's full-sentence baseline score."""
    if base_score <= 0:
        raise ValueError(f"base score must be positive, got {base_score}")
    return model_score / base_score


def drop_rate(high_score: float, low_score: float) -> float:
    """Relative quality change from `high_score` to `low_score`, in percent.

    Negative when quality drops; e.g. 25.2 -> 19.3 gives -23.4%.
    """
    if high_score <= 0:
        raise ValueError(f"high score must be positive, got {high_score}")
    return 100.0 * (low_score - high_score) / high_score


def partial_outputs(log: StreamLog) -> list[tuple[str, ...]]:
    """Hypothesis visible after each source-prefix length p = 1..(#reads).

    For a streaming log this is the cumulative Write stream before the
    (p+1)-th Read; for a retranslation log, the latest snapshot emitted with
    at most p reads done (empty until the first snapshot).
    """
    n_reads = len(log.reads())
    partials: list[tuple[str, ...]] = []
    reads = 0
    if log.mode == STREAMING:
        written: list[str] = []
        for action in log.actions:
            if isinstance(action, Read):
                if reads >= 1:
                    partials.append(tuple(written))
                reads += 1
            elif isinstance(action, Write):
                written.append(action.token)
        partials.append(tuple(written))
    else:
        hypothesis: tuple[str, ...] = ()
        for action in log.actions:
            if isinstance(action, Read):
                if reads >= 1:
                    partials.append(hypothesis)
                reads += 1
            elif isinstance(action, Snapshot):
                hypothesis = action.hypothesis.tokens
        partials.append(hypothesis)
    assert len(partials) == n_reads
    return partials


def bleu_stream(
    system_logs: Iterable[StreamLog],
    reference_logs: Iterable[StreamLog],
    smoothing: Smoothing = "exp",
) -> BleuScore:
    """BLEU between system and annotated partial outputs at matched prefixes.

    Logs are paired by id and must agree on source length (read count). Every
    (sentence, prefix) pair contributes one hypothesis/reference pair to a
    single pooled corpus score; pairs whose reference partial is empty are
    skipped since they carry no n-gram mass.
    """
    refs_by_id = {}
    for log in reference_logs:
        if log.mode != STREAMING:
            raise ValueError(f"reference log {log.id!r} must be a streaming annotation log")
        if log.id in refs_by_id:
            raise ValueError(f"duplicate reference log id {log.id!r}")
        refs_by_id[log.id] = log

    pooled_hyps: list[tuple[str, ...]] = []
    pooled_refs: list[tuple[str, ...]] = []
    seen = set()
    for sys_log in system_logs:
        if sys_log.id in seen:
            raise ValueError(f"duplicate system log id {sys_log.id!r}")
        seen.add(sys_log.id)
        ref_log = refs_by_id.get(sys_log.id)
        if ref_log is None:
            raise ValueError(f"system log {sys_log.id!r} has no matching reference log")
        sys_partials = partial_outputs(sys_log)
        ref_partials = partial_outputs(ref_log)
        if len(sys_partials) != len(ref_partials):
            raise ValueError(
                f"log {sys_log.id!r}: source length mismatch, "
                f"system reads {len(sys_partials)} tokens but reference reads {len(ref_partials)}"
            )
        for hyp, ref in zip(sys_partials, ref_partials):
            if not ref:
                continue
            pooled_hyps.append(hyp)
            pooled_refs.append(ref)
    missing = set(refs_by_id) - seen
    if missing:
        raise ValueError(f"reference logs without system logs: {sorted(missing)}")
    if not pooled_hyps:
        raise ValueError("no non-empty reference partials; stream score is undefined")
    return corpus_bleu(pooled_hyps, pooled_refs, smoothing=smoothing)
