"""Latency and stability metrics over stream logs.

Latency is average lagging: the mean, over the target prefix up to the cutoff
τ, of g(t) - (t-1)/r where g(t) counts source tokens read when target token t
was written and r = |y|/|x|. τ is the first t at which the full source has
been read, falling back to |y| when the log finishes writing without reading
everything. Computed in exact rational arithmetic so closed forms hold
exactly; callers format the Fraction as a decimal for reporting.

Stability is normalized erasure over a re-translation trace: tokens erased
across successive hypothesis revisions, divided by the final hypothesis
length. An append-only trace has erasure 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    RETRANSLATION,
    STREAMING,
    Read,
    Snapshot,
    StreamLog,
    TokenSeq,
    Tokens,
    Write,
    as_tokens,
)
from .errors import EmptyProfileError, UndefinedNEError


@dataclass(frozen=True)
class DelayProfile:
    """g[t] = source tokens read when the t-th target token was written (t=1..|y|)."""

    g: tuple[int, ...]
    source_len: int
    target_len: int

    def __init__(self, g, source_len: int):
        gs = tuple(int(v) for v in g)
        prev = 1
        for t, v in enumerate(gs):
            if not 1 <= v <= source_len:
                raise ValueError(f"g[{t}] = {v} outside [1, {source_len}]")
            if v < prev:
                raise ValueError(f"g must be non-decreasing, g[{t}] = {v} after {prev}")
            prev = v
        object.__setattr__(self, "g", gs)
        object.__setattr__(self, "source_len", int(source_len))
        object.__setattr__(self, "target_len", len(gs))


@dataclass(frozen=True)
class HypothesisTrace:
    """Successive full hypotheses of a re-translation run.

    reads_at[k] is the number of source reads completed before snapshot k was
    emitted; the last snapshot is the final translation.
    """

    snapshots: tuple[TokenSeq, ...]
    reads_at: tuple[int, ...]

    def __init__(self, snapshots, reads_at):
        snaps = tuple(s if isinstance(s, TokenSeq) else TokenSeq(s) for s in snapshots)
        reads = tuple(int(r) for r in reads_at)
        if len(snaps) != len(reads):
            raise ValueError(f"{len(snaps)} snapshots but {len(reads)} read counts")
        if any(b < a for a, b in zip(reads, reads[1:])):
            raise ValueError("reads_at must be non-decreasing")
        object.__setattr__(self, "snapshots", snaps)
        object.__setattr__(self, "reads_at", reads)


def delays_from_log(log: StreamLog) -> DelayProfile:
    """Extract the delay profile of a streaming log.

    g[t] counts the Reads preceding the t-th Write; the log's total Read count
    is taken as the source length.
    """
    if log.mode != STREAMING:
        raise ValueError(f"log {log.id!r}: delay extraction needs a streaming log, got {log.mode}")
    reads = 0
    g: list[int] = []
    for action in log.actions:
        if isinstance(action, Read):
            reads += 1
        elif isinstance(action, Write):
            g.append(reads)
    return DelayProfile(g, source_len=reads)


def al(profile: DelayProfile) -> Fraction:
    """Average lagging of a delay profile, as an exact rational."""
    if profile.target_len == 0:
        raise EmptyProfileError("no target positions; average lagging is undefined")
    if profile.source_len < 1:
        raise EmptyProfileError("empty source; average lagging is undefined")
    tau = profile.target_len
    for t, v in enumerate(profile.g, start=1):
        if v == profile.source_len:
            tau = t
            break
    r = Fraction(profile.target_len, profile.source_len)
    total = Fraction(0)
    for t in range(1, tau + 1):
        total += profile.g[t - 1] - Fraction(t - 1) / r
    return total / tau


def erasure(prev: Tokens, next: Tokens) -> int:
    """Tokens of `prev` discarded when revising to `next`.

    |prev| minus the token-level longest common prefix; anything after the
    first mismatch counts as erased regardless of content.
    """
    p = as_tokens(prev)
    n = as_tokens(next)
    lcp = 0
    for a, b in zip(p, n):
        if a != b:
            break
        lcp += 1
    return len(p) - lcp


def ne(trace: HypothesisTrace) -> Fraction:
    """Normalized erasure: total erased tokens over the final hypothesis length."""
    if not trace.snapshots or len(trace.snapshots[-1]) == 0:
        raise UndefinedNEError("final hypothesis is empty; normalized erasure is undefined")
    total = sum(
        erasure(a, b) for a, b in zip(trace.snapshots, trace.snapshots[1:])
    )
    return Fraction(total, len(trace.snapshots[-1]))


def trace_from_log(log: StreamLog) -> HypothesisTrace:
    """Collect the snapshots of a retranslation log into a trace."""
    if log.mode != RETRANSLATION:
        raise ValueError(f"log {log.id!r}: trace extraction needs a retranslation log, got {log.mode}")
    snapshots: list[TokenSeq] = []
    reads_at: list[int] = []
    reads = 0
    for action in log.actions:
        if isinstance(action, Read):
            reads += 1
        elif isinstance(action, Snapshot):
            snapshots.append(action.hypothesis)
            reads_at.append(reads)
    return HypothesisTrace(snapshots, reads_at)


def delays_from_trace(trace: HypothesisTrace) -> DelayProfile:
    """Stabilization-based delay profile for a re-translation trace.

    Extension beyond the streaming definition: g[t] is the read count at the
    earliest snapshot after which the length-t prefix of the final hypothesis
    never changes again. Only meaningful for traces whose final hypothesis is
    non-empty.
    """
    if not trace.snapshots or len(trace.snapshots[-1]) == 0:
        raise UndefinedNEError("final hypothesis is empty; no delay profile exists")
    final = trace.snapshots[-1]
    n_snaps = len(trace.snapshots)
    g: list[int] = []
    for t in range(1, len(final) + 1):
        prefix = final.tokens[:t]
        stable_from = n_snaps - 1
        for k in range(n_snaps - 2, -1, -1):
            if trace.snapshots[k].tokens[:t] == prefix:
                stable_from = k
            else:
                break
        g.append(trace.reads_at[stable_from])
    return DelayProfile(g, source_len=max(trace.reads_at))


def waitk_path(source_len: int, target_len: int, k: int, log_id: str | None = None) -> StreamLog:
    """Generate the canonical fixed-latency read/write schedule.

    Reads min(k, source_len) tokens, then alternates one write per read until
    the source is exhausted, then writes whatever targets remain. Placeholder
    tokens s1..sn / t1..tm stand in for real text: the schedule, not the
    content, carries the latency semantics.
    """
    if source_len < 1 or target_len < 1:
        raise ValueError("source_len and target_len must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    actions: list = []
    reads = 0
    writes = 0
    for _ in range(min(k, source_len)):
        reads += 1
        actions.append(Read(f"s{reads}"))
    while reads < source_len or writes < target_len:
        if writes < target_len:
            writes += 1
            actions.append(Write(f"t{writes}"))
        if reads < source_len:
            reads += 1
            actions.append(Read(f"s{reads}"))
    if log_id is None:
        log_id = f"waitk-{k}-{source_len}x{target_len}"
    return StreamLog(log_id, STREAMING, actions)


def validate_log(log: StreamLog, source: Tokens | None = None) -> list[str]:
    """Check a log against the annotation protocol; returns violations, empty if clean.

    Mode/action consistency and the Read-first rule are re-checked even though
    construction enforces them, so logs of any provenance get a full report.
    When a source sentence is given, the Read stream must spell it out exactly
    and completely.
    """
    violations: list[str] = []
    if not log.actions:
        violations.append("log has no actions")
        return violations
    if not isinstance(log.actions[0], Read):
        violations.append("action 0: first action is not a Read")
    snapshot_since_read = False
    for idx, action in enumerate(log.actions):
        if isinstance(action, Read):
            snapshot_since_read = False
        elif isinstance(action, Write):
            if log.mode != STREAMING:
                violations.append(f"action {idx}: Write in {log.mode} mode")
        elif isinstance(action, Snapshot):
            if log.mode != RETRANSLATION:
                violations.append(f"action {idx}: Snapshot in {log.mode} mode")
            elif snapshot_since_read:
                violations.append(f"action {idx}: consecutive Snapshots without an intervening Read")
            snapshot_since_read = True
    if source is not None:
        src = as_tokens(source)
        reads = log.reads()
        for pos, (got, expected) in enumerate(zip(reads, src)):
            if got != expected:
                violations.append(
                    f"read {pos}: token {got!r} does not match source token {expected!r} at index {pos}"
                )
        if len(reads) < len(src):
            violations.append(
                f"source not fully read: {len(reads)} of {len(src)} tokens"
            )
        elif len(reads) > len(src):
            violations.append(
                f"log reads {len(reads)} tokens but source has only {len(src)}"
            )
    return violations
