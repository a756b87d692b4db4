"""Seeded random generators shared by unit and acceptance tests."""

import random

from monostream.core import (
    RETRANSLATION,
    STREAMING,
    Read,
    Snapshot,
    StreamLog,
    TokenSeq,
    Write,
)

ALPHABET = list("abcdexyz") + ["这", "使", "我", "难过", "б", "ü"]


def random_token(rng: random.Random) -> str:
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(1, 3)))


def random_tokens(rng: random.Random, lo: int, hi: int) -> list[str]:
    return [random_token(rng) for _ in range(rng.randint(lo, hi))]


def random_streaming_log(rng: random.Random, log_id: str = "r") -> StreamLog:
    """A legal streaming log: starts with a Read, then a random R/W mix."""
    actions = [Read(random_token(rng))]
    for _ in range(rng.randint(0, 20)):
        if rng.random() < 0.5:
            actions.append(Read(random_token(rng)))
        else:
            actions.append(Write(random_token(rng)))
    return StreamLog(log_id, STREAMING, actions)


def random_retranslation_log(rng: random.Random, log_id: str = "r") -> StreamLog:
    """A legal retranslation log: at most one snapshot per read."""
    actions = [Read(random_token(rng))]
    for _ in range(rng.randint(0, 12)):
        actions.append(Read(random_token(rng)))
        if rng.random() < 0.7:
            actions.append(Snapshot(TokenSeq(random_tokens(rng, 0, 6))))
    return StreamLog(log_id, RETRANSLATION, actions)


def random_legal_log(rng: random.Random, log_id: str = "r") -> StreamLog:
    if rng.random() < 0.5:
        return random_streaming_log(rng, log_id)
    return random_retranslation_log(rng, log_id)


def random_full_read_log(rng: random.Random, log_id: str = "r") -> StreamLog:
    """All reads before all writes, at least one of each."""
    reads = [Read(random_token(rng)) for _ in range(rng.randint(1, 30))]
    writes = [Write(random_token(rng)) for _ in range(rng.randint(1, 30))]
    return StreamLog(log_id, STREAMING, reads + writes)


def random_append_only_snapshots(rng: random.Random) -> list[list[str]]:
    """Snapshot sequence where each extends the previous; final non-empty."""
    current = random_tokens(rng, 1, 4)
    snapshots = [list(current)]
    for _ in range(rng.randint(0, 8)):
        current = current + random_tokens(rng, 0, 3)
        snapshots.append(list(current))
    return snapshots


def random_alignment_links(rng: random.Random, max_links: int = 12) -> set[tuple[int, int]]:
    n_links = rng.randint(1, max_links)
    return {(rng.randint(0, 14), rng.randint(0, 14)) for _ in range(n_links)}
