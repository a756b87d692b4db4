"""Domain types and the stream-log data model.

A stream log records the ordered READ/WRITE (or READ/snapshot) actions taken
while translating one sentence. Logs are serialized as JSONL, one sentence per
line, with actions encoded as small arrays:

    {"id": "s1", "mode": "streaming", "actions": [["R","And"],["W","这"]]}

Tokens are opaque strings: no unicode normalization is applied anywhere, so
token identity is bit-exact with whatever the upstream tokenizer produced.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

from .errors import FormatError

STREAMING = "streaming"
RETRANSLATION = "retranslation"
MODES = (STREAMING, RETRANSLATION)


def _check_token(token: str) -> str:
    if not isinstance(token, str):
        raise ValueError(f"token must be a string, got {type(token).__name__}")
    if token == "":
        raise ValueError("token must be non-empty")
    if any(ch.isspace() for ch in token):
        raise ValueError(f"token {token!r} contains whitespace")
    return token


@dataclass(frozen=True)
class TokenSeq:
    """An ordered sequence of whitespace-free, non-empty tokens."""

    tokens: tuple[str, ...]

    def __init__(self, tokens: Iterable[str] = ()):
        toks = tuple(tokens)
        for t in toks:
            _check_token(t)
        object.__setattr__(self, "tokens", toks)

    @classmethod
    def parse(cls, line: str) -> "TokenSeq":
        """Split a plain-text line on whitespace."""
        return cls(line.split())

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]

    def __bool__(self) -> bool:
        return bool(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)


Tokens = Union[TokenSeq, Sequence[str]]


def as_tokens(value: Tokens) -> tuple[str, ...]:
    """Coerce a TokenSeq or plain sequence of tokens to a tuple."""
    if isinstance(value, TokenSeq):
        return value.tokens
    return tuple(value)


@dataclass(frozen=True)
class SentencePair:
    """One unit of a parallel corpus."""

    id: str
    source: TokenSeq
    target: TokenSeq


@dataclass(frozen=True)
class Read:
    token: str

    def __post_init__(self):
        _check_token(self.token)


@dataclass(frozen=True)
class Write:
    token: str

    def __post_init__(self):
        _check_token(self.token)


@dataclass(frozen=True)
class Snapshot:
    """A full intermediate hypothesis emitted by a re-translation system."""

    hypothesis: TokenSeq

    def __post_init__(self):
        if not isinstance(self.hypothesis, TokenSeq):
            object.__setattr__(self, "hypothesis", TokenSeq(self.hypothesis))


Action = Union[Read, Write, Snapshot]


def check_actions(mode: str, actions: Sequence[Action]) -> None:
    """Validate an action sequence against the mode and ordering rules.

    Raises ValueError naming the offending action index.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not actions:
        raise ValueError("action list is empty; a log starts with reading the first source word")
    if not isinstance(actions[0], Read):
        raise ValueError("action 0: first action must be a Read")
    snapshot_since_read = False
    for idx, action in enumerate(actions):
        if isinstance(action, Read):
            snapshot_since_read = False
        elif isinstance(action, Write):
            if mode != STREAMING:
                raise ValueError(f"action {idx}: Write not allowed in {mode} mode")
        elif isinstance(action, Snapshot):
            if mode != RETRANSLATION:
                raise ValueError(f"action {idx}: Snapshot not allowed in {mode} mode")
            if snapshot_since_read:
                raise ValueError(f"action {idx}: consecutive Snapshots without an intervening Read")
            snapshot_since_read = True
        else:
            raise ValueError(f"action {idx}: unknown action {action!r}")


@dataclass(frozen=True)
class StreamLog:
    """The ordered action record for one sentence."""

    id: str
    mode: str
    actions: tuple[Action, ...]

    def __init__(self, id: str, mode: str, actions: Iterable[Action]):
        acts = tuple(actions)
        check_actions(mode, acts)
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "actions", acts)

    def reads(self) -> list[str]:
        return [a.token for a in self.actions if isinstance(a, Read)]

    def writes(self) -> list[str]:
        return [a.token for a in self.actions if isinstance(a, Write)]

    def snapshots(self) -> list[TokenSeq]:
        return [a.hypothesis for a in self.actions if isinstance(a, Snapshot)]


def parse_stream_log(line: str, *, source: str | None = None, lineno: int | None = None) -> StreamLog:
    """Parse one JSONL record into a StreamLog.

    `source`/`lineno` only decorate error messages.
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc.msg}", source=source, line=lineno) from exc
    if not isinstance(record, dict):
        raise FormatError("record must be a JSON object", source=source, line=lineno)
    for key in ("id", "mode", "actions"):
        if key not in record:
            raise FormatError(f"record missing {key!r} field", source=source, line=lineno)
    log_id = record["id"]
    mode = record["mode"]
    raw_actions = record["actions"]
    if not isinstance(log_id, str):
        raise FormatError("'id' must be a string", source=source, line=lineno)
    if mode not in MODES:
        raise FormatError(f"'mode' must be one of {MODES}, got {mode!r}", source=source, line=lineno)
    if not isinstance(raw_actions, list):
        raise FormatError("'actions' must be an array", source=source, line=lineno)

    actions: list[Action] = []
    for idx, raw in enumerate(raw_actions):
        try:
            actions.append(_parse_action(raw))
        except ValueError as exc:
            raise FormatError(f"action {idx}: {exc}", source=source, line=lineno) from exc
    try:
        return StreamLog(log_id, mode, actions)
    except ValueError as exc:
        raise FormatError(str(exc), source=source, line=lineno) from exc


def _parse_action(raw: Any) -> Action:
    if not isinstance(raw, list) or len(raw) != 2:
        raise ValueError(f"expected a [tag, payload] pair, got {raw!r}")
    tag, payload = raw
    if tag == "R":
        return Read(_check_token(payload))
    if tag == "W":
        return Write(_check_token(payload))
    if tag == "H":
        if not isinstance(payload, list):
            raise ValueError("snapshot payload must be an array of tokens")
        return Snapshot(TokenSeq(payload))
    raise ValueError(f"unknown action tag {tag!r}")


def serialize_stream_log(log: StreamLog) -> str:
    """Render a log as its canonical one-line JSON record."""
    actions: list[list] = []
    for action in log.actions:
        if isinstance(action, Read):
            actions.append(["R", action.token])
        elif isinstance(action, Write):
            actions.append(["W", action.token])
        else:
            actions.append(["H", list(action.hypothesis)])
    record = {"id": log.id, "mode": log.mode, "actions": actions}
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def read_stream_logs(lines: Iterable[str], *, source: str | None = None) -> Iterator[StreamLog]:
    """Parse a JSONL stream, skipping blank lines, with line numbers in errors."""
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        yield parse_stream_log(stripped, source=source, lineno=lineno)


def load_stream_logs(path) -> list[StreamLog]:
    with open(path, encoding="utf-8") as fh:
        return list(read_stream_logs(fh, source=str(path)))


@dataclass(frozen=True)
class MetricReport:
    """Per-sentence metric values plus corpus-level aggregates.

    `inputs` records the files and parameters that produced the report so a
    run can be reproduced; every aggregate in `corpus` is recomputable from
    `per_sentence` plus the documented aggregation rule (arithmetic mean
    unless stated otherwise).
    """

    per_sentence: dict[str, dict[str, float]]
    corpus: dict[str, float]
    inputs: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {"per_sentence": self.per_sentence, "corpus": self.corpus, "inputs": self.inputs},
            ensure_ascii=False,
            sort_keys=True,
        )
