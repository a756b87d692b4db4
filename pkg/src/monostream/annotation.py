"""Streaming annotation sessions, acceptability ratings, and their persistence.

A session walks one annotator through one sentence: source tokens are exposed
one READ at a time, target tokens are appended one WRITE at a time, and
nothing already written can ever be revised (there is no operation for it).
The first read happens at creation, so an annotator always starts with the
first source word on screen; the session can only finish once every source
token has been read.

Durability is an append-only JSONL event journal per session plus an index
journal recording creation order. Replaying the journals reconstructs the
exact in-memory state, so a crashed service resumes where it stopped.
"""

from __future__ import annotations

import json
import threading
import uuid
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .core import STREAMING, Action, Read, StreamLog, TokenSeq, Tokens, Write, as_tokens
from .errors import FormatError, IllegalTransitionError, UnknownSessionError

ACTIVE = "active"
FINISHED = "finished"


class AnnotationSession:
    """State machine for one sentence's annotation."""

    def __init__(self, session_id: str, source: Tokens):
        src = TokenSeq(as_tokens(source))
        if len(src) == 0:
            raise ValueError("source sentence is empty; nothing to annotate")
        self.session_id = session_id
        self.source = src
        self.reads_done = 0
        self.written: list[str] = []
        self.events: list[Action] = []
        self.state = ACTIVE
        # Reading the first source word is unconditional, not a choice.
        self._apply_read()

    def _apply_read(self) -> str:
        token = self.source[self.reads_done]
        self.reads_done += 1
        self.events.append(Read(token))
        return token

    @property
    def seq(self) -> int:
        """Number of events so far; doubles as the optimistic-concurrency tag."""
        return len(self.events)

    @property
    def finishable(self) -> bool:
        return self.reads_done == len(self.source)

    def act_read(self) -> str:
        if self.state == FINISHED:
            raise IllegalTransitionError(f"session {self.session_id} is finished")
        if self.reads_done >= len(self.source):
            raise IllegalTransitionError("all source words read")
        return self._apply_read()

    def act_write(self, token: str) -> list[str]:
        if self.state == FINISHED:
            raise IllegalTransitionError(f"session {self.session_id} is finished")
        event = Write(token)  # token rules enforced here
        self.written.append(token)
        self.events.append(event)
        return list(self.written)

    def finish(self) -> StreamLog:
        if self.state == FINISHED:
            raise IllegalTransitionError(f"session {self.session_id} is already finished")
        remaining = len(self.source) - self.reads_done
        if remaining:
            raise IllegalTransitionError(f"{remaining} source tokens unread")
        self.state = FINISHED
        return self.to_log()

    def to_log(self) -> StreamLog:
        return StreamLog(self.session_id, STREAMING, self.events)

    def visible_state(self) -> dict[str, Any]:
        """Everything the annotator may see; unread source tokens stay hidden."""
        return {
            "session_id": self.session_id,
            "state": self.state,
            "source_len": len(self.source),
            "reads_done": self.reads_done,
            "exposed": list(self.source[: self.reads_done]),
            "target_stream": list(self.written),
            "finishable": self.finishable,
            "seq": self.seq,
            "actions": _encode_actions(self.events),
        }


def _encode_actions(events: Sequence[Action]) -> list[list[str]]:
    return [["R", e.token] if isinstance(e, Read) else ["W", e.token] for e in events]


@dataclass(frozen=True)
class RatingRecord:
    item_id: str
    rater_id: str
    score: int

    def __post_init__(self):
        if not isinstance(self.score, int) or isinstance(self.score, bool):
            raise ValueError(f"score must be an integer, got {self.score!r}")
        if not 1 <= self.score <= 5:
            raise ValueError(f"score must be within [1, 5], got {self.score}")


def ap_rate(records: Iterable[RatingRecord], threshold: int = 3) -> float:
    """Fraction of items whose mean rating reaches the threshold."""
    by_item: dict[str, list[int]] = {}
    for record in records:
        by_item.setdefault(record.item_id, []).append(record.score)
    if not by_item:
        raise ValueError("no ratings recorded; acceptability rate is undefined")
    acceptable = sum(
        1 for scores in by_item.values() if sum(scores) / len(scores) >= threshold
    )
    return acceptable / len(by_item)


def per_rater_ap(records: Iterable[RatingRecord], threshold: int = 3) -> dict[str, float]:
    """Acceptability rate as each rater alone would have judged it."""
    by_rater: dict[str, list[int]] = {}
    for record in records:
        by_rater.setdefault(record.rater_id, []).append(record.score)
    return {
        rater: sum(1 for s in scores if s >= threshold) / len(scores)
        for rater, scores in sorted(by_rater.items())
    }


def export_annotations(sessions: Sequence[AnnotationSession]) -> tuple[list[str], list[StreamLog]]:
    """Reference lines and stream logs for a set of finished sessions.

    Sessions must all be finished; offenders are listed by id. Output order
    follows the given (creation) order and is deterministic.
    """
    unfinished = [s.session_id for s in sessions if s.state != FINISHED]
    if unfinished:
        raise IllegalTransitionError(f"unfinished sessions: {', '.join(unfinished)}")
    references = [" ".join(s.written) for s in sessions]
    logs = [s.to_log() for s in sessions]
    return references, logs


class SessionStore:
    """Sessions plus ratings behind locks and an on-disk event journal.

    journal_dir may be None for a purely in-memory store (tests). Each
    session's actions serialize on a per-session lock; every mutation appends
    one JSON line to that session's journal before returning.
    """

    def __init__(self, journal_dir: str | Path | None = None):
        self.journal_dir = Path(journal_dir) if journal_dir is not None else None
        if self.journal_dir is not None:
            self.journal_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, AnnotationSession] = {}
        self._order: list[str] = []
        self._ratings: list[RatingRecord] = []
        self._store_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}

    # -- journal plumbing ---------------------------------------------------

    def _append_event(self, session_id: str, event: dict[str, Any]) -> None:
        if self.journal_dir is None:
            return
        path = self.journal_dir / f"{session_id}.jsonl"
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, separators=(",", ":")) + "\n")

    def _append_index(self, session_id: str) -> None:
        if self.journal_dir is None:
            return
        with open(self.journal_dir / "index.jsonl", "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"session_id": session_id}) + "\n")

    def _append_rating(self, record: RatingRecord) -> None:
        if self.journal_dir is None:
            return
        line = json.dumps(
            {"item_id": record.item_id, "rater_id": record.rater_id, "score": record.score},
            ensure_ascii=False,
            separators=(",", ":"),
        )
        with open(self.journal_dir / "ratings.jsonl", "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    # -- session lifecycle --------------------------------------------------

    def create_session(self, source: Tokens, session_id: str | None = None) -> AnnotationSession:
        if session_id is None:
            session_id = uuid.uuid4().hex
        session = AnnotationSession(session_id, source)
        with self._store_lock:
            if session.session_id in self._sessions:
                raise ValueError(f"session id {session.session_id} already exists")
            self._sessions[session.session_id] = session
            self._order.append(session.session_id)
            self._session_locks[session.session_id] = threading.Lock()
        self._append_index(session.session_id)
        self._append_event(
            session.session_id,
            {"event": "create", "session_id": session.session_id, "source": list(session.source)},
        )
        return session

    def get(self, session_id: str) -> AnnotationSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSessionError(f"unknown session {session_id!r}") from None

    def _locked(self, session_id: str) -> tuple[AnnotationSession, threading.Lock]:
        session = self.get(session_id)
        return session, self._session_locks[session_id]

    @staticmethod
    def _check_seq(session: AnnotationSession, expected_seq: int | None) -> None:
        if expected_seq is not None and expected_seq != session.seq:
            raise IllegalTransitionError(
                f"stale state: expected seq {expected_seq}, session is at {session.seq}"
            )

    def act_read(self, session_id: str, expected_seq: int | None = None) -> str:
        session, lock = self._locked(session_id)
        with lock:
            self._check_seq(session, expected_seq)
            token = session.act_read()
            self._append_event(session_id, {"event": "read"})
        return token

    def act_write(self, session_id: str, token: str, expected_seq: int | None = None) -> list[str]:
        session, lock = self._locked(session_id)
        with lock:
            self._check_seq(session, expected_seq)
            stream = session.act_write(token)
            self._append_event(session_id, {"event": "write", "token": token})
        return stream

    def finish_session(self, session_id: str, expected_seq: int | None = None) -> StreamLog:
        session, lock = self._locked(session_id)
        with lock:
            self._check_seq(session, expected_seq)
            log = session.finish()
            self._append_event(session_id, {"event": "finish"})
        return log

    # -- ratings ------------------------------------------------------------

    def submit_rating(self, item_id: str, rater_id: str, score: int) -> RatingRecord:
        record = RatingRecord(item_id, rater_id, score)
        with self._store_lock:
            self._ratings.append(record)
        self._append_rating(record)
        return record

    def ratings(self) -> list[RatingRecord]:
        with self._store_lock:
            return list(self._ratings)

    # -- export -------------------------------------------------------------

    def sessions_in_order(self) -> list[AnnotationSession]:
        with self._store_lock:
            return [self._sessions[sid] for sid in self._order]

    def export(self) -> tuple[list[str], list[StreamLog]]:
        return export_annotations(self.sessions_in_order())

    # -- recovery -----------------------------------------------------------

    @classmethod
    def load(cls, journal_dir: str | Path) -> "SessionStore":
        """Rebuild a store by replaying the journals found in journal_dir."""
        journal_dir = Path(journal_dir)
        store = cls.__new__(cls)
        store.journal_dir = journal_dir
        journal_dir.mkdir(parents=True, exist_ok=True)
        store._sessions = {}
        store._order = []
        store._ratings = []
        store._store_lock = threading.Lock()
        store._session_locks = {}

        index_path = journal_dir / "index.jsonl"
        if index_path.exists():
            with open(index_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    entry = _load_json(line, index_path, lineno)
                    session_id = entry["session_id"]
                    store._sessions[session_id] = _replay_session(journal_dir, session_id)
                    store._order.append(session_id)
                    store._session_locks[session_id] = threading.Lock()

        ratings_path = journal_dir / "ratings.jsonl"
        if ratings_path.exists():
            with open(ratings_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    entry = _load_json(line, ratings_path, lineno)
                    store._ratings.append(
                        RatingRecord(entry["item_id"], entry["rater_id"], int(entry["score"]))
                    )
        return store


def _load_json(line: str, path: Path, lineno: int) -> dict[str, Any]:
    try:
        value = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid journal entry: {exc.msg}", source=str(path), line=lineno) from exc
    if not isinstance(value, dict):
        raise FormatError("journal entry must be a JSON object", source=str(path), line=lineno)
    return value


def _replay_session(journal_dir: Path, session_id: str) -> AnnotationSession:
    path = journal_dir / f"{session_id}.jsonl"
    session: AnnotationSession | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            event = _load_json(line, path, lineno)
            kind = event.get("event")
            if kind == "create":
                if session is not None:
                    raise FormatError("duplicate create event", source=str(path), line=lineno)
                session = AnnotationSession(event["session_id"], event["source"])
            elif session is None:
                raise FormatError(f"{kind!r} event before create", source=str(path), line=lineno)
            elif kind == "read":
                session.act_read()
            elif kind == "write":
                session.act_write(event["token"])
            elif kind == "finish":
                session.finish()
            else:
                raise FormatError(f"unknown event {kind!r}", source=str(path), line=lineno)
    if session is None:
        raise FormatError("journal has no create event", source=str(path))
    return session
