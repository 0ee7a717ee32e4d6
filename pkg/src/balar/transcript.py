"""Append-only session event log.

One event per line when persisted (JSON lines), every line carrying the
schema version. Events use a logical sequence number rather than wall-clock
time so that identical runs serialize byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .selection import PairId

SCHEMA_VERSION = 1

EVENT_KINDS = ("init", "ask", "update", "expand", "converge", "final-answer", "error")


@dataclass(frozen=True)
class HistoryEntry:
    """One completed ask round: who was asked what, and how the belief moved."""

    t: int
    pair: PairId
    question_text: str
    answer_text: str
    omega: tuple[float, ...]  # soft observation over the question's choices
    pre_entropy: float
    post_entropy: float

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "question_id": self.pair.question_id,
            "user_id": self.pair.user_id,
            "question_text": self.question_text,
            "answer_text": self.answer_text,
            "omega": list(self.omega),
            "pre_entropy": self.pre_entropy,
            "post_entropy": self.post_entropy,
        }


@dataclass(frozen=True)
class Event:
    seq: int
    kind: str
    t: int
    payload: dict

    def to_record(self) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "seq": self.seq,
            "kind": self.kind,
            "t": self.t,
            "payload": self.payload,
        }


@dataclass
class Transcript:
    events: list[Event] = field(default_factory=list)

    def append(self, kind: str, t: int, payload: dict) -> Event:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        event = Event(seq=len(self.events), kind=kind, t=t, payload=_plain(payload))
        self.events.append(event)
        return event

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e.to_record(), sort_keys=True, separators=(",", ":")) + "\n"
            for e in self.events
        )

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        events = []
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            events.append(Event(rec["seq"], rec["kind"], rec["t"], rec["payload"]))
        return cls(events)

    @classmethod
    def read(cls, path: str | Path) -> "Transcript":
        return cls.from_jsonl(Path(path).read_text())


def _plain(value):
    """Recursively convert numpy scalars/arrays so payloads serialize cleanly."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def cumulative_info_gain(transcript: Transcript) -> list[float]:
    """Partial sums of -(post - pre) entropy over the ASK updates, by question count."""
    gains: list[float] = []
    total = 0.0
    for event in transcript.of_kind("update"):
        total += -(event.payload["post_entropy"] - event.payload["pre_entropy"])
        gains.append(total)
    return gains


def ask_expand_counts(transcript: Transcript) -> tuple[int, int]:
    return len(transcript.of_kind("update")), len(transcript.of_kind("expand"))


def merge_series(series: Iterable[list[float]]) -> list[list[float]]:
    """Column-align ragged gain series for aggregation (shorter runs padded with last value)."""
    series = [list(s) for s in series]
    if not series:
        return []
    width = max(len(s) for s in series)
    out = []
    for s in series:
        padded = s + [s[-1]] * (width - len(s)) if s else [0.0] * width
        out.append(padded)
    return out
