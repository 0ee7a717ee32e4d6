"""Deterministic scripted oracle: a fixture file stands in for every LLM call.

Fixture format (JSON, `schema_version` 1):

    {
      "schema_version": 1,
      "name": "medical",
      "unmatched_policy": "error" | "default-neutral",
      "instance": {"prompt": ..., "context": ..., "users": [...], ...},
      "config": {... LoopConfig keys, optional ...},
      "dimensions": [{"name": ..., "values": ["...", ...]}, ...],
      "prior_labels": {"<dim_id>/<value_id>": "likely", ...},
      "questions": [{"text": ..., "choices": ["...", ...]}, ...],
      "likelihood_labels": {"<q_id>/<user_id>/<dim_id>": [[label, ...], ...], ...},
      "user_answers": {"<q_id>/<user_id>": "free text", ...},
      "soft_map": {"<q_id>": {"<answer text>": [label per choice], "*": [...]}},
      "new_dimensions": [{"name": ..., "values": [...]}, ...],
      "expanded_questions": [[{"text": ..., "choices": [...]}, ...], ...],
      "answer_likelihood_labels": {"<dim_id>": [[label per answer], ...]},
      "final_answer": "..."
    }

Ids are the engine's deterministic ones: dimensions d1, d2, ... in listed
order (expansion continues the numbering), values v1..vn within a
dimension, questions q1, q2, ... and choices c1..ck. `new_dimensions` and
`expanded_questions` are consumed in order, one entry per expand round, so
an oracle instance scripts exactly one session run.

With `unmatched_policy: "default-neutral"`, missing label entries fall back
to all-neutral; structural entries (dimensions, questions, final answer)
must always be present.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Sequence

from ..errors import ConfigError, ElicitationFailure
from ..state import Dimension, Question
from ..transcript import HistoryEntry
from .contract import ProposedDimension, ProposedQuestion

FIXTURE_SCHEMA_VERSION = 1


def load_fixture(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ConfigError(f"fixture {path} must hold a JSON object")
    version = data.get("schema_version")
    if version != FIXTURE_SCHEMA_VERSION:
        raise ConfigError(
            f"fixture {path} has schema_version {version!r}, expected {FIXTURE_SCHEMA_VERSION}"
        )
    return data


class ScriptedOracle:
    """Replays canned payloads keyed by call kind and argument ids.

    Instances are single-session: sequential entries (new dimensions,
    expanded questions) are consumed in order. The call log records every
    contract call, user-answer calls included, for budget audits.
    """

    def __init__(self, fixture: dict):
        if fixture.get("schema_version", FIXTURE_SCHEMA_VERSION) != FIXTURE_SCHEMA_VERSION:
            raise ConfigError("unsupported fixture schema version")
        self.fixture = fixture
        policy = fixture.get("unmatched_policy", "error")
        if policy not in ("error", "default-neutral"):
            raise ConfigError(f"unknown unmatched policy {policy!r}")
        self.policy = policy
        self._lock = threading.Lock()
        self._next_new_dim = 0
        self._next_expansion = 0
        self.call_log: list[tuple[str, str]] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedOracle":
        return cls(load_fixture(path))

    # -- bookkeeping ----------------------------------------------------

    def _record(self, kind: str, key: str) -> None:
        with self._lock:
            self.call_log.append((kind, key))

    def call_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for kind, _ in self.call_log:
            counts[kind] = counts.get(kind, 0) + 1
        return counts

    @property
    def total_calls(self) -> int:
        return len(self.call_log)

    def _missing(self, kind: str, key: str) -> ElicitationFailure:
        return ElicitationFailure(kind, f"no fixture entry for {key}")

    # -- contract -------------------------------------------------------

    def propose_dimensions(self, prompt: str, context: str, count: int) -> list[ProposedDimension]:
        self._record("propose_dimensions", "init")
        dims = self.fixture.get("dimensions")
        if not dims:
            raise self._missing("propose_dimensions", "dimensions")
        return [ProposedDimension(d["name"], tuple(d["values"])) for d in dims]

    def elicit_prior_label(
        self,
        prompt: str,
        context: str,
        dim: Dimension,
        value_id: str,
        history: Sequence[HistoryEntry] = (),
    ) -> str:
        key = f"{dim.id}/{value_id}"
        self._record("elicit_prior_label", key)
        label = self.fixture.get("prior_labels", {}).get(key)
        if label is None:
            if self.policy == "default-neutral":
                return "neutral"
            raise self._missing("elicit_prior_label", key)
        return label

    def generate_questions(
        self, prompt: str, context: str, dims: Sequence[Dimension], count: int
    ) -> list[ProposedQuestion]:
        self._record("generate_questions", "init")
        questions = self.fixture.get("questions")
        if not questions:
            raise self._missing("generate_questions", "questions")
        return [ProposedQuestion(q["text"], tuple(q["choices"])) for q in questions]

    def fill_likelihood_labels(
        self,
        prompt: str,
        context: str,
        question: Question,
        user_id: str,
        dim: Dimension,
        history: Sequence[HistoryEntry] = (),
    ) -> list[list[str]]:
        key = f"{question.id}/{user_id}/{dim.id}"
        self._record("fill_likelihood_labels", key)
        grid = self.fixture.get("likelihood_labels", {}).get(key)
        if grid is None:
            if self.policy == "default-neutral":
                return [["neutral"] * question.n_choices for _ in range(dim.size)]
            raise self._missing("fill_likelihood_labels", key)
        return [list(row) for row in grid]

    def soft_map_labels(self, answer_text: str, question: Question) -> list[str]:
        key = f"{question.id}"
        self._record("soft_map_labels", key)
        table = self.fixture.get("soft_map", {}).get(question.id, {})
        labels = table.get(answer_text, table.get("*"))
        if labels is None:
            if self.policy == "default-neutral":
                return ["neutral"] * question.n_choices
            raise self._missing("soft_map_labels", f"{question.id}:{answer_text!r}")
        return list(labels)

    def propose_new_dimension(
        self, prompt: str, context: str, history: Sequence[HistoryEntry]
    ) -> ProposedDimension:
        self._record("propose_new_dimension", f"expand{self._next_new_dim}")
        new_dims = self.fixture.get("new_dimensions", [])
        if self._next_new_dim >= len(new_dims):
            raise self._missing("propose_new_dimension", f"new_dimensions[{self._next_new_dim}]")
        entry = new_dims[self._next_new_dim]
        self._next_new_dim += 1
        return ProposedDimension(entry["name"], tuple(entry["values"]))

    def generate_expanded_questions(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        new_dim: Dimension,
        top_dims: Sequence[Dimension],
        count: int,
    ) -> list[ProposedQuestion]:
        self._record("generate_expanded_questions", f"expand{self._next_expansion}")
        rounds = self.fixture.get("expanded_questions", [])
        if self._next_expansion >= len(rounds):
            raise self._missing(
                "generate_expanded_questions", f"expanded_questions[{self._next_expansion}]"
            )
        entries = rounds[self._next_expansion]
        self._next_expansion += 1
        return [ProposedQuestion(q["text"], tuple(q["choices"])) for q in entries]

    def fill_answer_likelihood_labels(
        self, prompt: str, context: str, dim: Dimension, answers: Sequence[str]
    ) -> list[list[str]]:
        key = dim.id
        self._record("fill_answer_likelihood_labels", key)
        grid = self.fixture.get("answer_likelihood_labels", {}).get(key)
        if grid is None:
            if self.policy == "default-neutral":
                return [["neutral"] * len(answers) for _ in range(dim.size)]
            raise self._missing("fill_answer_likelihood_labels", key)
        return [list(row) for row in grid]

    def final_answer(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        map_summary: str,
        answer_set: Sequence[str] | None = None,
    ) -> str:
        self._record("final_answer", "final")
        answer = self.fixture.get("final_answer")
        if answer is None:
            raise self._missing("final_answer", "final_answer")
        return answer

    # -- the scripted user ----------------------------------------------

    def user_answer(self, question: Question, user_id: str) -> str:
        """Scripted stand-in for the answering user; counted like any other call."""
        key = f"{question.id}/{user_id}"
        self._record("user_answer", key)
        answer = self.fixture.get("user_answers", {}).get(key)
        if answer is None:
            if self.policy == "default-neutral":
                return "(no scripted answer)"
            raise self._missing("user_answer", key)
        return answer
