"""The pluggable elicitation contract.

Everything the engine obtains from an LLM goes through one of these calls.
Each call is atomic per (question, user, dimension) triple or finer, and
returns labels or text only; numeric conversion happens downstream through
the label map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

from ..state import Dimension, Question
from ..transcript import HistoryEntry

CALL_KINDS = (
    "propose_dimensions",
    "elicit_prior_label",
    "generate_questions",
    "fill_likelihood_labels",
    "soft_map_labels",
    "propose_new_dimension",
    "generate_expanded_questions",
    "fill_answer_likelihood_labels",
    "final_answer",
    "user_answer",
)


@dataclass(frozen=True)
class ProposedDimension:
    """A dimension as elicited: a name and value texts. Ids are assigned by the engine."""

    name: str
    values: tuple[str, ...]


@dataclass(frozen=True)
class ProposedQuestion:
    """A question as elicited: text and choice texts. Ids are assigned by the engine."""

    text: str
    choices: tuple[str, ...]


@runtime_checkable
class Elicitor(Protocol):
    """Contract for all LLM-backed calls; see ScriptedOracle and ChatElicitor."""

    def propose_dimensions(
        self, prompt: str, context: str, count: int
    ) -> list[ProposedDimension]: ...

    def elicit_prior_label(
        self,
        prompt: str,
        context: str,
        dim: Dimension,
        value_id: str,
        history: Sequence[HistoryEntry] = (),
    ) -> str: ...

    def generate_questions(
        self, prompt: str, context: str, dims: Sequence[Dimension], count: int
    ) -> list[ProposedQuestion]: ...

    def fill_likelihood_labels(
        self,
        prompt: str,
        context: str,
        question: Question,
        user_id: str,
        dim: Dimension,
        history: Sequence[HistoryEntry] = (),
    ) -> list[list[str]]: ...

    def soft_map_labels(self, answer_text: str, question: Question) -> list[str]: ...

    def propose_new_dimension(
        self, prompt: str, context: str, history: Sequence[HistoryEntry]
    ) -> ProposedDimension: ...

    def generate_expanded_questions(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        new_dim: Dimension,
        top_dims: Sequence[Dimension],
        count: int,
    ) -> list[ProposedQuestion]: ...

    def fill_answer_likelihood_labels(
        self, prompt: str, context: str, dim: Dimension, answers: Sequence[str]
    ) -> list[list[str]]: ...

    def final_answer(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        map_summary: str,
        answer_set: Sequence[str] | None = None,
    ) -> str: ...
