"""HTTP elicitor against an OpenAI-compatible chat-completions endpoint.

Each contract call renders its prompt templates, posts one chat completion,
and validates the response against the call's schema, retrying with
corrective feedback appended to the user message. Responses never carry
probabilities; only labels and text leave this module.
"""

from __future__ import annotations

import os
from typing import Sequence

import httpx

from ..errors import ConfigError, ElicitationFailure
from ..state import Dimension, Question
from ..transcript import HistoryEntry
from .contract import ProposedDimension, ProposedQuestion
from .prompts import (
    PromptTemplates,
    format_answers,
    format_choices,
    format_dimensions,
    format_history,
    format_values,
)
from .schemas import (
    DimensionsSchema,
    FinalAnswerSchema,
    LabelSchema,
    LikelihoodGridSchema,
    QuestionsSchema,
    ScoresSchema,
    Verifier,
    validate_and_retry,
)

ENV_API_BASE = "BALAR_API_BASE"
ENV_API_KEY = "BALAR_API_KEY"
ENV_MODEL = "BALAR_MODEL"

DEFAULT_TEMPERATURE = 0.1
DEFAULT_TOP_P = 1.0


class ChatElicitor:
    """Thread-safe; bounded concurrency is enforced by the dispatch layer."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        *,
        temperature: float = DEFAULT_TEMPERATURE,
        top_p: float = DEFAULT_TOP_P,
        max_retries: int = 3,
        max_concurrent: int = 8,
        timeout: float = 60.0,
        templates_dir: str | None = None,
        allowed_labels: Sequence[str] = ("likely", "neutral", "unlikely"),
        max_values_per_dim: int = 4,
        max_choices_per_question: int = 4,
        verifier: Verifier | None = None,
        client: httpx.Client | None = None,
    ):
        if not base_url:
            raise ConfigError("chat elicitor needs a base URL")
        if not model:
            raise ConfigError("chat elicitor needs a model name")
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.temperature = temperature
        self.top_p = top_p
        self.max_retries = max_retries
        self.max_concurrent = max_concurrent
        self.allowed_labels = tuple(allowed_labels)
        self.max_values_per_dim = max_values_per_dim
        self.max_choices_per_question = max_choices_per_question
        self.verifier = verifier  # optional second-layer check, off by default
        self.templates = PromptTemplates(templates_dir)
        self._client = client or httpx.Client(timeout=timeout)

    @classmethod
    def from_env(cls, **overrides) -> "ChatElicitor":
        base_url = overrides.pop("base_url", None) or os.environ.get(ENV_API_BASE)
        model = overrides.pop("model", None) or os.environ.get(ENV_MODEL)
        api_key = overrides.pop("api_key", None) or os.environ.get(ENV_API_KEY)
        if not base_url:
            raise ConfigError(f"set {ENV_API_BASE} or pass base_url")
        if not model:
            raise ConfigError(f"set {ENV_MODEL} or pass model")
        return cls(base_url, model, api_key, **overrides)

    # -- transport ------------------------------------------------------

    def _complete(self, call_kind: str, system: str, user: str) -> str:
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.temperature,
            "top_p": self.top_p,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = self._client.post(
                f"{self.base_url}/chat/completions", json=body, headers=headers
            )
            response.raise_for_status()
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise ElicitationFailure(call_kind, f"transport error: {exc}") from exc

    def _call(self, call_kind: str, schema, variables: dict):
        system, user = self.templates.render(
            call_kind, allowed_labels=", ".join(self.allowed_labels), **variables
        )

        def attempt(feedback: str | None) -> str:
            message = user if feedback is None else f"{user}\n\n{feedback}"
            return self._complete(call_kind, system, message)

        return validate_and_retry(attempt, schema, self.max_retries, call_kind, self.verifier)

    # -- contract -------------------------------------------------------

    def propose_dimensions(self, prompt: str, context: str, count: int) -> list[ProposedDimension]:
        schema = DimensionsSchema(count=count, max_values=self.max_values_per_dim)
        return self._call(
            "propose_dimensions",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "count": str(count),
                "max_values": str(self.max_values_per_dim),
            },
        )

    def elicit_prior_label(
        self,
        prompt: str,
        context: str,
        dim: Dimension,
        value_id: str,
        history: Sequence[HistoryEntry] = (),
    ) -> str:
        schema = LabelSchema(self.allowed_labels)
        value_text = dim.value_texts[dim.value_index(value_id)]
        return self._call(
            "elicit_prior_label",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "history_log": format_history(history),
                "dimension_name": dim.name,
                "value_text": value_text,
            },
        )

    def generate_questions(
        self, prompt: str, context: str, dims: Sequence[Dimension], count: int
    ) -> list[ProposedQuestion]:
        schema = QuestionsSchema(
            min_count=count, max_count=count, max_choices=self.max_choices_per_question
        )
        return self._call(
            "generate_questions",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "dimensions_block": format_dimensions(dims),
                "count": str(count),
                "max_choices": str(self.max_choices_per_question),
            },
        )

    def fill_likelihood_labels(
        self,
        prompt: str,
        context: str,
        question: Question,
        user_id: str,
        dim: Dimension,
        history: Sequence[HistoryEntry] = (),
    ) -> list[list[str]]:
        schema = LikelihoodGridSchema(
            value_ids=dim.value_ids,
            column_ids=question.choice_ids,
            allowed_labels=self.allowed_labels,
            column_id_field="question_choice_id",
        )
        return self._call(
            "fill_likelihood_labels",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "user_id": user_id,
                "history_log": format_history(history),
                "dimension_name": dim.name,
                "values_block": format_values(dim),
                "question_text": question.text,
                "choices_block": format_choices(question),
                "n_values": str(dim.size),
                "n_choices": str(question.n_choices),
            },
        )

    def soft_map_labels(self, answer_text: str, question: Question) -> list[str]:
        schema = ScoresSchema(choice_ids=question.choice_ids, allowed_labels=self.allowed_labels)
        return self._call(
            "soft_map_labels",
            schema,
            {
                "question_text": question.text,
                "choices_block": format_choices(question),
                "answer_text": answer_text,
            },
        )

    def propose_new_dimension(
        self, prompt: str, context: str, history: Sequence[HistoryEntry]
    ) -> ProposedDimension:
        schema = DimensionsSchema(count=1, max_values=self.max_values_per_dim)
        dims = self._call(
            "propose_new_dimension",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "history_log": format_history(history),
                "dimensions_block": "(listed in the conversation log)",
                "max_values": str(self.max_values_per_dim),
            },
        )
        return dims[0]

    def generate_expanded_questions(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        new_dim: Dimension,
        top_dims: Sequence[Dimension],
        count: int,
    ) -> list[ProposedQuestion]:
        schema = QuestionsSchema(
            min_count=1, max_count=count, max_choices=self.max_choices_per_question
        )
        return self._call(
            "generate_expanded_questions",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "history_log": format_history(history),
                "new_dim_block": format_dimensions([new_dim]),
                "top_dims_block": format_dimensions(top_dims) or "(none)",
                "count": str(count),
                "max_choices": str(self.max_choices_per_question),
            },
        )

    def fill_answer_likelihood_labels(
        self, prompt: str, context: str, dim: Dimension, answers: Sequence[str]
    ) -> list[list[str]]:
        answer_ids = tuple(f"a{i + 1}" for i in range(len(answers)))
        schema = LikelihoodGridSchema(
            value_ids=dim.value_ids,
            column_ids=answer_ids,
            allowed_labels=self.allowed_labels,
            column_id_field="answer_id",
        )
        return self._call(
            "fill_answer_likelihood_labels",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "dimension_name": dim.name,
                "values_block": format_values(dim),
                "answers_block": format_answers(answer_ids, answers),
                "n_values": str(dim.size),
                "n_answers": str(len(answers)),
            },
        )

    def final_answer(
        self,
        prompt: str,
        context: str,
        history: Sequence[HistoryEntry],
        map_summary: str,
        answer_set: Sequence[str] | None = None,
    ) -> str:
        schema = FinalAnswerSchema()
        if answer_set:
            answers_block = "\n".join(f"- {a}" for a in answer_set)
        else:
            answers_block = "(free-form answer)"
        return self._call(
            "final_answer",
            schema,
            {
                "prompt": prompt,
                "context": context or "(none)",
                "history_log": format_history(history),
                "map_summary": map_summary,
                "answers_block": answers_block,
            },
        )
