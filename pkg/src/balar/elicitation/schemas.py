"""Structured-output schemas for chat responses, with validating retries.

Every chat call must return strict JSON (one object, no surrounding prose)
matching its schema. Each schema's `validate` returns the payload in the
contract's shape; failures raise with a corrective message that is fed back
to the model on retry. The `reason` fields are required and logged upstream
but never parsed into logic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

from ..errors import ElicitationFailure, ElicitationProtocolError
from .contract import ProposedDimension, ProposedQuestion


class SchemaValidationError(ElicitationProtocolError):
    """Response parsed as JSON but violated the call's schema."""


def _require(obj: dict, key: str, kind: type, where: str):
    if key not in obj:
        raise SchemaValidationError(f"missing required field {key!r} in {where}")
    value = obj[key]
    if not isinstance(value, kind):
        raise SchemaValidationError(
            f"field {key!r} in {where} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _check_label(label: str, allowed: Sequence[str], where: str) -> str:
    if label not in allowed:
        raise SchemaValidationError(
            f"label {label!r} in {where} is not allowed; use one of: {', '.join(allowed)}"
        )
    return label


@dataclass(frozen=True)
class LabelSchema:
    """{"reason": str, "label": str} with the label from the allowed vocabulary."""

    allowed_labels: tuple[str, ...]

    def validate(self, obj: dict) -> str:
        _require(obj, "reason", str, "response")
        label = _require(obj, "label", str, "response")
        return _check_label(label, self.allowed_labels, "response")


@dataclass(frozen=True)
class DimensionsSchema:
    """{"dimensions": [{"reason", "name", "values": [...]}, ...]}"""

    count: int
    max_values: int

    def validate(self, obj: dict) -> list[ProposedDimension]:
        dims = _require(obj, "dimensions", list, "response")
        if len(dims) != self.count:
            raise SchemaValidationError(
                f"expected exactly {self.count} dimensions, got {len(dims)}"
            )
        out = []
        for i, d in enumerate(dims):
            if not isinstance(d, dict):
                raise SchemaValidationError(f"dimensions[{i}] must be an object")
            _require(d, "reason", str, f"dimensions[{i}]")
            name = _require(d, "name", str, f"dimensions[{i}]")
            values = _require(d, "values", list, f"dimensions[{i}]")
            if not (2 <= len(values) <= self.max_values):
                raise SchemaValidationError(
                    f"dimensions[{i}] needs between 2 and {self.max_values} values, "
                    f"got {len(values)}"
                )
            if not all(isinstance(v, str) and v.strip() for v in values):
                raise SchemaValidationError(f"dimensions[{i}] values must be non-empty strings")
            out.append(ProposedDimension(name, tuple(values)))
        return out


@dataclass(frozen=True)
class QuestionsSchema:
    """{"questions": [{"reason", "question", "choices": [...]}, ...]}"""

    min_count: int
    max_count: int
    max_choices: int

    def validate(self, obj: dict) -> list[ProposedQuestion]:
        questions = _require(obj, "questions", list, "response")
        if not (self.min_count <= len(questions) <= self.max_count):
            raise SchemaValidationError(
                f"expected between {self.min_count} and {self.max_count} questions, "
                f"got {len(questions)}"
            )
        out = []
        for i, q in enumerate(questions):
            if not isinstance(q, dict):
                raise SchemaValidationError(f"questions[{i}] must be an object")
            _require(q, "reason", str, f"questions[{i}]")
            text = _require(q, "question", str, f"questions[{i}]")
            choices = _require(q, "choices", list, f"questions[{i}]")
            if not (2 <= len(choices) <= self.max_choices):
                raise SchemaValidationError(
                    f"questions[{i}] needs between 2 and {self.max_choices} choices, "
                    f"got {len(choices)}"
                )
            if not all(isinstance(c, str) and c.strip() for c in choices):
                raise SchemaValidationError(f"questions[{i}] choices must be non-empty strings")
            out.append(ProposedQuestion(text, tuple(choices)))
        return out


@dataclass(frozen=True)
class LikelihoodGridSchema:
    """{"evaluations": [[{"<col_id_field>", "dimension_value_id", "reason", "label"}]]}

    Cells may arrive in any order; the grid is reassembled by ids and must
    cover every (value, column) combination exactly once.
    """

    value_ids: tuple[str, ...]
    column_ids: tuple[str, ...]
    allowed_labels: tuple[str, ...]
    column_id_field: str = "question_choice_id"

    def validate(self, obj: dict) -> list[list[str]]:
        rows = _require(obj, "evaluations", list, "response")
        cells: dict[tuple[str, str], str] = {}
        flat = [cell for row in rows for cell in (row if isinstance(row, list) else [row])]
        for i, cell in enumerate(flat):
            if not isinstance(cell, dict):
                raise SchemaValidationError(f"evaluation cell {i} must be an object")
            vid = _require(cell, "dimension_value_id", str, f"cell {i}")
            cid = _require(cell, self.column_id_field, str, f"cell {i}")
            _require(cell, "reason", str, f"cell {i}")
            label = _require(cell, "label", str, f"cell {i}")
            _check_label(label, self.allowed_labels, f"cell ({vid},{cid})")
            if vid not in self.value_ids:
                raise SchemaValidationError(f"unknown dimension_value_id {vid!r} in cell {i}")
            if cid not in self.column_ids:
                raise SchemaValidationError(f"unknown {self.column_id_field} {cid!r} in cell {i}")
            if (vid, cid) in cells:
                raise SchemaValidationError(f"duplicate cell for ({vid},{cid})")
            cells[(vid, cid)] = label
        missing = [
            (v, c) for v in self.value_ids for c in self.column_ids if (v, c) not in cells
        ]
        if missing:
            raise SchemaValidationError(
                f"grid incomplete: missing cells {missing[:4]}"
                + ("..." if len(missing) > 4 else "")
                + f"; provide exactly {len(self.value_ids)} x {len(self.column_ids)} entries"
            )
        return [[cells[(v, c)] for c in self.column_ids] for v in self.value_ids]


@dataclass(frozen=True)
class ScoresSchema:
    """{"scores": [{"choice_id", "reason", "label"}, ...]} covering every choice once."""

    choice_ids: tuple[str, ...]
    allowed_labels: tuple[str, ...]

    def validate(self, obj: dict) -> list[str]:
        scores = _require(obj, "scores", list, "response")
        by_choice: dict[str, str] = {}
        for i, s in enumerate(scores):
            if not isinstance(s, dict):
                raise SchemaValidationError(f"scores[{i}] must be an object")
            cid = _require(s, "choice_id", str, f"scores[{i}]")
            _require(s, "reason", str, f"scores[{i}]")
            label = _require(s, "label", str, f"scores[{i}]")
            _check_label(label, self.allowed_labels, f"scores[{i}]")
            if cid not in self.choice_ids:
                raise SchemaValidationError(f"unknown choice_id {cid!r} in scores[{i}]")
            if cid in by_choice:
                raise SchemaValidationError(f"duplicate score for choice {cid!r}")
            by_choice[cid] = label
        missing = [c for c in self.choice_ids if c not in by_choice]
        if missing:
            raise SchemaValidationError(f"missing scores for choices: {missing}")
        return [by_choice[c] for c in self.choice_ids]


@dataclass(frozen=True)
class FinalAnswerSchema:
    """{"reason": str, "final_answer": str}"""

    def validate(self, obj: dict) -> str:
        _require(obj, "reason", str, "response")
        answer = _require(obj, "final_answer", str, "response")
        if not answer.strip():
            raise SchemaValidationError("final_answer must be non-empty")
        return answer


@dataclass(frozen=True)
class FreeTextSchema:
    """{"reason": str, "answer": str} for the simulated user."""

    def validate(self, obj: dict) -> str:
        _require(obj, "reason", str, "response")
        return _require(obj, "answer", str, "response")


def parse_strict_json(raw: str) -> dict:
    """Exactly one JSON object, no surrounding prose."""
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaValidationError(f"response is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaValidationError("response must be a single JSON object")
    return obj


Verifier = Callable[[str, object], str | None]
"""Optional second-layer check: (call_kind, parsed payload) -> corrective
feedback, or None to accept. Runs after schema validation; rejections are
retried like schema failures."""


def validate_and_retry(
    attempt: Callable[[str | None], str],
    schema,
    max_retries: int,
    call_kind: str,
    verifier: Verifier | None = None,
):
    """Call `attempt`, validating each response; feed corrections back on retry.

    `attempt(feedback)` performs one request, with `feedback` appended to
    the prompt on retries. After `max_retries` additional attempts the call
    fails, carrying the last raw response.
    """
    feedback: str | None = None
    raw = ""
    last_error = "no attempts made"
    for _ in range(max_retries + 1):
        raw = attempt(feedback)
        try:
            payload = schema.validate(parse_strict_json(raw))
            if verifier is not None:
                rejection = verifier(call_kind, payload)
                if rejection is not None:
                    raise SchemaValidationError(f"verifier rejected the response: {rejection}")
            return payload
        except SchemaValidationError as exc:
            last_error = str(exc)
            feedback = (
                "Your previous response was rejected: "
                f"{last_error} Respond again with STRICT JSON only, exactly "
                "matching the requested schema."
            )
    raise ElicitationFailure(call_kind, f"schema validation failed: {last_error}", raw)
