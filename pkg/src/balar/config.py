"""Loop configuration and its file form.

Config files are JSON objects whose keys match the field names below;
"lambda" in a file maps to the `lambda_` attribute (reserved word).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError


@dataclass(frozen=True)
class LoopConfig:
    alpha: float = 0.1
    beta: float = 1.0
    T: int = 100
    T_ask: int = 25
    lambda_: float = 1.0
    state_cap: int = 4096
    max_values_per_dim: int = 4
    max_choices_per_question: int = 4
    max_new_questions_per_expand: int = 4
    top_entropy_dims_for_expand: int = 2

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ConfigError(f"alpha must be in [0, 1), got {self.alpha}")
        if not (0.0 < self.beta <= 1.0):
            raise ConfigError(f"beta must be in (0, 1], got {self.beta}")
        if self.lambda_ <= 0.0:
            raise ConfigError(f"lambda must be positive, got {self.lambda_}")
        if self.T_ask > self.T:
            raise ConfigError(f"T_ask ({self.T_ask}) cannot exceed T ({self.T})")
        if self.T < 0 or self.T_ask < 0:
            raise ConfigError("round budgets must be non-negative")
        for name in (
            "state_cap",
            "max_values_per_dim",
            "max_choices_per_question",
            "max_new_questions_per_expand",
            "top_entropy_dims_for_expand",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "LoopConfig":
        data = dict(data)
        if "lambda" in data:
            data["lambda_"] = data.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["lambda"] = data.pop("lambda_")
        return data


def load_config(path: str | Path) -> LoopConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return LoopConfig.from_dict(data)


@dataclass(frozen=True)
class Instance:
    """One interaction task: the ambiguous prompt plus who can be asked.

    `num_dims` / `num_questions` size the initial state representation;
    `answer_set` switches on answer-probability convergence when present.
    """

    prompt: str
    context: str = ""
    users: tuple[str, ...] = ("user",)
    answer_set: tuple[str, ...] | None = None
    num_dims: int = 1
    num_questions: int = 2

    def __post_init__(self):
        if not self.prompt.strip():
            raise ConfigError("instance prompt must be non-empty")
        users = tuple(self.users)
        object.__setattr__(self, "users", users)
        if not users:
            raise ConfigError("instance needs at least one user")
        if len(set(users)) != len(users):
            raise ConfigError("duplicate user ids")
        if self.answer_set is not None:
            answers = tuple(self.answer_set)
            object.__setattr__(self, "answer_set", answers)
            if len(answers) < 2:
                raise ConfigError("answer set needs at least 2 entries")
        if self.num_dims < 1 or self.num_questions < 1:
            raise ConfigError("num_dims and num_questions must be at least 1")

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        allowed = {"prompt", "context", "users", "answer_set", "num_dims", "num_questions"}
        unknown = set(data) - allowed
        if unknown:
            raise ConfigError(f"unknown instance keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "users" in kwargs:
            kwargs["users"] = tuple(kwargs["users"])
        if kwargs.get("answer_set") is not None:
            kwargs["answer_set"] = tuple(kwargs["answer_set"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "context": self.context,
            "users": list(self.users),
            "answer_set": list(self.answer_set) if self.answer_set else None,
            "num_dims": self.num_dims,
            "num_questions": self.num_questions,
        }
