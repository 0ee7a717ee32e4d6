"""Prompt template loading and rendering for the chat elicitor.

Templates are plain text files with ``$name`` placeholders (system + user
per call kind). Their wording is configuration: point `templates_dir` at a
task-specific set to change the voice without touching code.
"""

from __future__ import annotations

from pathlib import Path
from string import Template
from typing import Sequence

from ..errors import ConfigError
from ..state import Dimension, Question
from ..transcript import HistoryEntry

DEFAULT_TEMPLATES_DIR = Path(__file__).parent / "templates"


class PromptTemplates:
    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory else DEFAULT_TEMPLATES_DIR
        if not self.directory.is_dir():
            raise ConfigError(f"template directory {self.directory} does not exist")
        self._cache: dict[str, Template] = {}

    def _template(self, name: str) -> Template:
        if name not in self._cache:
            path = self.directory / f"{name}.txt"
            if not path.exists():
                raise ConfigError(f"missing prompt template {path}")
            self._cache[name] = Template(path.read_text())
        return self._cache[name]

    def render(self, call_kind: str, **variables: str) -> tuple[str, str]:
        """Return (system, user) message bodies for one call."""
        try:
            system = self._template(f"{call_kind}.system").substitute(**variables)
            user = self._template(f"{call_kind}.user").substitute(**variables)
        except KeyError as exc:
            raise ConfigError(f"template for {call_kind!r} missing variable {exc}") from exc
        return system.strip(), user.strip()


def format_history(history: Sequence[HistoryEntry]) -> str:
    if not history:
        return "(no conversation yet)"
    lines = []
    for entry in history:
        lines.append(
            f"[round {entry.t}] asked {entry.pair.user_id}: {entry.question_text}\n"
            f"  answer: {entry.answer_text}"
        )
    return "\n".join(lines)


def format_values(dim: Dimension) -> str:
    return "\n".join(f'- id: {vid}, text: "{text}"' for vid, text in dim.values)


def format_choices(question: Question) -> str:
    return "\n".join(f'- id: {cid}, text: "{text}"' for cid, text in question.choices)


def format_dimensions(dims: Sequence[Dimension]) -> str:
    return "\n".join(
        f"- {d.name}: " + ", ".join(text for _, text in d.values) for d in dims
    )


def format_answers(answer_ids: Sequence[str], answers: Sequence[str]) -> str:
    return "\n".join(
        f'- id: {aid}, text: "{text}"' for aid, text in zip(answer_ids, answers)
    )
