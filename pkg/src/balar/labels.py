"""Qualitative label vocabulary and its weight map.

Elicited judgments arrive as labels ("likely", "neutral", "unlikely").
Every numeric prior, likelihood row, and soft observation is obtained by
normalizing the labels' weights: out_i = w(l_i) / sum_k w(l_k).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, ElicitationProtocolError

LIKELY = "likely"
NEUTRAL = "neutral"
UNLIKELY = "unlikely"

DEFAULT_WEIGHTS: dict[str, float] = {LIKELY: 0.8, NEUTRAL: 0.5, UNLIKELY: 0.2}


@dataclass(frozen=True)
class LabelMap:
    """Maps label names to positive weights in (0, 1].

    The map itself is not a distribution; vectors of labels are normalized
    per use, so scaling all weights by a common factor changes nothing.
    """

    entries: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        if len(self.entries) < 2:
            raise ConfigError("label map needs at least two distinct labels")
        for name, weight in self.entries.items():
            if not (0.0 < weight <= 1.0):
                raise ConfigError(f"label weight for {name!r} must be in (0, 1], got {weight}")

    @property
    def vocabulary(self) -> tuple[str, ...]:
        return tuple(self.entries)

    def weight(self, label: str) -> float:
        try:
            return self.entries[label]
        except KeyError:
            allowed = ", ".join(self.vocabulary)
            raise ElicitationProtocolError(
                f"unknown label {label!r}; allowed labels: {allowed}"
            ) from None


def labels_to_distribution(labels: Sequence[str], label_map: LabelMap) -> np.ndarray:
    """Normalize a label vector into a probability vector.

    out_i = w(l_i) / sum_k w(l_k); raises on empty input or unknown labels.
    """
    if len(labels) == 0:
        raise ElicitationProtocolError("cannot normalize an empty label vector")
    weights = np.array([label_map.weight(l) for l in labels], dtype=np.float64)
    return weights / weights.sum()
