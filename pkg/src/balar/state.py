"""Dimensions, questions, and the joint state space with flat addressing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Dimension:
    """One axis of ambiguity: a named, finite set of mutually exclusive values."""

    id: str
    name: str
    values: tuple[tuple[str, str], ...]  # (value_id, value_text) pairs, ordered

    def __post_init__(self):
        if len(self.values) < 2:
            raise ConfigError(f"dimension {self.id!r} needs at least 2 values")
        ids = [vid for vid, _ in self.values]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"dimension {self.id!r} has duplicate value ids")

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def value_ids(self) -> tuple[str, ...]:
        return tuple(vid for vid, _ in self.values)

    @property
    def value_texts(self) -> tuple[str, ...]:
        return tuple(text for _, text in self.values)

    def value_index(self, value_id: str) -> int:
        for i, (vid, _) in enumerate(self.values):
            if vid == value_id:
                return i
        raise ConfigError(f"dimension {self.id!r} has no value {value_id!r}")


@dataclass(frozen=True)
class Question:
    """A clarifying question with its internal discrete answer choices.

    Choices are never shown to the answering user; they index likelihood
    tables and soft observations.
    """

    id: str
    text: str
    choices: tuple[tuple[str, str], ...]  # (choice_id, choice_text) pairs, ordered

    def __post_init__(self):
        if len(self.choices) < 2:
            raise ConfigError(f"question {self.id!r} needs at least 2 choices")
        ids = [cid for cid, _ in self.choices]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"question {self.id!r} has duplicate choice ids")

    @property
    def n_choices(self) -> int:
        return len(self.choices)

    @property
    def choice_ids(self) -> tuple[str, ...]:
        return tuple(cid for cid, _ in self.choices)

    @property
    def choice_texts(self) -> tuple[str, ...]:
        return tuple(text for _, text in self.choices)


class StateSpace:
    """Ordered product of dimensions with row-major flat addressing.

    Flat index of an assignment (i_1, ..., i_p) is sum_j i_j * stride_j with
    stride_j = prod of sizes of later dimensions, so appending a dimension is
    an outer product on flat arrays.
    """

    def __init__(self, dims: Iterable[Dimension]):
        self.dims: tuple[Dimension, ...] = tuple(dims)
        if not self.dims:
            raise ConfigError("state space needs at least one dimension")
        dim_ids = [d.id for d in self.dims]
        if len(set(dim_ids)) != len(dim_ids):
            raise ConfigError("duplicate dimension ids in state space")
        self.shape: tuple[int, ...] = tuple(d.size for d in self.dims)
        self.total_states: int = int(np.prod(self.shape))
        strides = []
        acc = 1
        for size in reversed(self.shape):
            strides.append(acc)
            acc *= size
        self.strides: tuple[int, ...] = tuple(reversed(strides))
        # per-dimension value index of every flat state, used for kernel builds
        flat = np.arange(self.total_states)
        self._index_vectors: tuple[np.ndarray, ...] = tuple(
            (flat // self.strides[j]) % self.shape[j] for j in range(len(self.dims))
        )

    @property
    def n_dims(self) -> int:
        return len(self.dims)

    @property
    def dim_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.dims)

    def dim_position(self, dim_id: str) -> int:
        for j, d in enumerate(self.dims):
            if d.id == dim_id:
                return j
        raise ConfigError(f"unknown dimension {dim_id!r}")

    def dim(self, dim_id: str) -> Dimension:
        return self.dims[self.dim_position(dim_id)]

    def value_indices(self, dim_position: int) -> np.ndarray:
        """Value index of dimension `dim_position` for every flat state."""
        return self._index_vectors[dim_position]

    def flat_index(self, assignment: Iterable[int]) -> int:
        idx = 0
        assignment = tuple(assignment)
        if len(assignment) != self.n_dims:
            raise ConfigError("assignment length does not match dimension count")
        for j, i in enumerate(assignment):
            if not (0 <= i < self.shape[j]):
                raise ConfigError(f"value index {i} out of range for dimension {j}")
            idx += i * self.strides[j]
        return idx

    def state_of(self, flat: int) -> tuple[int, ...]:
        return tuple(int(v[flat]) for v in self._index_vectors)

    def assignment_ids(self, flat: int) -> dict[str, str]:
        """Map dim id -> value id for the given flat state."""
        return {
            d.id: d.value_ids[i] for d, i in zip(self.dims, self.state_of(flat))
        }

    def extended(self, new_dim: Dimension) -> "StateSpace":
        if new_dim.id in self.dim_ids:
            raise ConfigError(f"dimension {new_dim.id!r} already present")
        return StateSpace(self.dims + (new_dim,))

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSpace) and self.dims == other.dims

    def __hash__(self):
        return hash(self.dims)

    def __repr__(self):
        inner = " x ".join(f"{d.id}({d.size})" for d in self.dims)
        return f"StateSpace({inner}; {self.total_states} states)"
