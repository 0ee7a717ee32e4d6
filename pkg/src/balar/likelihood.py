"""Likelihood tables, question kernels, and Bayesian updates.

Per-dimension tables L(y | value) come from label grids. The state-level
kernel multiplies the per-dimension rows and renormalizes per state:

    K(state, y) = prod_j L_j(y | value_j) / sum_y' prod_j L_j(y' | value_j)

Updates run in log space; a soft observation over choices turns into an
effective per-state likelihood by mixing kernel columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .belief import Belief, _log, _logsumexp
from .errors import (
    ConfigError,
    DegenerateObservationError,
    ElicitationProtocolError,
    InternalConsistencyError,
    SpaceMismatchError,
)
from .labels import LabelMap, labels_to_distribution
from .state import Dimension, Question, StateSpace

_ROW_TOL = 1e-9


@dataclass(frozen=True)
class DimLikelihoodTable:
    """P(answer choice | dimension value) for one (question, user, dimension)."""

    question_id: str
    user_id: str
    dim_id: str
    rows: np.ndarray  # shape (n_values, n_choices), each row sums to 1

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        object.__setattr__(self, "rows", rows)
        if rows.ndim != 2 or rows.shape[1] < 2:
            raise ConfigError("likelihood table needs >= 2 answer choices per row")
        if np.any(rows < 0):
            raise ConfigError("likelihood entries must be non-negative")
        if not np.allclose(rows.sum(axis=1), 1.0, atol=1e-12):
            raise ConfigError("likelihood rows must sum to 1")
        rows.setflags(write=False)

    @property
    def n_choices(self) -> int:
        return self.rows.shape[1]


def build_dim_table(
    question_id: str,
    user_id: str,
    dim: Dimension,
    label_grid: Sequence[Sequence[str]],
    label_map: LabelMap,
) -> DimLikelihoodTable:
    """Normalize a |values| x |choices| label grid row by row."""
    if len(label_grid) != dim.size:
        raise ElicitationProtocolError(
            f"label grid for ({question_id},{user_id},{dim.id}) has {len(label_grid)} "
            f"rows, expected {dim.size}"
        )
    widths = {len(row) for row in label_grid}
    if len(widths) != 1:
        raise ElicitationProtocolError(
            f"ragged label grid for ({question_id},{user_id},{dim.id}): row widths {sorted(widths)}"
        )
    rows = np.stack([labels_to_distribution(row, label_map) for row in label_grid])
    return DimLikelihoodTable(question_id, user_id, dim.id, rows)


@dataclass(frozen=True)
class QuestionKernel:
    """State-level likelihood K of shape |states| x |choices| for one (question, user)."""

    question_id: str
    user_id: str
    space: StateSpace
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape[0] != self.space.total_states:
            raise ConfigError("kernel rows do not match the state space")
        if not np.allclose(matrix.sum(axis=1), 1.0, atol=_ROW_TOL):
            raise ConfigError("kernel rows must sum to 1")
        matrix.setflags(write=False)

    @property
    def n_choices(self) -> int:
        return self.matrix.shape[1]


def _combine_tables(tables: Sequence[DimLikelihoodTable], space: StateSpace) -> np.ndarray:
    """Log-space product of per-dimension rows, row-normalized per state."""
    by_dim = {t.dim_id: t for t in tables}
    if set(by_dim) != set(space.dim_ids) or len(tables) != space.n_dims:
        missing = set(space.dim_ids) - set(by_dim)
        raise InternalConsistencyError(
            f"need exactly one table per dimension; missing {sorted(missing)}"
        )
    n_choices = {t.n_choices for t in tables}
    if len(n_choices) != 1:
        raise InternalConsistencyError("tables disagree on the number of choices")
    logk = np.zeros((space.total_states, n_choices.pop()))
    for j, dim in enumerate(space.dims):
        table = by_dim[dim.id]
        if table.rows.shape[0] != dim.size:
            raise InternalConsistencyError(
                f"table for {dim.id!r} has {table.rows.shape[0]} rows, expected {dim.size}"
            )
        logk += _log(table.rows)[space.value_indices(j), :]
    # per-row normalization; a no-op for a single dimension but kept uniform
    row_max = logk.max(axis=1, keepdims=True)
    shifted = np.where(np.isfinite(row_max), logk - row_max, -np.inf)
    with np.errstate(divide="ignore"):
        logz = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    if not np.isfinite(row_max).all():
        raise InternalConsistencyError("kernel row with no positive mass")
    return np.exp(shifted - logz)


def build_question_kernel(
    tables: Sequence[DimLikelihoodTable], space: StateSpace
) -> QuestionKernel:
    """Combine one table per dimension into the dense state-level kernel."""
    qids = {t.question_id for t in tables}
    uids = {t.user_id for t in tables}
    if len(qids) != 1 or len(uids) != 1:
        raise InternalConsistencyError("tables mix question or user ids")
    matrix = _combine_tables(tables, space)
    return QuestionKernel(qids.pop(), uids.pop(), space, matrix)


@dataclass(frozen=True)
class SoftObservation:
    """Probability vector over a question's choices induced by a free-form answer."""

    question_id: str
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        if weights.ndim != 1 or np.any(weights < 0):
            raise ConfigError("soft observation must be a non-negative vector")
        if abs(weights.sum() - 1.0) > _ROW_TOL:
            raise ConfigError("soft observation must sum to 1")
        weights.setflags(write=False)


def soft_observation(
    question: Question, labels_by_choice: Sequence[str], label_map: LabelMap
) -> SoftObservation:
    """Normalize one label per choice into the soft observation vector."""
    if len(labels_by_choice) != question.n_choices:
        raise ElicitationProtocolError(
            f"question {question.id!r} has {question.n_choices} choices but got "
            f"{len(labels_by_choice)} labels"
        )
    return SoftObservation(question.id, labels_to_distribution(labels_by_choice, label_map))


def effective_likelihood(kernel: QuestionKernel, obs: SoftObservation) -> np.ndarray:
    """Per-state evidence: Lhat(state) = sum_y w_y K(state, y)."""
    if obs.weights.size != kernel.n_choices:
        raise SpaceMismatchError("soft observation and kernel disagree on choice count")
    return kernel.matrix @ obs.weights


def bayes_update(b: Belief, lhat: np.ndarray) -> Belief:
    """Posterior ∝ Lhat * prior, computed in log space.

    Rejects all-zero evidence under the current support; states with zero
    evidence get -inf log mass.
    """
    lhat = np.asarray(lhat, dtype=np.float64)
    if lhat.shape != (b.space.total_states,):
        raise SpaceMismatchError("evidence vector does not match the state space")
    if np.any(lhat < 0):
        raise ConfigError("evidence must be non-negative")
    logp = b.logp + _log(lhat)
    if _logsumexp(logp) == -np.inf:
        raise DegenerateObservationError("observation has zero mass under current belief")
    return Belief.from_logits(b.space, logp)


@dataclass(frozen=True)
class AnswerKernel:
    """P(final answer | state), built like a question kernel over the answer set."""

    answer_ids: tuple[str, ...]
    space: StateSpace
    matrix: np.ndarray
    dim_tables: tuple[DimLikelihoodTable, ...] = ()

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (self.space.total_states, len(self.answer_ids)):
            raise ConfigError("answer kernel shape does not match space x answers")
        if not np.allclose(matrix.sum(axis=1), 1.0, atol=_ROW_TOL):
            raise ConfigError("answer kernel rows must sum to 1")
        matrix.setflags(write=False)


def build_answer_kernel(
    answer_ids: Sequence[str],
    tables: Sequence[DimLikelihoodTable],
    space: StateSpace,
) -> AnswerKernel:
    matrix = _combine_tables(tables, space)
    if matrix.shape[1] != len(answer_ids):
        raise InternalConsistencyError("answer tables do not cover the answer set")
    return AnswerKernel(tuple(answer_ids), space, matrix, tuple(tables))


def answer_probabilities(b: Belief, ak: AnswerKernel) -> np.ndarray:
    """Predictive over answers: p(a) = sum_state pi(state) P(a | state)."""
    if ak.space != b.space:
        raise SpaceMismatchError("answer kernel was built over a different space")
    return b.probs() @ ak.matrix
