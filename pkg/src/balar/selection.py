"""Mutual-information question selection.

For a candidate (question, user) pair with kernel K and belief pi:

    predictive p(y)      = sum_state pi(state) K(state, y)
    posterior_y(state)   = K(state, y) pi(state) / p(y)
    MI                   = H(pi) - sum_y p(y) H(posterior_y)

The greedy rule picks the unasked pair with the largest MI; ties break by
bank order (question creation order, then user order) so replays are stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .belief import Belief, entropy
from .errors import DegenerateObservationError, SpaceMismatchError
from .likelihood import QuestionKernel

# predictive mass below this is treated as zero to avoid -inf * 0
_MASS_FLOOR = 1e-300


@dataclass(frozen=True, order=True)
class PairId:
    question_id: str
    user_id: str


@dataclass(frozen=True)
class MiRanking:
    """Unasked pairs ranked by MI, non-increasing."""

    entries: tuple[tuple[PairId, float], ...]
    computed_at_round: int

    def top(self) -> tuple[PairId, float] | None:
        return self.entries[0] if self.entries else None


def _check_space(b: Belief, k: QuestionKernel) -> None:
    if k.space != b.space:
        raise SpaceMismatchError(
            f"kernel for ({k.question_id},{k.user_id}) built over a different space"
        )


def predictive(b: Belief, k: QuestionKernel) -> np.ndarray:
    """Distribution over the question's choices implied by the belief."""
    _check_space(b, k)
    return b.probs() @ k.matrix


def posterior_given(b: Belief, k: QuestionKernel, choice_index: int) -> Belief:
    """Hard-answer posterior; equals a one-hot soft update."""
    _check_space(b, k)
    joint = b.probs() * k.matrix[:, choice_index]
    mass = joint.sum()
    if mass <= _MASS_FLOOR:
        raise DegenerateObservationError(
            f"choice {choice_index} has zero predictive mass for ({k.question_id},{k.user_id})"
        )
    with np.errstate(divide="ignore"):
        return Belief(b.space, np.where(joint > 0, np.log(joint / mass), -np.inf))


def mutual_information(b: Belief, k: QuestionKernel) -> float:
    """I(state; answer) = H(prior) - E_y[H(posterior_y)] in nats."""
    _check_space(b, k)
    p = b.probs()
    joint = p[:, None] * k.matrix  # |states| x |choices|
    p_y = joint.sum(axis=0)
    cond = 0.0
    for y in range(joint.shape[1]):
        if p_y[y] <= _MASS_FLOOR:
            continue
        post = joint[:, y] / p_y[y]
        nz = post > 0
        cond += p_y[y] * float(-(post[nz] * np.log(post[nz])).sum())
    return entropy(b) - cond


def mi_ranking(
    b: Belief,
    kernels: Sequence[tuple[PairId, QuestionKernel]],
    asked: Iterable[PairId],
    computed_at_round: int,
) -> MiRanking:
    """Rank all unasked pairs by MI, descending; ties keep bank order."""
    asked = set(asked)
    scored = [
        (pair, mutual_information(b, kernel))
        for pair, kernel in kernels
        if pair not in asked
    ]
    # stable sort preserves bank order among equal scores
    scored.sort(key=lambda item: -item[1])
    return MiRanking(tuple(scored), computed_at_round)


def select_pair(
    b: Belief,
    kernels: Sequence[tuple[PairId, QuestionKernel]],
    asked: Iterable[PairId],
) -> tuple[PairId, float] | None:
    """Greedy argmax over unasked pairs; None when every pair has been asked."""
    asked = set(asked)
    best: tuple[PairId, float] | None = None
    for pair, kernel in kernels:
        if pair in asked:
            continue
        mi = mutual_information(b, kernel)
        if best is None or mi > best[1]:
            best = (pair, mi)
    return best
