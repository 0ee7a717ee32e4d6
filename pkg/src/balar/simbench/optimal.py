"""Brute-force adaptive-policy oracle and the greedy bound check.

`optimal_adaptive_gain` evaluates the best k-budgeted adaptive policy by
exhaustive recursion over (pair choice x answer outcome) trees with exact
Bayesian updates, memoized on (asked set, quantized belief). It is kept
self-contained (plain arrays, its own posterior arithmetic) so it stays an
independent oracle for the engine's greedy selection path.
"""

from __future__ import annotations

import numpy as np

from ..belief import entropy
from ..errors import ConfigError
from ..selection import PairId, posterior_given, select_pair
from .synthetic import SyntheticInstance

MAX_STATES = 8
MAX_QUESTIONS = 4
MAX_CHOICES = 2
MAX_BUDGET = 3

_MASS_FLOOR = 1e-300


def _check_tractable(inst: SyntheticInstance, k: int) -> None:
    if inst.space.total_states > MAX_STATES:
        raise ConfigError(f"refused: more than {MAX_STATES} states")
    if len(inst.kernels) > MAX_QUESTIONS:
        raise ConfigError(f"refused: more than {MAX_QUESTIONS} question-user pairs")
    if any(kernel.n_choices > MAX_CHOICES for _, kernel in inst.kernels):
        raise ConfigError(f"refused: more than {MAX_CHOICES} answer choices")
    if k > MAX_BUDGET:
        raise ConfigError(f"refused: budget above {MAX_BUDGET}")


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _belief_key(p: np.ndarray) -> bytes:
    return np.round(p / 1e-12).astype(np.int64).tobytes()


def optimal_adaptive_gain(inst: SyntheticInstance, k: int) -> float:
    """Exact expected information gain of the best k-budgeted adaptive policy."""
    if k < 0:
        raise ConfigError("budget must be non-negative")
    if k == 0:
        return 0.0
    _check_tractable(inst, k)
    matrices = {pid: kernel.matrix for pid, kernel in inst.kernels}
    pair_order = tuple(pid for pid, _ in inst.kernels)
    memo: dict[tuple, float] = {}

    def value(probs: np.ndarray, asked: frozenset[PairId], budget: int) -> float:
        if budget == 0:
            return 0.0
        key = (asked, budget, _belief_key(probs))
        if key in memo:
            return memo[key]
        h_now = _entropy(probs)
        best = 0.0
        for pid in pair_order:
            if pid in asked:
                continue
            matrix = matrices[pid]
            joint = probs[:, None] * matrix
            p_y = joint.sum(axis=0)
            expected = 0.0
            expected_posterior_entropy = 0.0
            for y in range(matrix.shape[1]):
                if p_y[y] <= _MASS_FLOOR:
                    continue
                post = joint[:, y] / p_y[y]
                expected_posterior_entropy += p_y[y] * _entropy(post)
                expected += p_y[y] * value(post, asked | {pid}, budget - 1)
            gain = (h_now - expected_posterior_entropy) + expected
            best = max(best, gain)
        memo[key] = best
        return best

    return value(inst.prior_belief().probs(), frozenset(), k)


def greedy_adaptive_gain(inst: SyntheticInstance, k: int) -> float:
    """Expected information gain of the engine's greedy MI selection over k rounds.

    Uses the production selection and update path, so the theorem check
    compares the real policy against the independent oracle above.
    """
    if k == 0:
        return 0.0
    _check_tractable(inst, k)

    def walk(belief, asked: frozenset[PairId], budget: int) -> float:
        if budget == 0:
            return 0.0
        pick = select_pair(belief, list(inst.kernels), asked)
        if pick is None:
            return 0.0
        pair, mi = pick
        kernel = inst.kernel(pair)
        p_y = belief.probs() @ kernel.matrix
        total = mi
        for y in range(kernel.n_choices):
            if p_y[y] <= _MASS_FLOOR:
                continue
            post = posterior_given(belief, kernel, y)
            total += p_y[y] * walk(post, asked | {pair}, budget - 1)
        return total

    return walk(inst.prior_belief(), frozenset(), k)
