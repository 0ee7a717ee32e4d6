"""Entropy-gap arithmetic driving the ask/expand decision.

The target entropy at confidence 1-alpha over n states is

    H_alpha = -(1-alpha) log(1-alpha) - alpha log(alpha / (n-1)),

the entropy of the most spread-out distribution whose mode still carries
mass 1-alpha. Expansion triggers when the gap to that target cannot be
closed by the best available question within the remaining budget.
"""

from __future__ import annotations

import math

from .belief import Belief, entropy
from .errors import ConfigError


def target_entropy(alpha: float, total_states: int) -> float:
    """H_alpha in nats; alpha = 0 returns the point-mass limit 0."""
    if not (0.0 <= alpha < 1.0):
        raise ConfigError(f"alpha must be in [0, 1), got {alpha}")
    if total_states < 2:
        raise ConfigError("target entropy needs at least 2 states")
    if alpha == 0.0:
        return 0.0
    return -(1.0 - alpha) * math.log(1.0 - alpha) - alpha * math.log(alpha / (total_states - 1))


def entropy_gap(b: Belief, alpha: float) -> float:
    """max(0, H(belief) - H_alpha); zero once at or below target."""
    return max(0.0, entropy(b) - target_entropy(alpha, b.space.total_states))


def should_expand(gap: float, i_star: float, lambda_: float, total_rounds: int, t: int) -> bool:
    """True iff gap > lambda * i_star * (T - t).

    With i_star = 0 and a positive gap the inequality holds trivially:
    the target is unreachable by asking.
    """
    if t > total_rounds:
        raise ConfigError("round index past the total budget")
    return gap > lambda_ * i_star * (total_rounds - t)


def min_rounds(gap: float, i_star: float) -> int | None:
    """ceil(gap / i_star): rounds needed under optimal selection.

    Returns 0 for a closed gap and None (unbounded) when i_star is 0.
    """
    if gap <= 0.0:
        return 0
    if i_star <= 0.0:
        return None
    return math.ceil(gap / i_star)
