"""Closed-form elicitation call counts per session phase.

Initialization: 1 (dimensions) + p*n (prior labels) + 1 (questions)
+ |Q|*|U|*p (likelihood tables) + p (answer tables, only with an answer set).

Each ask round: exactly 2 sequential calls (user answer, then soft-map).

Each expand round, with p dimensions and |Q| questions going in:
1 (new dimension) + n (its prior) + 1 if answers (its answer table)
+ |Q|*|U| (old questions over the new dimension) + 1 (new questions)
+ q_new*|U|*(p+1) (new questions over all dimensions).

A session ends with one final-answer call.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CallBudget:
    init_calls: int
    per_ask_calls: int
    per_expand_calls: tuple[int, ...]
    final_calls: int
    ask_rounds: int
    expand_rounds: int

    @property
    def ask_calls_total(self) -> int:
        return self.per_ask_calls * self.ask_rounds

    @property
    def expand_calls_total(self) -> int:
        return sum(self.per_expand_calls)

    @property
    def total(self) -> int:
        return self.init_calls + self.ask_calls_total + self.expand_calls_total + self.final_calls


def estimate_call_budget(
    p: int,
    n: int,
    q_count: int,
    u_count: int,
    has_answers: bool,
    ask_rounds: int = 0,
    expand_rounds: int = 0,
    q_new: int = 0,
) -> CallBudget:
    """Counts assume every dimension carries n values and every expand adds q_new questions."""
    if min(p, n, q_count, u_count, ask_rounds, expand_rounds, q_new) < 0:
        raise ValueError("all counts must be non-negative")
    init = 1 + p * n + 1 + q_count * u_count * p + (p if has_answers else 0)
    per_expand: list[int] = []
    dims, questions = p, q_count
    for _ in range(expand_rounds):
        cost = (
            1
            + n
            + (1 if has_answers else 0)
            + questions * u_count
            + 1
            + q_new * u_count * (dims + 1)
        )
        per_expand.append(cost)
        dims += 1
        questions += q_new
    return CallBudget(
        init_calls=init,
        per_ask_calls=2,
        per_expand_calls=tuple(per_expand),
        final_calls=1,
        ask_rounds=ask_rounds,
        expand_rounds=expand_rounds,
    )
