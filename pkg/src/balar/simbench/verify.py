"""Checks of the theoretical guarantees against sampled environments.

Monotonicity (conditional MI): at any reachable posterior, for any fixed
unasked pair, the expectation of that pair's MI over the next observation's
predictive distribution never exceeds its current MI. This is the testable
form of the data-processing property; the realized MI after one particular
answer may go either way.

Greedy bound: expected greedy gain >= (1 - 1/e) * optimal adaptive gain on
exhaustively tractable instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..belief import Belief
from ..likelihood import QuestionKernel
from ..selection import PairId, mutual_information, posterior_given, predictive
from .optimal import greedy_adaptive_gain, optimal_adaptive_gain
from .synthetic import SyntheticInstance, generate_instance, simulate_answer

_MASS_FLOOR = 1e-300


def expected_mi_after(
    belief: Belief, asked_kernel: QuestionKernel, fixed_kernel: QuestionKernel
) -> float:
    """E_y[ MI(posterior after observing y on the asked pair; fixed pair) ]."""
    p_y = predictive(belief, asked_kernel)
    total = 0.0
    for y in range(asked_kernel.n_choices):
        if p_y[y] <= _MASS_FLOOR:
            continue
        total += p_y[y] * mutual_information(
            posterior_given(belief, asked_kernel, y), fixed_kernel
        )
    return total


@dataclass
class LemmaReport:
    checks: int = 0
    violations: int = 0
    worst_excess: float = 0.0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_lemma_monotonicity(
    n_environments: int = 100,
    steps: int = 5,
    tolerance: float = 1e-9,
    base_seed: int = 0,
    p: int = 2,
    n: int = 2,
    q_count: int = 6,
    n_choices: int = 2,
) -> LemmaReport:
    """Walk sampled histories; verify conditional-MI monotonicity at every prefix."""
    report = LemmaReport()
    for env in range(n_environments):
        seed = base_seed + env
        sharpness = 0.5 + 0.5 * ((env % 5) / 5)
        inst = generate_instance(seed, p, n, q_count, sharpness, n_choices)
        rng = np.random.default_rng(np.random.SeedSequence([base_seed, seed, 7]))
        belief = inst.prior_belief()
        asked: set[PairId] = set()
        for _ in range(steps):
            unasked = [pid for pid in inst.pair_ids if pid not in asked]
            if len(unasked) < 2:
                break
            asked_pair = unasked[int(rng.integers(0, len(unasked)))]
            asked_kernel = inst.kernel(asked_pair)
            for fixed_pair in unasked:
                if fixed_pair == asked_pair:
                    continue
                fixed_kernel = inst.kernel(fixed_pair)
                before = mutual_information(belief, fixed_kernel)
                after = expected_mi_after(belief, asked_kernel, fixed_kernel)
                report.checks += 1
                excess = after - before
                if excess > tolerance:
                    report.violations += 1
                    report.worst_excess = max(report.worst_excess, excess)
                    report.failures.append(
                        {"seed": seed, "asked": asked_pair, "fixed": fixed_pair, "excess": excess}
                    )
            y = simulate_answer(inst, asked_pair, rng)
            belief = posterior_given(belief, asked_kernel, y)
            asked.add(asked_pair)
    return report


@dataclass
class TheoremRow:
    seed: int
    k: int
    greedy: float
    optimal: float

    @property
    def bound(self) -> float:
        return (1.0 - 1.0 / math.e) * self.optimal

    @property
    def satisfied(self) -> bool:
        return self.greedy >= self.bound - 1e-9


@dataclass
class TheoremReport:
    rows: list[TheoremRow] = field(default_factory=list)
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return all(r.greedy >= r.bound - self.tolerance for r in self.rows)

    @property
    def worst_margin(self) -> float:
        return min((r.greedy - r.bound for r in self.rows), default=0.0)


def theorem_corpus(count: int = 54, base_seed: int = 100) -> list[SyntheticInstance]:
    """Tractable instances: |states| <= 8, <= 4 binary questions."""
    shapes = [(1, 4, 3), (2, 2, 4), (3, 2, 3), (1, 8, 4), (2, 2, 3), (1, 6, 4)]
    sharpnesses = [0.35, 0.6, 0.85]
    corpus = []
    i = 0
    while len(corpus) < count:
        p, n, q = shapes[i % len(shapes)]
        s = sharpnesses[(i // len(shapes)) % len(sharpnesses)]
        corpus.append(generate_instance(base_seed + i, p, n, q, s, n_choices=2))
        i += 1
    return corpus


def check_theorem_bound(
    count: int = 54,
    base_seed: int = 100,
    budgets: tuple[int, ...] = (1, 2, 3),
    tolerance: float = 1e-9,
) -> TheoremReport:
    report = TheoremReport(tolerance=tolerance)
    for inst in theorem_corpus(count, base_seed):
        for k in budgets:
            report.rows.append(
                TheoremRow(
                    seed=inst.seed,
                    k=k,
                    greedy=greedy_adaptive_gain(inst, k),
                    optimal=optimal_adaptive_gain(inst, k),
                )
            )
    return report
