"""Synthetic ground-truth environments for desk-scale verification.

Each instance has a hidden true state sampled from its prior, and question
kernels whose rows are a convex mix of one-hot and uniform controlled by
`sharpness` (1 = fully informative, 0 = uninformative). Every question is
informative about exactly one dimension, so sharpness 1 yields one-hot
kernel rows without zeroing the row product. Simulated answers are drawn
from the true state's kernel row, independently per call, which enforces
conditional independence given the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..belief import Belief, PriorVector, init_belief
from ..errors import ConfigError
from ..likelihood import AnswerKernel, DimLikelihoodTable, QuestionKernel, build_question_kernel
from ..selection import PairId
from ..state import Dimension, Question, StateSpace


@dataclass(frozen=True)
class SyntheticInstance:
    seed: int
    space: StateSpace
    priors: tuple[PriorVector, ...]
    questions: tuple[Question, ...]
    kernels: tuple[tuple[PairId, QuestionKernel], ...]
    theta_star: int  # flat index of the hidden true state
    sharpness: float
    answer_kernel: AnswerKernel | None = None

    def prior_belief(self) -> Belief:
        return init_belief(list(self.priors), self.space)

    def kernel(self, pair: PairId) -> QuestionKernel:
        for pid, k in self.kernels:
            if pid == pair:
                return k
        raise ConfigError(f"no kernel for pair {pair}")

    @property
    def pair_ids(self) -> tuple[PairId, ...]:
        return tuple(pid for pid, _ in self.kernels)

    def scripted_answer(self, pair: PairId, stream_seed: int = 0) -> int:
        """Deterministic per-(instance, pair) answer draw for paired comparisons."""
        q_index = int(pair.question_id[1:]) - 1
        rng = np.random.default_rng(
            np.random.SeedSequence([stream_seed, self.seed, q_index, hash(pair.user_id) % (2**31)])
        )
        row = self.kernel(pair).matrix[self.theta_star]
        return int(rng.choice(row.size, p=row))


def _mixed_rows(n_values: int, n_choices: int, targets: np.ndarray, sharpness: float) -> np.ndarray:
    one_hot = np.zeros((n_values, n_choices))
    one_hot[np.arange(n_values), targets] = 1.0
    uniform = np.full((n_values, n_choices), 1.0 / n_choices)
    return sharpness * one_hot + (1.0 - sharpness) * uniform


def generate_instance(
    seed: int,
    p: int,
    n: int,
    q_count: int,
    sharpness: float,
    n_choices: int = 2,
    answer_count: int = 0,
    u_count: int = 1,
) -> SyntheticInstance:
    """Reproducible instance; the true state is sampled from the prior."""
    if p < 1 or n < 2 or q_count < 1 or u_count < 1:
        raise ConfigError("instance sizes must be positive (n >= 2)")
    if not (0.0 < sharpness <= 1.0):
        raise ConfigError("sharpness must be in (0, 1]")
    if n_choices < 2:
        raise ConfigError("questions need at least 2 choices")

    rng = np.random.default_rng(seed)
    dims = [
        Dimension(
            f"d{j + 1}",
            f"dim {j + 1}",
            tuple((f"v{k + 1}", f"d{j + 1} value {k + 1}") for k in range(n)),
        )
        for j in range(p)
    ]
    space = StateSpace(dims)
    priors = tuple(
        PriorVector(d.id, rng.dirichlet(np.full(n, 5.0))) for d in dims
    )

    questions = []
    kernels: list[tuple[PairId, QuestionKernel]] = []
    users = [f"u{i + 1}" for i in range(u_count)]
    for qi in range(q_count):
        question = Question(
            f"q{qi + 1}",
            f"synthetic question {qi + 1}",
            tuple((f"c{c + 1}", f"choice {c + 1}") for c in range(n_choices)),
        )
        questions.append(question)
        target_dim = qi % p
        # each value maps to a choice; a seeded assignment varies by question
        targets = rng.integers(0, n_choices, size=n)
        # guarantee the question distinguishes at least two values
        if len(set(targets.tolist())) == 1:
            targets[rng.integers(0, n)] = (targets[0] + 1) % n_choices
        for u in users:
            tables = []
            for j, dim in enumerate(dims):
                if j == target_dim:
                    rows = _mixed_rows(n, n_choices, targets, sharpness)
                else:
                    rows = np.full((dim.size, n_choices), 1.0 / n_choices)
                tables.append(DimLikelihoodTable(question.id, u, dim.id, rows))
            kernels.append((PairId(question.id, u), build_question_kernel(tables, space)))

    joint = init_belief(list(priors), space).probs()
    theta_star = int(rng.choice(space.total_states, p=joint))

    answer_kernel = None
    if answer_count:
        if answer_count < 2:
            raise ConfigError("answer set needs at least 2 entries")
        answer_ids = tuple(f"a{i + 1}" for i in range(answer_count))
        tables = [
            DimLikelihoodTable(
                "__answers__", "__answers__", d.id, rng.dirichlet(np.ones(answer_count), size=n)
            )
            for d in dims
        ]
        matrix = build_question_kernel(
            [DimLikelihoodTable("__answers__", "__answers__", t.dim_id, t.rows) for t in tables],
            space,
        ).matrix
        answer_kernel = AnswerKernel(answer_ids, space, matrix, tuple(tables))

    return SyntheticInstance(
        seed=seed,
        space=space,
        priors=priors,
        questions=tuple(questions),
        kernels=tuple(kernels),
        theta_star=theta_star,
        sharpness=sharpness,
        answer_kernel=answer_kernel,
    )


def simulate_answer(inst: SyntheticInstance, pair: PairId, rng: np.random.Generator) -> int:
    """Sample a choice from the true state's kernel row; calls are independent."""
    row = inst.kernel(pair).matrix[inst.theta_star]
    return int(rng.choice(row.size, p=row))
