from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from balar import Dimension, LabelMap, PriorVector, Question, StateSpace, init_belief

FIXTURES_DIR = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def label_map() -> LabelMap:
    return LabelMap()


@pytest.fixture
def dim_pair() -> tuple[Dimension, Dimension]:
    d1 = Dimension("d1", "first", (("v1", "a"), ("v2", "b")))
    d2 = Dimension("d2", "second", (("v1", "x"), ("v2", "y"), ("v3", "z")))
    return d1, d2


@pytest.fixture
def space_2x3(dim_pair) -> StateSpace:
    return StateSpace(dim_pair)


@pytest.fixture
def belief_2x3(space_2x3):
    priors = [
        PriorVector("d1", np.array([0.4, 0.6])),
        PriorVector("d2", np.array([0.5, 0.3, 0.2])),
    ]
    return init_belief(priors, space_2x3)


@pytest.fixture
def binary_question() -> Question:
    return Question("q1", "which?", (("c1", "yes"), ("c2", "no")))


def random_belief(rng: np.random.Generator, space: StateSpace):
    from balar import Belief

    logits = rng.normal(0.0, 2.0, size=space.total_states)
    return Belief.from_logits(space, logits)


def random_kernel(rng: np.random.Generator, space: StateSpace, n_choices: int, qid="q", uid="u"):
    from balar import QuestionKernel

    raw = rng.dirichlet(np.ones(n_choices), size=space.total_states)
    return QuestionKernel(qid, uid, space, raw)


def small_space(sizes: tuple[int, ...]) -> StateSpace:
    dims = [
        Dimension(
            f"d{j + 1}",
            f"dim{j + 1}",
            tuple((f"v{k + 1}", f"d{j + 1}v{k + 1}") for k in range(n)),
        )
        for j, n in enumerate(sizes)
    ]
    return StateSpace(dims)
