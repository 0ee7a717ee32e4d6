from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balar import (
    Belief,
    Question,
    SoftObservation,
    StateSpace,
    answer_probabilities,
    bayes_update,
    build_answer_kernel,
    build_dim_table,
    build_question_kernel,
    effective_likelihood,
    soft_observation,
)
from balar.errors import (
    DegenerateObservationError,
    ElicitationProtocolError,
    InternalConsistencyError,
    SpaceMismatchError,
)
from conftest import random_belief, random_kernel, small_space
from oracles import posterior_oracle


def _table(dim, grid, label_map, qid="q1", uid="u1"):
    return build_dim_table(qid, uid, dim, grid, label_map)


def test_build_dim_table_rows(label_map, dim_pair):
    d1, _ = dim_pair
    t = _table(d1, [["likely", "unlikely", "unlikely"], ["neutral", "neutral", "neutral"]],
               label_map)
    assert t.rows[0] == pytest.approx([2 / 3, 1 / 6, 1 / 6], abs=1e-12)
    assert t.rows[1] == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-12)


def test_build_dim_table_paper_normalization(label_map, dim_pair):
    d1, _ = dim_pair
    t = _table(d1, [["neutral", "likely"], ["neutral", "likely"]], label_map)
    assert t.rows[0] == pytest.approx([0.38461538461538464, 0.6153846153846154], abs=1e-12)


def test_build_dim_table_ragged_grid(label_map, dim_pair):
    d1, _ = dim_pair
    with pytest.raises(ElicitationProtocolError, match="ragged"):
        _table(d1, [["likely", "unlikely"], ["neutral"]], label_map)


def test_build_dim_table_unknown_label(label_map, dim_pair):
    d1, _ = dim_pair
    with pytest.raises(ElicitationProtocolError, match="certain"):
        _table(d1, [["certain", "unlikely"], ["neutral", "neutral"]], label_map)


def test_kernel_single_dim_passthrough(label_map):
    space = small_space((2,))
    t = _table(space.dims[0], [["likely", "unlikely"], ["unlikely", "likely"]], label_map)
    k = build_question_kernel([t], space)
    assert k.matrix == pytest.approx(t.rows, abs=1e-12)


def test_kernel_uniform_tables_stay_uniform(label_map):
    space = small_space((2, 3))
    tables = [
        _table(space.dims[0], [["neutral"] * 2] * 2, label_map),
        _table(space.dims[1], [["neutral"] * 2] * 3, label_map),
    ]
    k = build_question_kernel(tables, space)
    assert k.matrix == pytest.approx(np.full((6, 2), 0.5), abs=1e-12)


def test_kernel_product_normalize_by_hand():
    # p = 2: rows (0.8, 0.2) and (0.6, 0.4) -> (0.48, 0.08) -> (6/7, 1/7)
    from balar import DimLikelihoodTable

    space = small_space((2, 2))
    t1 = DimLikelihoodTable("q1", "u1", "d1", np.array([[0.8, 0.2], [0.8, 0.2]]))
    t2 = DimLikelihoodTable("q1", "u1", "d2", np.array([[0.6, 0.4], [0.6, 0.4]]))
    k = build_question_kernel([t1, t2], space)
    assert k.matrix[0] == pytest.approx([0.8571428571428571, 0.14285714285714285], abs=1e-12)


def test_kernel_missing_dimension_table(label_map):
    space = small_space((2, 2))
    t1 = _table(space.dims[0], [["likely", "unlikely"]] * 2, label_map)
    with pytest.raises(InternalConsistencyError, match="d2"):
        build_question_kernel([t1], space)


def test_kernel_commutes_with_dimension_reordering(label_map):
    rng = np.random.default_rng(7)
    space = small_space((2, 3))
    labels = np.array(["likely", "neutral", "unlikely"])
    grid1 = labels[rng.integers(0, 3, size=(2, 2))].tolist()
    grid2 = labels[rng.integers(0, 3, size=(3, 2))].tolist()
    t1 = _table(space.dims[0], grid1, label_map)
    t2 = _table(space.dims[1], grid2, label_map)
    k = build_question_kernel([t1, t2], space)

    swapped = StateSpace((space.dims[1], space.dims[0]))
    k_swapped = build_question_kernel([t2, t1], swapped)
    for i in range(2):
        for j in range(3):
            a = space.flat_index((i, j))
            b = swapped.flat_index((j, i))
            assert k.matrix[a] == pytest.approx(k_swapped.matrix[b], abs=1e-12)


def test_soft_observation_examples(label_map):
    q3 = Question("q1", "?", (("c1", "a"), ("c2", "b"), ("c3", "c")))
    obs = soft_observation(q3, ["likely", "unlikely", "unlikely"], label_map)
    assert obs.weights == pytest.approx([2 / 3, 1 / 6, 1 / 6], abs=1e-12)

    q2 = Question("q2", "?", (("c1", "a"), ("c2", "b")))
    assert soft_observation(q2, ["likely", "unlikely"], label_map).weights == pytest.approx(
        [0.8, 0.2], abs=1e-12
    )
    assert soft_observation(q2, ["neutral", "neutral"], label_map).weights == pytest.approx(
        [0.5, 0.5], abs=0
    )


def test_soft_observation_wrong_arity(label_map, binary_question):
    with pytest.raises(ElicitationProtocolError):
        soft_observation(binary_question, ["likely"], label_map)


def test_effective_likelihood_one_hot_is_column():
    rng = np.random.default_rng(3)
    space = small_space((2, 2))
    k = random_kernel(rng, space, 3)
    obs = SoftObservation("q", np.array([0.0, 1.0, 0.0]))
    assert effective_likelihood(k, obs) == pytest.approx(k.matrix[:, 1], abs=0)


def test_effective_likelihood_uniform_is_row_mean():
    rng = np.random.default_rng(4)
    space = small_space((2, 2))
    k = random_kernel(rng, space, 4)
    obs = SoftObservation("q", np.full(4, 0.25))
    assert effective_likelihood(k, obs) == pytest.approx(np.full(4, 0.25), abs=1e-12)


def test_effective_likelihood_dot_product():
    from balar import QuestionKernel

    space = small_space((2,))
    k = QuestionKernel("q", "u", space, np.array([[0.9, 0.1], [0.2, 0.8]]))
    obs = SoftObservation("q", np.array([0.75, 0.25]))
    lhat = effective_likelihood(k, obs)
    assert lhat[0] == pytest.approx(0.7, abs=1e-15)


def test_bayes_update_uniform_evidence_is_identity(belief_2x3):
    out = bayes_update(belief_2x3, np.full(6, 0.5))
    assert out.probs() == pytest.approx(belief_2x3.probs(), abs=1e-12)


def test_bayes_update_uniform_prior():
    space = small_space((2,))
    b = Belief.from_logits(space, np.zeros(2))
    out = bayes_update(b, np.array([0.8, 0.2]))
    assert out.probs() == pytest.approx([0.8, 0.2], abs=1e-12)


def test_bayes_update_zero_total_evidence(belief_2x3):
    with pytest.raises(DegenerateObservationError):
        bayes_update(belief_2x3, np.zeros(6))


def test_bayes_update_zero_cells_get_minus_inf(belief_2x3):
    lhat = np.array([1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    out = bayes_update(belief_2x3, lhat)
    assert np.isneginf(out.logp[1])
    assert np.exp(out.logp).sum() == pytest.approx(1.0, abs=1e-9)


def test_answer_probabilities_examples():
    from balar import AnswerKernel

    space = small_space((2,))
    ak = AnswerKernel(("a1", "a2"), space, np.array([[0.9, 0.1], [0.2, 0.8]]))
    b = Belief.from_logits(space, np.log(np.array([0.3, 0.7])))
    assert answer_probabilities(b, ak) == pytest.approx([0.41, 0.59], abs=1e-12)

    point = Belief.point_mass(space, 1)
    assert answer_probabilities(point, ak) == pytest.approx([0.2, 0.8], abs=0)


def test_answer_probabilities_space_mismatch():
    from balar import AnswerKernel

    space = small_space((2,))
    other = small_space((2, 2))
    ak = AnswerKernel(("a1", "a2"), space, np.array([[0.9, 0.1], [0.2, 0.8]]))
    b = Belief.from_logits(other, np.zeros(4))
    with pytest.raises(SpaceMismatchError):
        answer_probabilities(b, ak)


def test_build_answer_kernel_like_question_kernel(label_map):
    space = small_space((2, 2))
    t1 = build_dim_table("__answers__", "__answers__", space.dims[0],
                         [["likely", "unlikely"], ["unlikely", "likely"]], label_map)
    t2 = build_dim_table("__answers__", "__answers__", space.dims[1],
                         [["neutral", "neutral"], ["neutral", "neutral"]], label_map)
    ak = build_answer_kernel(["yes", "no"], [t1, t2], space)
    assert ak.matrix.sum(axis=1) == pytest.approx(np.ones(4), abs=1e-9)
    assert ak.matrix[0] == pytest.approx([0.8, 0.2], abs=1e-12)


# -- properties ---------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_hard_soft_consistency(seed):
    """One-hot soft update equals the closed-form hard posterior, per state."""
    rng = np.random.default_rng(seed)
    space = small_space((2, 3))
    b = random_belief(rng, space)
    k = random_kernel(rng, space, 3)
    y = int(rng.integers(0, 3))
    one_hot = np.zeros(3)
    one_hot[y] = 1.0
    soft = bayes_update(b, effective_likelihood(k, SoftObservation("q", one_hot)))
    expected = posterior_oracle(b.probs(), k.matrix, y)
    assert soft.probs() == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_uniform_soft_update_is_identity(seed):
    rng = np.random.default_rng(seed)
    space = small_space((2, 2))
    b = random_belief(rng, space)
    k = random_kernel(rng, space, 4)
    obs = SoftObservation("q", np.full(4, 0.25))
    out = bayes_update(b, effective_likelihood(k, obs))
    assert out.probs() == pytest.approx(b.probs(), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_generated_rows_sum_to_one(seed):
    from balar import LabelMap

    rng = np.random.default_rng(seed)
    space = small_space((2, 3))
    labels = np.array(["likely", "neutral", "unlikely"])
    tables = []
    for dim in space.dims:
        grid = labels[rng.integers(0, 3, size=(dim.size, 3))].tolist()
        tables.append(build_dim_table("q", "u", dim, grid, LabelMap()))
    for t in tables:
        assert t.rows.sum(axis=1) == pytest.approx(np.ones(t.rows.shape[0]), abs=1e-12)
    k = build_question_kernel(tables, space)
    assert k.matrix.sum(axis=1) == pytest.approx(np.ones(6), abs=1e-9)
