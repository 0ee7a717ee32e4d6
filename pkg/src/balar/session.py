"""The agentic control loop: initialize, ask/expand, update, converge, answer.

One session advances under single-writer discipline. `Session.step`
performs exactly one loop iteration, stopping either at a pending ask
(awaiting the user's free-form answer), after a completed expansion, or at
a terminal status. `run_session` closes the loop with an answerer callable.

Loop ordering follows the algorithm exactly: budget and convergence are
tested first each iteration, expansion never consumes the ask budget, and
the round counter advances once per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from string import Template
from typing import Callable, Sequence

import numpy as np

from .belief import (
    Belief,
    PriorVector,
    entropy,
    extend_belief,
    init_belief,
    map_state,
    marginal,
    prior_from_labels,
)
from .config import Instance, LoopConfig
from .elicitation.contract import Elicitor, ProposedDimension, ProposedQuestion
from .elicitation.dispatch import dispatch_parallel
from .errors import (
    BalarError,
    ConfigError,
    DegenerateObservationError,
    ElicitationProtocolError,
    ExpansionRefused,
    SessionStateError,
)
from .labels import LabelMap
from .likelihood import (
    AnswerKernel,
    DimLikelihoodTable,
    QuestionKernel,
    answer_probabilities,
    bayes_update,
    build_answer_kernel,
    build_dim_table,
    build_question_kernel,
    effective_likelihood,
    soft_observation,
)
from .loop import entropy_gap, min_rounds, should_expand
from .selection import PairId, mi_ranking, select_pair
from .state import Dimension, Question, StateSpace
from .transcript import HistoryEntry, Transcript

# session statuses
RUNNING = "running"
CONVERGED_ANSWER = "converged-answer"
CONVERGED_MARGINAL = "converged-marginal"
BUDGET_EXHAUSTED = "budget-exhausted"
EXPAND_CAPPED = "expand-capped"

TERMINAL_STATUSES = (CONVERGED_ANSWER, CONVERGED_MARGINAL, BUDGET_EXHAUSTED, EXPAND_CAPPED)

# step outcomes
AWAITING_ANSWER = "awaiting-answer"
EXPANDED = "expanded"
TERMINAL = "terminal"

_SUMMARY_TEMPLATE_PATH = Path(__file__).parent / "elicitation" / "templates" / "map_summary.txt"


@dataclass(frozen=True)
class PendingAsk:
    pair: PairId
    question: Question
    issued_at: int  # round index t when the ask was issued


@dataclass
class SessionState:
    instance: Instance
    config: LoopConfig
    space: StateSpace
    belief: Belief
    questions: list[Question]
    kernels: list[tuple[PairId, QuestionKernel]]
    dim_tables: dict[tuple[str, str, str], DimLikelihoodTable]  # (q, u, dim) -> table
    answer_kernel: AnswerKernel | None
    answer_tables: list[DimLikelihoodTable]
    asked: set[PairId] = field(default_factory=set)
    history: list[HistoryEntry] = field(default_factory=list)
    t: int = 1
    n_asked: int = 0
    status: str = RUNNING

    @property
    def kernel_map(self) -> dict[PairId, QuestionKernel]:
        return dict(self.kernels)


def check_convergence(state: SessionState, cfg: LoopConfig) -> str:
    """Verdict for the top of a loop iteration.

    Budget exhaustion wins, then the answer-probability rule (only when an
    answer kernel exists), then the marginal-fraction rule. Returns the
    would-be terminal status, or "running".
    """
    if state.t > cfg.T or state.n_asked >= cfg.T_ask:
        return BUDGET_EXHAUSTED
    if state.answer_kernel is not None:
        probs = answer_probabilities(state.belief, state.answer_kernel)
        if probs.max() >= 1.0 - cfg.alpha:
            return CONVERGED_ANSWER
    concentrated = sum(
        1
        for dim in state.space.dims
        if marginal(state.belief, dim.id).max() >= 1.0 - cfg.alpha
    )
    if concentrated / state.space.n_dims >= cfg.beta:
        return CONVERGED_MARGINAL
    return RUNNING


def format_map_summary(
    space: StateSpace, assignment: dict[str, str], template: str | None = None
) -> str:
    """Render the MAP state as the disambiguation summary fed to the final call."""
    if template is None:
        template = _SUMMARY_TEMPLATE_PATH.read_text()
    lines = []
    for dim in space.dims:
        value_id = assignment[dim.id]
        text = dim.value_texts[dim.value_index(value_id)]
        lines.append(f"- {dim.name}: {text}")
    return Template(template).substitute(assignments="\n".join(lines)).strip()


class Session:
    """A single interaction instance advancing through the loop."""

    def __init__(
        self,
        instance: Instance,
        elicitor: Elicitor,
        config: LoopConfig | None = None,
        label_map: LabelMap | None = None,
        summary_template: str | None = None,
    ):
        self.elicitor = elicitor
        self.label_map = label_map or LabelMap()
        self.config = config or LoopConfig()
        self.summary_template = summary_template
        self.transcript = Transcript()
        self.pending: PendingAsk | None = None
        self.final_answer: str | None = None
        self._max_concurrent = getattr(elicitor, "max_concurrent", 8)
        try:
            self.state = self._initialize(instance)
        except BalarError as exc:
            self._log_error("init", exc)
            raise

    # -- initialization (steps 1-4) --------------------------------------

    def _initialize(self, instance: Instance) -> SessionState:
        cfg = self.config
        prompt, context = instance.prompt, instance.context

        proposals = self.elicitor.propose_dimensions(prompt, context, instance.num_dims)
        dims = [self._make_dimension(i, p) for i, p in enumerate(proposals)]
        space = StateSpace(dims)
        if space.total_states > cfg.state_cap:
            raise ConfigError(
                f"initial state space has {space.total_states} states, cap is {cfg.state_cap}"
            )

        priors = self._elicit_priors(prompt, context, dims, history=())
        belief = init_belief(priors, space)

        q_payloads = self.elicitor.generate_questions(
            prompt, context, dims, instance.num_questions
        )
        questions = [self._make_question(i, p) for i, p in enumerate(q_payloads)]

        dim_tables = self._elicit_tables(prompt, context, questions, instance.users, dims, ())
        kernels = self._build_kernels(questions, instance.users, dims, dim_tables, space)

        answer_kernel = None
        answer_tables: list[DimLikelihoodTable] = []
        if instance.answer_set:
            answer_tables = self._elicit_answer_tables(prompt, context, dims, instance.answer_set)
            answer_kernel = build_answer_kernel(instance.answer_set, answer_tables, space)

        state = SessionState(
            instance=instance,
            config=cfg,
            space=space,
            belief=belief,
            questions=questions,
            kernels=kernels,
            dim_tables=dim_tables,
            answer_kernel=answer_kernel,
            answer_tables=answer_tables,
        )
        self.transcript.append(
            "init",
            t=0,
            payload={
                "prompt": prompt,
                "context": context,
                "users": list(instance.users),
                "answer_set": list(instance.answer_set) if instance.answer_set else None,
                "dimensions": [_dim_payload(d) for d in dims],
                "priors": {p.dim_id: list(p.probs) for p in priors},
                "questions": [_question_payload(q) for q in questions],
                "entropy": entropy(belief),
                "config": cfg.to_dict(),
            },
        )
        return state

    def _make_dimension(self, index: int, payload: ProposedDimension) -> Dimension:
        cfg = self.config
        if not (2 <= len(payload.values) <= cfg.max_values_per_dim):
            raise ElicitationProtocolError(
                f"dimension {payload.name!r} has {len(payload.values)} values; "
                f"allowed range is 2..{cfg.max_values_per_dim}"
            )
        dim_id = f"d{index + 1}"
        values = tuple((f"v{k + 1}", text) for k, text in enumerate(payload.values))
        return Dimension(dim_id, payload.name, values)

    def _make_question(self, index: int, payload: ProposedQuestion) -> Question:
        cfg = self.config
        if not (2 <= len(payload.choices) <= cfg.max_choices_per_question):
            raise ElicitationProtocolError(
                f"question {payload.text!r} has {len(payload.choices)} choices; "
                f"allowed range is 2..{cfg.max_choices_per_question}"
            )
        q_id = f"q{index + 1}"
        choices = tuple((f"c{k + 1}", text) for k, text in enumerate(payload.choices))
        return Question(q_id, payload.text, choices)

    def _elicit_priors(
        self,
        prompt: str,
        context: str,
        dims: Sequence[Dimension],
        history: tuple[HistoryEntry, ...],
    ) -> list[PriorVector]:
        calls = []
        slots = []
        for dim in dims:
            for value_id in dim.value_ids:
                slots.append(dim)
                calls.append(
                    lambda d=dim, v=value_id: self.elicitor.elicit_prior_label(
                        prompt, context, d, v, history
                    )
                )
        labels = dispatch_parallel(calls, self._max_concurrent)
        priors = []
        cursor = 0
        for dim in dims:
            dim_labels = labels[cursor : cursor + dim.size]
            cursor += dim.size
            priors.append(prior_from_labels(dim, dim_labels, self.label_map))
        return priors

    def _elicit_tables(
        self,
        prompt: str,
        context: str,
        questions: Sequence[Question],
        users: Sequence[str],
        dims: Sequence[Dimension],
        history: tuple[HistoryEntry, ...],
    ) -> dict[tuple[str, str, str], DimLikelihoodTable]:
        triples = [(q, u, d) for q in questions for u in users for d in dims]
        calls = [
            lambda q=q, u=u, d=d: self.elicitor.fill_likelihood_labels(
                prompt, context, q, u, d, history
            )
            for q, u, d in triples
        ]
        grids = dispatch_parallel(calls, self._max_concurrent)
        tables: dict[tuple[str, str, str], DimLikelihoodTable] = {}
        for (q, u, d), grid in zip(triples, grids):
            self._check_grid(grid, d, q)
            tables[(q.id, u, d.id)] = build_dim_table(q.id, u, d, grid, self.label_map)
        return tables

    def _check_grid(self, grid: list[list[str]], dim: Dimension, question: Question) -> None:
        if len(grid) != dim.size or any(len(row) != question.n_choices for row in grid):
            raise ElicitationProtocolError(
                f"label grid for ({question.id},{dim.id}) must be "
                f"{dim.size} x {question.n_choices}"
            )

    def _build_kernels(
        self,
        questions: Sequence[Question],
        users: Sequence[str],
        dims: Sequence[Dimension],
        dim_tables: dict[tuple[str, str, str], DimLikelihoodTable],
        space: StateSpace,
    ) -> list[tuple[PairId, QuestionKernel]]:
        kernels = []
        for q in questions:
            for u in users:
                tables = [dim_tables[(q.id, u, d.id)] for d in dims]
                kernels.append((PairId(q.id, u), build_question_kernel(tables, space)))
        return kernels

    def _elicit_answer_tables(
        self,
        prompt: str,
        context: str,
        dims: Sequence[Dimension],
        answers: Sequence[str],
    ) -> list[DimLikelihoodTable]:
        calls = [
            lambda d=d: self.elicitor.fill_answer_likelihood_labels(prompt, context, d, answers)
            for d in dims
        ]
        grids = dispatch_parallel(calls, self._max_concurrent)
        tables = []
        for dim, grid in zip(dims, grids):
            if len(grid) != dim.size or any(len(row) != len(answers) for row in grid):
                raise ElicitationProtocolError(
                    f"answer label grid for {dim.id!r} must be {dim.size} x {len(answers)}"
                )
            tables.append(build_dim_table("__answers__", "__answers__", dim, grid, self.label_map))
        return tables

    # -- the loop ---------------------------------------------------------

    def step(self) -> str:
        """One loop iteration; returns "awaiting-answer", "expanded", or "terminal"."""
        s = self.state
        if s.status != RUNNING:
            raise SessionStateError(f"session is {s.status}, not running")
        if self.pending is not None:
            raise SessionStateError("an ask is pending; submit its answer first")

        verdict = check_convergence(s, self.config)
        if verdict != RUNNING:
            self._finalize(verdict)
            return TERMINAL

        selected = select_pair(s.belief, s.kernels, s.asked)
        cap_reached = s.space.total_states * 2 > self.config.state_cap
        if selected is None:
            if cap_reached:
                self._finalize(EXPAND_CAPPED)
                return TERMINAL
            i_star = 0.0
        else:
            i_star = selected[1]

        gap = entropy_gap(s.belief, self.config.alpha)
        if selected is None or should_expand(
            gap, i_star, self.config.lambda_, self.config.T, s.t
        ):
            if cap_reached:
                self._finalize(EXPAND_CAPPED)
                return TERMINAL
            try:
                self._expand()
            except ExpansionRefused:
                self._finalize(EXPAND_CAPPED)
                return TERMINAL
            except BalarError as exc:
                self._log_error("expand", exc)
                raise
            return EXPANDED

        pair, mi = selected
        question = next(q for q in s.questions if q.id == pair.question_id)
        self.pending = PendingAsk(pair, question, s.t)
        self.transcript.append(
            "ask",
            t=s.t,
            payload={
                "question_id": pair.question_id,
                "user_id": pair.user_id,
                "question_text": question.text,
                "mi": mi,
            },
        )
        return AWAITING_ANSWER

    def submit_answer(self, answer_text: str) -> None:
        """Soft-map the free-form answer, update the belief, close the round."""
        s = self.state
        if s.status != RUNNING:
            raise SessionStateError(f"session is {s.status}, not running")
        if self.pending is None:
            raise SessionStateError("no ask is pending")
        pair, question = self.pending.pair, self.pending.question

        try:
            labels = self.elicitor.soft_map_labels(answer_text, question)
            obs = soft_observation(question, labels, self.label_map)
        except BalarError as exc:
            self._log_error("soft_map_labels", exc)
            raise  # pending is retained so the answer can be retried

        kernel = s.kernel_map[pair]
        lhat = effective_likelihood(kernel, obs)
        pre = entropy(s.belief)
        degenerate = False
        try:
            new_belief = bayes_update(s.belief, lhat)
        except DegenerateObservationError:
            new_belief = s.belief  # update rejected; round still consumed
            degenerate = True
        post = entropy(new_belief)

        s.history.append(
            HistoryEntry(
                t=s.t,
                pair=pair,
                question_text=question.text,
                answer_text=answer_text,
                omega=tuple(float(w) for w in obs.weights),
                pre_entropy=pre,
                post_entropy=post,
            )
        )
        self.transcript.append(
            "update",
            t=s.t,
            payload={
                "question_id": pair.question_id,
                "user_id": pair.user_id,
                "answer_text": answer_text,
                "omega": list(obs.weights),
                "pre_entropy": pre,
                "post_entropy": post,
                "degenerate": degenerate,
            },
        )
        s.belief = new_belief
        s.asked.add(pair)
        s.n_asked += 1
        s.t += 1
        self.pending = None

    def force_expand(self) -> None:
        """Manual expansion; respects the state cap like the automatic path."""
        s = self.state
        if s.status != RUNNING:
            raise SessionStateError(f"session is {s.status}, not running")
        if s.space.total_states * 2 > self.config.state_cap:
            raise ExpansionRefused(
                f"no headroom under the state cap of {self.config.state_cap}"
            )
        try:
            self._expand(manual=True)
        except ExpansionRefused:
            raise
        except BalarError as exc:
            self._log_error("expand", exc)
            raise

    # -- expansion (6 steps, committed atomically) -------------------------

    def _expand(self, manual: bool = False) -> None:
        s = self.state
        cfg = self.config
        prompt, context = s.instance.prompt, s.instance.context
        history = tuple(s.history)

        # 1. new dimension, conditioned on history
        proposal = self.elicitor.propose_new_dimension(prompt, context, history)
        new_dim = self._make_dimension(s.space.n_dims, proposal)

        # 2. its prior, conditioned on history
        (new_prior,) = self._elicit_priors(prompt, context, [new_dim], history)

        # 3. outer-product belief extension (may refuse on the cap)
        pre_entropy_value = entropy(s.belief)
        new_belief = extend_belief(s.belief, new_dim, new_prior, state_cap=cfg.state_cap)
        new_space = new_belief.space

        # 4. tables for every existing (question, user) over the new dimension
        existing_pairs = [(q, u) for q in s.questions for u in s.instance.users]
        calls = [
            lambda q=q, u=u: self.elicitor.fill_likelihood_labels(
                prompt, context, q, u, new_dim, history
            )
            for q, u in existing_pairs
        ]
        grids = dispatch_parallel(calls, self._max_concurrent)
        new_tables = dict(s.dim_tables)
        for (q, u), grid in zip(existing_pairs, grids):
            self._check_grid(grid, new_dim, q)
            new_tables[(q.id, u, new_dim.id)] = build_dim_table(
                q.id, u, new_dim, grid, self.label_map
            )

        # 5. new questions targeting the new dimension and the most uncertain dims
        by_entropy = sorted(
            s.space.dims,
            key=lambda d: -_marginal_entropy(s.belief, d.id),
        )
        top_dims = by_entropy[: cfg.top_entropy_dims_for_expand]
        q_payloads = self.elicitor.generate_expanded_questions(
            prompt, context, history, new_dim, top_dims, cfg.max_new_questions_per_expand
        )
        if len(q_payloads) > cfg.max_new_questions_per_expand:
            raise ElicitationProtocolError(
                f"expansion returned {len(q_payloads)} questions; "
                f"cap is {cfg.max_new_questions_per_expand}"
            )
        base = len(s.questions)
        new_questions = [self._make_question(base + i, p) for i, p in enumerate(q_payloads)]

        # 6. tables for the new questions over every dimension, then rebuild kernels
        all_dims = list(new_space.dims)
        new_q_tables = self._elicit_tables(
            prompt, context, new_questions, s.instance.users, all_dims, history
        )
        new_tables.update(new_q_tables)

        answer_kernel = s.answer_kernel
        answer_tables = list(s.answer_tables)
        if s.instance.answer_set:
            grid = self.elicitor.fill_answer_likelihood_labels(
                prompt, context, new_dim, s.instance.answer_set
            )
            if len(grid) != new_dim.size or any(
                len(row) != len(s.instance.answer_set) for row in grid
            ):
                raise ElicitationProtocolError(
                    f"answer label grid for {new_dim.id!r} has the wrong shape"
                )
            answer_tables.append(
                build_dim_table("__answers__", "__answers__", new_dim, grid, self.label_map)
            )
            answer_kernel = build_answer_kernel(s.instance.answer_set, answer_tables, new_space)

        questions = s.questions + new_questions
        kernels = self._build_kernels(
            questions, s.instance.users, all_dims, new_tables, new_space
        )

        # commit: nothing above mutated the session, so failures roll back for free
        s.space = new_space
        s.belief = new_belief
        s.questions = questions
        s.kernels = kernels
        s.dim_tables = new_tables
        s.answer_kernel = answer_kernel
        s.answer_tables = answer_tables
        self.transcript.append(
            "expand",
            t=s.t,
            payload={
                "dimension": _dim_payload(new_dim),
                "prior": list(new_prior.probs),
                "new_questions": [_question_payload(q) for q in new_questions],
                "pre_entropy": pre_entropy_value,
                "post_entropy": entropy(new_belief),
                "manual": manual,
            },
        )
        s.t += 1

    # -- termination -------------------------------------------------------

    def _finalize(self, status: str) -> None:
        s = self.state
        if s.status != RUNNING:
            raise SessionStateError("session already terminal")
        s.status = status
        self.transcript.append(
            "converge",
            t=s.t,
            payload={"status": status, "t": s.t, "n_asked": s.n_asked},
        )
        assignment = map_state(s.belief)
        summary = format_map_summary(s.space, assignment, self.summary_template)
        try:
            answer = self.elicitor.final_answer(
                s.instance.prompt,
                s.instance.context,
                tuple(s.history),
                summary,
                s.instance.answer_set,
            )
        except BalarError as exc:
            self._log_error("final_answer", exc)
            raise
        self.final_answer = answer
        self.transcript.append(
            "final-answer",
            t=s.t,
            payload={"map_state": assignment, "summary": summary, "answer": answer},
        )

    def _log_error(self, phase: str, exc: BalarError) -> None:
        self.transcript.append(
            "error",
            t=self.state.t if hasattr(self, "state") else 0,
            payload={
                "phase": phase,
                "call_kind": getattr(exc, "call_kind", None),
                "message": str(exc),
            },
        )

    # -- derived quantities --------------------------------------------------

    def ranking(self):
        s = self.state
        return mi_ranking(s.belief, s.kernels, s.asked, s.t)

    def min_rounds_estimate(self) -> int | None:
        s = self.state
        gap = entropy_gap(s.belief, self.config.alpha)
        top = self.ranking().top()
        return min_rounds(gap, top[1] if top else 0.0)


def _marginal_entropy(belief: Belief, dim_id: str) -> float:
    p = marginal(belief, dim_id)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def _dim_payload(dim: Dimension) -> dict:
    return {"id": dim.id, "name": dim.name, "values": [list(v) for v in dim.values]}


def _question_payload(q: Question) -> dict:
    return {"id": q.id, "text": q.text, "choices": [list(c) for c in q.choices]}


Answerer = Callable[[Question, str], str]


def run_session(
    instance: Instance,
    elicitor: Elicitor,
    answerer: Answerer,
    config: LoopConfig | None = None,
    label_map: LabelMap | None = None,
) -> tuple[str, Transcript]:
    """Run the loop to completion, sourcing answers from `answerer`."""
    session = Session(instance, elicitor, config, label_map)
    while True:
        outcome = session.step()
        if outcome == AWAITING_ANSWER:
            pending = session.pending
            assert pending is not None
            answer = answerer(pending.question, pending.pair.user_id)
            session.submit_answer(answer)
        elif outcome == EXPANDED:
            continue
        else:
            break
    assert session.final_answer is not None
    return session.final_answer, session.transcript
