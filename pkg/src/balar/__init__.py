"""Bayesian agentic loop for active reasoning.

Maintains a factored categorical belief over latent states, selects
clarifying questions by mutual information, performs soft Bayesian updates
from free-form answers, and expands its state space when the entropy gap
cannot be closed within the remaining budget.
"""

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
from .config import Instance, LoopConfig, load_config
from .labels import LabelMap, labels_to_distribution
from .likelihood import (
    AnswerKernel,
    DimLikelihoodTable,
    QuestionKernel,
    SoftObservation,
    answer_probabilities,
    bayes_update,
    build_answer_kernel,
    build_dim_table,
    build_question_kernel,
    effective_likelihood,
    soft_observation,
)
from .loop import entropy_gap, min_rounds, should_expand, target_entropy
from .selection import MiRanking, PairId, mi_ranking, mutual_information, posterior_given, predictive, select_pair
from .session import (
    AWAITING_ANSWER,
    BUDGET_EXHAUSTED,
    CONVERGED_ANSWER,
    CONVERGED_MARGINAL,
    EXPAND_CAPPED,
    EXPANDED,
    RUNNING,
    TERMINAL,
    PendingAsk,
    Session,
    SessionState,
    check_convergence,
    format_map_summary,
    run_session,
)
from .state import Dimension, Question, StateSpace
from .transcript import HistoryEntry, Transcript, cumulative_info_gain

__version__ = "0.1.0"

__all__ = [
    "AWAITING_ANSWER",
    "AnswerKernel",
    "BUDGET_EXHAUSTED",
    "Belief",
    "CONVERGED_ANSWER",
    "CONVERGED_MARGINAL",
    "Dimension",
    "DimLikelihoodTable",
    "EXPANDED",
    "EXPAND_CAPPED",
    "HistoryEntry",
    "Instance",
    "LabelMap",
    "LoopConfig",
    "MiRanking",
    "PairId",
    "PendingAsk",
    "PriorVector",
    "Question",
    "QuestionKernel",
    "RUNNING",
    "Session",
    "SessionState",
    "SoftObservation",
    "StateSpace",
    "TERMINAL",
    "Transcript",
    "answer_probabilities",
    "bayes_update",
    "build_answer_kernel",
    "build_dim_table",
    "build_question_kernel",
    "check_convergence",
    "cumulative_info_gain",
    "effective_likelihood",
    "entropy",
    "entropy_gap",
    "extend_belief",
    "format_map_summary",
    "init_belief",
    "labels_to_distribution",
    "load_config",
    "map_state",
    "marginal",
    "mi_ranking",
    "min_rounds",
    "mutual_information",
    "posterior_given",
    "predictive",
    "prior_from_labels",
    "run_session",
    "select_pair",
    "should_expand",
    "soft_observation",
    "target_entropy",
]
