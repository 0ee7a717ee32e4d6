from .compare import ArmSummary, BenchConfig, BenchReport, PolicySpec, run_policy_comparison
from .metrics import ENTAILMENT_LABELS, RoundHistograms, round_histograms, semantic_equivalence
from .optimal import greedy_adaptive_gain, optimal_adaptive_gain
from .synthetic import SyntheticInstance, generate_instance, simulate_answer
from .verify import (
    LemmaReport,
    TheoremReport,
    check_lemma_monotonicity,
    check_theorem_bound,
    expected_mi_after,
    theorem_corpus,
)

__all__ = [
    "ArmSummary",
    "BenchConfig",
    "BenchReport",
    "ENTAILMENT_LABELS",
    "LemmaReport",
    "PolicySpec",
    "RoundHistograms",
    "SyntheticInstance",
    "TheoremReport",
    "check_lemma_monotonicity",
    "check_theorem_bound",
    "expected_mi_after",
    "generate_instance",
    "greedy_adaptive_gain",
    "optimal_adaptive_gain",
    "round_histograms",
    "run_policy_comparison",
    "semantic_equivalence",
    "simulate_answer",
    "theorem_corpus",
]
