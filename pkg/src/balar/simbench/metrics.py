"""Analysis metrics: the equivalence combinator and round-count histograms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..errors import ConfigError
from ..transcript import Transcript, ask_expand_counts

ENTAILMENT = "entailment"
NEUTRAL = "neutral"
CONTRADICTION = "contradiction"
ENTAILMENT_LABELS = (ENTAILMENT, NEUTRAL, CONTRADICTION)


def semantic_equivalence(e_fwd: str, e_bwd: str) -> bool:
    """Bidirectional-entailment verdict.

    Equivalent iff neither direction is a contradiction and the pair is not
    jointly neutral.
    """
    for label in (e_fwd, e_bwd):
        if label not in ENTAILMENT_LABELS:
            raise ConfigError(
                f"unknown entailment label {label!r}; expected one of {ENTAILMENT_LABELS}"
            )
    if CONTRADICTION in (e_fwd, e_bwd):
        return False
    return (e_fwd, e_bwd) != (NEUTRAL, NEUTRAL)


@dataclass(frozen=True)
class RoundHistograms:
    """Normalized distributions of ask and expand counts across sessions."""

    ask: dict[int, float]
    expand: dict[int, float]
    t_ask_marker: int
    sessions: int


def round_histograms(transcripts: Iterable[Transcript], t_ask: int) -> RoundHistograms:
    transcripts = list(transcripts)
    if not transcripts:
        raise ConfigError("need at least one transcript")
    ask_counts: dict[int, int] = {}
    expand_counts: dict[int, int] = {}
    for t in transcripts:
        asks, expands = ask_expand_counts(t)
        ask_counts[asks] = ask_counts.get(asks, 0) + 1
        expand_counts[expands] = expand_counts.get(expands, 0) + 1
    total = len(transcripts)
    return RoundHistograms(
        ask={k: v / total for k, v in sorted(ask_counts.items())},
        expand={k: v / total for k, v in sorted(expand_counts.items())},
        t_ask_marker=t_ask,
        sessions=total,
    )
