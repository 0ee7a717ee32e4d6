"""Read-only projections of session state for the HTTP API.

Views are derived purely from the session snapshot; every quantity is
recomputed through the engine modules, so the API can never drift from
direct computation. Probabilities cross the wire as decimal floats,
never as log masses.
"""

from __future__ import annotations

from ..belief import entropy, marginal
from ..likelihood import answer_probabilities
from ..loop import entropy_gap, target_entropy
from ..session import Session

RANKING_LIMIT = 20


def build_session_view(session: Session, session_id: str, full_ranking: bool = False) -> dict:
    state = session.state
    cfg = session.config
    ranking = session.ranking()
    entries = ranking.entries if full_ranking else ranking.entries[:RANKING_LIMIT]

    dimensions = []
    for dim in state.space.dims:
        probs = marginal(state.belief, dim.id)
        dimensions.append(
            {
                "id": dim.id,
                "name": dim.name,
                "values": [
                    {"id": vid, "text": text, "probability": float(p)}
                    for (vid, text), p in zip(dim.values, probs)
                ],
                "max_probability": float(probs.max()),
            }
        )

    pending = None
    if session.pending is not None:
        q = session.pending.question
        pending = {
            "question_id": session.pending.pair.question_id,
            "user_id": session.pending.pair.user_id,
            "question_text": q.text,
            "choices": [{"id": cid, "text": text} for cid, text in q.choices],
            "issued_at": session.pending.issued_at,
        }

    answer_probs = None
    if state.answer_kernel is not None:
        probs = answer_probabilities(state.belief, state.answer_kernel)
        answer_probs = {
            aid: float(p) for aid, p in zip(state.answer_kernel.answer_ids, probs)
        }

    return {
        "session_id": session_id,
        "status": state.status,
        "t": state.t,
        "n_asked": state.n_asked,
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "entropy": entropy(state.belief),
        "target_entropy": target_entropy(cfg.alpha, state.space.total_states),
        "entropy_gap": entropy_gap(state.belief, cfg.alpha),
        "min_rounds": session.min_rounds_estimate(),
        "total_states": state.space.total_states,
        "state_cap": cfg.state_cap,
        "expand_capped": state.space.total_states * 2 > cfg.state_cap,
        "dimensions": dimensions,
        "mi_ranking": [
            {"question_id": pair.question_id, "user_id": pair.user_id, "mi": float(mi)}
            for pair, mi in entries
        ],
        "pending": pending,
        "answer_probabilities": answer_probs,
        "history_length": len(state.history),
        "final_answer": session.final_answer,
    }
