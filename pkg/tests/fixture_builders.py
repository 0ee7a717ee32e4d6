"""Programmatic scripted-oracle fixtures for engine and audit tests.

Questions are informative about one dimension each (rotating target), other
dimensions stay neutral, so MI-greedy sessions ask deterministically and
never expand early; expansion is forced by exhausting the question bank.
"""

from __future__ import annotations


def _question_entry(n_choices: int) -> dict:
    return {
        "text": "synthetic question",
        "choices": [f"choice {i + 1}" for i in range(n_choices)],
    }


def _target_grid(n_values: int, n_choices: int) -> list[list[str]]:
    grid = []
    for k in range(n_values):
        row = ["unlikely"] * n_choices
        row[k % n_choices] = "likely"
        grid.append(row)
    return grid


def _neutral_grid(n_values: int, n_choices: int) -> list[list[str]]:
    return [["neutral"] * n_choices for _ in range(n_values)]


def synthetic_fixture(
    p: int,
    n: int,
    q_count: int,
    u_count: int = 1,
    has_answers: bool = False,
    n_choices: int = 2,
    expand_rounds: int = 0,
    q_new: int = 0,
    n_answers: int = 2,
) -> dict:
    """Self-consistent fixture covering `expand_rounds` forced expansions.

    Dimension ids run d1..d{p+expand_rounds} (every dimension has n values),
    question ids q1..q{q_count + expand_rounds * q_new}, users u1..u{u_count}.
    """
    users = [f"u{i + 1}" for i in range(u_count)]
    total_dims = p + expand_rounds
    total_questions = q_count + expand_rounds * q_new

    fixture: dict = {
        "schema_version": 1,
        "name": "synthetic",
        "unmatched_policy": "error",
        "instance": {
            "prompt": "synthetic prompt",
            "context": "",
            "users": users,
            "num_dims": p,
            "num_questions": q_count,
            "answer_set": [f"answer {i + 1}" for i in range(n_answers)] if has_answers else None,
        },
        "dimensions": [
            {"name": f"dim {j + 1}", "values": [f"value {k + 1}" for k in range(n)]}
            for j in range(p)
        ],
        "questions": [_question_entry(n_choices) for _ in range(q_count)],
        "new_dimensions": [
            {"name": f"dim {p + e + 1}", "values": [f"value {k + 1}" for k in range(n)]}
            for e in range(expand_rounds)
        ],
        "expanded_questions": [
            [_question_entry(n_choices) for _ in range(q_new)] for _ in range(expand_rounds)
        ],
        "final_answer": "synthetic final answer",
    }

    fixture["prior_labels"] = {
        f"d{j + 1}/v{k + 1}": "neutral" for j in range(total_dims) for k in range(n)
    }

    likelihood: dict[str, list[list[str]]] = {}
    for qi in range(total_questions):
        target = qi % total_dims
        for u in users:
            for j in range(total_dims):
                grid = _target_grid(n, n_choices) if j == target else _neutral_grid(n, n_choices)
                likelihood[f"q{qi + 1}/{u}/d{j + 1}"] = grid
    fixture["likelihood_labels"] = likelihood

    fixture["user_answers"] = {
        f"q{qi + 1}/{u}": "a synthetic free-form answer"
        for qi in range(total_questions)
        for u in users
    }
    fixture["soft_map"] = {
        f"q{qi + 1}": {"*": ["likely"] + ["unlikely"] * (n_choices - 1)}
        for qi in range(total_questions)
    }

    if has_answers:
        fixture["answer_likelihood_labels"] = {
            f"d{j + 1}": _neutral_grid(n, n_answers) for j in range(total_dims)
        }

    return fixture
