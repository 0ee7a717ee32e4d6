from __future__ import annotations

import json
import shutil
import threading

import pytest
from fastapi.testclient import TestClient

from balar import entropy, entropy_gap, mutual_information
from balar.service import create_app
from conftest import FIXTURES_DIR
from fixture_builders import synthetic_fixture


@pytest.fixture
def fixtures_dir(tmp_path):
    shutil.copy(FIXTURES_DIR / "medical.json", tmp_path / "medical.json")
    synth = synthetic_fixture(p=1, n=2, q_count=2)
    (tmp_path / "synth.json").write_text(json.dumps(synth))
    return tmp_path


@pytest.fixture
def client(fixtures_dir):
    with TestClient(create_app(fixtures_dir=fixtures_dir)) as c:
        yield c


def _create_medical(client) -> str:
    fixture = json.loads((FIXTURES_DIR / "medical.json").read_text())
    response = client.post(
        "/sessions",
        json={"instance": fixture["instance"], "elicitor": "scripted:medical"},
    )
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_create_session_medical_view(client):
    sid = _create_medical(client)
    view = client.get(f"/sessions/{sid}").json()
    assert view["status"] == "running"
    assert view["total_states"] == 6
    assert view["entropy"] == pytest.approx(1.63639422640161, abs=1e-9)
    assert view["t"] == 1 and view["n_asked"] == 0
    assert len(view["dimensions"]) == 2
    for dim in view["dimensions"]:
        total = sum(v["probability"] for v in dim["values"])
        assert total == pytest.approx(1.0, abs=1e-9)
    assert view["pending"] is None
    assert view["final_answer"] is None


def test_create_session_empty_prompt_422(client):
    response = client.post(
        "/sessions",
        json={"instance": {"prompt": "  "}, "elicitor": "scripted:medical"},
    )
    assert response.status_code == 422


def test_create_session_unknown_fixture_422(client):
    response = client.post(
        "/sessions", json={"instance": {"prompt": "x"}, "elicitor": "scripted:nope"}
    )
    assert response.status_code == 422


def test_create_session_missing_entry_502_names_triple(client, fixtures_dir):
    broken = synthetic_fixture(p=2, n=2, q_count=1)
    del broken["likelihood_labels"]["q1/u1/d2"]
    (fixtures_dir / "broken.json").write_text(json.dumps(broken))
    response = client.post(
        "/sessions",
        json={"instance": broken["instance"], "elicitor": "scripted:broken"},
    )
    assert response.status_code == 502
    detail = response.json()["detail"]
    assert detail["call_kind"] == "fill_likelihood_labels"
    assert "q1/u1/d2" in detail["message"]


def test_step_issues_pending_question(client):
    sid = _create_medical(client)
    view = client.post(f"/sessions/{sid}/step").json()
    assert view["pending"] is not None
    assert view["pending"]["question_id"] == "q2"
    assert "episodes" in view["pending"]["question_text"]
    assert view["pending"]["choices"]  # internal choices are in the API view


def test_step_while_pending_409(client):
    sid = _create_medical(client)
    client.post(f"/sessions/{sid}/step")
    response = client.post(f"/sessions/{sid}/step")
    assert response.status_code == 409


def test_answer_without_pending_409(client):
    sid = _create_medical(client)
    response = client.post(f"/sessions/{sid}/answer", json={"text": "hello"})
    assert response.status_code == 409


def test_unknown_session_404(client):
    assert client.get("/sessions/zzz").status_code == 404
    assert client.post("/sessions/zzz/step").status_code == 404
    assert client.get("/sessions/zzz/transcript").status_code == 404


def test_answer_updates_belief_and_clears_pending(client):
    sid = _create_medical(client)
    before = client.post(f"/sessions/{sid}/step").json()
    answer = "They come in episodes, maybe a few times a month."
    after = client.post(f"/sessions/{sid}/answer", json={"text": answer}).json()
    assert after["pending"] is None
    assert after["n_asked"] == 1
    assert after["history_length"] == 1
    assert after["entropy"] < before["entropy"]


def test_soft_map_wildcard_neutral_leaves_entropy_unchanged(client):
    sid = _create_medical(client)
    before = client.post(f"/sessions/{sid}/step").json()
    after = client.post(f"/sessions/{sid}/answer", json={"text": "mumble mumble"}).json()
    # the medical fixture soft-maps unknown text to all-neutral
    assert after["entropy"] == pytest.approx(before["entropy"], abs=1e-12)


def test_full_interactive_session_to_terminal(client):
    fixture = json.loads((FIXTURES_DIR / "medical.json").read_text())
    sid = _create_medical(client)
    answers = fixture["user_answers"]
    for _ in range(20):
        view = client.get(f"/sessions/{sid}").json()
        if view["status"] != "running":
            break
        view = client.post(f"/sessions/{sid}/step").json()
        if view["pending"]:
            key = f"{view['pending']['question_id']}/{view['pending']['user_id']}"
            client.post(f"/sessions/{sid}/answer", json={"text": answers[key]})
    view = client.get(f"/sessions/{sid}").json()
    assert view["status"] == "converged-marginal"
    assert "migraine" in view["final_answer"].lower()
    assert len(view["dimensions"]) == 3  # the expand added the aura dimension

    events = client.get(f"/sessions/{sid}/transcript").json()["events"]
    kinds = [e["kind"] for e in events]
    assert kinds[0] == "init"
    assert kinds[-1] == "final-answer"
    assert "expand" in kinds
    final = events[-1]["payload"]
    assert final["map_state"] == {"d1": "v1", "d2": "v1", "d3": "v2"}


def test_transcript_fresh_session_has_init_only(client):
    sid = _create_medical(client)
    events = client.get(f"/sessions/{sid}/transcript").json()["events"]
    assert [e["kind"] for e in events] == ["init"]


def test_transcript_one_ask_answer_appends_ask_and_update(client):
    sid = _create_medical(client)
    client.post(f"/sessions/{sid}/step")
    client.post(
        f"/sessions/{sid}/answer",
        json={"text": "They come in episodes, maybe a few times a month."},
    )
    events = client.get(f"/sessions/{sid}/transcript").json()["events"]
    assert [e["kind"] for e in events] == ["init", "ask", "update"]


def test_step_on_terminal_409_with_status(client, fixtures_dir):
    response = client.post(
        "/sessions",
        json={
            "instance": json.loads((fixtures_dir / "synth.json").read_text())["instance"],
            "config": {"alpha": 0.0, "T_ask": 0},
            "elicitor": "scripted:synth",
        },
    )
    sid = response.json()["session_id"]
    first = client.post(f"/sessions/{sid}/step")
    assert first.status_code == 200
    assert first.json()["status"] == "budget-exhausted"
    second = client.post(f"/sessions/{sid}/step")
    assert second.status_code == 409
    assert second.json()["detail"]["status"] == "budget-exhausted"


def test_view_quantities_match_engine_computation(client):
    sid = _create_medical(client)
    view = client.get(f"/sessions/{sid}", params={"full_ranking": True}).json()
    # rebuild the same session through the engine and compare
    from balar import Instance, LoopConfig, Session
    from balar.elicitation import ScriptedOracle, load_fixture

    fixture = load_fixture(FIXTURES_DIR / "medical.json")
    session = Session(
        Instance.from_dict(fixture["instance"]),
        ScriptedOracle(fixture),
        LoopConfig.from_dict(fixture["config"]),
    )
    assert view["entropy"] == pytest.approx(entropy(session.state.belief), abs=1e-9)
    assert view["entropy_gap"] == pytest.approx(
        entropy_gap(session.state.belief, session.config.alpha), abs=1e-9
    )
    engine_mi = {
        (pair.question_id, pair.user_id): mutual_information(session.state.belief, kernel)
        for pair, kernel in session.state.kernels
    }
    for row in view["mi_ranking"]:
        assert row["mi"] == pytest.approx(
            engine_mi[(row["question_id"], row["user_id"])], abs=1e-9
        )


def test_idempotent_reads(client):
    sid = _create_medical(client)
    a = client.get(f"/sessions/{sid}").json()
    b = client.get(f"/sessions/{sid}").json()
    assert a == b


def test_manual_expand_grows_dimensions_and_raises_entropy(client):
    sid = _create_medical(client)
    before = client.get(f"/sessions/{sid}").json()
    view = client.post(f"/sessions/{sid}/expand").json()
    assert len(view["dimensions"]) == 3
    # entropy rises by the new prior's entropy: (0.2, 0.8) -> ~0.5004
    assert view["entropy"] - before["entropy"] == pytest.approx(0.5004024235381879, abs=1e-9)


def test_manual_expand_respects_cap(client, fixtures_dir):
    fixture = synthetic_fixture(p=2, n=2, q_count=1)
    (fixtures_dir / "capped.json").write_text(json.dumps(fixture))
    response = client.post(
        "/sessions",
        json={
            "instance": fixture["instance"],
            "config": {"alpha": 0.0, "state_cap": 4},
            "elicitor": "scripted:capped",
        },
    )
    sid = response.json()["session_id"]
    result = client.post(f"/sessions/{sid}/expand")
    assert result.status_code == 409
    assert "cap" in result.json()["detail"]["message"]


def test_concurrent_mutations_exactly_one_wins(client):
    sid = _create_medical(client)
    results = []
    barrier = threading.Barrier(2)

    def hit():
        barrier.wait()
        results.append(client.post(f"/sessions/{sid}/step").status_code)

    threads = [threading.Thread(target=hit) for _ in range(2)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == [200, 409] or results == [200, 409][::-1] or set(results) == {200, 409}
    view = client.get(f"/sessions/{sid}").json()
    assert view["pending"] is not None  # never a torn state


def test_transcript_write_through(tmp_path, fixtures_dir):
    transcripts = tmp_path / "tx"
    transcripts.mkdir()
    with TestClient(create_app(fixtures_dir=fixtures_dir, transcript_dir=transcripts)) as client:
        sid = _create_medical(client)
        client.post(f"/sessions/{sid}/step")
        path = transcripts / f"{sid}.jsonl"
        assert path.exists()
        lines = path.read_text().strip().splitlines()
        assert json.loads(lines[0])["kind"] == "init"
        assert json.loads(lines[-1])["kind"] == "ask"
