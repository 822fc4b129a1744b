import time

import pytest
from fastapi.testclient import TestClient

from regval.service import create_app
from tests.conftest import DATE_CONDITIONAL, DATE_INVALID, DATE_VALID

DATE_RESULT_CONDITIONS = {"$0 <= 31", "$0 >= 1", "$1 <= 12", "$1 >= 1"}


@pytest.fixture
def client():
    return TestClient(create_app())


def wait_for(client, sid, states, budget=120.0):
    deadline = time.monotonic() + budget
    while time.monotonic() < deadline:
        body = client.get(f"/api/sessions/{sid}").json()
        if body["state"] in states:
            return body
        time.sleep(0.05)
    raise AssertionError(f"session never reached {states}")


def drive_to_completion(client, sid, answer_fn, budget=180.0):
    deadline = time.monotonic() + budget
    while time.monotonic() < deadline:
        body = wait_for(client, sid, ("awaiting_answer", "done", "failed"), budget)
        if body["state"] in ("done", "failed"):
            return body
        question = body["question"]
        response = client.post(
            f"/api/sessions/{sid}/answer", json={"valid": answer_fn(question)}
        )
        assert response.status_code == 204
    raise AssertionError("session did not finish in time")


def date_answerer(question):
    import re

    text, phase = question["text"], question["phase"]
    if not re.fullmatch(r"[0-9]{2}/[0-9]{2}/[0-9]{4}", text):
        return False
    if phase == "regex":
        return True
    day, month = int(text[0:2]), int(text[3:5])
    return 1 <= day <= 31 and 1 <= month <= 12


def test_session_lifecycle_and_result(client):
    response = client.post(
        "/api/sessions",
        json={
            "valid": list(DATE_VALID),
            "invalid": list(DATE_INVALID),
            "conditional_invalid": list(DATE_CONDITIONAL),
        },
    )
    assert response.status_code == 201
    sid = response.json()["id"]

    body = drive_to_completion(client, sid, date_answerer)
    assert body["state"] == "done"
    assert set(body["result"]["conditions"]) == DATE_RESULT_CONDITIONS
    import re

    # the emitted regex may use {2} or expanded form; check the language shape
    assert re.fullmatch(r"[0-9]{2}/[0-9]{2}/[0-9]{4}", "19/08/1996")
    assert body["result"]["regex"].count("(") >= 2
    assert body["stats"]["questions"] >= 1


def test_polling_is_read_only(client):
    response = client.post(
        "/api/sessions",
        json={"valid": list(DATE_VALID), "invalid": list(DATE_INVALID)},
    )
    sid = response.json()["id"]
    body = wait_for(client, sid, ("awaiting_answer", "done"))
    for _ in range(3):
        again = client.get(f"/api/sessions/{sid}").json()
        assert again["state"] == body["state"]
        assert again["question"] == body["question"]
    drive_to_completion(client, sid, date_answerer)


def test_create_session_empty_valid_is_400(client):
    response = client.post("/api/sessions", json={"valid": []})
    assert response.status_code == 400


def test_create_session_cap_503():
    client = TestClient(create_app(session_cap=2))
    payload = {"valid": ["a"], "invalid": ["b"]}
    ids = [client.post("/api/sessions", json=payload) for _ in range(2)]
    assert all(r.status_code == 201 for r in ids)
    third = client.post("/api/sessions", json=payload)
    assert third.status_code == 503


def test_unknown_session_404(client):
    assert client.get("/api/sessions/nope").status_code == 404
    assert client.post("/api/sessions/nope/answer", json={"valid": True}).status_code == 404


NO_QUESTIONS = {"options": {"question_cap": 0}}


def test_answer_without_pending_question_409(client):
    response = client.post(
        "/api/sessions", json={"valid": ["a"], "invalid": ["b"], **NO_QUESTIONS}
    )
    sid = response.json()["id"]
    wait_for(client, sid, ("done",))
    answer = client.post(f"/api/sessions/{sid}/answer", json={"valid": True})
    assert answer.status_code == 409


def test_answer_malformed_body_400(client):
    response = client.post(
        "/api/sessions", json={"valid": ["a"], "invalid": ["b"], **NO_QUESTIONS}
    )
    sid = response.json()["id"]
    wait_for(client, sid, ("done",))
    bad = client.post(f"/api/sessions/{sid}/answer", json={"valid": "maybe"})
    assert bad.status_code == 400


def test_eval_endpoint_date_cases(client):
    payload = {
        "regex": "([0-9]{2})/([0-9]{2})/[0-9]{4}",
        "conditions": ["$0 <= 31", "$0 >= 1", "$1 <= 12", "$1 >= 1"],
    }
    ok = client.post("/api/eval", json={**payload, "input": "19/08/1996"}).json()
    assert ok == {"matches": True, "captures": [19, 8], "satisfies_conditions": True}
    bad_value = client.post("/api/eval", json={**payload, "input": "33/08/1996"}).json()
    assert bad_value == {"matches": True, "captures": [33, 8], "satisfies_conditions": False}
    no_match = client.post("/api/eval", json={**payload, "input": "19-08-1996"}).json()
    assert no_match == {"matches": False, "captures": None, "satisfies_conditions": None}


def test_eval_unparseable_regex_400(client):
    response = client.post("/api/eval", json={"regex": "([0-9]", "input": "x"})
    assert response.status_code == 400
    missing_group = client.post(
        "/api/eval",
        json={"regex": "[0-9]{2}", "conditions": ["$0 <= 31"], "input": "19"},
    )
    assert missing_group.status_code == 400


def test_completed_session_result_validates(client):
    response = client.post(
        "/api/sessions",
        json={"valid": list(DATE_VALID), "invalid": list(DATE_INVALID)},
    )
    sid = response.json()["id"]
    body = drive_to_completion(client, sid, date_answerer)
    assert body["state"] == "done"
    # the service's /api/eval agrees with the returned validation
    for s in DATE_VALID:
        out = client.post(
            "/api/eval",
            json={"regex": body["result"]["regex"], "conditions": body["result"]["conditions"], "input": s},
        ).json()
        assert out["matches"] is True
    for s in DATE_INVALID:
        out = client.post(
            "/api/eval",
            json={"regex": body["result"]["regex"], "conditions": body["result"]["conditions"], "input": s},
        ).json()
        assert out["matches"] is False
