"""HTTP endpoints: payload handling, domain outcomes, error mapping."""

import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from usdlocc.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def vec(amps):
    return [[complex(a).real, complex(a).imag] for a in amps]


def same_basis_spec(theta0, theta1, prior0=0.5):
    return {"family": "same-basis", "theta0": theta0, "theta1": theta1, "prior0": prior0}


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


def test_schmidt_bell_state(client):
    s = 1 / np.sqrt(2)
    resp = client.post("/schmidt", json={"state": vec([s, 0, 0, s])})
    assert resp.status_code == 200
    body = resp.json()
    assert body["lam"] == pytest.approx([0.5, 0.5], abs=1e-12)
    assert body["degenerate"] is True
    assert len(body["basis_a"]) == 2 and len(body["basis_b"]) == 2


def test_schmidt_rejects_zero_state(client):
    resp = client.post("/schmidt", json={"state": vec([0, 0, 0, 0])})
    assert resp.status_code == 400
    assert "detail" in resp.json()


def test_idp_family_and_explicit_agree(client):
    theta1 = 0.9
    theta0 = np.pi / 2 - theta1
    by_family = client.post("/idp", json=same_basis_spec(theta0, theta1)).json()
    psi0 = [np.cos(theta0), 0, 0, np.sin(theta0)]
    psi1 = [np.cos(theta1), 0, 0, np.sin(theta1)]
    explicit = client.post(
        "/idp", json={"state0": vec(psi0), "state1": vec(psi1)}
    ).json()
    assert by_family["p_fidp"] == pytest.approx(np.sin(2 * theta1), abs=1e-12)
    assert explicit["p_fidp"] == pytest.approx(by_family["p_fidp"], abs=1e-12)
    assert by_family["overlap_magnitude"] == pytest.approx(
        abs(complex(*by_family["overlap"])), abs=1e-15
    )


def test_idp_rejects_family_plus_explicit(client):
    spec = same_basis_spec(0.4, 0.9)
    spec["state0"] = vec([1, 0, 0, 0])
    spec["state1"] = vec([0, 1, 0, 0])
    assert client.post("/idp", json=spec).status_code == 400


def test_idp_rejects_missing_states(client):
    assert client.post("/idp", json={"prior0": 0.5}).status_code == 400


def test_solve_two_fail_feasible(client):
    theta1 = np.pi / 3
    resp = client.post("/solve/two-fail", json=same_basis_spec(np.pi / 2 - theta1, theta1))
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is True
    assert body["report"]["p_f"] == pytest.approx(np.sin(2 * theta1), abs=1e-9)
    assert body["report"]["p_fidp"] == pytest.approx(np.sin(2 * theta1), abs=1e-12)
    assert body["solution"]["free_modulus"] is True
    assert set(body["scheme"]["outcome_map"]) == {"0,0", "0,1", "1,0", "1,1"}
    for op in body["scheme"]["ops_a"] + body["scheme"]["ops_b"]:
        assert op is None or len(op) == 2


def test_solve_two_fail_infeasible_is_structured(client):
    resp = client.post("/solve/two-fail", json=same_basis_spec(0.4, 0.9))
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is False
    assert body["reason"] == "ConstraintViolated"
    assert body["scheme"] is None


def test_solve_two_fail_identical_states(client):
    resp = client.post("/solve/two-fail", json=same_basis_spec(0.5, 0.5))
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is False
    assert body["reason"] == "IdenticalStates"


def test_solve_one_fail_defaults_second_angle(client):
    theta0 = 0.7
    resp = client.post(
        "/solve/one-fail", json={"family": "same-basis", "theta0": theta0}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is True
    assert body["residual"] < 1e-9
    expected = 0.5 * (np.cos(theta0) - np.sin(theta0)) ** 2 + 0.25
    assert body["report"]["p_f"] == pytest.approx(expected, abs=1e-12)
    fails = [k for k, v in body["scheme"]["outcome_map"].items() if v == "FAIL"]
    assert fails == ["0,1"]


def test_solve_one_fail_infeasible_pair(client):
    resp = client.post(
        "/solve/one-fail",
        json={"family": "xz-mixed", "theta0": np.pi / 2, "theta1": 0.9},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is False
    assert body["residual"] > 1e-6
    assert body["scheme"] is None


def test_solve_no_comm_detector_case(client):
    resp = client.post(
        "/solve/no-comm",
        json={"state0": vec([1, 0, 0, 0]), "state1": vec([1, 0, 0, 1])},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["case"] == "OneStateDetector"
    assert body["detect_prob"] == pytest.approx(0.5, abs=1e-12)
    assert body["p_fail_0"] == pytest.approx(1.0, abs=1e-12)
    assert body["scheme"] is not None


def test_solve_no_comm_always_fail(client):
    s = 1 / np.sqrt(2)
    resp = client.post(
        "/solve/no-comm",
        json={"state0": vec([s, 0, 0, s]), "state1": vec([s, 0, 0, -s])},
    )
    assert resp.status_code == 200
    body = resp.json()
    assert body["case"] == "AlwaysFail"
    assert body["detect_prob"] is None
    assert body["scheme"] is None


def test_curve_fig1_offsets_singular_point(client):
    resp = client.post("/curve/fig1", json={"steps": 8})
    assert resp.status_code == 200
    body = resp.json()
    assert body["header"] == "theta1,p_f,p_fidp"
    assert len(body["rows"]) == 8
    assert body["note"] is not None
    h = (np.pi / 2) / 8
    assert body["rows"][3][0] == pytest.approx(np.pi / 4 + h / 2, abs=1e-12)
    assert body["rows"][-1][0] == pytest.approx(np.pi / 2, abs=1e-12)
    assert body["rows"][-1][1] == pytest.approx(0.5, abs=1e-9)
    for _, p_f, p_fidp in body["rows"]:
        assert p_f >= p_fidp - 1e-9


def test_curve_fig1_no_note_off_lattice(client):
    body = client.post("/curve/fig1", json={"steps": 7}).json()
    assert body["note"] is None
    assert len(body["rows"]) == 7


def test_curve_fig2_closed_form(client):
    resp = client.post("/curve/fig2", json={"steps": 8})
    assert resp.status_code == 200
    body = resp.json()
    assert body["header"] == "theta0,p_f,p_fidp"
    assert len(body["rows"]) == 8
    for theta0, p_f, p_fidp in body["rows"]:
        expected = 0.5 * (np.cos(theta0) - np.sin(theta0)) ** 2 + 0.25
        assert p_f == pytest.approx(expected, abs=1e-9)
        assert p_fidp == pytest.approx(
            abs(np.cos(theta0) - np.sin(theta0)) / np.sqrt(2), abs=1e-9
        )


def test_curve_rejects_too_few_steps(client):
    assert client.post("/curve/fig1", json={"steps": 1}).status_code == 400
    assert client.post("/curve/fig2", json={"steps": 0}).status_code == 400


def test_mc_two_fail(client):
    theta1 = np.pi / 3
    req = {
        "pair": same_basis_spec(np.pi / 2 - theta1, theta1),
        "scheme": "two-fail",
        "n": 20000,
        "seed": 7,
    }
    resp = client.post("/mc", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert body["n"] == 20000
    assert body["error_count"] == 0
    assert body["p_f"] == pytest.approx(np.sin(2 * theta1), abs=1e-9)
    assert set(body["counts"]) == {"0", "1"}
    total = sum(c for per_state in body["counts"].values() for c in per_state.values())
    assert total == 20000
    p = body["p_f"]
    assert abs(body["fail_rate"] - p) < 5 * np.sqrt(p * (1 - p) / 20000)
    again = client.post("/mc", json=req).json()
    assert again == body


def test_mc_one_fail_infeasible_maps_to_400(client):
    req = {
        "pair": {"family": "xz-mixed", "theta0": np.pi / 2, "theta1": 0.9},
        "scheme": "one-fail",
        "n": 100,
    }
    assert client.post("/mc", json=req).status_code == 400


def test_mc_unknown_scheme(client):
    req = {"pair": same_basis_spec(0.5, np.pi / 2 - 0.5), "scheme": "three-fail"}
    assert client.post("/mc", json=req).status_code == 400


def test_qss_honest_session(client):
    req = {"theta": np.pi / 6, "q_check": 0.25, "n_rounds": 5000, "seed": 11}
    resp = client.post("/qss", json=req)
    assert resp.status_code == 200
    body = resp.json()
    assert body["verdict"] == "Clean"
    assert body["check_disagreements"] == 0
    assert body["state_mismatches"] == 0
    assert body["rounds"] is None
    assert body["fail_rate_expected"] == pytest.approx(np.sin(np.pi / 3), abs=1e-12)


def test_qss_returns_round_log(client):
    req = {"theta": np.pi / 6, "n_rounds": 200, "seed": 2, "return_rounds": True}
    body = client.post("/qss", json=req).json()
    assert len(body["rounds"]) == 200
    first = body["rounds"][0]
    assert set(first) == {
        "round", "true_state", "alice_basis", "bob_basis",
        "alice_outcome", "bob_outcome", "label",
    }


def test_qss_rejects_bad_config(client):
    assert client.post("/qss", json={"theta": np.pi / 4}).status_code == 400
    assert client.post("/qss", json={"theta": np.pi / 6, "q_check": 1.0}).status_code == 400
    assert (
        client.post("/qss", json={"theta": np.pi / 6, "adversary": "mitm"}).status_code
        == 400
    )


def test_verify_full_suite(client):
    resp = client.post("/verify", json={"mc_rounds": 5000, "seed": 1})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True
    assert len(body["checks"]) == 6
    assert all(c["passed"] for c in body["checks"])


def test_verify_only_filter(client):
    body = client.post(
        "/verify", json={"mc_rounds": 5000, "seed": 1, "only": "nocomm"}
    ).json()
    assert [c["name"] for c in body["checks"]] == ["nocomm.detector-example"]


def test_malformed_payload_is_422(client):
    assert client.post("/schmidt", json={"state": "nope"}).status_code == 422
    assert client.post("/mc", json={"pair": 3}).status_code == 422
