import json

import pytest
from fastapi.testclient import TestClient

from suncolor.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_simplify(client):
    reply = client.post("/simplify", json={"expression": "t(a;i,k)*t(a;k,j)"})
    assert reply.status_code == 200
    body = reply.json()
    assert body["n_terms"] == 1
    assert body["terms"][0]["coeff"] == "(N^2*T_R-T_R)/(N)"
    assert body["externals"] == [
        {"name": "i", "kind": "o"},
        {"name": "j", "kind": "i"},
    ]


def test_simplify_parse_error(client):
    reply = client.post("/simplify", json={"expression": "t(a;i"})
    assert reply.status_code == 400
    assert reply.json()["kind"] == "parse"


def test_simplify_resource_error(client):
    reply = client.post(
        "/simplify",
        json={"expression": "asym(i1,i2,i3;k1,k2,k3)*asym(j1,j2,j3;l1,l2,l3)", "cap_terms": 2},
    )
    assert reply.status_code == 413
    assert reply.json()["kind"] == "resource"


def test_inner_with_point(client):
    reply = client.post(
        "/inner",
        json={
            "left": "[out: i; in: j; glu: a,b] t(a;i,k)*t(b;k,j)",
            "right": "[out: i; in: j; glu: a,b] delta(i,j)*gd(a,b)",
            "n": 3,
            "tr": "1/2",
        },
    )
    assert reply.status_code == 200
    body = reply.json()
    assert body["value"] == "(N^2*T_R-T_R)"
    assert body["value_at_point"] == "4"


def test_dims_table(client):
    reply = client.post("/dims", json={"power": 2, "n": 3})
    body = reply.json()
    assert (body["multiplets"], body["colour_space_dimension"]) == (6, 8)
    reply = client.post("/dims", json={"power": 2, "n": "large"})
    body = reply.json()
    assert (body["multiplets"], body["colour_space_dimension"]) == (7, 9)


def test_tableaux(client):
    body = client.post("/tableaux", json={"n": 3}).json()
    assert body["count"] == 4
    assert [e["tableau"] for e in body["tableaux"]] == ["[123]", "[12/3]", "[13/2]", "[1/2/3]"]


def test_basis_and_gram_roundtrip(client):
    basis = client.post("/basis", json={"kind": "trace", "n_q": 1, "n_g": 2}).json()
    assert len(basis["vectors"]) == 3
    gram = client.post(
        "/gram", json={"vectors": basis["vectors"], "verify": False}
    ).json()
    assert len(gram["gram"]) == 3
    flat = {x for row in gram["gram"] for x in row}
    assert "(N^2*T_R-T_R)" in flat  # the paper's off-diagonal entry T_R (N^2-1)


def test_quark_basis_verified(client):
    body = client.post("/basis", json={"kind": "quark", "verify": True}).json()
    assert len(body["vectors"]) == 6
    assert body["report"]["passed"] is True
    assert body["report"]["diagonal"] is True


def test_oracle_endpoint(client):
    body = client.post(
        "/oracle", json={"expression": "f(a,x,y)*f(b,y,x)", "n": 3, "tr": "1/2"}
    ).json()
    assert body["ok"] is True
    assert body["max_rel_deviation"] < 1e-9


def test_vec3_endpoint(client):
    body = client.post("/vec3", json={"expression": "eps(i,j,m)*eps(j,i,m)"}).json()
    assert body["reduced"] == "(-6)"


def test_validation_error(client):
    reply = client.post("/dims", json={"power": -1, "n": 3})
    assert reply.status_code == 422


def test_deterministic_output(client):
    payload = {"expression": "f(a,b,x)*f(x,c,e) + 2*gd(a,b)*gd(c,e)"}
    first = client.post("/simplify", json=payload).text
    second = client.post("/simplify", json=payload).text
    assert first == second


def test_openapi_schema(client):
    schema = client.get("/openapi.json").json()
    paths = set(schema["paths"])
    assert {"/simplify", "/inner", "/gram", "/basis", "/dims", "/tableaux", "/oracle", "/vec3", "/health"} <= paths


def test_basis_bad_arguments_are_client_errors(client):
    reply = client.post("/basis", json={"kind": "trace", "n_q": 0, "n_g": 0})
    assert reply.status_code == 400
    assert reply.json()["kind"] == "parse"
