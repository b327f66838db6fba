import pytest
from fastapi.testclient import TestClient

from chunktagger.chunker import ChunkerConfig, train
from chunktagger.corpus import parse_bracketed
from chunktagger.service import create_app

SAMPLE_NP = "(NP ein/ART (AP (PP in/APPR (MPN Tel/NE Aviv/NE)) lebender/ADJA) Maler/NN)"

SAMPLE_TOKENS = [
    {"form": "ein", "pos": "ART"},
    {"form": "in", "pos": "APPR"},
    {"form": "Tel", "pos": "NE"},
    {"form": "Aviv", "pos": "NE"},
    {"form": "lebender", "pos": "ADJA"},
    {"form": "Maler", "pos": "NN"},
]


@pytest.fixture(scope="module")
def client():
    tb = parse_bracketed(
        "\n".join([
            SAMPLE_NP,
            "der/ART (NP Mann/NN) schlief/VVFIN",
            "(NP eine/ART Frau/NN)",
            "(PP im/APPR (NP alten/ADJA Haus/NN))",
        ])
    )
    model = train(tb, ChunkerConfig(mode="interactive"))
    return TestClient(create_app(model))


def test_health(client):
    r = client.get("/v1/health")
    assert r.status_code == 200
    assert r.json()["model_loaded"] is True


def test_model_info(client):
    r = client.get("/v1/model")
    assert r.status_code == 200
    body = r.json()
    assert body["dims"] == "rtcg"
    assert body["depth"] == 3
    assert abs(sum(body["lambda"]) - 1.0) < 1e-9
    assert body["tagset_size"] > 0


def test_propose_sample(client):
    r = client.post(
        "/v1/propose",
        json={"schema_version": 1, "tokens": SAMPLE_TOKENS, "spans": [[0, 6]]},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["repair_count"] == 0
    assert body["spans"] == [[0, 6]]
    forest = body["forest"]
    assert len(forest) == 1
    np = forest[0]
    assert np["type"] == "node"
    assert np["label"] == "NP"
    assert [np["start"], np["end"]] == [0, 6]
    labels = {c["label"] for c in np["children"] if c["type"] == "node"}
    assert labels == {"AP"}
    assert body["chunk_scores"][0]["log_prob"] < 0
    # top-level spans equal request spans
    tops = [[n["start"], n["end"]] for n in forest if n["type"] == "node"]
    assert tops == [[0, 6]]


def test_propose_empty_spans_gives_bare_forest(client):
    r = client.post(
        "/v1/propose",
        json={"tokens": [{"form": "der", "pos": "ART"}, {"form": "Mann", "pos": "NN"}],
              "spans": []},
    )
    assert r.status_code == 200
    assert all(n["type"] == "token" for n in r.json()["forest"])


def test_propose_overlapping_spans_is_400(client):
    r = client.post(
        "/v1/propose",
        json={"tokens": SAMPLE_TOKENS, "spans": [[0, 3], [2, 5]]},
    )
    assert r.status_code == 400


def test_propose_out_of_range_span_is_400(client):
    r = client.post(
        "/v1/propose",
        json={"tokens": SAMPLE_TOKENS[:2], "spans": [[0, 5]]},
    )
    assert r.status_code == 400


def test_propose_deterministic(client):
    payload = {"tokens": SAMPLE_TOKENS, "spans": [[0, 6]]}
    a = client.post("/v1/propose", json=payload)
    b = client.post("/v1/propose", json=payload)
    assert a.content == b.content


def test_unknown_pos_strict_is_422():
    tb = parse_bracketed("(NP der/ART Mann/NN)")
    model = train(tb, ChunkerConfig())
    strict_client = TestClient(create_app(model, unknown_pos_policy="strict"))
    r = strict_client.post(
        "/v1/propose",
        json={"tokens": [{"form": "x", "pos": "XYZ"}], "spans": []},
    )
    assert r.status_code == 422


def test_no_model_is_503():
    bare = TestClient(create_app(None))
    assert bare.get("/v1/health").status_code == 200
    assert bare.get("/v1/model").status_code == 503
    r = bare.post("/v1/propose", json={"tokens": SAMPLE_TOKENS, "spans": []})
    assert r.status_code == 503


def test_bad_schema_version_is_400(client):
    r = client.post(
        "/v1/propose",
        json={"schema_version": 9, "tokens": SAMPLE_TOKENS, "spans": []},
    )
    assert r.status_code == 400
