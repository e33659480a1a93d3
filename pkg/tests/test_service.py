"""HTTP layer tests: route behavior, status mapping, error envelope."""

from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from bibcap.service import create_app

from conftest import (
    TINY_PNG,
    YALE_ARTICLE_TITLE,
    YALE_JOURNAL_TITLE,
    YALE_LABELS,
    build_yale,
    ingest_yale_scans,
)


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def _error_code(response):
    body = response.json()
    assert set(body) == {"error"}
    assert {"code", "message"} <= set(body["error"])
    return body["error"]["code"]


# --- full keyboard-session flow over HTTP ---------------------------------------


def test_full_capture_flow(store, client):
    created = client.post("/volumes", json={
        "full_title": YALE_JOURNAL_TITLE,
        "volume_number": 1,
        "publication_year": 1910,
        "volume_id": "yale-1",
    })
    assert created.status_code == 201
    body = created.json()
    assert body["stem"] == "YalRY"
    assert body["state"] == "page_numbering"
    version = body["version"]

    # ingest happens outside the API (film scanning pipeline)
    version = ingest_yale_scans(store, "yale-1", version)

    listing = client.get("/volumes/yale-1/scans")
    assert listing.status_code == 200
    scans = listing.json()["scans"]
    assert [s["scan_id"] for s in scans] == [
        f"yale-1-s{i:02d}" for i in range(10)]
    assert all(s["label"] is None for s in scans)

    for scan, label in zip(scans, YALE_LABELS):
        done = client.post("/volumes/yale-1/pages", json={
            "action": "assign", "scan_id": scan["scan_id"],
            "label": label, "expected_version": version,
        })
        assert done.status_code == 200
        payload = done.json()
        version = payload["version"]
        assert payload["scan"]["effective_label"]["text"] == label

    moved = client.post("/volumes/yale-1/transition", json={
        "target": "article_entry", "expected_version": version})
    assert moved.status_code == 200
    assert moved.json()["state"] == "article_entry"
    version = moved.json()["version"]

    entered = client.post("/volumes/yale-1/articles", json={
        "title": YALE_ARTICLE_TITLE,
        "authors": [{"last_name": "Elkin", "rest": "William L."}],
        "first_page": "1.1", "last_page": "1.8",
        "expected_version": version,
    })
    assert entered.status_code == 201
    article = entered.json()["article"]
    assert article["bibcode"] == "1910YalRY...1....1E"
    version = entered.json()["version"]

    sealed = client.post("/volumes/yale-1/finalize",
                         json={"expected_version": version})
    assert sealed.status_code == 200
    assert sealed.json()["state"] == "finalized"
    assert sealed.json()["records"][0]["bibcode"] == "1910YalRY...1....1E"

    exported = client.get("/volumes/yale-1/export")
    assert exported.status_code == 200
    assert exported.headers["content-type"].startswith("text/plain")
    assert exported.text == store.export_text("yale-1")
    assert "Bibliographic Code: 1910YalRY...1....1E\n" in exported.text


# --- reads -----------------------------------------------------------------------


def test_list_volumes(store, client):
    assert client.get("/volumes").json() == {"volumes": []}
    build_yale(store, through="ingested")
    body = client.get("/volumes").json()
    assert [v["volume_id"] for v in body["volumes"]] == ["yale-1"]
    assert body["volumes"][0]["scan_count"] == 10


def test_get_volume_reports_pagination(store, client):
    build_yale(store, through="ingested")
    body = client.get("/volumes/yale-1").json()
    assert body["pagination"]["complete"] is False
    assert len(body["pagination"]["unlabeled"]) == 10
    build_yale(store, through="paginated", volume_id="yale-2")
    body = client.get("/volumes/yale-2").json()
    assert body["pagination"] == {"complete": True, "unlabeled": [],
                                  "conflicts": []}


def test_scan_listing_carries_suggestions(store, client):
    volume = build_yale(store, through="ingested")
    store.assign_page("yale-1", "yale-1-s00", "1.1",
                      expected_version=volume.version)
    scans = client.get("/volumes/yale-1/scans").json()["scans"]
    assert scans[0]["suggested_label"] is None  # first scan has no precedent
    assert scans[1]["suggested_label"] == {"kind": "composite", "text": "1.2"}
    assert scans[0]["image_url"] == "/scans/yale-1-s00/image"


def test_scan_image_bytes(store, client):
    build_yale(store, through="ingested")
    got = client.get("/scans/yale-1-s00/image")
    assert got.status_code == 200
    assert got.headers["content-type"] == "image/png"
    assert got.content == TINY_PNG


def test_article_listing(store, client):
    build_yale(store, through="entered")
    body = client.get("/volumes/yale-1/articles").json()
    assert len(body["articles"]) == 1
    article = body["articles"][0]
    assert article["bibcode"] == "1910YalRY...1....1E"
    assert article["authors"][0]["display"] == "Elkin, William L."
    assert (article["first_page"], article["last_page"]) == ("1.1", "1.8")


# --- page actions ------------------------------------------------------------------


def test_mark_and_unmark_duplicate(store, client):
    version = build_yale(store, through="ingested").version
    marked = client.post("/volumes/yale-1/pages", json={
        "action": "mark_duplicate", "scan_id": "yale-1-s03",
        "expected_version": version})
    assert marked.status_code == 200
    assert marked.json()["scan"]["status"] == "marked_duplicate"
    unmarked = client.post("/volumes/yale-1/pages", json={
        "action": "unmark_duplicate", "scan_id": "yale-1-s03",
        "expected_version": marked.json()["version"]})
    assert unmarked.json()["scan"]["status"] == "active"


def test_override_round_trip(store, client):
    version = build_yale(store, through="paginated").version
    done = client.post("/volumes/yale-1/pages", json={
        "action": "override", "scan_id": "yale-1-s00",
        "label": "3.1", "note": "printed number smudged",
        "expected_version": version})
    assert done.status_code == 200
    scan = done.json()["scan"]
    assert scan["label"]["text"] == "1.1"
    assert scan["override"] == {"label": {"kind": "composite", "text": "3.1"},
                                "note": "printed number smudged"}
    assert scan["effective_label"]["text"] == "3.1"


# --- error mapping ------------------------------------------------------------------


def test_version_conflict_is_409(store, client):
    version = build_yale(store, through="ingested").version
    stale = client.post("/volumes/yale-1/pages", json={
        "action": "assign", "scan_id": "yale-1-s00", "label": "1",
        "expected_version": version - 1})
    assert stale.status_code == 409
    assert _error_code(stale) == "VersionConflict"
    assert stale.json()["error"]["actual"] == version
    assert stale.json()["error"]["expected"] == version - 1


def test_unknown_resources_are_404(store, client):
    build_yale(store, through="ingested")
    for response in (
        client.get("/volumes/ghost"),
        client.get("/volumes/ghost/scans"),
        client.get("/scans/ghost/image"),
        client.get("/volumes/ghost/export"),
    ):
        assert response.status_code == 404, response.text


def test_unresolvable_title_is_400(client):
    response = client.post("/volumes", json={
        "full_title": "Journal of Nonexistence", "volume_number": 1,
        "publication_year": 1900})
    assert response.status_code == 400
    assert _error_code(response) == "StemUnresolved"


def test_domain_errors_are_400(store, client):
    version = build_yale(store, through="ingested").version
    version = client.post("/volumes/yale-1/pages", json={
        "action": "assign", "scan_id": "yale-1-s00", "label": "1",
        "expected_version": version}).json()["version"]
    taken = client.post("/volumes/yale-1/pages", json={
        "action": "assign", "scan_id": "yale-1-s01", "label": "1",
        "expected_version": version})
    assert taken.status_code == 400
    assert _error_code(taken) == "DuplicateLabel"
    assert taken.json()["error"]["conflicting_scan"] == "yale-1-s00"

    unparseable = client.post("/volumes/yale-1/pages", json={
        "action": "assign", "scan_id": "yale-1-s01", "label": "IIX",
        "expected_version": version})
    assert unparseable.status_code == 400
    assert _error_code(unparseable) == "Unparseable"


def test_wrong_state_is_400(store, client):
    version = build_yale(store, through="ingested").version
    premature = client.post("/volumes/yale-1/articles", json={
        "title": "t", "first_page": "1", "last_page": "1",
        "expected_version": version})
    assert premature.status_code == 400
    assert _error_code(premature) == "WrongState"


def test_export_before_finalize_is_400(store, client):
    build_yale(store, through="entered")
    response = client.get("/volumes/yale-1/export")
    assert response.status_code == 400
    assert _error_code(response) == "WrongState"


def test_bad_action_and_target_are_400(store, client):
    version = build_yale(store, through="ingested").version
    bad_action = client.post("/volumes/yale-1/pages", json={
        "action": "destroy", "scan_id": "yale-1-s00",
        "expected_version": version})
    assert bad_action.status_code == 400
    assert _error_code(bad_action) == "BadRequest"

    bad_target = client.post("/volumes/yale-1/transition", json={
        "target": "orbit", "expected_version": version})
    assert bad_target.status_code == 400
    assert _error_code(bad_target) == "BadRequest"


def test_transition_validation_errors_carry_details(store, client):
    version = build_yale(store, through="ingested").version
    blocked = client.post("/volumes/yale-1/transition", json={
        "target": "article_entry", "expected_version": version})
    assert blocked.status_code == 400
    assert _error_code(blocked) == "PaginationIncomplete"
    assert len(blocked.json()["error"]["unlabeled"]) == 10


def test_authorless_article_over_http(store, client):
    version = build_yale(store, through="article_entry").version
    entered = client.post("/volumes/yale-1/articles", json={
        "title": "Board report", "authors": [],
        "first_page": "1.1", "last_page": "1.8",
        "expected_version": version})
    assert entered.status_code == 201
    assert entered.json()["article"]["bibcode"] == "1910YalRY...1....1."
