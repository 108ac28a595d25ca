"""Record real service payloads for the explorer's scripted-session test.

Builds the campaign fixture warehouse (seeded manifest, so every id is
stable), pre-confirms one reference candidate so the top hit's link rail has
something to follow, and captures every response the scripted UI session
will request — both before and after the session's own review action.

Run from the repository root:

    python3 frontend/scripts/export_session_fixture.py

Output: frontend/tests/fixtures/session.json (committed; regenerate after
any change to the fixture corpus or payload shapes).
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from infowarehouse.service import create_app
from infowarehouse.storage import WarehouseStore
from infowarehouse.transcription import load_manifest, transcribe

ROOT = Path(__file__).resolve().parents[2]
MANIFEST = ROOT / "tests" / "fixtures" / "campaign" / "campaign.manifest"
OUT = ROOT / "frontend" / "tests" / "fixtures" / "session.json"


def neighbors_path(element_id: str) -> str:
    return f"/elements/{element_id}/neighbors?depth=1&kind=both&direction=both"


PENDING_PATH = "/links?status=pending-review&limit=50&offset=0"


def main() -> None:
    import tempfile

    workdir = Path(tempfile.mkdtemp())
    store = WarehouseStore.create(workdir / "session.log")
    report = transcribe(load_manifest(MANIFEST), store)
    client = TestClient(create_app(store))

    top_hit = client.post("/search", json={"terms": ["discount"]}).json()["entries"][0][
        "element"
    ]["id"]
    # candidates pointing at the top hit; confirm one now (the rail's "follow"
    # target) and leave the other for the scripted session to confirm
    incoming = [
        link_id
        for link_id in report.pending_link_ids
        if store.warehouse.links[link_id].dst == top_hit
    ]
    assert len(incoming) == 2, "fixture should plant two candidates into the top hit"
    pre_confirmed, to_confirm = incoming
    client.post(f"/links/{pre_confirmed}/review", json={"decision": "confirm"})
    follow_target = store.warehouse.links[pre_confirmed].src
    confirm_src = store.warehouse.links[to_confirm].src

    def snap(method: str, path: str, body=None):
        if method == "GET":
            response = client.get(path)
        else:
            response = client.post(path, json=body)
        assert response.status_code == 200, (path, response.status_code)
        return response.json()

    before = {}
    before["POST /search"] = snap("POST", "/search", {"terms": ["discount"]})
    for element_id in (top_hit, follow_target, confirm_src):
        before[f"GET /elements/{element_id}"] = snap("GET", f"/elements/{element_id}")
        before[f"GET /elements/{element_id}/provenance"] = snap(
            "GET", f"/elements/{element_id}/provenance"
        )
        before[f"GET {neighbors_path(element_id)}"] = snap("GET", neighbors_path(element_id))
    before[f"GET {PENDING_PATH}"] = snap("GET", PENDING_PATH)
    before[f"GET /tis/{report.ti_id}"] = snap("GET", f"/tis/{report.ti_id}")

    review_response = client.post(
        f"/links/{to_confirm}/review", json={"decision": "confirm"}
    ).json()

    after = {}
    for element_id in (top_hit, follow_target, confirm_src):
        after[f"GET {neighbors_path(element_id)}"] = snap("GET", neighbors_path(element_id))
    after[f"GET {PENDING_PATH}"] = snap("GET", PENDING_PATH)

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps(
            {
                "ids": {
                    "ti": report.ti_id,
                    "topHit": top_hit,
                    "followTarget": follow_target,
                    "pendingToConfirm": to_confirm,
                    "confirmSrc": confirm_src,
                },
                "before": before,
                "review": {
                    "path": f"/links/{to_confirm}/review",
                    "response": review_response,
                },
                "after": after,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    store.close()
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
