"""Record server responses as byte-exact fixtures for the UI contract tests.

Run from the frontend directory with the analysis package installed:

    python3 scripts/record_fixtures.py

Writes fixtures/catalog.json plus, per scenario, the sets / identify /
align responses the panels must render verbatim.
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

from didgraph.server import create_app

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main() -> int:
    client = TestClient(create_app())
    OUT.mkdir(exist_ok=True)

    catalog = client.get("/api/scenarios")
    (OUT / "catalog.json").write_bytes(catalog.content)

    manifest = {}
    for entry in catalog.json()["scenarios"]:
        name = entry["name"]
        period = str(entry["periods"][0])
        treatment = entry["treatments"][period]
        outcome = entry["deltas"][period]
        graph = entry["compact"]

        sets_req = {"graph": graph, "treatment": treatment, "outcome": outcome}
        sets_res = client.post("/api/sets", json=sets_req)
        sets_res.raise_for_status()
        (OUT / f"{name}.sets.json").write_bytes(sets_res.content)
        first = sets_res.json()["sets"][0] if sets_res.json()["sets"] else []

        identify_req = {
            "graph": graph,
            "treatment": treatment,
            "outcome": outcome,
            "set": first,
        }
        identify_res = client.post("/api/identify", json=identify_req)
        identify_res.raise_for_status()
        (OUT / f"{name}.identify.json").write_bytes(identify_res.content)

        align_req = {
            "scenario": name,
            "estimator": "dY(X)",
            "plan": [{"covariate": c} for c in first],
            "target_period": int(period),
        }
        align_res = client.post("/api/align", json=align_req)
        align_res.raise_for_status()
        (OUT / f"{name}.align.json").write_bytes(align_res.content)

        manifest[name] = {
            "period": int(period),
            "treatment": treatment,
            "outcome": outcome,
            "adjustment": first,
            "requests": {
                "sets": sets_req,
                "identify": identify_req,
                "align": align_req,
            },
        }

    (OUT / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True), encoding="utf-8"
    )
    print(f"recorded fixtures for {len(manifest)} scenarios into {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
