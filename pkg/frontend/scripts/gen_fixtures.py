"""Record deterministic API and CLI outputs as frontend test fixtures.

Run from the repo root (the primary package must be installed):

    python3 frontend/scripts/gen_fixtures.py

Fixtures are byte-stable because the synthetic course is seeded (2020), so
re-running only changes files when the service's behavior changes.
"""

import json
import tempfile
from pathlib import Path

from click.testing import CliRunner
from fastapi.testclient import TestClient

from concert.cli import main as cli_main
from concert.service import create_app, run_ingest
from concert.store import DataStore
from concert.synthgen import Archetype, generate

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SEED = 2020
MIX = {
    Archetype.BALANCED: 9,
    Archetype.FREE_RIDER: 3,
    Archetype.SILENT: 3,
    Archetype.FORUM_ONLY: 3,
    Archetype.OFFICE_HOURS_HEAVY: 2,
}
WINDOW = {"start": "2024-01-08", "end": "2024-05-04"}
FILTER = "commits.total < 30 and posts.total == 0 and tickets.total == 0"


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp)
        synthetic = generate(20, archetype_mix=MIX, seed=SEED)
        store = DataStore(data)
        cdir = store.init_course("demo", synthetic.files)
        for source, filename in [("forum", "forum.json"), ("tickets", "tickets.csv"),
                                 ("git", "git.log")]:
            run_ingest(store, synthetic.course_id, source, cdir / filename)

        client = TestClient(create_app(data))
        course_id = synthetic.course_id

        def dump(name, payload):
            (FIXTURES / name).write_text(json.dumps(payload, indent=2) + "\n")
            print(f"wrote {name}")

        dump("courses.json", client.get("/api/courses").json())
        dump("overview.json", client.get(
            f"/api/courses/{course_id}/overview", params={**WINDOW, "bins": 10}).json())
        dump("apply.json", client.post(
            f"/api/courses/{course_id}/filters/apply",
            json={"expr_text": FILTER, **WINDOW}).json())

        silent_team = json.loads((cdir / "manifest.json").read_text())
        silent_ids = [t["team_id"] for t in silent_team["teams"] if t["archetype"] == "silent"]
        dump("detail.json", client.get(
            f"/api/courses/{course_id}/teams/{silent_ids[0]}/detail",
            params={**WINDOW, "bucket": "week"}).json())

        result = CliRunner().invoke(cli_main, [
            "report", "--data-dir", str(data), "--course", course_id,
            "--filter", FILTER, "--start", WINDOW["start"], "--end", WINDOW["end"],
            "--format", "json",
        ])
        assert result.exit_code == 0, result.output
        dump("cli_report.json", json.loads(result.output))

        dump("manifest.json", synthetic.manifest)


if __name__ == "__main__":
    main()
