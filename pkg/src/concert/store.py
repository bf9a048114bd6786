"""File-backed persistence: one directory per course under a data root.

Layout per course directory:

    course.json          course id, title, term dates, milestones
    roster.csv           ingestion roster format
    teams.json           ingestion teams format
    events_<source>.json canonical event snapshot per source (forum/tickets/git)
    store.json           saved filters (grammar text) and email templates

Every write goes through write-temp-then-rename, so a crash mid-save leaves
either the old or the new file, never a torn one. Mutations are serialized
behind a single lock; readers load consistent snapshots from disk.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from datetime import date
from pathlib import Path

from .emailer import TemplateStore
from .errors import InvalidValue, NotFound
from .filters import FilterStore, parse_filter, print_filter, refs_in
from .ingestion import Roster, load_roster
from .model import (
    ActivityEvent,
    Course,
    EventKind,
    Milestone,
    TicketOutcome,
    parse_timestamp,
)

SCHEMA_VERSION = 1

COURSE_FILE = "course.json"
ROSTER_FILE = "roster.csv"
TEAMS_FILE = "teams.json"
STORE_FILE = "store.json"

EVENT_SOURCES = ("forum", "tickets", "git")


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp_name, path)
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)


# --- event (de)serialization ---------------------------------------------------

def event_to_doc(event: ActivityEvent) -> dict:
    doc = {
        "event_id": event.event_id,
        "canonical_id": event.canonical_id,
        "at": event.at.isoformat(),
        "kind": event.kind.value,
        "raw_source_id": event.raw_source_id,
    }
    if event.ticket_outcome is not None:
        doc["ticket_outcome"] = event.ticket_outcome.value
    if event.additions is not None:
        doc["additions"] = event.additions
    return doc


def event_from_doc(doc: dict) -> ActivityEvent:
    outcome = doc.get("ticket_outcome")
    return ActivityEvent(
        event_id=doc["event_id"],
        canonical_id=doc["canonical_id"],
        at=parse_timestamp(doc["at"]),
        kind=EventKind(doc["kind"]),
        raw_source_id=doc["raw_source_id"],
        ticket_outcome=TicketOutcome(outcome) if outcome is not None else None,
        additions=doc.get("additions"),
    )


def course_to_doc(course: Course) -> dict:
    return {
        "course_id": course.course_id,
        "title": course.title,
        "term_start": course.term_start.isoformat(),
        "term_end": course.term_end.isoformat(),
        "milestones": [
            {"name": m.name, "date": m.date.isoformat()} for m in course.milestones
        ],
    }


class DataStore:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.lock = threading.Lock()  # serializes all mutations

    # --- course discovery ------------------------------------------------

    def course_ids(self) -> list[str]:
        ids = []
        if self.root.is_dir():
            for child in sorted(self.root.iterdir()):
                if (child / COURSE_FILE).is_file():
                    try:
                        ids.append(json.loads((child / COURSE_FILE).read_text("utf-8"))["course_id"])
                    except (json.JSONDecodeError, KeyError):
                        continue  # not a course directory
        return sorted(ids)

    def course_dir(self, course_id: str) -> Path:
        if self.root.is_dir():
            for child in sorted(self.root.iterdir()):
                course_file = child / COURSE_FILE
                if course_file.is_file():
                    try:
                        doc = json.loads(course_file.read_text("utf-8"))
                    except json.JSONDecodeError:
                        continue
                    if doc.get("course_id") == course_id:
                        return child
        raise NotFound(f"no course named {course_id!r} under {self.root}")

    # --- course + roster -----------------------------------------------------

    def load_course(self, course_id: str) -> Course:
        course, _ = self.load_course_and_roster(course_id)
        return course

    def load_course_and_roster(self, course_id: str) -> tuple[Course, Roster]:
        cdir = self.course_dir(course_id)
        doc = json.loads((cdir / COURSE_FILE).read_text("utf-8"))
        roster_text = (cdir / ROSTER_FILE).read_text("utf-8") if (cdir / ROSTER_FILE).is_file() else \
            "canonical_id,display_name,email,forum_handle,ticket_handle,git_emails\n"
        teams_text = (cdir / TEAMS_FILE).read_text("utf-8") if (cdir / TEAMS_FILE).is_file() else "[]"
        roster, teams = load_roster(roster_text, teams_text)
        course = Course(
            course_id=doc["course_id"],
            title=doc.get("title", doc["course_id"]),
            term_start=date.fromisoformat(doc["term_start"]),
            term_end=date.fromisoformat(doc["term_end"]),
            milestones=tuple(
                Milestone(m["name"], date.fromisoformat(m["date"]))
                for m in doc.get("milestones", ())
            ),
            roster=roster.students,
            teams=tuple(teams),
        )
        return course, roster

    def init_course(self, dirname: str, files: dict[str, str]) -> Path:
        """Create a course directory from generated/exported files.

        Like all mutators here, callers serialize via self.lock.
        """
        cdir = self.root / dirname
        cdir.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            atomic_write_text(cdir / name, text)
        return cdir

    # --- event snapshots -------------------------------------------------------

    def save_events(self, course_id: str, source: str, events: list[ActivityEvent]) -> None:
        if source not in EVENT_SOURCES:
            raise InvalidValue(f"unknown source {source!r}; expected one of {EVENT_SOURCES}")
        cdir = self.course_dir(course_id)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "source": source,
            "events": [event_to_doc(e) for e in events],
        }
        atomic_write_text(cdir / f"events_{source}.json", json.dumps(doc, indent=2) + "\n")

    def load_events(self, course_id: str) -> list[ActivityEvent]:
        cdir = self.course_dir(course_id)
        events: list[ActivityEvent] = []
        for source in EVENT_SOURCES:
            path = cdir / f"events_{source}.json"
            if path.is_file():
                doc = json.loads(path.read_text("utf-8"))
                events.extend(event_from_doc(d) for d in doc["events"])
        return events

    # --- saved filters + templates ------------------------------------------------

    def _store_doc(self, course_id: str) -> dict:
        path = self.course_dir(course_id) / STORE_FILE
        if not path.is_file():
            return {"schema_version": SCHEMA_VERSION, "filters": {}, "templates": {}}
        doc = json.loads(path.read_text("utf-8"))
        doc.setdefault("schema_version", SCHEMA_VERSION)
        doc.setdefault("filters", {})
        doc.setdefault("templates", {})
        return doc

    def _write_store_doc(self, course_id: str, doc: dict) -> None:
        path = self.course_dir(course_id) / STORE_FILE
        atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")

    def filter_store(self, course_id: str) -> FilterStore:
        store = FilterStore()
        doc = self._store_doc(course_id)
        # insert in dependency-safe order: names a filter refs come first
        pending = dict(sorted(doc["filters"].items()))
        inserted: set[str] = set()
        while pending:
            progressed = False
            for name in sorted(pending):
                entry = pending[name]
                expr = parse_filter(entry["expr"])
                if refs_in(expr) <= inserted | {name}:
                    store.save(name, expr, created_at=parse_timestamp(entry["created_at"]))
                    inserted.add(name)
                    del pending[name]
                    progressed = True
                    break
            if not progressed:  # should be impossible for stores we wrote
                raise InvalidValue(f"saved filters are mutually unresolvable: {sorted(pending)}")
        return store

    def template_store(self, course_id: str) -> TemplateStore:
        store = TemplateStore()
        for name, entry in sorted(self._store_doc(course_id)["templates"].items()):
            store.save(name, entry["subject"], entry["body"], overwrite=True)
        return store

    def persist_filters(self, course_id: str, store: FilterStore) -> None:
        doc = self._store_doc(course_id)
        doc["filters"] = {
            sf.name: {"expr": print_filter(sf.expr), "created_at": sf.created_at.isoformat()}
            for sf in store.list()
        }
        self._write_store_doc(course_id, doc)

    def persist_templates(self, course_id: str, store: TemplateStore) -> None:
        doc = self._store_doc(course_id)
        doc["templates"] = {
            name: {"subject": t.subject, "body": t.body}
            for name, t in sorted(store.overrides().items())
        }
        self._write_store_doc(course_id, doc)
