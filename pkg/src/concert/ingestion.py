"""Parsers for the source exports (roster CSV, teams doc, forum export, ticket
CSV, git numstat text) plus cross-platform identity resolution.

Unresolvable identities are never fatal: they are excluded from the event
stream and listed in the IngestReport so instructors can see data-quality gaps.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Sequence

from .errors import (
    DuplicateHandle,
    InvalidValue,
    MalformedHeader,
    MalformedNumstat,
    MalformedRecord,
    MalformedRow,
    UnknownMember,
    UnknownOutcome,
)
from .model import (
    ActivityEvent,
    EventKind,
    StudentIdentity,
    Team,
    TicketOutcome,
    parse_timestamp,
)

ROSTER_HEADER = ["canonical_id", "display_name", "email", "forum_handle", "ticket_handle", "git_emails"]
TICKET_HEADER = ["ticket_id", "student_handle", "created_at", "outcome"]

SOURCES = ("forum", "tickets", "git")

_SHA_RE = re.compile(r"^[0-9a-f]{40}$")


@dataclass(frozen=True)
class Roster:
    """Course roster with case-insensitive per-platform lookup indexes."""

    students: tuple[StudentIdentity, ...]
    by_forum_handle: dict[str, StudentIdentity]
    by_ticket_handle: dict[str, StudentIdentity]
    by_git_email: dict[str, StudentIdentity]

    @classmethod
    def build(cls, students: Sequence[StudentIdentity]) -> "Roster":
        by_forum: dict[str, StudentIdentity] = {}
        by_ticket: dict[str, StudentIdentity] = {}
        by_git: dict[str, StudentIdentity] = {}
        for s in students:
            if s.forum_handle:
                key = s.forum_handle.lower()
                if key in by_forum:
                    raise DuplicateHandle(
                        f"forum handle {s.forum_handle!r} is shared by "
                        f"{by_forum[key].canonical_id} and {s.canonical_id}"
                    )
                by_forum[key] = s
            if s.ticket_handle:
                key = s.ticket_handle.lower()
                if key in by_ticket:
                    raise DuplicateHandle(
                        f"ticket handle {s.ticket_handle!r} is shared by "
                        f"{by_ticket[key].canonical_id} and {s.canonical_id}"
                    )
                by_ticket[key] = s
            for email in s.git_emails:  # already lowercased by StudentIdentity
                if email in by_git:
                    raise DuplicateHandle(
                        f"git email {email!r} is shared by "
                        f"{by_git[email].canonical_id} and {s.canonical_id}"
                    )
                by_git[email] = s
        return cls(tuple(students), by_forum, by_ticket, by_git)


@dataclass(frozen=True)
class IgnoreRules:
    """File-ignore patterns matched (re.search) against repo-relative paths."""

    patterns: tuple[re.Pattern, ...] = ()

    @classmethod
    def compile(cls, patterns: Iterable[str]) -> "IgnoreRules":
        compiled = []
        for p in patterns:
            try:
                compiled.append(re.compile(p))
            except re.error as exc:
                raise InvalidValue(f"bad ignore pattern {p!r}: {exc}")
        return cls(tuple(compiled))

    def matches(self, path: str) -> bool:
        return any(p.search(path) for p in self.patterns)


@dataclass(frozen=True)
class Unresolved:
    source: str
    raw_source_id: str
    unmatched_handle: str


@dataclass
class IngestReport:
    events_loaded: dict[str, int] = field(default_factory=lambda: {s: 0 for s in SOURCES})
    unresolved: list[Unresolved] = field(default_factory=list)
    ignored_file_lines: int = 0


# --- raw records (parsed but not yet identity-resolved) ---------------------

@dataclass(frozen=True)
class RawForumPost:
    post_id: str
    thread_id: str
    author_handle: str
    created_at: datetime
    kind: EventKind  # FORUM_INITIAL or FORUM_REPLY


@dataclass(frozen=True)
class RawTicket:
    ticket_id: str
    student_handle: str
    created_at: datetime
    outcome: TicketOutcome


@dataclass(frozen=True)
class RawCommit:
    sha: str
    author_email: str  # lowercased
    at: datetime
    additions: int


@dataclass(frozen=True)
class CommitBlock:
    """A synthetic commit for the numstat writer; counts may be int or '-'."""

    sha: str
    author_email: str
    epoch: int
    files: tuple[tuple[object, object, str], ...] = ()  # (additions, deletions, path)


# --- roster & teams ----------------------------------------------------------

def load_roster(roster_text: str, teams_text: str) -> tuple[Roster, list[Team]]:
    """Parse the roster CSV and teams document; validate referential integrity."""
    rows = list(csv.reader(io.StringIO(roster_text)))
    if not rows or rows[0] != ROSTER_HEADER:
        raise MalformedRow(f"roster header must be {','.join(ROSTER_HEADER)}", location="header")
    students = []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(ROSTER_HEADER):
            raise MalformedRow(f"expected {len(ROSTER_HEADER)} columns, got {len(row)}", location=f"row {i}")
        cid, name, email, forum, ticket, git_emails = row
        try:
            students.append(StudentIdentity(
                canonical_id=cid,
                display_name=name,
                email=email,
                forum_handle=forum or None,
                ticket_handle=ticket or None,
                git_emails=frozenset(e for e in git_emails.split(";") if e),
            ))
        except InvalidValue as exc:
            raise MalformedRow(exc.message, location=f"row {i}")
    roster = Roster.build(students)
    roster_ids = {s.canonical_id for s in students}

    try:
        team_docs = json.loads(teams_text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"teams document is not valid JSON: {exc}", location="teams")
    if not isinstance(team_docs, list):
        raise MalformedRecord("teams document must be an array", location="teams")
    teams = []
    for idx, doc in enumerate(team_docs):
        if not isinstance(doc, dict) or not {"team_id", "name", "member_ids"} <= doc.keys():
            raise MalformedRecord("team record needs team_id, name, member_ids", location=idx)
        for member in doc["member_ids"]:
            if member not in roster_ids:
                raise UnknownMember(
                    f"team {doc['team_id']!r} references unknown student {member!r}",
                    location=idx,
                )
        try:
            teams.append(Team(
                team_id=doc["team_id"],
                name=doc["name"],
                member_ids=tuple(doc["member_ids"]),
                repo_url=doc.get("repo_url"),
            ))
        except InvalidValue as exc:
            raise MalformedRecord(exc.message, location=idx)
    return roster, teams


def roster_to_csv(students: Sequence[StudentIdentity]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(ROSTER_HEADER)
    for s in students:
        writer.writerow([
            s.canonical_id,
            s.display_name,
            s.email,
            s.forum_handle or "",
            s.ticket_handle or "",
            ";".join(sorted(s.git_emails)),
        ])
    return out.getvalue()


def teams_to_json(teams: Sequence[Team]) -> str:
    docs = []
    for t in teams:
        doc = {"team_id": t.team_id, "name": t.name, "member_ids": list(t.member_ids)}
        if t.repo_url is not None:
            doc["repo_url"] = t.repo_url
        docs.append(doc)
    return json.dumps(docs, indent=2) + "\n"


# --- forum -------------------------------------------------------------------

_FORUM_KINDS = {"initial": EventKind.FORUM_INITIAL, "reply": EventKind.FORUM_REPLY}


def parse_forum_export(text: str) -> list[RawForumPost]:
    try:
        docs = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(f"forum export is not valid JSON: {exc}", location=None)
    if not isinstance(docs, list):
        raise MalformedRecord("forum export must be an array", location=None)
    records = []
    for idx, doc in enumerate(docs):
        if not isinstance(doc, dict):
            raise MalformedRecord("forum record must be an object", location=idx)
        missing = {"post_id", "thread_id", "author_handle", "created_at", "kind"} - doc.keys()
        if missing:
            raise MalformedRecord(f"forum record missing {sorted(missing)}", location=idx)
        if doc["kind"] not in _FORUM_KINDS:
            raise MalformedRecord(f"unknown forum record kind {doc['kind']!r}", location=idx)
        try:
            created = parse_timestamp(doc["created_at"])
        except (ValueError, TypeError):
            raise MalformedRecord(f"bad timestamp {doc['created_at']!r}", location=idx)
        records.append(RawForumPost(
            post_id=str(doc["post_id"]),
            thread_id=str(doc["thread_id"]),
            author_handle=str(doc["author_handle"]),
            created_at=created,
            kind=_FORUM_KINDS[doc["kind"]],
        ))
    return records


# --- tickets -----------------------------------------------------------------

_OUTCOMES = {o.value: o for o in TicketOutcome}


def parse_ticket_export(text: str) -> list[RawTicket]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != TICKET_HEADER:
        raise MalformedRow(f"ticket header must be {','.join(TICKET_HEADER)}", location="header")
    records = []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(TICKET_HEADER):
            raise MalformedRow(f"expected {len(TICKET_HEADER)} columns, got {len(row)}", location=f"row {i}")
        ticket_id, handle, created_at, outcome = row
        if outcome not in _OUTCOMES:
            raise UnknownOutcome(f"unknown ticket outcome {outcome!r}", location=f"row {i}")
        try:
            created = parse_timestamp(created_at)
        except ValueError:
            raise MalformedRow(f"bad timestamp {created_at!r}", location=f"row {i}")
        records.append(RawTicket(ticket_id, handle, created, _OUTCOMES[outcome]))
    return records


# --- git numstat ---------------------------------------------------------------

def parse_git_numstat(text: str, rules: IgnoreRules | None = None) -> tuple[list[RawCommit], int]:
    """Parse `commit <sha> <email> <epoch>` blocks with numstat lines.

    Returns the commit records (additions summed over non-ignored paths,
    binary `-` counts as 0) and the total additions excluded by the rules.
    """
    rules = rules or IgnoreRules()
    records: list[RawCommit] = []
    current: list | None = None  # [sha, email, at, additions]
    ignored_additions = 0

    def flush():
        nonlocal current
        if current is not None:
            records.append(RawCommit(*current))
            current = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        if line.startswith("commit "):
            flush()
            parts = line.split()
            if len(parts) != 4:
                raise MalformedHeader("commit header must be 'commit <sha> <email> <epoch>'", location=lineno)
            _, sha, email, epoch = parts
            if not _SHA_RE.match(sha.lower()) or len(sha) != 40:
                raise MalformedHeader(f"bad commit sha {sha!r}", location=lineno)
            try:
                at = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
            except ValueError:
                raise MalformedHeader(f"bad epoch {epoch!r}", location=lineno)
            current = [sha.lower(), email.lower(), at, 0]
        else:
            if current is None:
                raise MalformedNumstat("numstat line outside a commit block", location=lineno)
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise MalformedNumstat("numstat line must be '<additions>\\t<deletions>\\t<path>'", location=lineno)
            raw_adds, raw_dels, path = parts
            adds = _numstat_count(raw_adds, lineno)
            _numstat_count(raw_dels, lineno)  # deletions validated but not a metric
            if rules.matches(path):
                ignored_additions += adds
            else:
                current[3] += adds
    flush()
    return records, ignored_additions


def _numstat_count(token: str, lineno: int) -> int:
    if token == "-":  # binary file
        return 0
    if not token.isdigit():
        raise MalformedNumstat(f"bad numstat count {token!r}", location=lineno)
    return int(token)


def render_git_numstat(blocks: Sequence[CommitBlock]) -> str:
    """Inverse writer for parse_git_numstat; used by the synthetic generator."""
    lines = []
    for block in blocks:
        lines.append(f"commit {block.sha} {block.author_email} {block.epoch}")
        for adds, dels, path in block.files:
            lines.append(f"{adds}\t{dels}\t{path}")
        lines.append("")
    return "\n".join(lines)


# --- identity resolution -------------------------------------------------------

def resolve_events(
    roster: Roster,
    forum: Sequence[RawForumPost] = (),
    tickets: Sequence[RawTicket] = (),
    commits: Sequence[RawCommit] = (),
    ignored_additions: int = 0,
) -> tuple[list[ActivityEvent], IngestReport]:
    """Join raw records to canonical ids; unmatched records go to the report."""
    events: list[ActivityEvent] = []
    report = IngestReport(ignored_file_lines=ignored_additions)

    for post in forum:
        student = roster.by_forum_handle.get(post.author_handle.lower())
        if student is None:
            report.unresolved.append(Unresolved("forum", post.post_id, post.author_handle))
            continue
        events.append(ActivityEvent(
            event_id=f"forum:{post.post_id}",
            canonical_id=student.canonical_id,
            at=post.created_at,
            kind=post.kind,
            raw_source_id=post.post_id,
        ))
        report.events_loaded["forum"] += 1

    for ticket in tickets:
        student = roster.by_ticket_handle.get(ticket.student_handle.lower())
        if student is None:
            report.unresolved.append(Unresolved("tickets", ticket.ticket_id, ticket.student_handle))
            continue
        events.append(ActivityEvent(
            event_id=f"ticket:{ticket.ticket_id}",
            canonical_id=student.canonical_id,
            at=ticket.created_at,
            kind=EventKind.TICKET,
            raw_source_id=ticket.ticket_id,
            ticket_outcome=ticket.outcome,
        ))
        report.events_loaded["tickets"] += 1

    for commit in commits:
        student = roster.by_git_email.get(commit.author_email.lower())
        if student is None:
            report.unresolved.append(Unresolved("git", commit.sha, commit.author_email))
            continue
        events.append(ActivityEvent(
            event_id=f"git:{commit.sha}",
            canonical_id=student.canonical_id,
            at=commit.at,
            kind=EventKind.COMMIT,
            raw_source_id=commit.sha,
            additions=commit.additions,
        ))
        report.events_loaded["git"] += 1

    return events, report
