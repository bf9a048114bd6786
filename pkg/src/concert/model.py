"""Canonical domain types shared by every module: courses, teams, students,
activity events, time windows, and the five metric categories.

All values are immutable and timestamps are normalized to UTC on
construction, so instances are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from urllib.parse import urlparse

from .errors import InvalidValue


class MetricKind(Enum):
    """The five activity categories shown on charts and used by filters."""

    POSTS = "posts"
    REPLIES = "replies"
    COMMITS = "commits"
    ADDITIONS = "additions"
    TICKETS = "tickets"


# Canonical iteration order for deterministic output everywhere.
METRIC_KINDS: tuple[MetricKind, ...] = tuple(MetricKind)


class EventKind(Enum):
    FORUM_INITIAL = "forum_initial"
    FORUM_REPLY = "forum_reply"
    TICKET = "ticket"
    COMMIT = "commit"


class TicketOutcome(Enum):
    """What happened to an office-hours help request."""

    RESOLVED = "resolved"
    UNRESOLVED_HELPED = "unresolved_helped"
    UNSERVED = "unserved"


def as_utc(dt: datetime) -> datetime:
    """Normalize a datetime to UTC; naive datetimes are taken to already be UTC."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp (date-only or full, 'Z' accepted) to aware UTC.

    Raises ValueError on anything else.
    """
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    return as_utc(dt)


def _valid_email(email: str) -> bool:
    local, sep, domain = email.partition("@")
    return bool(sep) and bool(local) and bool(domain) and "@" not in domain


@dataclass(frozen=True)
class StudentIdentity:
    """One student with their per-platform handles, keyed by canonical_id."""

    canonical_id: str
    display_name: str
    email: str
    forum_handle: str | None = None
    ticket_handle: str | None = None
    git_emails: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.canonical_id:
            raise InvalidValue("canonical_id must be non-empty")
        if not _valid_email(self.email):
            raise InvalidValue(f"invalid email {self.email!r} for {self.canonical_id}")
        # git emails are matched case-insensitively; store them lowercased
        object.__setattr__(self, "git_emails", frozenset(e.lower() for e in self.git_emails))


@dataclass(frozen=True)
class Team:
    team_id: str
    name: str
    member_ids: tuple[str, ...]
    repo_url: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "member_ids", tuple(self.member_ids))
        if not self.team_id:
            raise InvalidValue("team_id must be non-empty")
        if not self.member_ids:
            raise InvalidValue(f"team {self.team_id} has no members")
        if len(set(self.member_ids)) != len(self.member_ids):
            raise InvalidValue(f"team {self.team_id} lists a member twice")
        if self.repo_url is not None:
            parts = urlparse(self.repo_url)
            if not (parts.scheme and parts.netloc):
                raise InvalidValue(f"team {self.team_id} repo_url is not an absolute URL")


@dataclass(frozen=True)
class Milestone:
    name: str
    date: date


@dataclass(frozen=True)
class Course:
    course_id: str
    title: str
    term_start: date
    term_end: date
    milestones: tuple[Milestone, ...] = ()
    roster: tuple[StudentIdentity, ...] = ()
    teams: tuple[Team, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "milestones", tuple(self.milestones))
        object.__setattr__(self, "roster", tuple(self.roster))
        object.__setattr__(self, "teams", tuple(self.teams))
        if not self.term_start < self.term_end:
            raise InvalidValue(f"course {self.course_id}: term_start must precede term_end")
        for m in self.milestones:
            if not (self.term_start <= m.date <= self.term_end):
                raise InvalidValue(f"milestone {m.name!r} falls outside the term")
        ids = [s.canonical_id for s in self.roster]
        if len(set(ids)) != len(ids):
            raise InvalidValue(f"course {self.course_id}: duplicate canonical_id in roster")
        roster_ids = set(ids)
        seen: dict[str, str] = {}
        for team in self.teams:
            for member in team.member_ids:
                if member not in roster_ids:
                    raise InvalidValue(f"team {team.team_id} member {member!r} not in roster")
                if member in seen:
                    raise InvalidValue(
                        f"student {member!r} is on both {seen[member]} and {team.team_id}"
                    )
                seen[member] = team.team_id

    def student(self, canonical_id: str) -> StudentIdentity:
        for s in self.roster:
            if s.canonical_id == canonical_id:
                return s
        raise KeyError(canonical_id)

    def team(self, team_id: str) -> Team:
        for t in self.teams:
            if t.team_id == team_id:
                return t
        raise KeyError(team_id)

    @property
    def term_window(self) -> TimeWindow:
        """The whole term as a half-open window (end day inclusive)."""
        start = datetime.combine(self.term_start, datetime.min.time(), timezone.utc)
        end = datetime.combine(self.term_end, datetime.min.time(), timezone.utc) + timedelta(days=1)
        return TimeWindow(start, end)


@dataclass(frozen=True)
class TimeWindow:
    """Half-open interval [start, end) in UTC, so adjacent windows never double count."""

    start: datetime
    end: datetime

    def __post_init__(self):
        object.__setattr__(self, "start", as_utc(self.start))
        object.__setattr__(self, "end", as_utc(self.end))
        if not self.start < self.end:
            raise InvalidValue("window start must precede end")


def window_contains(window: TimeWindow, at: datetime) -> bool:
    """True iff start <= at < end (inclusive start, exclusive end)."""
    at = as_utc(at)
    return window.start <= at < window.end


@dataclass(frozen=True)
class ActivityEvent:
    """One timestamped, student-attributed action from any source."""

    event_id: str
    canonical_id: str
    at: datetime
    kind: EventKind
    raw_source_id: str
    ticket_outcome: TicketOutcome | None = None
    additions: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "at", as_utc(self.at))
        if (self.kind is EventKind.TICKET) != (self.ticket_outcome is not None):
            raise InvalidValue(f"event {self.event_id}: ticket_outcome required iff kind is Ticket")
        if (self.kind is EventKind.COMMIT) != (self.additions is not None):
            raise InvalidValue(f"event {self.event_id}: additions required iff kind is Commit")
        if self.additions is not None and self.additions < 0:
            raise InvalidValue(f"event {self.event_id}: additions must be >= 0")


def event_metric(event: ActivityEvent) -> list[tuple[MetricKind, int]]:
    """Map an event to its metric contributions.

    A commit contributes to two categories (Commits and Additions); every
    other kind contributes a single count of 1.
    """
    if event.kind is EventKind.FORUM_INITIAL:
        return [(MetricKind.POSTS, 1)]
    if event.kind is EventKind.FORUM_REPLY:
        return [(MetricKind.REPLIES, 1)]
    if event.kind is EventKind.TICKET:
        return [(MetricKind.TICKETS, 1)]
    return [(MetricKind.COMMITS, 1), (MetricKind.ADDITIONS, event.additions or 0)]
