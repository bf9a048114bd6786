"""Aggregation of activity events into per-student and per-team metrics over a
time window, plus course baselines, distribution histograms, and timelines.

The balance measures follow the charted definitions: diff is the max-min
range of a metric across a team's members, and normdiff is that range divided
by the team total (0 when the total is 0), so normdiff is always in [0, 1]
and hits 1 exactly when one member of a pair did everything.
"""

from __future__ import annotations

import statistics
from bisect import bisect_right
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from enum import Enum
from typing import Iterable, Sequence

from .errors import BadBinCount, InvalidValue, NoTeams
from .model import (
    METRIC_KINDS,
    ActivityEvent,
    Course,
    EventKind,
    MetricKind,
    Milestone,
    Team,
    TicketOutcome,
    TimeWindow,
    event_metric,
    window_contains,
)


@dataclass(frozen=True)
class SourceSelection:
    """Which of the five metric kinds the instructor asked to see."""

    enabled: frozenset[MetricKind]

    def __post_init__(self):
        object.__setattr__(self, "enabled", frozenset(self.enabled))
        if not self.enabled:
            raise InvalidValue("source selection must enable at least one metric kind")

    @classmethod
    def all(cls) -> "SourceSelection":
        return cls(frozenset(METRIC_KINDS))

    def __contains__(self, kind: MetricKind) -> bool:
        return kind in self.enabled


@dataclass(frozen=True)
class StudentMetrics:
    canonical_id: str
    counts: dict[MetricKind, int]


@dataclass(frozen=True)
class TeamMetrics:
    team_id: str
    per_member: tuple[StudentMetrics, ...]
    total: dict[MetricKind, int]
    diff: dict[MetricKind, int]  # max - min across members
    normdiff: dict[MetricKind, float]  # diff / total, 0 when total is 0

    def member_max(self, kind: MetricKind) -> int:
        return max(m.counts[kind] for m in self.per_member)

    def member_min(self, kind: MetricKind) -> int:
        return min(m.counts[kind] for m in self.per_member)


@dataclass(frozen=True)
class CourseStats:
    """Course-wide mean/median of team totals and diffs, per metric kind."""

    team_count: int
    mean_total: dict[MetricKind, float]
    median_total: dict[MetricKind, float]
    mean_diff: dict[MetricKind, float]
    median_diff: dict[MetricKind, float]


class Statistic(Enum):
    TOTAL = "total"
    DIFF = "diff"
    NORMDIFF = "normdiff"


@dataclass(frozen=True)
class Histogram:
    metric: MetricKind
    statistic: Statistic
    bin_edges: tuple[float, ...]  # ascending; bins half-open, last bin closed
    counts: tuple[int, ...]


class Bucket(Enum):
    DAY = "day"
    WEEK = "week"


@dataclass(frozen=True)
class Timeline:
    """Per-member, per-kind counts over contiguous day or week buckets.

    series[canonical_id][kind][i] is the count in the bucket starting at
    bucket_starts[i]; overlays are the course milestones inside the window.
    """

    team_id: str
    bucket: Bucket
    bucket_starts: tuple[date, ...]
    series: dict[str, dict[MetricKind, tuple[int, ...]]]
    overlays: tuple[Milestone, ...]


def aggregate(
    events: Iterable[ActivityEvent],
    course: Course,
    window: TimeWindow,
    sources: SourceSelection,
) -> list[TeamMetrics]:
    """Count in-window events for every team, sorted by team_id.

    Disabled kinds stay in the maps as zeros, so disabling a source zeroes
    exactly that kind and leaves the rest untouched.
    """
    member_counts: dict[str, dict[MetricKind, int]] = {}
    for team in course.teams:
        for member in team.member_ids:
            member_counts[member] = {k: 0 for k in METRIC_KINDS}

    for event in events:
        counts = member_counts.get(event.canonical_id)
        if counts is None or not window_contains(window, event.at):
            continue
        for kind, n in event_metric(event):
            if kind in sources:
                counts[kind] += n

    result = []
    for team in sorted(course.teams, key=lambda t: t.team_id):
        per_member = tuple(
            StudentMetrics(member, dict(member_counts[member])) for member in team.member_ids
        )
        total: dict[MetricKind, int] = {}
        diff: dict[MetricKind, int] = {}
        normdiff: dict[MetricKind, float] = {}
        for kind in METRIC_KINDS:
            values = [m.counts[kind] for m in per_member]
            total[kind] = sum(values)
            diff[kind] = max(values) - min(values)
            normdiff[kind] = diff[kind] / total[kind] if total[kind] > 0 else 0.0
        result.append(TeamMetrics(team.team_id, per_member, total, diff, normdiff))
    return result


def course_stats(team_metrics: Sequence[TeamMetrics]) -> CourseStats:
    """Mean and median of team totals and diffs; means are exact reals."""
    if not team_metrics:
        raise NoTeams("course statistics need at least one team")
    mean_total: dict[MetricKind, float] = {}
    median_total: dict[MetricKind, float] = {}
    mean_diff: dict[MetricKind, float] = {}
    median_diff: dict[MetricKind, float] = {}
    n = len(team_metrics)
    for kind in METRIC_KINDS:
        totals = [tm.total[kind] for tm in team_metrics]
        diffs = [tm.diff[kind] for tm in team_metrics]
        mean_total[kind] = sum(totals) / n
        median_total[kind] = statistics.median(totals)
        mean_diff[kind] = sum(diffs) / n
        median_diff[kind] = statistics.median(diffs)
    return CourseStats(n, mean_total, median_total, mean_diff, median_diff)


def statistic_value(tm: TeamMetrics, kind: MetricKind, statistic: Statistic) -> float:
    if statistic is Statistic.TOTAL:
        return tm.total[kind]
    if statistic is Statistic.DIFF:
        return tm.diff[kind]
    return tm.normdiff[kind]


def histogram(
    team_metrics: Sequence[TeamMetrics],
    kind: MetricKind,
    statistic: Statistic,
    bin_count: int = 10,
) -> Histogram:
    """Equal-width bins over the observed range; one degenerate bin if flat."""
    if not team_metrics:
        raise NoTeams("histogram needs at least one team")
    if bin_count < 1:
        raise BadBinCount(f"bin_count must be >= 1, got {bin_count}")
    values = [statistic_value(tm, kind, statistic) for tm in team_metrics]
    lo, hi = min(values), max(values)
    if lo == hi:
        return Histogram(kind, statistic, (float(lo), float(hi)), (len(values),))
    width = (hi - lo) / bin_count
    edges = [lo + i * width for i in range(bin_count + 1)]
    edges[-1] = float(hi)  # guard against float drift at the top edge
    counts = [0] * bin_count
    for v in values:
        idx = bisect_right(edges, v) - 1
        if idx == bin_count:  # v == hi lands in the closed last bin
            idx -= 1
        counts[idx] += 1
    return Histogram(kind, statistic, tuple(float(e) for e in edges), tuple(counts))


def _bucket_floor(d: date, bucket: Bucket) -> date:
    if bucket is Bucket.WEEK:
        return d - timedelta(days=d.weekday())  # weeks start Monday (UTC)
    return d


def _bucket_index(d: date, first: date, bucket: Bucket) -> int:
    days = (_bucket_floor(d, bucket) - first).days
    return days // 7 if bucket is Bucket.WEEK else days


def timeline(
    events: Iterable[ActivityEvent],
    course: Course,
    team: Team,
    window: TimeWindow,
    sources: SourceSelection,
    bucket: Bucket,
) -> Timeline:
    """Bucketed per-member counts covering the window, plus milestone overlays."""
    step = timedelta(days=7 if bucket is Bucket.WEEK else 1)
    first = _bucket_floor(window.start.date(), bucket)
    starts: list[date] = []
    cur = first
    while datetime.combine(cur, time.min, timezone.utc) < window.end:
        starts.append(cur)
        cur += step

    counts: dict[str, dict[MetricKind, list[int]]] = {
        member: {k: [0] * len(starts) for k in METRIC_KINDS} for member in team.member_ids
    }
    for event in events:
        if event.canonical_id not in counts or not window_contains(window, event.at):
            continue
        idx = _bucket_index(event.at.date(), first, bucket)
        for kind, n in event_metric(event):
            if kind in sources:
                counts[event.canonical_id][kind][idx] += n

    overlays = tuple(
        m for m in course.milestones
        if window_contains(window, datetime.combine(m.date, time.min, timezone.utc))
    )
    series = {
        member: {k: tuple(v) for k, v in kinds.items()} for member, kinds in counts.items()
    }
    return Timeline(team.team_id, bucket, tuple(starts), series, overlays)


def ticket_outcome_breakdown(
    events: Iterable[ActivityEvent],
    team: Team,
    window: TimeWindow,
) -> tuple[dict[TicketOutcome, int], dict[str, dict[TicketOutcome, int]]]:
    """Office-hours outcome counts for a team in a window: total and per member."""
    members = set(team.member_ids)
    total = {o: 0 for o in TicketOutcome}
    per_member = {m: {o: 0 for o in TicketOutcome} for m in team.member_ids}
    for event in events:
        if (
            event.kind is EventKind.TICKET
            and event.canonical_id in members
            and window_contains(window, event.at)
        ):
            total[event.ticket_outcome] += 1
            per_member[event.canonical_id][event.ticket_outcome] += 1
    return total, per_member
