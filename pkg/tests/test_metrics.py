import random
from datetime import date, datetime, timedelta, timezone

import pytest

from concert.errors import BadBinCount, InvalidValue, NoTeams
from concert.metrics import (
    Bucket,
    SourceSelection,
    Statistic,
    aggregate,
    course_stats,
    histogram,
    ticket_outcome_breakdown,
    timeline,
)
from concert.model import (
    ActivityEvent,
    Course,
    EventKind,
    MetricKind,
    Milestone,
    StudentIdentity,
    Team,
    TicketOutcome,
    TimeWindow,
)

ALL = SourceSelection.all()


def utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


def make_course(team_sizes, milestones=()):
    roster = []
    teams = []
    sid = 0
    for t, size in enumerate(team_sizes, start=1):
        members = []
        for _ in range(size):
            sid += 1
            cid = f"s{sid:03d}"
            roster.append(StudentIdentity(cid, cid.upper(), f"{cid}@x.edu"))
            members.append(cid)
        teams.append(Team(f"t{t:02d}", f"Team {t}", tuple(members)))
    return Course(
        "cs210", "Software Engineering Studio",
        date(2020, 8, 10), date(2020, 12, 4),
        milestones=tuple(milestones), roster=tuple(roster), teams=tuple(teams),
    )


def ev(cid, at, kind, additions=None, outcome=None, eid=None):
    eid = eid or f"e{id(at)}-{random.random()}"
    return ActivityEvent(eid, cid, at, kind, eid,
                         ticket_outcome=outcome, additions=additions)


def random_events(rng, course, n, start, end):
    """Seeded random event soup across all rostered students."""
    students = [s.canonical_id for s in course.roster]
    span = int((end - start).total_seconds())
    events = []
    for i in range(n):
        at = start + timedelta(seconds=rng.randrange(span))
        kind = rng.choice(list(EventKind))
        additions = rng.randrange(0, 400) if kind is EventKind.COMMIT else None
        outcome = rng.choice(list(TicketOutcome)) if kind is EventKind.TICKET else None
        events.append(ActivityEvent(f"e{i}", rng.choice(students), at, kind, f"r{i}",
                                    ticket_outcome=outcome, additions=additions))
    return events


# Independent oracle: plain per-event counter loop over string-keyed dicts.
# Deliberately avoids event_metric/aggregate so the two paths share nothing.

_NAMES = ["posts", "replies", "commits", "additions", "tickets"]


def brute_force(events, course, window, enabled_names):
    out = {}
    for team in course.teams:
        counts = {m: {name: 0 for name in _NAMES} for m in team.member_ids}
        for e in events:
            if e.canonical_id not in counts:
                continue
            if not (window.start <= e.at < window.end):
                continue
            c = counts[e.canonical_id]
            if e.kind is EventKind.FORUM_INITIAL and "posts" in enabled_names:
                c["posts"] += 1
            elif e.kind is EventKind.FORUM_REPLY and "replies" in enabled_names:
                c["replies"] += 1
            elif e.kind is EventKind.TICKET and "tickets" in enabled_names:
                c["tickets"] += 1
            elif e.kind is EventKind.COMMIT:
                if "commits" in enabled_names:
                    c["commits"] += 1
                if "additions" in enabled_names:
                    c["additions"] += e.additions
        team_out = {}
        for name in _NAMES:
            values = [counts[m][name] for m in team.member_ids]
            total = sum(values)
            diff = max(values) - min(values)
            team_out[name] = (total, diff, diff / total if total else 0.0)
        out[team.team_id] = (counts, team_out)
    return out


def assert_matches_oracle(metrics_list, oracle):
    assert sorted(oracle) == [tm.team_id for tm in metrics_list]
    for tm in metrics_list:
        member_counts, team_out = oracle[tm.team_id]
        for sm in tm.per_member:
            for kind in MetricKind:
                assert sm.counts[kind] == member_counts[sm.canonical_id][kind.value]
        for kind in MetricKind:
            total, diff, normdiff = team_out[kind.value]
            assert tm.total[kind] == total
            assert tm.diff[kind] == diff
            assert tm.normdiff[kind] == normdiff


class TestAggregate:
    def test_no_events_all_zero(self):
        course = make_course([2, 3])
        for tm in aggregate([], course, course.term_window, ALL):
            for kind in MetricKind:
                assert tm.total[kind] == 0
                assert tm.diff[kind] == 0
                assert tm.normdiff[kind] == 0.0

    def test_one_dominant_member_normdiff_is_one(self):
        course = make_course([2])
        events = [ev("s001", utc(2020, 9, 2, 10, 0, i), EventKind.COMMIT, additions=10, eid=f"c{i}")
                  for i in range(5)]
        (tm,) = aggregate(events, course, course.term_window, ALL)
        assert tm.total[MetricKind.COMMITS] == 5
        assert tm.diff[MetricKind.COMMITS] == 5
        assert tm.normdiff[MetricKind.COMMITS] == 1.0

    def test_eighteen_office_hour_visits(self):
        course = make_course([2])
        events = [
            ev(["s001", "s002"][i % 2], utc(2020, 9, 2 + i, 14), EventKind.TICKET,
               outcome=TicketOutcome.RESOLVED, eid=f"k{i}")
            for i in range(18)
        ]
        (tm,) = aggregate(events, course, course.term_window, ALL)
        assert tm.total[MetricKind.TICKETS] == 18

    def test_inactive_team_still_listed(self):
        course = make_course([2, 2])
        events = [ev("s001", utc(2020, 9, 2), EventKind.FORUM_INITIAL, eid="p1")]
        metrics = aggregate(events, course, course.term_window, ALL)
        assert [tm.team_id for tm in metrics] == ["t01", "t02"]
        assert metrics[1].total[MetricKind.POSTS] == 0

    def test_matches_brute_force_oracle(self):
        rng = random.Random(99)
        course = make_course([2, 2, 3, 4, 1])
        events = random_events(rng, course, 800, utc(2020, 8, 1), utc(2020, 12, 20))
        window = TimeWindow(utc(2020, 9, 1), utc(2020, 10, 1))
        oracle = brute_force(events, course, window, set(_NAMES))
        assert_matches_oracle(aggregate(events, course, window, ALL), oracle)

    def test_window_partition_additivity(self):
        rng = random.Random(5)
        course = make_course([2, 3])
        events = random_events(rng, course, 400, utc(2020, 8, 10), utc(2020, 12, 4))
        full = TimeWindow(utc(2020, 9, 1), utc(2020, 11, 1))
        left = TimeWindow(utc(2020, 9, 1), utc(2020, 10, 1))
        right = TimeWindow(utc(2020, 10, 1), utc(2020, 11, 1))
        total = aggregate(events, course, full, ALL)
        l = aggregate(events, course, left, ALL)
        r = aggregate(events, course, right, ALL)
        for tm_f, tm_l, tm_r in zip(total, l, r):
            for kind in MetricKind:
                assert tm_f.total[kind] == tm_l.total[kind] + tm_r.total[kind]

    def test_source_selection_zeroes_exactly_that_kind(self):
        rng = random.Random(13)
        course = make_course([2, 2])
        events = random_events(rng, course, 300, utc(2020, 8, 10), utc(2020, 12, 4))
        window = course.term_window
        full = aggregate(events, course, window, ALL)
        without_posts = aggregate(
            events, course, window,
            SourceSelection(frozenset(MetricKind) - {MetricKind.POSTS}),
        )
        for tm_full, tm_part in zip(full, without_posts):
            assert tm_part.total[MetricKind.POSTS] == 0
            assert tm_part.diff[MetricKind.POSTS] == 0
            for kind in MetricKind:
                if kind is not MetricKind.POSTS:
                    assert tm_part.total[kind] == tm_full.total[kind]
                    assert tm_part.normdiff[kind] == tm_full.normdiff[kind]

    def test_empty_selection_rejected(self):
        with pytest.raises(InvalidValue):
            SourceSelection(frozenset())


class TestNormdiffProperties:
    def _team_metrics_for(self, vector):
        course = make_course([len(vector)])
        events = []
        for member_idx, commits in enumerate(vector, start=1):
            for j in range(commits):
                events.append(ev(f"s{member_idx:03d}", utc(2020, 9, 2, 10, 0),
                                 EventKind.COMMIT, additions=0,
                                 eid=f"c{member_idx}-{j}"))
        (tm,) = aggregate(events, course, course.term_window, ALL)
        return tm

    def test_bounds_and_identities(self):
        rng = random.Random(42)
        for _ in range(200):
            vector = [rng.randrange(0, 40) for _ in range(rng.randrange(1, 6))]
            tm = self._team_metrics_for(vector)
            nd = tm.normdiff[MetricKind.COMMITS]
            assert 0.0 <= nd <= 1.0
            if len(set(vector)) == 1 or sum(vector) == 0:
                assert nd == 0.0
            else:
                assert nd > 0.0

    def test_dominant_pair_is_exactly_one(self):
        for v in (1, 2, 5, 17):
            tm = self._team_metrics_for([v, 0])
            assert tm.normdiff[MetricKind.COMMITS] == 1.0

    def test_scaling_invariance(self):
        rng = random.Random(17)
        for _ in range(50):
            vector = [rng.randrange(0, 30) for _ in range(rng.randrange(2, 5))]
            k = rng.randrange(1, 9)
            nd1 = self._team_metrics_for(vector).normdiff[MetricKind.COMMITS]
            nd2 = self._team_metrics_for([v * k for v in vector]).normdiff[MetricKind.COMMITS]
            assert nd1 == nd2


def metrics_with_commit_totals(totals):
    """One 1-member team per total, using commit counts (diff is 0)."""
    course = make_course([1] * len(totals))
    events = []
    for i, total in enumerate(totals, start=1):
        for j in range(total):
            events.append(ev(f"s{i:03d}", utc(2020, 9, 2), EventKind.COMMIT,
                             additions=0, eid=f"c{i}-{j}"))
    return aggregate(events, course, course.term_window, ALL)


class TestCourseStats:
    def test_singleton(self):
        stats = course_stats(metrics_with_commit_totals([10]))
        assert stats.mean_total[MetricKind.COMMITS] == 10
        assert stats.median_total[MetricKind.COMMITS] == 10

    def test_three_teams(self):
        # hand-computed: mean = (2+4+10)/3 = 16/3, median of [2,4,10] = 4
        stats = course_stats(metrics_with_commit_totals([2, 4, 10]))
        assert stats.mean_total[MetricKind.COMMITS] == 16 / 3
        assert stats.median_total[MetricKind.COMMITS] == 4

    def test_even_count_median_is_midpoint_average(self):
        stats = course_stats(metrics_with_commit_totals([1, 3, 5, 7]))
        assert stats.median_total[MetricKind.COMMITS] == 4

    def test_no_teams(self):
        with pytest.raises(NoTeams):
            course_stats([])


def brute_force_bins(values, edges):
    """Independent binning check: scan edges per value, last bin closed."""
    counts = [0] * (len(edges) - 1)
    for v in values:
        for i in range(len(counts)):
            last = i == len(counts) - 1
            if edges[i] <= v < edges[i + 1] or (last and v == edges[i + 1]):
                counts[i] += 1
                break
    return counts


class TestHistogram:
    def test_zero_range_degenerate_bin(self):
        h = histogram(metrics_with_commit_totals([0, 0, 0]), MetricKind.COMMITS,
                      Statistic.TOTAL, bin_count=4)
        assert h.bin_edges == (0.0, 0.0)
        assert h.counts == (3,)

    def test_two_bins_split(self):
        # brute-force oracle over [0,1,2,3] with edges [0,1.5,3] -> [2,2]
        assert brute_force_bins([0, 1, 2, 3], [0, 1.5, 3]) == [2, 2]
        h = histogram(metrics_with_commit_totals([0, 1, 2, 3]), MetricKind.COMMITS,
                      Statistic.TOTAL, bin_count=2)
        assert h.bin_edges == (0.0, 1.5, 3.0)
        assert h.counts == (2, 2)

    def test_counts_sum_to_team_count_and_match_oracle(self):
        rng = random.Random(3)
        for _ in range(30):
            totals = [rng.randrange(0, 60) for _ in range(rng.randrange(1, 25))]
            bins = rng.randrange(1, 12)
            h = histogram(metrics_with_commit_totals(totals), MetricKind.COMMITS,
                          Statistic.TOTAL, bin_count=bins)
            assert sum(h.counts) == len(totals)
            assert list(h.counts) == brute_force_bins(sorted(totals), list(h.bin_edges))

    def test_normdiff_edges_stay_in_unit_interval(self):
        course = make_course([2, 2, 2])
        rng = random.Random(8)
        events = random_events(rng, course, 200, utc(2020, 8, 10), utc(2020, 12, 4))
        metrics = aggregate(events, course, course.term_window, ALL)
        h = histogram(metrics, MetricKind.COMMITS, Statistic.NORMDIFF, bin_count=5)
        assert all(0.0 <= e <= 1.0 for e in h.bin_edges)

    def test_bad_bin_count(self):
        with pytest.raises(BadBinCount):
            histogram(metrics_with_commit_totals([1]), MetricKind.COMMITS,
                      Statistic.TOTAL, bin_count=0)


class TestTimeline:
    def test_seven_day_window_has_seven_day_buckets(self):
        course = make_course([2])
        window = TimeWindow(utc(2020, 9, 7), utc(2020, 9, 14))
        tl = timeline([], course, course.teams[0], window, ALL, Bucket.DAY)
        assert len(tl.bucket_starts) == 7
        assert tl.bucket_starts[0] == date(2020, 9, 7)
        assert all(len(v) == 7 for kinds in tl.series.values() for v in kinds.values())

    def test_week_buckets_start_monday(self):
        course = make_course([2])
        window = TimeWindow(utc(2020, 9, 9), utc(2020, 9, 30))  # Wed .. Wed
        tl = timeline([], course, course.teams[0], window, ALL, Bucket.WEEK)
        assert tl.bucket_starts[0] == date(2020, 9, 7)  # the Monday before
        assert all(d.weekday() == 0 for d in tl.bucket_starts)

    def test_bucket_sums_match_aggregate(self):
        rng = random.Random(21)
        course = make_course([2, 3])
        events = random_events(rng, course, 500, utc(2020, 8, 1), utc(2020, 12, 20))
        window = TimeWindow(utc(2020, 9, 3, 12), utc(2020, 10, 17, 6))
        metrics = aggregate(events, course, window, ALL)
        for team, tm in zip(sorted(course.teams, key=lambda t: t.team_id), metrics):
            for bucket in Bucket:
                tl = timeline(events, course, team, window, ALL, bucket)
                for sm in tm.per_member:
                    for kind in MetricKind:
                        assert sum(tl.series[sm.canonical_id][kind]) == sm.counts[kind]

    def test_milestone_overlays_clipped_to_window(self):
        course = make_course([2], milestones=[
            Milestone("project 1", date(2020, 9, 25)),
            Milestone("project 2", date(2020, 11, 13)),
        ])
        window = TimeWindow(utc(2020, 9, 1), utc(2020, 10, 1))
        tl = timeline([], course, course.teams[0], window, ALL, Bucket.DAY)
        assert [m.name for m in tl.overlays] == ["project 1"]


class TestTicketOutcomes:
    def test_breakdown_counts(self):
        course = make_course([2])
        events = [
            ev("s001", utc(2020, 9, 2), EventKind.TICKET, outcome=TicketOutcome.RESOLVED, eid="k1"),
            ev("s001", utc(2020, 9, 3), EventKind.TICKET, outcome=TicketOutcome.UNSERVED, eid="k2"),
            ev("s002", utc(2020, 9, 4), EventKind.TICKET, outcome=TicketOutcome.RESOLVED, eid="k3"),
            ev("s002", utc(2021, 1, 4), EventKind.TICKET, outcome=TicketOutcome.RESOLVED, eid="k4"),
        ]
        window = TimeWindow(utc(2020, 9, 1), utc(2020, 10, 1))
        total, per_member = ticket_outcome_breakdown(events, course.teams[0], window)
        assert total[TicketOutcome.RESOLVED] == 2
        assert total[TicketOutcome.UNSERVED] == 1
        assert total[TicketOutcome.UNRESOLVED_HELPED] == 0
        assert per_member["s001"][TicketOutcome.UNSERVED] == 1
