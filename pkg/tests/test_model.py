from datetime import date, datetime, timedelta, timezone

import pytest

from concert.errors import InvalidValue
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
    event_metric,
    parse_timestamp,
    window_contains,
)


def utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


WEEK = TimeWindow(utc(2020, 9, 1), utc(2020, 9, 8))


class TestWindowContains:
    def test_inclusive_start(self):
        assert window_contains(WEEK, utc(2020, 9, 1)) is True

    def test_exclusive_end(self):
        assert window_contains(WEEK, utc(2020, 9, 8)) is False

    def test_interior_point(self):
        assert window_contains(WEEK, utc(2020, 9, 4, 12)) is True

    def test_naive_timestamp_treated_as_utc(self):
        assert window_contains(WEEK, datetime(2020, 9, 4, 12)) is True

    def test_other_timezone_normalized(self):
        # 2020-09-07 21:00 -0500 is 2020-09-08 02:00 UTC, outside the window
        est = timezone(timedelta(hours=-5))
        assert window_contains(WEEK, datetime(2020, 9, 7, 21, tzinfo=est)) is False

    def test_degenerate_window_rejected(self):
        with pytest.raises(InvalidValue):
            TimeWindow(utc(2020, 9, 1), utc(2020, 9, 1))


class TestEventMetric:
    def test_commit_contributes_commits_and_additions(self):
        e = ActivityEvent("e1", "s1", utc(2020, 9, 2), EventKind.COMMIT, "sha1", additions=120)
        assert event_metric(e) == [(MetricKind.COMMITS, 1), (MetricKind.ADDITIONS, 120)]

    def test_reply_maps_directly(self):
        e = ActivityEvent("e2", "s1", utc(2020, 9, 2), EventKind.FORUM_REPLY, "p2")
        assert event_metric(e) == [(MetricKind.REPLIES, 1)]

    def test_empty_diff_commit(self):
        e = ActivityEvent("e3", "s1", utc(2020, 9, 2), EventKind.COMMIT, "sha3", additions=0)
        assert event_metric(e) == [(MetricKind.COMMITS, 1), (MetricKind.ADDITIONS, 0)]

    def test_initial_post_and_ticket(self):
        post = ActivityEvent("e4", "s1", utc(2020, 9, 2), EventKind.FORUM_INITIAL, "p4")
        ticket = ActivityEvent(
            "e5", "s1", utc(2020, 9, 2), EventKind.TICKET, "t5",
            ticket_outcome=TicketOutcome.RESOLVED,
        )
        assert event_metric(post) == [(MetricKind.POSTS, 1)]
        assert event_metric(ticket) == [(MetricKind.TICKETS, 1)]

    def test_every_event_maps_to_one_or_two_pairs(self):
        events = [
            ActivityEvent("a", "s", utc(2020, 9, 2), EventKind.FORUM_INITIAL, "p"),
            ActivityEvent("b", "s", utc(2020, 9, 2), EventKind.FORUM_REPLY, "p"),
            ActivityEvent("c", "s", utc(2020, 9, 2), EventKind.TICKET, "t",
                          ticket_outcome=TicketOutcome.UNSERVED),
            ActivityEvent("d", "s", utc(2020, 9, 2), EventKind.COMMIT, "sha", additions=7),
        ]
        for e in events:
            pairs = event_metric(e)
            assert 1 <= len(pairs) <= 2
            assert (len(pairs) == 2) == (e.kind is EventKind.COMMIT)


class TestEventInvariants:
    def test_ticket_requires_outcome(self):
        with pytest.raises(InvalidValue):
            ActivityEvent("e", "s", utc(2020, 9, 2), EventKind.TICKET, "t")

    def test_non_ticket_rejects_outcome(self):
        with pytest.raises(InvalidValue):
            ActivityEvent("e", "s", utc(2020, 9, 2), EventKind.FORUM_REPLY, "p",
                          ticket_outcome=TicketOutcome.RESOLVED)

    def test_commit_requires_additions(self):
        with pytest.raises(InvalidValue):
            ActivityEvent("e", "s", utc(2020, 9, 2), EventKind.COMMIT, "sha")

    def test_negative_additions_rejected(self):
        with pytest.raises(InvalidValue):
            ActivityEvent("e", "s", utc(2020, 9, 2), EventKind.COMMIT, "sha", additions=-1)


class TestIdentityAndTeam:
    def test_git_emails_lowercased(self):
        s = StudentIdentity("s1", "Alice", "alice@x.edu", git_emails=frozenset({"A@X.EDU"}))
        assert s.git_emails == frozenset({"a@x.edu"})

    @pytest.mark.parametrize("email", ["", "no-at", "@x.edu", "a@", "a@@x.edu", "a@b@c"])
    def test_bad_emails_rejected(self, email):
        with pytest.raises(InvalidValue):
            StudentIdentity("s1", "Alice", email)

    def test_team_needs_members_and_unique_ids(self):
        with pytest.raises(InvalidValue):
            Team("t1", "Alpha", ())
        with pytest.raises(InvalidValue):
            Team("t1", "Alpha", ("s1", "s1"))

    def test_relative_repo_url_rejected(self):
        with pytest.raises(InvalidValue):
            Team("t1", "Alpha", ("s1",), repo_url="github.com/x/y")
        Team("t1", "Alpha", ("s1",), repo_url="https://github.com/x/y")


def _roster(*ids):
    return tuple(StudentIdentity(i, i.upper(), f"{i}@x.edu") for i in ids)


class TestCourse:
    def test_member_must_exist(self):
        with pytest.raises(InvalidValue):
            Course("c", "C", date(2020, 8, 10), date(2020, 12, 4),
                   roster=_roster("s1"), teams=(Team("t1", "A", ("ghost",)),))

    def test_student_on_at_most_one_team(self):
        with pytest.raises(InvalidValue):
            Course("c", "C", date(2020, 8, 10), date(2020, 12, 4),
                   roster=_roster("s1", "s2"),
                   teams=(Team("t1", "A", ("s1",)), Team("t2", "B", ("s1", "s2"))))

    def test_milestone_must_fall_in_term(self):
        with pytest.raises(InvalidValue):
            Course("c", "C", date(2020, 8, 10), date(2020, 12, 4),
                   milestones=(Milestone("late", date(2020, 12, 20)),))

    def test_term_window_covers_last_day(self):
        c = Course("c", "C", date(2020, 8, 10), date(2020, 12, 4))
        assert window_contains(c.term_window, utc(2020, 12, 4, 23, 59))
        assert not window_contains(c.term_window, utc(2020, 12, 5))


class TestParseTimestamp:
    def test_z_suffix(self):
        assert parse_timestamp("2020-09-01T10:00:00Z") == utc(2020, 9, 1, 10)

    def test_offset_converted(self):
        assert parse_timestamp("2020-09-01T06:00:00-04:00") == utc(2020, 9, 1, 10)

    def test_date_only(self):
        assert parse_timestamp("2020-09-01") == utc(2020, 9, 1)

    def test_garbage_raises(self):
        with pytest.raises(ValueError):
            parse_timestamp("yesterday")
