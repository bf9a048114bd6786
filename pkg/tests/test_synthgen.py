from datetime import datetime, time, timedelta, timezone

import pytest
from conftest import ingest_synthetic

from concert.errors import BadMix
from concert.filters import parse_filter, apply_filter
from concert.ingestion import parse_git_numstat
from concert.metrics import SourceSelection, aggregate, course_stats
from concert.model import EventKind, MetricKind
from concert.synthgen import FILE_GIT, Archetype, generate

MIX_20 = {
    Archetype.BALANCED: 9,
    Archetype.FREE_RIDER: 3,
    Archetype.SILENT: 3,
    Archetype.FORUM_ONLY: 3,
    Archetype.OFFICE_HOURS_HEAVY: 2,
}


@pytest.fixture(scope="module")
def synth20():
    return generate(20, archetype_mix=MIX_20, seed=2020)


@pytest.fixture(scope="module")
def pipeline20(synth20):
    course, events, report, raw = ingest_synthetic(synth20.files)
    metrics = aggregate(events, course, course.term_window, SourceSelection.all())
    return synth20, course, events, report, metrics


def planted(synth, archetype):
    return {t["team_id"] for t in synth.manifest["teams"] if t["archetype"] == archetype.value}


class TestDeterminism:
    def test_same_seed_same_bytes(self):
        a = generate(5, seed=7)
        b = generate(5, seed=7)
        assert a.files == b.files

    def test_different_seed_differs(self):
        assert generate(5, seed=7).files != generate(5, seed=8).files


class TestMixValidation:
    def test_mix_must_sum_to_team_count(self):
        with pytest.raises(BadMix):
            generate(5, archetype_mix={Archetype.BALANCED: 3})

    def test_negative_count_rejected(self):
        with pytest.raises(BadMix):
            generate(1, archetype_mix={Archetype.BALANCED: 2, Archetype.SILENT: -1})

    def test_free_rider_needs_pairs(self):
        with pytest.raises(BadMix):
            generate(1, members_per_team=1, archetype_mix={Archetype.FREE_RIDER: 1})

    def test_default_mix_cycles_archetypes(self):
        synth = generate(7, seed=1)
        counts = {}
        for t in synth.manifest["teams"]:
            counts[t["archetype"]] = counts.get(t["archetype"], 0) + 1
        assert sum(counts.values()) == 7
        assert max(counts.values()) - min(counts.values()) <= 1


class TestPlantedBehavior:
    def test_manifest_lists_three_silent_teams(self, synth20):
        assert len(planted(synth20, Archetype.SILENT)) == 3

    def test_silent_teams_emit_no_forum_or_ticket_records(self, pipeline20):
        synth, course, events, _, _ = pipeline20
        silent_members = set()
        for team in course.teams:
            if team.team_id in planted(synth, Archetype.SILENT):
                silent_members.update(team.member_ids)
        for event in events:
            if event.canonical_id in silent_members:
                assert event.kind is EventKind.COMMIT

    def test_ingestion_resolves_every_record(self, pipeline20):
        _, _, events, report, _ = pipeline20
        assert report.unresolved == []

    def test_no_silent_drops_per_source(self, synth20):
        _, _, report, (forum, tickets, commits) = ingest_synthetic(synth20.files)
        assert report.events_loaded["forum"] == len(forum)
        assert report.events_loaded["tickets"] == len(tickets)
        assert report.events_loaded["git"] == len(commits)


class TestArchetypeRecovery:
    def recovered(self, pipeline, filter_name):
        synth, course, events, _, metrics = pipeline
        stats = course_stats(metrics)
        expr = parse_filter(synth.manifest["canonical_filters"][filter_name])
        return set(apply_filter(expr, metrics, stats))

    def test_silent_filter_selects_exactly_planted_silent(self, pipeline20):
        assert self.recovered(pipeline20, "silent") == planted(pipeline20[0], Archetype.SILENT)

    def test_free_rider_filter_selects_exactly_planted_free_riders(self, pipeline20):
        assert self.recovered(pipeline20, "free_rider") == planted(pipeline20[0], Archetype.FREE_RIDER)

    def test_forum_only_filter_selects_exactly_planted_forum_only(self, pipeline20):
        assert self.recovered(pipeline20, "forum_only") == planted(pipeline20[0], Archetype.FORUM_ONLY)

    def test_office_hours_filter_selects_exactly_planted_heavy(self, pipeline20):
        assert self.recovered(pipeline20, "office_hours_heavy") == planted(
            pipeline20[0], Archetype.OFFICE_HOURS_HEAVY)

    def test_balanced_filter_covers_planted_balanced_without_contradictions(self, pipeline20):
        got = self.recovered(pipeline20, "balanced")
        assert planted(pipeline20[0], Archetype.BALANCED) <= got
        assert not got & planted(pipeline20[0], Archetype.SILENT)
        assert not got & planted(pipeline20[0], Archetype.FORUM_ONLY)
        assert not got & planted(pipeline20[0], Archetype.FREE_RIDER)

    def test_struggling_filter_selects_exactly_silent(self, pipeline20):
        assert self.recovered(pipeline20, "struggling") == planted(pipeline20[0], Archetype.SILENT)

    def test_free_rider_normdiff_at_least_point_eight(self, pipeline20):
        synth, _, _, _, metrics = pipeline20
        fr_ids = planted(synth, Archetype.FREE_RIDER)
        for tm in metrics:
            if tm.team_id in fr_ids:
                assert tm.normdiff[MetricKind.COMMITS] >= 0.8
                assert tm.normdiff[MetricKind.ADDITIONS] >= 0.8

    def test_free_rider_member_rates_bounded(self, pipeline20):
        synth, _, _, _, metrics = pipeline20
        fr_ids = planted(synth, Archetype.FREE_RIDER)
        for tm in metrics:
            if tm.team_id not in fr_ids:
                continue
            commit_counts = sorted(m.counts[MetricKind.COMMITS] for m in tm.per_member)
            rider, teammates = commit_counts[0], commit_counts[1:]
            assert all(rider <= 0.1 * c for c in teammates)


class TestTrafficShape:
    def test_activity_bursts_near_milestones(self, pipeline20):
        synth, course, events, _, _ = pipeline20
        burst_windows = []
        for m in course.milestones:
            end = datetime.combine(m.date, time.min, timezone.utc)
            burst_windows.append((end - timedelta(days=3), end))
        in_burst = sum(
            1 for e in events if any(lo <= e.at < hi for lo, hi in burst_windows)
        )
        # bursts put ~45% of events into ~10% of the term; far above uniform
        assert in_burst / len(events) > 0.3

    def test_all_events_inside_term(self, pipeline20):
        _, course, events, _, _ = pipeline20
        window = course.term_window
        for e in events:
            assert window.start <= e.at < window.end

    def test_additions_conserved_with_ignore_rules(self, synth20):
        raw_records, _ = parse_git_numstat(synth20.files[FILE_GIT])
        raw_total = sum(r.additions for r in raw_records)
        _, events, report, _ = ingest_synthetic(synth20.files, ignore_patterns=["^src/test/"])
        resolved_total = sum(e.additions for e in events if e.kind is EventKind.COMMIT)
        assert report.ignored_file_lines > 0
        assert resolved_total + report.ignored_file_lines == raw_total
