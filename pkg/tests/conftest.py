"""Shared helpers: run synthetic files through the full ingestion pipeline."""

from concert import ingestion, synthgen


def ingest_synthetic(files, ignore_patterns=()):
    """generate() output -> (course, events, report, raw record lists)."""
    course = synthgen.course_from_files(files)
    roster, _ = ingestion.load_roster(files[synthgen.FILE_ROSTER], files[synthgen.FILE_TEAMS])
    forum = ingestion.parse_forum_export(files[synthgen.FILE_FORUM])
    tickets = ingestion.parse_ticket_export(files[synthgen.FILE_TICKETS])
    rules = ingestion.IgnoreRules.compile(ignore_patterns)
    commits, ignored = ingestion.parse_git_numstat(files[synthgen.FILE_GIT], rules)
    events, report = ingestion.resolve_events(
        roster, forum=forum, tickets=tickets, commits=commits, ignored_additions=ignored,
    )
    return course, events, report, (forum, tickets, commits)
