"""HTTP API over the analytics core, plus the response-document builders
shared with the CLI report command.

All analytics queries take an explicit time window; there is no server-side
default time frame. Responses are deterministic: teams are ordered by id and
metric maps follow the canonical kind order.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .emailer import render_email
from .errors import ConcertError, InvalidValue, NotFound, UnknownMetric
from .filters import apply_filter, parse_filter, print_filter
from .ingestion import IgnoreRules, parse_forum_export, parse_git_numstat, parse_ticket_export, resolve_events
from .metrics import (
    Bucket,
    CourseStats,
    SourceSelection,
    Statistic,
    TeamMetrics,
    aggregate,
    course_stats,
    histogram,
    ticket_outcome_breakdown,
    timeline,
)
from .model import (
    METRIC_KINDS,
    Course,
    MetricKind,
    Team,
    TicketOutcome,
    TimeWindow,
    parse_timestamp,
)
from .store import DataStore


# --- query/body parsing -----------------------------------------------------

def parse_window(start: str | None, end: str | None) -> TimeWindow:
    if not start or not end:
        raise InvalidValue("start and end are required (ISO-8601 timestamps or dates)")
    try:
        return TimeWindow(parse_timestamp(start), parse_timestamp(end))
    except ValueError as exc:
        raise InvalidValue(f"bad timestamp: {exc}")


def parse_sources(value) -> SourceSelection:
    if value is None or value == "":
        return SourceSelection.all()
    tokens = value.split(",") if isinstance(value, str) else list(value)
    kinds = set()
    for token in tokens:
        token = str(token).strip().lower()
        try:
            kinds.add(MetricKind(token))
        except ValueError:
            raise UnknownMetric(f"unknown metric kind {token!r}")
    return SourceSelection(frozenset(kinds))


# --- response documents ------------------------------------------------------

def kind_map(values) -> dict:
    return {k.value: values[k] for k in METRIC_KINDS}


def team_doc(tm: TeamMetrics, team: Team, course: Course) -> dict:
    member_ids = set(team.member_ids)
    members = [s for s in course.roster if s.canonical_id in member_ids]
    return {
        "team_id": tm.team_id,
        "name": team.name,
        "repo_url": team.repo_url,
        "members": [
            {"canonical_id": s.canonical_id, "display_name": s.display_name, "email": s.email}
            for s in members
        ],
        "total": kind_map(tm.total),
        "diff": kind_map(tm.diff),
        "normdiff": kind_map(tm.normdiff),
        "per_member": [
            {"canonical_id": sm.canonical_id, "counts": kind_map(sm.counts)}
            for sm in tm.per_member
        ],
    }


def stats_doc(stats: CourseStats) -> dict:
    return {
        "team_count": stats.team_count,
        "mean_total": kind_map(stats.mean_total),
        "median_total": kind_map(stats.median_total),
        "mean_diff": kind_map(stats.mean_diff),
        "median_diff": kind_map(stats.median_diff),
    }


def window_doc(window: TimeWindow) -> dict:
    return {"start": window.start.isoformat(), "end": window.end.isoformat()}


def compute_overview(store: DataStore, course_id: str, window: TimeWindow, sources: SourceSelection):
    """Shared by the overview endpoint, filter application, and the CLI report."""
    course = store.load_course(course_id)
    events = store.load_events(course_id)
    metrics = aggregate(events, course, window, sources)
    stats = course_stats(metrics)
    return course, events, metrics, stats


def create_app(data_dir: Path | str, ui_dir: Path | str | None = None) -> FastAPI:
    store = DataStore(data_dir)
    app = FastAPI(title="Teamwork analytics service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    @app.exception_handler(ConcertError)
    async def concert_error_handler(_request: Request, exc: ConcertError):
        return JSONResponse(status_code=exc.http_status, content={"error": exc.payload()})

    def load_team(course: Course, team_id: str) -> Team:
        try:
            return course.team(team_id)
        except KeyError:
            raise NotFound(f"no team named {team_id!r} in course {course.course_id}")

    async def body_of(request: Request) -> dict:
        try:
            doc = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError as exc:
            raise InvalidValue(f"request body is not valid JSON: {exc}")
        if not isinstance(doc, dict):
            raise InvalidValue("request body must be a JSON object")
        return doc

    # --- courses -------------------------------------------------------------

    @app.get("/api/courses")
    def list_courses():
        out = []
        for course_id in store.course_ids():
            course = store.load_course(course_id)
            out.append({
                "course_id": course.course_id,
                "title": course.title,
                "term_start": course.term_start.isoformat(),
                "term_end": course.term_end.isoformat(),
                "team_count": len(course.teams),
                "milestones": [
                    {"name": m.name, "date": m.date.isoformat()} for m in course.milestones
                ],
            })
        return out

    @app.get("/api/courses/{course_id}/overview")
    def overview(course_id: str, start: str | None = None, end: str | None = None,
                 sources: str | None = None, bins: int = 10):
        window = parse_window(start, end)
        selection = parse_sources(sources)
        course, _, metrics, stats = compute_overview(store, course_id, window, selection)
        histograms = []
        for kind in METRIC_KINDS:
            if kind not in selection:
                continue
            for statistic in Statistic:
                h = histogram(metrics, kind, statistic, bins)
                histograms.append({
                    "metric": kind.value,
                    "statistic": statistic.value,
                    "bin_edges": list(h.bin_edges),
                    "counts": list(h.counts),
                })
        return {
            "course_id": course.course_id,
            "window": window_doc(window),
            "sources": [k.value for k in METRIC_KINDS if k in selection],
            "teams": [team_doc(tm, course.team(tm.team_id), course) for tm in metrics],
            "stats": stats_doc(stats),
            "histograms": histograms,
        }

    # --- filters ---------------------------------------------------------------

    @app.post("/api/courses/{course_id}/filters/apply")
    async def filters_apply(course_id: str, request: Request):
        body = await body_of(request)
        expr_text = body.get("expr_text")
        name = body.get("name")
        if (expr_text is None) == (name is None):
            raise InvalidValue("provide exactly one of 'expr_text' or 'name'")
        window = parse_window(body.get("start"), body.get("end"))
        selection = parse_sources(body.get("sources"))
        filters = store.filter_store(course_id)
        expr = parse_filter(expr_text) if expr_text is not None else filters.get(name).expr
        course, _, metrics, stats = compute_overview(store, course_id, window, selection)
        selected = apply_filter(expr, metrics, stats, filters.snapshot())
        by_id = {tm.team_id: tm for tm in metrics}
        return {
            "course_id": course.course_id,
            "window": window_doc(window),
            "sources": [k.value for k in METRIC_KINDS if k in selection],
            "expr": print_filter(expr),
            "team_ids": selected,
            "teams": [team_doc(by_id[tid], course.team(tid), course) for tid in selected],
            "stats": stats_doc(stats),
        }

    def saved_filter_doc(sf):
        return {
            "name": sf.name,
            "expr": print_filter(sf.expr),
            "created_at": sf.created_at.isoformat(),
        }

    @app.get("/api/courses/{course_id}/filters")
    def list_filters(course_id: str):
        return {"filters": [saved_filter_doc(sf) for sf in store.filter_store(course_id).list()]}

    @app.get("/api/courses/{course_id}/filters/{name}")
    def get_filter(course_id: str, name: str):
        return saved_filter_doc(store.filter_store(course_id).get(name))

    @app.put("/api/courses/{course_id}/filters/{name}")
    async def put_filter(course_id: str, name: str, request: Request):
        body = await body_of(request)
        if "expr" not in body:
            raise InvalidValue("body must carry 'expr' (filter grammar text)")
        expr = parse_filter(str(body["expr"]))
        with store.lock:
            filters = store.filter_store(course_id)
            saved = filters.save(name, expr, overwrite=bool(body.get("overwrite", False)))
            store.persist_filters(course_id, filters)
        return saved_filter_doc(saved)

    @app.delete("/api/courses/{course_id}/filters/{name}")
    def delete_filter(course_id: str, name: str):
        with store.lock:
            filters = store.filter_store(course_id)
            filters.delete(name)
            store.persist_filters(course_id, filters)
        return {"deleted": name}

    # --- team detail ---------------------------------------------------------------

    @app.get("/api/courses/{course_id}/teams/{team_id}/detail")
    def team_detail(course_id: str, team_id: str, start: str | None = None,
                    end: str | None = None, bucket: str = "day"):
        window = parse_window(start, end)
        try:
            bucket_kind = Bucket(bucket.lower())
        except ValueError:
            raise InvalidValue(f"bucket must be 'day' or 'week', got {bucket!r}")
        course = store.load_course(course_id)
        team = load_team(course, team_id)
        events = store.load_events(course_id)
        tl = timeline(events, course, team, window, SourceSelection.all(), bucket_kind)
        outcomes, per_member = ticket_outcome_breakdown(events, team, window)
        member_ids = set(team.member_ids)
        return {
            "team_id": team.team_id,
            "name": team.name,
            "repo_url": team.repo_url,
            "bucket": bucket_kind.value,
            "window": window_doc(window),
            "members": [
                {"canonical_id": s.canonical_id, "display_name": s.display_name}
                for s in course.roster if s.canonical_id in member_ids
            ],
            "bucket_starts": [d.isoformat() for d in tl.bucket_starts],
            "series": {
                member: kind_map({k: list(v) for k, v in kinds.items()})
                for member, kinds in tl.series.items()
            },
            "overlays": [{"name": m.name, "date": m.date.isoformat()} for m in tl.overlays],
            "ticket_outcomes": {o.value: outcomes[o] for o in TicketOutcome},
            "per_member_ticket_outcomes": {
                member: {o.value: counts[o] for o in TicketOutcome}
                for member, counts in per_member.items()
            },
        }

    # --- email drafts -----------------------------------------------------------------

    @app.post("/api/courses/{course_id}/teams/{team_id}/email")
    async def team_email(course_id: str, team_id: str, request: Request,
                         start: str | None = None, end: str | None = None,
                         sources: str | None = None):
        body = await body_of(request)
        window = parse_window(start, end)
        selection = parse_sources(sources)
        template = store.template_store(course_id).get(str(body.get("template_name", "default")))
        course, _, metrics, stats = compute_overview(store, course_id, window, selection)
        team = load_team(course, team_id)
        tm = next(m for m in metrics if m.team_id == team_id)
        member_id = body.get("member_id")
        if member_id is not None:
            if member_id not in team.member_ids:
                raise NotFound(f"student {member_id!r} is not on team {team_id}")
            sm = next(m for m in tm.per_member if m.canonical_id == member_id)
            team = Team(team.team_id, team.name, (member_id,), team.repo_url)
            tm = TeamMetrics(
                tm.team_id, (sm,), dict(sm.counts),
                {k: 0 for k in METRIC_KINDS}, {k: 0.0 for k in METRIC_KINDS},
            )
        draft = render_email(template, team, tm, course, stats)
        return {
            "recipients": list(draft.recipients),
            "subject": draft.subject,
            "body": draft.body,
            "mailto_url": draft.mailto_url,
        }

    # --- templates -----------------------------------------------------------------

    def template_doc(t):
        return {"name": t.name, "subject": t.subject, "body": t.body}

    @app.get("/api/courses/{course_id}/templates")
    def list_templates(course_id: str):
        return {"templates": [template_doc(t) for t in store.template_store(course_id).list()]}

    @app.get("/api/courses/{course_id}/templates/{name}")
    def get_template(course_id: str, name: str):
        return template_doc(store.template_store(course_id).get(name))

    @app.put("/api/courses/{course_id}/templates/{name}")
    async def put_template(course_id: str, name: str, request: Request):
        body = await body_of(request)
        if "subject" not in body or "body" not in body:
            raise InvalidValue("body must carry 'subject' and 'body'")
        with store.lock:
            templates = store.template_store(course_id)
            saved = templates.save(name, str(body["subject"]), str(body["body"]),
                                   overwrite=bool(body.get("overwrite", False)))
            store.persist_templates(course_id, templates)
        return template_doc(saved)

    @app.delete("/api/courses/{course_id}/templates/{name}")
    def delete_template(course_id: str, name: str):
        with store.lock:
            templates = store.template_store(course_id)
            templates.delete(name)
            store.persist_templates(course_id, templates)
        return {"deleted": name}

    # --- ingestion -----------------------------------------------------------------

    @app.post("/api/courses/{course_id}/ingest")
    async def ingest(course_id: str, request: Request):
        body = await body_of(request)
        source = body.get("source")
        path_text = body.get("path")
        if source not in ("forum", "tickets", "git"):
            raise InvalidValue("source must be one of forum, tickets, git")
        if not path_text:
            raise InvalidValue("body must carry 'path'")
        report = run_ingest(store, course_id, source, Path(path_text),
                            tuple(body.get("ignore", ())))
        return {
            "source": source,
            "events_loaded": dict(report.events_loaded),
            "unresolved": [
                {"source": u.source, "raw_source_id": u.raw_source_id,
                 "unmatched_handle": u.unmatched_handle}
                for u in report.unresolved
            ],
            "ignored_file_lines": report.ignored_file_lines,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def run_ingest(store: DataStore, course_id: str, source: str, path: Path,
               ignore_patterns: tuple[str, ...] = ()):
    """Parse one export file, resolve identities, and snapshot the events."""
    if not path.is_file():
        raise NotFound(f"no such file: {path}")
    text = path.read_text("utf-8")
    _, roster = store.load_course_and_roster(course_id)
    if source == "forum":
        events, report = resolve_events(roster, forum=parse_forum_export(text))
    elif source == "tickets":
        events, report = resolve_events(roster, tickets=parse_ticket_export(text))
    else:
        rules = IgnoreRules.compile(ignore_patterns)
        commits, ignored = parse_git_numstat(text, rules)
        events, report = resolve_events(roster, commits=commits, ignored_additions=ignored)
    with store.lock:
        store.save_events(course_id, source, events)
    return report
