"""Command-line entry points: serve, ingest, synth, report."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import BadMix, ConcertError
from .filters import apply_filter, parse_filter
from .model import METRIC_KINDS
from .service import (
    compute_overview,
    create_app,
    parse_sources,
    parse_window,
    run_ingest,
    stats_doc,
    team_doc,
    window_doc,
)
from .store import DataStore
from .synthgen import Archetype, generate

_DATA_DIR_OPTION = click.option(
    "--data-dir", envvar="CONCERT_DATA_DIR", required=True,
    type=click.Path(file_okay=False),
    help="Course data root (or set CONCERT_DATA_DIR).",
)


def _fail(exc: ConcertError):
    click.echo(f"error: {exc.kind}: {exc}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Classroom teamwork analytics: ingest activity exports, compute team
    metrics, filter teams, and draft intervention emails."""


@main.command()
@_DATA_DIR_OPTION
@click.option("--host", default="127.0.0.1", show_default=True,
              help="Bind address; localhost by default.")
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--ui-dir", default=None, type=click.Path(file_okay=False),
              help="Directory with the built dashboard (defaults to ./frontend/dist if present).")
def serve(data_dir, host, port, ui_dir):
    """Run the HTTP API (and dashboard, if built)."""
    import uvicorn

    if ui_dir is None and Path("frontend/dist").is_dir():
        ui_dir = "frontend/dist"
    uvicorn.run(create_app(data_dir, ui_dir), host=host, port=port)


@main.command()
@_DATA_DIR_OPTION
@click.option("--course", required=True, help="Course id (from course.json).")
@click.option("--source", type=click.Choice(["forum", "tickets", "git"]), required=True)
@click.option("--file", "file_path", required=True, type=click.Path(dir_okay=False))
@click.option("--ignore", multiple=True,
              help="Regex for repo paths to exclude from additions (git only; repeatable).")
def ingest(data_dir, course, source, file_path, ignore):
    """Parse one export file and snapshot its events for the course."""
    try:
        report = run_ingest(DataStore(data_dir), course, source, Path(file_path), tuple(ignore))
    except ConcertError as exc:
        _fail(exc)
    click.echo(
        f"{source}: {report.events_loaded[source]} events loaded, "
        f"{len(report.unresolved)} unresolved"
        + (f", {report.ignored_file_lines} additions ignored" if source == "git" else "")
    )
    for u in report.unresolved:
        click.echo(f"  unresolved {u.raw_source_id}: no roster match for {u.unmatched_handle!r}", err=True)


def _parse_mix(text: str | None, teams: int) -> dict[Archetype, int] | None:
    if text is None:
        return None
    mix = {}
    for part in text.split(","):
        name, _, count = part.partition("=")
        try:
            arch = Archetype(name.strip().lower())
        except ValueError:
            raise BadMix(f"unknown archetype {name.strip()!r}; expected one of "
                         + ", ".join(a.value for a in Archetype))
        try:
            mix[arch] = int(count)
        except ValueError:
            raise BadMix(f"bad count {count!r} for archetype {name.strip()!r}")
    remainder = teams - sum(mix.values())
    if remainder > 0:  # unmentioned teams default to balanced
        mix[Archetype.BALANCED] = mix.get(Archetype.BALANCED, 0) + remainder
    return mix


@main.command()
@click.option("--teams", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--members", default=2, show_default=True, type=int,
              help="Members per team.")
@click.option("--mix", default=None,
              help="Archetype counts, e.g. 'silent=3,free_rider=3,forum_only=3'; "
                   "the rest are balanced.")
def synth(teams, seed, out, members, mix):
    """Generate a synthetic course (all export files plus a manifest)."""
    try:
        synthetic = generate(
            teams, members_per_team=members,
            archetype_mix=_parse_mix(mix, teams), seed=seed,
        )
    except ConcertError as exc:
        _fail(exc)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in sorted(synthetic.files.items()):
        (out_dir / name).write_text(text, encoding="utf-8")
    click.echo(f"course {synthetic.course_id}: wrote {len(synthetic.files)} files to {out_dir}")
    for line in json.dumps(synthetic.manifest["canonical_filters"], indent=2).splitlines():
        click.echo(line)


@main.command()
@_DATA_DIR_OPTION
@click.option("--course", required=True)
@click.option("--filter", "filter_text", required=True, help="Filter expression text.")
@click.option("--start", required=True, help="Window start (inclusive), ISO timestamp or date.")
@click.option("--end", required=True, help="Window end (exclusive), ISO timestamp or date.")
@click.option("--sources", default=None, help="Comma-separated metric kinds; default all.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
def report(data_dir, course, filter_text, start, end, sources, fmt):
    """Apply a filter and print the selected teams."""
    try:
        store = DataStore(data_dir)
        window = parse_window(start, end)
        selection = parse_sources(sources)
        filters = store.filter_store(course)
        expr = parse_filter(filter_text)
        course_value, _, metrics, stats = compute_overview(store, course, window, selection)
        selected = apply_filter(expr, metrics, stats, filters.snapshot())
    except ConcertError as exc:
        _fail(exc)

    by_id = {tm.team_id: tm for tm in metrics}
    if fmt == "json":
        doc = {
            "course_id": course_value.course_id,
            "window": window_doc(window),
            "expr": filter_text,
            "team_ids": selected,
            "teams": [team_doc(by_id[tid], course_value.team(tid), course_value) for tid in selected],
            "stats": stats_doc(stats),
        }
        click.echo(json.dumps(doc, indent=2))
        return

    if not selected:
        click.echo("no teams matched")
        return
    headers = ["team", "name"] + [k.value for k in METRIC_KINDS]
    rows = []
    for tid in selected:
        tm = by_id[tid]
        team = course_value.team(tid)
        rows.append([tid, team.name] + [str(tm.total[k]) for k in METRIC_KINDS])
    widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
    click.echo("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in rows:
        click.echo("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    click.echo(f"{len(selected)} of {len(metrics)} teams selected")


if __name__ == "__main__":
    main()
