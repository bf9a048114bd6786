"""Deterministic synthetic classroom generator.

Emits the exact ingestion file formats (roster CSV, teams doc, forum export,
ticket CSV, git numstat text) plus a manifest recording each team's planted
archetype and the canonical filter that recovers it.

Archetype guarantees are enforced on the realized counts, not just the
sampling rates, so filter recovery is structural rather than probabilistic:

  - Silent teams emit zero posts/replies/tickets and stay low-commit
    (per member <= silent_max_commits), so the struggling-team query
    selects exactly them.
  - Every non-Silent team gets at least one post, and at least one ticket
    unless it is ForumOnly (which emits none by definition).
  - FreeRider teams have one member whose realized commit and addition
    counts are <= free_rider_factor (10%) of every teammate's.
  - Non-FreeRider teams are commit-balanced (member min >= max/2), keeping
    their commits normdiff strictly below the FreeRider filter threshold.
  - OfficeHoursHeavy teams reach >= heavy_ticket_multiplier x the balanced
    ticket expectation for the whole team; other team kinds are capped
    below that line.

Activity timestamps burst in the days before each milestone so team
timelines show deadline spikes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import asdict, dataclass
from datetime import date, datetime, time, timedelta, timezone
from enum import Enum

from .errors import BadMix
from .ingestion import CommitBlock, render_git_numstat, roster_to_csv, teams_to_json
from .model import Course, Milestone, StudentIdentity, Team, TicketOutcome

COURSE_TITLE = "Software Teamwork Practicum"

FILE_ROSTER = "roster.csv"
FILE_TEAMS = "teams.json"
FILE_FORUM = "forum.json"
FILE_TICKETS = "tickets.csv"
FILE_GIT = "git.log"
FILE_COURSE = "course.json"
FILE_MANIFEST = "manifest.json"


class Archetype(Enum):
    BALANCED = "balanced"
    FREE_RIDER = "free_rider"
    SILENT = "silent"
    FORUM_ONLY = "forum_only"
    OFFICE_HOURS_HEAVY = "office_hours_heavy"


@dataclass(frozen=True)
class GeneratorParams:
    """Per-member expected counts over the whole term, plus shaping knobs."""

    balanced_posts: float = 5.0
    balanced_replies: float = 6.0
    balanced_commits: float = 25.0
    balanced_tickets: float = 3.0
    mean_additions_per_commit: float = 60.0
    silent_commits: float = 8.0
    silent_max_commits: int = 12
    free_rider_factor: float = 0.10
    heavy_ticket_multiplier: float = 3.0
    normal_ticket_cap: int = 6
    burst_probability: float = 0.45
    burst_days: int = 3


DEFAULT_TERM_START = date(2024, 1, 8)
DEFAULT_TERM_END = date(2024, 5, 3)
DEFAULT_MILESTONES = (
    Milestone("project 1 design", date(2024, 2, 2)),
    Milestone("project 1 final", date(2024, 3, 1)),
    Milestone("project 2 design", date(2024, 4, 5)),
    Milestone("project 2 final", date(2024, 4, 26)),
)

_FIRST_NAMES = [
    "Alex", "Bailey", "Casey", "Devon", "Elliot", "Frankie", "Harper", "Indira",
    "Jordan", "Kai", "Lena", "Marco", "Nadia", "Omar", "Priya", "Quinn",
    "Rosa", "Sam", "Tara", "Uma", "Victor", "Wen", "Ximena", "Yusuf", "Zoe",
]
_LAST_NAMES = [
    "Adams", "Baker", "Chen", "Diaz", "Evans", "Fischer", "Garcia", "Huang",
    "Ibrahim", "Jones", "Kim", "Lopez", "Meyer", "Novak", "Okafor", "Patel",
    "Quirk", "Rossi", "Singh", "Tran", "Ueda", "Vargas", "Walker", "Xu",
    "Young", "Zhang",
]
_REPO_PATHS = [
    "src/main/App.java", "src/main/Model.java", "src/main/Controller.java",
    "src/main/Storage.java", "src/test/AppTest.java", "src/test/ModelTest.java",
    "docs/design.md",
]


@dataclass(frozen=True)
class SyntheticClass:
    course_id: str
    files: dict[str, str]  # file name -> exact contents
    manifest: dict


def free_rider_threshold(members_per_team: int) -> float:
    """Commits-normdiff cutoff that separates planted free riders from the rest.

    The 10% rate bound makes a free-rider team's normdiff at least
    0.9 / (m - 0.9); balanced teams are clamped below it.
    """
    if members_per_team == 2:
        return 0.8
    return math.floor(100 * 0.9 / (members_per_team - 0.9)) / 100


def canonical_filters(members_per_team: int, params: GeneratorParams) -> dict[str, str]:
    """Filter text that recovers each planted archetype, plus the combined
    struggling-team query."""
    heavy = math.ceil(params.heavy_ticket_multiplier * params.balanced_tickets * members_per_team)
    struggling = struggling_commit_threshold(members_per_team, params)
    fr = free_rider_threshold(members_per_team)
    return {
        "silent": "posts.total == 0 and replies.total == 0 and tickets.total == 0",
        "free_rider": f"commits.normdiff >= {fr}",
        "forum_only": "posts.total > 0 and tickets.total == 0",
        "office_hours_heavy": f"tickets.total >= {heavy}",
        "balanced": f"posts.total > 0 and tickets.total > 0 and commits.normdiff < {fr}",
        "struggling": (
            f"commits.total < {struggling} and posts.total == 0 and tickets.total == 0"
        ),
    }


def struggling_commit_threshold(members_per_team: int, params: GeneratorParams) -> int:
    # silent teams are capped below this, everything else has forum/ticket activity
    return params.silent_max_commits * members_per_team + 6


def _poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    threshold = math.exp(-lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= threshold:
            return k
        k += 1


@dataclass
class _MemberPlan:
    canonical_id: str
    posts: int = 0
    replies: int = 0
    tickets: int = 0
    commit_additions: list[int] = None  # one entry per commit

    @property
    def commits(self) -> int:
        return len(self.commit_additions)


def generate(
    team_count: int,
    members_per_team: int = 2,
    archetype_mix: dict[Archetype, int] | None = None,
    term_start: date = DEFAULT_TERM_START,
    term_end: date = DEFAULT_TERM_END,
    milestones: tuple[Milestone, ...] = DEFAULT_MILESTONES,
    seed: int = 0,
    params: GeneratorParams = GeneratorParams(),
) -> SyntheticClass:
    """Build one synthetic course; byte-deterministic for a fixed seed."""
    if team_count < 1 or members_per_team < 1:
        raise BadMix("team_count and members_per_team must be >= 1")
    if archetype_mix is None:
        order = list(Archetype)
        archetype_mix = {a: 0 for a in order}
        for i in range(team_count):
            archetype_mix[order[i % len(order)]] += 1
    if any(n < 0 for n in archetype_mix.values()):
        raise BadMix("archetype counts must be >= 0")
    if sum(archetype_mix.values()) != team_count:
        raise BadMix(
            f"archetype mix sums to {sum(archetype_mix.values())}, expected {team_count}"
        )
    if archetype_mix.get(Archetype.FREE_RIDER, 0) > 0 and members_per_team < 2:
        raise BadMix("free-rider teams need at least 2 members")

    rng = random.Random(seed)
    course_id = f"synth-{seed}"

    archetypes: list[Archetype] = []
    for arch in Archetype:  # fixed expansion order, then a seeded shuffle
        archetypes.extend([arch] * archetype_mix.get(arch, 0))
    rng.shuffle(archetypes)

    id_width = max(2, len(str(team_count)))
    roster: list[StudentIdentity] = []
    teams: list[Team] = []
    plans: list[tuple[Team, Archetype, list[_MemberPlan]]] = []
    sid = 0
    for i, arch in enumerate(archetypes, start=1):
        member_ids = []
        for _ in range(members_per_team):
            sid += 1
            cid = f"s{sid:03d}"
            first = rng.choice(_FIRST_NAMES)
            last = rng.choice(_LAST_NAMES)
            email = f"{cid}@students.example.edu"
            roster.append(StudentIdentity(
                canonical_id=cid,
                display_name=f"{first} {last}",
                email=email,
                forum_handle=f"{first.lower()}.{cid}",
                ticket_handle=f"{last.lower()}.{cid}",
                git_emails=frozenset({email}),
            ))
            member_ids.append(cid)
        team_id = f"team{i:0{id_width}d}"
        team = Team(team_id, f"Team {i:0{id_width}d}", tuple(member_ids),
                    repo_url=f"https://git.example.edu/practicum/{team_id}")
        teams.append(team)
        plans.append((team, arch, _plan_team(rng, arch, member_ids, params)))

    window_start = datetime.combine(term_start, time.min, timezone.utc)
    window_end = datetime.combine(term_end, time.min, timezone.utc) + timedelta(days=1)
    span = int((window_end - window_start).total_seconds())
    milestone_times = [
        datetime.combine(m.date, time.min, timezone.utc) for m in milestones
    ]

    def timestamp() -> datetime:
        if milestone_times and rng.random() < params.burst_probability:
            base = rng.choice(milestone_times)
            ts = base - timedelta(seconds=rng.randrange(params.burst_days * 86400))
        else:
            ts = window_start + timedelta(seconds=rng.randrange(span))
        lo, hi = window_start, window_end - timedelta(seconds=1)
        return min(max(ts, lo), hi)

    handle_of = {s.canonical_id: s for s in roster}

    # forum: (ts, seq, handle, kind); ids assigned after sorting by time
    forum_raw = []
    ticket_raw = []
    commit_raw = []
    seq = 0
    for team, arch, members in plans:
        for plan in members:
            student = handle_of[plan.canonical_id]
            for _ in range(plan.posts):
                forum_raw.append((timestamp(), seq, student.forum_handle, "initial")); seq += 1
            for _ in range(plan.replies):
                forum_raw.append((timestamp(), seq, student.forum_handle, "reply")); seq += 1
            for _ in range(plan.tickets):
                outcome = rng.choices(list(TicketOutcome), weights=[60, 25, 15])[0]
                ticket_raw.append((timestamp(), seq, student.ticket_handle, outcome)); seq += 1
            for additions in plan.commit_additions:
                sha = f"{rng.getrandbits(160):040x}"
                email = student.email if rng.random() < 0.7 else student.email.upper()
                files = _split_into_files(rng, additions)
                commit_raw.append((timestamp(), seq, sha, email, files)); seq += 1

    forum_docs = []
    thread_ids: list[str] = []
    for idx, (ts, _, handle, kind) in enumerate(sorted(forum_raw, key=lambda r: (r[0], r[1])), start=1):
        post_id = f"p{idx:04d}"
        if kind == "initial":
            thread_id = f"th{idx:04d}"
            thread_ids.append(thread_id)
        else:
            thread_id = rng.choice(thread_ids) if thread_ids else "th0000"
        forum_docs.append({
            "post_id": post_id,
            "thread_id": thread_id,
            "author_handle": handle,
            "created_at": ts.isoformat(),
            "kind": kind,
        })

    ticket_out = io.StringIO()
    writer = csv.writer(ticket_out, lineterminator="\n")
    writer.writerow(["ticket_id", "student_handle", "created_at", "outcome"])
    for idx, (ts, _, handle, outcome) in enumerate(sorted(ticket_raw, key=lambda r: (r[0], r[1])), start=1):
        writer.writerow([f"k{idx:04d}", handle, ts.isoformat(), outcome.value])

    blocks = [
        CommitBlock(sha=sha, author_email=email, epoch=int(ts.timestamp()), files=tuple(files))
        for ts, _, sha, email, files in sorted(commit_raw, key=lambda r: (r[0], r[1]))
    ]

    course_doc = {
        "course_id": course_id,
        "title": COURSE_TITLE,
        "term_start": term_start.isoformat(),
        "term_end": term_end.isoformat(),
        "milestones": [{"name": m.name, "date": m.date.isoformat()} for m in milestones],
    }
    manifest = {
        "course_id": course_id,
        "seed": seed,
        "team_count": team_count,
        "members_per_team": members_per_team,
        "term_start": term_start.isoformat(),
        "term_end": term_end.isoformat(),
        "teams": [
            {"team_id": team.team_id, "archetype": arch.value} for team, arch, _ in plans
        ],
        "canonical_filters": canonical_filters(members_per_team, params),
        "parameters": asdict(params),
    }

    files = {
        FILE_COURSE: json.dumps(course_doc, indent=2) + "\n",
        FILE_ROSTER: roster_to_csv(roster),
        FILE_TEAMS: teams_to_json(teams),
        FILE_FORUM: json.dumps(forum_docs, indent=2) + "\n",
        FILE_TICKETS: ticket_out.getvalue(),
        FILE_GIT: render_git_numstat(blocks),
        FILE_MANIFEST: json.dumps(manifest, indent=2) + "\n",
    }
    return SyntheticClass(course_id, files, manifest)


def _plan_team(
    rng: random.Random,
    arch: Archetype,
    member_ids: list[str],
    params: GeneratorParams,
) -> list[_MemberPlan]:
    plans = [_MemberPlan(cid) for cid in member_ids]

    def draw_additions(n: int) -> list[int]:
        mean = params.mean_additions_per_commit
        return [max(1, min(400, int(rng.expovariate(1 / mean)))) for _ in range(n)]

    if arch is Archetype.SILENT:
        for plan in plans:
            commits = min(2 + _poisson(rng, params.silent_commits), params.silent_max_commits)
            plan.commit_additions = draw_additions(commits)
        _balance_commits(rng, plans, params)
        return plans

    if arch is Archetype.FREE_RIDER:
        rider = rng.randrange(len(plans))
        teammate_plans = [p for i, p in enumerate(plans) if i != rider]
        for plan in teammate_plans:
            commits = max(_poisson(rng, params.balanced_commits + 3), 15)
            plan.commit_additions = draw_additions(commits)
        max_commits = math.floor(params.free_rider_factor * min(p.commits for p in teammate_plans))
        max_adds = math.floor(
            params.free_rider_factor * min(sum(p.commit_additions) for p in teammate_plans)
        )
        rider_commits = min(_poisson(rng, 2.0), max_commits)
        plans[rider].commit_additions = _split_budget(rng, max_adds, rider_commits)
        for plan in plans:
            plan.posts = _poisson(rng, 4.0)
            plan.replies = _poisson(rng, 4.0)
            plan.tickets = min(_poisson(rng, params.balanced_tickets), params.normal_ticket_cap)
        _ensure_team_minimum(plans, "posts")
        _ensure_team_minimum(plans, "tickets")
        return plans

    if arch is Archetype.FORUM_ONLY:
        for plan in plans:
            plan.posts = _poisson(rng, 9.0)
            plan.replies = _poisson(rng, 10.0)
            plan.tickets = 0
            plan.commit_additions = draw_additions(_poisson(rng, 15.0))
        _ensure_team_minimum(plans, "posts")
        _balance_commits(rng, plans, params)
        return plans

    if arch is Archetype.OFFICE_HOURS_HEAVY:
        target = math.ceil(
            params.heavy_ticket_multiplier * params.balanced_tickets * len(plans)
        )
        for plan in plans:
            plan.posts = _poisson(rng, 4.0)
            plan.replies = _poisson(rng, 4.0)
            plan.tickets = _poisson(rng, params.heavy_ticket_multiplier * params.balanced_tickets)
            plan.commit_additions = draw_additions(_poisson(rng, 20.0))
        while sum(p.tickets for p in plans) < target:
            rng.choice(plans).tickets += 1
        _ensure_team_minimum(plans, "posts")
        _balance_commits(rng, plans, params)
        return plans

    # balanced
    for plan in plans:
        plan.posts = _poisson(rng, params.balanced_posts)
        plan.replies = _poisson(rng, params.balanced_replies)
        plan.tickets = min(_poisson(rng, params.balanced_tickets), params.normal_ticket_cap)
        plan.commit_additions = draw_additions(_poisson(rng, params.balanced_commits))
    _ensure_team_minimum(plans, "posts")
    _ensure_team_minimum(plans, "tickets")
    _balance_commits(rng, plans, params)
    return plans


def _ensure_team_minimum(plans: list[_MemberPlan], field_name: str) -> None:
    if all(getattr(p, field_name) == 0 for p in plans):
        setattr(plans[0], field_name, 1)


def _balance_commits(rng: random.Random, plans: list[_MemberPlan], params: GeneratorParams) -> None:
    """Raise members to at least half the team max so commits stay balanced."""
    top = max(p.commits for p in plans)
    floor_commits = math.ceil(top / 2)
    for plan in plans:
        deficit = floor_commits - plan.commits
        if deficit > 0:
            mean = params.mean_additions_per_commit
            plan.commit_additions = plan.commit_additions + [
                max(1, min(400, int(rng.expovariate(1 / mean)))) for _ in range(deficit)
            ]


def _split_budget(rng: random.Random, budget: int, parts: int) -> list[int]:
    """Nonnegative integers of length `parts` summing to at most `budget`."""
    if parts == 0:
        return []
    out = []
    remaining = budget
    for i in range(parts - 1):
        cut = rng.randint(0, remaining)
        out.append(cut)
        remaining -= cut
    out.append(rng.randint(0, remaining))
    return out


def _split_into_files(rng: random.Random, additions: int) -> list[tuple[object, object, str]]:
    """Spread a commit's additions over 1-3 repo paths, sometimes with a binary."""
    n = rng.randint(1, 3)
    paths = rng.sample(_REPO_PATHS, n)
    parts = _split_budget_exact(rng, additions, n)
    files: list[tuple[object, object, str]] = [
        (parts[i], rng.randrange(0, 30), paths[i]) for i in range(n)
    ]
    if rng.random() < 0.08:
        files.append(("-", "-", "assets/diagram.png"))
    return files


def _split_budget_exact(rng: random.Random, total: int, parts: int) -> list[int]:
    out = []
    remaining = total
    for i in range(parts - 1):
        cut = rng.randint(0, remaining)
        out.append(cut)
        remaining -= cut
    out.append(remaining)
    return out


def course_from_files(files: dict[str, str]) -> Course:
    """Reassemble the Course value from generated course/roster/teams files."""
    from .ingestion import load_roster  # local import to avoid a cycle at module load

    doc = json.loads(files[FILE_COURSE])
    roster, teams = load_roster(files[FILE_ROSTER], files[FILE_TEAMS])
    return Course(
        course_id=doc["course_id"],
        title=doc["title"],
        term_start=date.fromisoformat(doc["term_start"]),
        term_end=date.fromisoformat(doc["term_end"]),
        milestones=tuple(
            Milestone(m["name"], date.fromisoformat(m["date"])) for m in doc["milestones"]
        ),
        roster=roster.students,
        teams=tuple(teams),
    )
