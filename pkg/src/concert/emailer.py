"""Intervention email drafts rendered from placeholder templates.

Drafts are never sent by the system: the instructor gets recipients, a
rendered subject/body, and a mailto URL to open in their own mail client.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import quote, unquote

from .errors import EmptyTeam, Forbidden, InvalidValue, NameExists, NotFound, UnknownPlaceholder
from .filters import NAME_RE
from .metrics import CourseStats, TeamMetrics
from .model import Course, MetricKind, Team

_PLACEHOLDER_RE = re.compile(r"\{\{\s*([a-z_][a-z0-9_.]*)\s*\}\}")

_SIMPLE_TOKENS = {"student_names", "team_name", "course_title"}
_METRIC_TOKEN_RE = re.compile(
    r"^metric\.(posts|replies|commits|additions|tickets)\.(total|diff|normdiff)$"
)
_COURSE_TOKEN_RE = re.compile(
    r"^course\.(mean|median)\.(total|diff)\.(posts|replies|commits|additions|tickets)$"
)


@dataclass(frozen=True)
class EmailTemplate:
    name: str
    subject: str
    body: str


@dataclass(frozen=True)
class EmailDraft:
    recipients: tuple[str, ...]
    subject: str
    body: str
    mailto_url: str


DEFAULT_TEMPLATE = EmailTemplate(
    name="default",
    subject="Checking in on {{team_name}}",
    body=(
        "Hi {{student_names}},\n"
        "\n"
        "I am writing to check in on how {{team_name}} is doing in "
        "{{course_title}}. I would like to hear how the project is going "
        "for you and whether there is anything the course staff can help "
        "with.\n"
        "\n"
        "Could you reply with a short status update, or stop by office "
        "hours this week?\n"
        "\n"
        "Thanks!\n"
    ),
)


def _supported(token: str) -> bool:
    return (
        token in _SIMPLE_TOKENS
        or _METRIC_TOKEN_RE.match(token) is not None
        or _COURSE_TOKEN_RE.match(token) is not None
    )


def validate_template_text(text: str, field: str) -> None:
    """Reject unsupported placeholders and stray '{{' so rendering is total.

    The same check runs at save time and render time, so no stored template
    can later fail to render.
    """
    idx = 0
    while True:
        idx = text.find("{{", idx)
        if idx == -1:
            return
        m = _PLACEHOLDER_RE.match(text, idx)
        if m is None:
            snippet = text[idx:idx + 24].split("\n")[0]
            raise UnknownPlaceholder(snippet, position=f"{field} offset {idx}")
        if not _supported(m.group(1)):
            raise UnknownPlaceholder(m.group(1), position=f"{field} offset {idx}")
        idx = m.end()


def validate_template(template: EmailTemplate) -> None:
    validate_template_text(template.subject, "subject")
    validate_template_text(template.body, "body")


def format_student_names(names: list[str]) -> str:
    """Natural-language list: "A", "A and B", "A, B, and C"."""
    if len(names) == 1:
        return names[0]
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


def format_number(value) -> str:
    """Integers exact; reals with up to 2 decimal places (no trailing zeros)."""
    if isinstance(value, int):
        return str(value)
    text = f"{value:.2f}".rstrip("0").rstrip(".")
    return text or "0"


def mailto_url(recipients: tuple[str, ...], subject: str, body: str) -> str:
    """mailto: URL with percent-encoded subject and body (space -> %20, LF -> %0A)."""
    to = ",".join(quote(r, safe="@.+_-") for r in recipients)
    return f"mailto:{to}?subject={quote(subject, safe='')}&body={quote(body, safe='')}"


def decode_mailto(url: str) -> tuple[str, str]:
    """Percent-decode a draft URL back to (subject, body); the round-trip check."""
    query = url.split("?", 1)[1]
    fields = dict(part.split("=", 1) for part in query.split("&"))
    return unquote(fields["subject"]), unquote(fields["body"])


def render_email(
    template: EmailTemplate,
    team: Team,
    team_metrics: TeamMetrics,
    course: Course,
    stats: CourseStats,
) -> EmailDraft:
    """Fill placeholders for one team and build the mailto form."""
    validate_template(template)
    member_ids = set(team.member_ids)
    members = [s for s in course.roster if s.canonical_id in member_ids]
    if not members:
        raise EmptyTeam(f"team {team.team_id} has no rostered members")

    def substitute(token: str) -> str:
        if token == "student_names":
            return format_student_names([s.display_name for s in members])
        if token == "team_name":
            return team.name
        if token == "course_title":
            return course.title
        m = _METRIC_TOKEN_RE.match(token)
        if m:
            kind = MetricKind(m.group(1))
            table = {"total": team_metrics.total, "diff": team_metrics.diff,
                     "normdiff": team_metrics.normdiff}[m.group(2)]
            return format_number(table[kind])
        m = _COURSE_TOKEN_RE.match(token)
        assert m, token  # validate_template guarantees supported tokens
        table = {
            ("mean", "total"): stats.mean_total,
            ("median", "total"): stats.median_total,
            ("mean", "diff"): stats.mean_diff,
            ("median", "diff"): stats.median_diff,
        }[(m.group(1), m.group(2))]
        return format_number(table[MetricKind(m.group(3))])

    def render(text: str) -> str:
        return _PLACEHOLDER_RE.sub(lambda m: substitute(m.group(1)), text)

    subject = render(template.subject)
    body = render(template.body)
    recipients = tuple(s.email for s in members)  # roster order
    return EmailDraft(recipients, subject, body, mailto_url(recipients, subject, body))


class TemplateStore:
    """Named templates with a protected built-in 'default'."""

    def __init__(self):
        self._templates: dict[str, EmailTemplate] = {"default": DEFAULT_TEMPLATE}

    def save(self, name: str, subject: str, body: str, overwrite: bool = False) -> EmailTemplate:
        if not NAME_RE.match(name or ""):
            raise InvalidValue(
                f"template name {name!r} must be non-empty, without whitespace "
                "(letters, digits, '_', '-', '.')"
            )
        if name in self._templates and not overwrite:
            raise NameExists(f"template {name!r} already exists")
        template = EmailTemplate(name, subject, body)
        validate_template(template)
        self._templates[name] = template
        return template

    def get(self, name: str) -> EmailTemplate:
        if name not in self._templates:
            raise NotFound(f"no template named {name!r}")
        return self._templates[name]

    def list(self) -> list[EmailTemplate]:
        return [self._templates[name] for name in sorted(self._templates)]

    def delete(self, name: str) -> None:
        if name == "default":
            raise Forbidden("the built-in 'default' template cannot be deleted")
        if name not in self._templates:
            raise NotFound(f"no template named {name!r}")
        del self._templates[name]

    def overrides(self) -> dict[str, EmailTemplate]:
        """Everything that needs persisting (built-in excluded unless edited)."""
        return {
            name: t for name, t in self._templates.items()
            if name != "default" or t != DEFAULT_TEMPLATE
        }
