"""Domain error types, each carrying a machine-readable kind and an optional location.

The HTTP layer maps these onto status codes and a uniform error payload;
the CLI prints them and exits nonzero.
"""

from __future__ import annotations


class ConcertError(Exception):
    """Base class for all domain errors."""

    kind = "Error"
    http_status = 400

    def __init__(self, message: str, location: object = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def payload(self) -> dict:
        return {"kind": self.kind, "message": self.message, "location": self.location}

    def __str__(self) -> str:
        if self.location is None:
            return self.message
        return f"{self.message} ({self.location})"


class InvalidValue(ConcertError):
    """A value violates a domain invariant (bad timestamp, empty selection, ...)."""

    kind = "InvalidValue"


# --- ingestion -------------------------------------------------------------

class MalformedRow(ConcertError):
    kind = "MalformedRow"


class MalformedRecord(ConcertError):
    kind = "MalformedRecord"


class MalformedHeader(ConcertError):
    kind = "MalformedHeader"


class MalformedNumstat(ConcertError):
    kind = "MalformedNumstat"


class DuplicateHandle(ConcertError):
    kind = "DuplicateHandle"


class UnknownMember(ConcertError):
    kind = "UnknownMember"


class UnknownOutcome(ConcertError):
    kind = "UnknownOutcome"


# --- metrics ---------------------------------------------------------------

class NoTeams(ConcertError):
    kind = "NoTeams"


class BadBinCount(ConcertError):
    kind = "BadBinCount"


# --- filters ---------------------------------------------------------------

class FilterSyntaxError(ConcertError):
    kind = "SyntaxError"


class UnknownMetric(ConcertError):
    kind = "UnknownMetric"


class UnknownStat(ConcertError):
    kind = "UnknownStat"


class UnresolvedRef(ConcertError):
    kind = "UnresolvedRef"

    def __init__(self, name: str, location: object = None):
        super().__init__(f"saved filter {name!r} does not exist", location)
        self.name = name


class RefCycle(ConcertError):
    kind = "RefCycle"

    def __init__(self, path: list[str]):
        super().__init__("saved filters reference each other in a cycle: " + " -> ".join(path))
        self.path = list(path)


class BadBand(ConcertError):
    kind = "BadBand"


# --- emailer ---------------------------------------------------------------

class UnknownPlaceholder(ConcertError):
    kind = "UnknownPlaceholder"

    def __init__(self, token: str, position: object = None):
        super().__init__(f"unsupported placeholder {token!r}", position)
        self.token = token


class EmptyTeam(ConcertError):
    kind = "EmptyTeam"


# --- stores / service ------------------------------------------------------

class NameExists(ConcertError):
    kind = "NameExists"
    http_status = 409


class NameInUse(ConcertError):
    kind = "NameInUse"
    http_status = 409

    def __init__(self, name: str, by: str):
        super().__init__(f"{name!r} is referenced by {by!r}")
        self.name = name
        self.by = by


class NotFound(ConcertError):
    kind = "NotFound"
    http_status = 404


class Forbidden(ConcertError):
    kind = "Forbidden"
    http_status = 403


# --- synthgen --------------------------------------------------------------

class BadMix(ConcertError):
    kind = "BadMix"
