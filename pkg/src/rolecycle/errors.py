"""Exception types shared across the engine.

Every error raised on a user-facing path derives from RolecycleError so the
CLI and HTTP layers can map failures to structured responses in one place.
"""


class RolecycleError(Exception):
    """Base class for all engine errors."""


class MalformedRecord(RolecycleError):
    """A wire record violates the event schema."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class OrderingConflict(RolecycleError):
    """A member has more than one Signup event."""


class InvalidWindow(RolecycleError):
    """Window bounds are not a valid half-open interval."""


class UnknownMember(RolecycleError):
    """A member id is not present in the event log or graph."""


class InvalidConfig(RolecycleError):
    """A threshold configuration value is out of range or unknown."""


class NoObservations(RolecycleError):
    """No role transitions available to estimate from."""


class InvalidMatrix(RolecycleError):
    """A transition matrix fails its structural invariants."""


class InvalidEdit(RolecycleError):
    """An intervention edits a structurally impossible transition."""


class DegenerateRow(RolecycleError):
    """An intervention drove an entire matrix row to zero mass."""


class EmptyCatalog(RolecycleError):
    """Steering was asked to plan from an empty intervention catalog."""


class InvalidProfile(RolecycleError):
    """A synthetic behavior profile is internally inconsistent."""


class NoConvergence(RolecycleError):
    """An iterative routine hit its iteration cap before tolerance.

    Centrality reports catch this internally and flag the affected scores
    rather than failing the whole report; the type is public so callers
    running the routine directly can distinguish the condition.
    """
