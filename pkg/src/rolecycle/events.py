"""Event log ingestion: parse, validate, window, and serialize activity streams.

The wire format is JSON Lines, one event per line, ordered by timestamp after
parsing with input order as the tie-breaker. An EventLog is immutable once
built; windowing produces a new log that keeps the parent's member table so
signup times survive slicing.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator, Mapping, Union

from .errors import InvalidWindow, MalformedRecord, OrderingConflict, UnknownMember


class EventKind(Enum):
    SIGNUP = "Signup"
    LOGIN = "Login"
    POST = "Post"
    REPLY = "Reply"
    EDGE_ADD = "EdgeAdd"
    EDGE_REMOVE = "EdgeRemove"
    REACTION = "Reaction"
    MODERATION_FLAG = "ModerationFlag"
    DEPARTURE = "Departure"


_KIND_BY_NAME = {k.value: k for k in EventKind}

# Kinds whose records must carry a target.
TARGET_REQUIRED = frozenset(
    {EventKind.EDGE_ADD, EventKind.EDGE_REMOVE, EventKind.REPLY, EventKind.REACTION}
)
# Kinds whose records may carry a target (absent target means the acting
# member is the one the record is about, e.g. a flag lodged against them).
TARGET_OPTIONAL = frozenset({EventKind.MODERATION_FLAG})
# Kinds that may carry a payload size.
PAYLOAD_KINDS = frozenset({EventKind.POST, EventKind.REPLY})
# Kinds a member cannot emit before their own signup.
SIGNUP_GATED = frozenset(
    {EventKind.LOGIN, EventKind.POST, EventKind.REPLY, EventKind.EDGE_ADD}
)
# Kinds where pointing at yourself is meaningless rather than merely odd.
NO_SELF_TARGET = frozenset({EventKind.EDGE_ADD, EventKind.EDGE_REMOVE})

_RECORD_FIELDS = frozenset({"member", "kind", "timestamp", "target", "payload_size"})


@dataclass(frozen=True)
class EventRecord:
    """One community event. timestamp is integer seconds since the log epoch."""

    member: str
    kind: EventKind
    timestamp: int
    target: str | None = None
    payload_size: int | None = None


def _check_record(rec: EventRecord) -> str | None:
    """Return a reason string if the record is invalid on its own, else None."""
    if not isinstance(rec.member, str) or not rec.member:
        return "member must be a non-empty string"
    if not isinstance(rec.kind, EventKind):
        return f"unknown event kind {rec.kind!r}"
    # bool is an int subclass; a boolean timestamp is a type error, not 0/1.
    if isinstance(rec.timestamp, bool) or not isinstance(rec.timestamp, int):
        return "timestamp must be an integer"
    if rec.timestamp < 0:
        return "timestamp must be non-negative"
    if rec.target is not None:
        if not isinstance(rec.target, str) or not rec.target:
            return "target must be a non-empty string when present"
        if rec.kind not in TARGET_REQUIRED and rec.kind not in TARGET_OPTIONAL:
            return f"{rec.kind.value} events do not take a target"
        if rec.kind in NO_SELF_TARGET and rec.target == rec.member:
            return f"{rec.kind.value} events cannot target their own member"
    elif rec.kind in TARGET_REQUIRED:
        return f"{rec.kind.value} events require a target"
    if rec.payload_size is not None:
        if rec.kind not in PAYLOAD_KINDS:
            return f"{rec.kind.value} events do not take a payload_size"
        if isinstance(rec.payload_size, bool) or not isinstance(rec.payload_size, int):
            return "payload_size must be an integer"
        if rec.payload_size < 0:
            return "payload_size must be non-negative"
    return None


def _parse_line(line: str, lineno: int) -> EventRecord:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise MalformedRecord(lineno, "record must be a JSON object")
    unknown = set(raw) - _RECORD_FIELDS
    if unknown:
        raise MalformedRecord(lineno, f"unknown fields: {sorted(unknown)}")
    for field in ("member", "kind", "timestamp"):
        if field not in raw:
            raise MalformedRecord(lineno, f"missing required field {field!r}")
    kind_name = raw["kind"]
    if not isinstance(kind_name, str) or kind_name not in _KIND_BY_NAME:
        raise MalformedRecord(lineno, f"unknown event kind {kind_name!r}")
    rec = EventRecord(
        member=raw["member"],
        kind=_KIND_BY_NAME[kind_name],
        timestamp=raw["timestamp"],
        target=raw.get("target"),
        payload_size=raw.get("payload_size"),
    )
    reason = _check_record(rec)
    if reason is not None:
        raise MalformedRecord(lineno, reason)
    return rec


class EventLog:
    """Immutable, timestamp-ordered event sequence plus the member table.

    members maps every id seen in the log (as actor or target) to its signup
    timestamp, or None for ids that never signed up.
    """

    __slots__ = (
        "_events",
        "_members",
        "_timestamps",
        "_by_actor",
        "_target_ts",
        "_first_seen",
    )

    def __init__(
        self,
        events: Iterable[EventRecord],
        members: Mapping[str, int | None] | None = None,
    ):
        evs = tuple(events)
        for i, rec in enumerate(evs):
            reason = _check_record(rec)
            if reason is not None:
                raise MalformedRecord(i + 1, reason)
            if i and evs[i - 1].timestamp > rec.timestamp:
                raise MalformedRecord(i + 1, "events are not timestamp-ordered")
        self._events = evs
        self._timestamps = [rec.timestamp for rec in evs]

        derived: dict[str, int | None] = {}
        by_actor: dict[str, list[EventRecord]] = {}
        target_ts: dict[str, list[int]] = {}
        first_seen: dict[str, int] = {}
        for i, rec in enumerate(evs):
            if rec.member not in derived:
                derived[rec.member] = None
                first_seen[rec.member] = rec.timestamp
            by_actor.setdefault(rec.member, []).append(rec)
            if rec.kind is EventKind.SIGNUP:
                if derived[rec.member] is not None:
                    raise OrderingConflict(
                        f"member {rec.member!r} has more than one Signup"
                    )
                derived[rec.member] = rec.timestamp
            if rec.target is not None:
                if rec.target not in derived:
                    derived[rec.target] = None
                    first_seen[rec.target] = rec.timestamp
                target_ts.setdefault(rec.target, []).append(rec.timestamp)
        for rec in evs:
            if rec.kind in SIGNUP_GATED:
                signup = derived.get(rec.member)
                if signup is not None and rec.timestamp < signup:
                    raise MalformedRecord(
                        0,
                        f"member {rec.member!r} has a {rec.kind.value} event "
                        f"before their Signup",
                    )

        if members is None:
            self._members = derived
        else:
            # Parent table from windowing: keep its signup knowledge but make
            # sure nothing in this slice contradicts it.
            merged = dict(members)
            for mid, signup in derived.items():
                if mid not in merged:
                    merged[mid] = signup
            self._members = merged
        self._by_actor = by_actor
        self._target_ts = target_ts
        self._first_seen = first_seen

    @property
    def events(self) -> tuple[EventRecord, ...]:
        return self._events

    @property
    def members(self) -> Mapping[str, int | None]:
        return dict(self._members)

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self._events)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventLog):
            return NotImplemented
        return self._events == other._events and self._members == other._members

    def __contains__(self, member: str) -> bool:
        return member in self._members

    def signup_time(self, member: str) -> int | None:
        if member not in self._members:
            raise UnknownMember(f"unknown member {member!r}")
        return self._members[member]

    def first_seen(self, member: str) -> int | None:
        """Timestamp of the member's first appearance in this log, if any."""
        if member not in self._members:
            raise UnknownMember(f"unknown member {member!r}")
        return self._first_seen.get(member)

    def events_by(self, member: str) -> tuple[EventRecord, ...]:
        """Events the member performed (as actor), in log order."""
        if member not in self._members:
            raise UnknownMember(f"unknown member {member!r}")
        return tuple(self._by_actor.get(member, ()))

    def last_activity(self, member: str, before: int) -> int | None:
        """Latest timestamp at or before `before` where the member acted.

        Members who never act but are targeted fall back to their latest
        targeted timestamp; None when the member has no trace by then.
        """
        if member not in self._members:
            raise UnknownMember(f"unknown member {member!r}")
        acted = self._by_actor.get(member)
        if acted:
            ts = [rec.timestamp for rec in acted]
            i = bisect_right(ts, before)
            if i:
                return ts[i - 1]
        targeted = self._target_ts.get(member)
        if targeted:
            i = bisect_right(targeted, before)
            if i:
                return targeted[i - 1]
        return None

    def span(self) -> tuple[int, int] | None:
        """(first, last) event timestamps, or None for an empty log."""
        if not self._events:
            return None
        return self._timestamps[0], self._timestamps[-1]

    def window(self, start: int, end: int) -> "EventLog":
        """Events with start <= timestamp < end; member table is retained."""
        if end < start:
            raise InvalidWindow(f"window end {end} precedes start {start}")
        lo = bisect_left(self._timestamps, start)
        hi = bisect_left(self._timestamps, end)
        return EventLog(self._events[lo:hi], members=self._members)


def parse_events(source: Union[bytes, str, IO[bytes], IO[str]]) -> EventLog:
    """Parse a JSONL byte stream into a sealed EventLog.

    Records are validated line by line, then sorted by timestamp with input
    order breaking ties, then checked for cross-record consistency.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data

    records: list[tuple[int, EventRecord]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        records.append((lineno, _parse_line(line, lineno)))
    records.sort(key=lambda item: item[1].timestamp)

    signup_line: dict[str, int] = {}
    signup_ts: dict[str, int] = {}
    for lineno, rec in records:
        if rec.kind is EventKind.SIGNUP:
            if rec.member in signup_line:
                raise OrderingConflict(
                    f"line {lineno}: member {rec.member!r} already signed up "
                    f"on line {signup_line[rec.member]}"
                )
            signup_line[rec.member] = lineno
            signup_ts[rec.member] = rec.timestamp
    for lineno, rec in records:
        if rec.kind in SIGNUP_GATED and rec.member in signup_ts:
            if rec.timestamp < signup_ts[rec.member]:
                raise MalformedRecord(
                    lineno,
                    f"{rec.kind.value} by {rec.member!r} precedes their Signup",
                )
    return EventLog(rec for _, rec in records)


def serialize_events(log: EventLog) -> bytes:
    """Serialize a log back to JSONL. parse_events(serialize_events(log))
    reproduces the log for any log whose member table came from its events."""
    lines = []
    for rec in log:
        obj: dict[str, object] = {
            "member": rec.member,
            "kind": rec.kind.value,
            "timestamp": rec.timestamp,
        }
        if rec.target is not None:
            obj["target"] = rec.target
        if rec.payload_size is not None:
            obj["payload_size"] = rec.payload_size
        lines.append(json.dumps(obj, separators=(", ", ": ")))
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def window(log: EventLog, start: int, end: int) -> EventLog:
    """Module-level alias for EventLog.window."""
    return log.window(start, end)
