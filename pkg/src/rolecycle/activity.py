"""Per-member activity measures and community-relative normalization.

Undefined quantities (never logged in, fewer than two logins, no signup,
zero community mean) are represented as None, never as 0 or infinity, so
downstream rules must branch on them explicitly.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from math import fsum
from typing import Mapping

from .errors import InvalidWindow, UnknownMember
from .events import EventKind, EventLog

# Fraction of the analysis window used as the burstiness sub-window: a
# one-day spree still registers in a three-week window.
BURSTINESS_SUBWINDOW_FRACTION = 1.0 / 20.0

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class ActivityMeasures:
    """Raw activity for one member over one window, evaluated at `now`.

    days_since_signup is None for members without a Signup; the two login
    measures are None when the window holds no (or fewer than two) logins;
    burstiness is None for members with no window events at all.
    """

    member: str
    days_since_signup: float | None
    time_since_last_login: float | None
    mean_inter_login_gap: float | None
    post_count: int
    burstiness: float | None
    flags_received: int


@dataclass(frozen=True)
class Relative:
    """Community-relative view of one raw measure.

    percentile: midpoint-tie rank in [0,1] over members with a defined value.
    ratio_to_mean: raw / community mean; None when the mean is 0 or the raw
    value is undefined.
    """

    percentile: float | None
    ratio_to_mean: float | None


_UNDEFINED = Relative(percentile=None, ratio_to_mean=None)


@dataclass(frozen=True)
class RelativeMeasures:
    """Relative view of every measure for one member."""

    member: str
    values: Mapping[str, Relative]

    def percentile(self, measure: str) -> float | None:
        return self.values[measure].percentile

    def ratio_to_mean(self, measure: str) -> float | None:
        return self.values[measure].ratio_to_mean


def burstiness(timestamps: list[int], start: int, end: int) -> float | None:
    """Fraction of events inside the busiest sub-window of width (end-start)/20.

    None with no events; a single event is maximally bursty (1.0). Events
    must fall within [start, end).
    """
    if end <= start:
        raise InvalidWindow(f"window end {end} must exceed start {start}")
    if not timestamps:
        return None
    ts = sorted(timestamps)
    width = (end - start) * BURSTINESS_SUBWINDOW_FRACTION
    best = 1
    for i, t in enumerate(ts):
        # Sub-window anchored at each event: [t, t + width).
        j = bisect_left(ts, t + width, lo=i)
        if j - i > best:
            best = j - i
    return best / len(ts)


def compute_activity(
    log: EventLog,
    member: str,
    start: int,
    end: int,
    now: int,
) -> ActivityMeasures:
    """Raw activity measures for one member over [start, end), observed at now.

    now may exceed the window end (analysis after the fact); logins outside
    the window never count.
    """
    if member not in log:
        raise UnknownMember(f"unknown member {member!r}")
    if end < start:
        raise InvalidWindow(f"window end {end} precedes start {start}")

    signup = log.signup_time(member)
    days_since_signup = None
    if signup is not None and signup <= now:
        days_since_signup = (now - signup) / SECONDS_PER_DAY

    window_events = [
        rec for rec in log.events_by(member) if start <= rec.timestamp < end
    ]
    logins = [rec.timestamp for rec in window_events if rec.kind is EventKind.LOGIN]

    time_since_last_login = None
    if logins:
        time_since_last_login = float(now - max(logins))
    mean_inter_login_gap = None
    if len(logins) >= 2:
        gaps = [b - a for a, b in zip(logins, logins[1:])]
        mean_inter_login_gap = fsum(gaps) / len(gaps)

    post_count = sum(
        1
        for rec in window_events
        if rec.kind in (EventKind.POST, EventKind.REPLY)
    )

    burst = burstiness(
        [rec.timestamp for rec in window_events], start, end
    ) if end > start else None

    flags = 0
    for rec in log.window(start, end):
        if rec.kind is not EventKind.MODERATION_FLAG:
            continue
        # A flag with a target is lodged against the target; a flag without
        # one is recorded under the flagged member's own id.
        flagged = rec.target if rec.target is not None else rec.member
        if flagged == member:
            flags += 1

    return ActivityMeasures(
        member=member,
        days_since_signup=days_since_signup,
        time_since_last_login=time_since_last_login,
        mean_inter_login_gap=mean_inter_login_gap,
        post_count=post_count,
        burstiness=burst,
        flags_received=flags,
    )


def midpoint_percentiles(values: Mapping[str, float | None]) -> dict[str, float | None]:
    """Midpoint-tie percentile rank of each defined value within the mapping.

    rank = (count_below + 0.5 * count_equal) / count_defined, so a lone
    member and full ties both land at 0.5. Undefined entries stay None.
    """
    defined = sorted(v for v in values.values() if v is not None)
    n = len(defined)
    out: dict[str, float | None] = {}
    for key, v in values.items():
        if v is None or n == 0:
            out[key] = None
            continue
        below = bisect_left(defined, v)
        equal = bisect_right(defined, v) - below
        out[key] = (below + 0.5 * equal) / n
    return out


def ratios_to_mean(values: Mapping[str, float | None]) -> dict[str, float | None]:
    """value / population mean over defined values; None on zero mean."""
    defined = [v for v in values.values() if v is not None]
    if not defined:
        return {key: None for key in values}
    mean = fsum(defined) / len(defined)
    out: dict[str, float | None] = {}
    for key, v in values.items():
        if v is None or mean == 0:
            out[key] = None
        else:
            out[key] = v / mean
    return out


_RELATIVIZED_FIELDS = (
    "days_since_signup",
    "time_since_last_login",
    "mean_inter_login_gap",
    "post_count",
    "burstiness",
    "flags_received",
)


def relativize(
    all_measures: Mapping[str, ActivityMeasures],
    extra_columns: Mapping[str, Mapping[str, float | None]] | None = None,
) -> dict[str, RelativeMeasures]:
    """Percentile and ratio-to-mean for every measure across the community.

    extra_columns lets callers rank additional per-member columns (the
    classifier feeds centrality scores through here) with identical tie and
    sentinel semantics.
    """
    columns: dict[str, dict[str, float | None]] = {}
    for name in _RELATIVIZED_FIELDS:
        columns[name] = {
            member: getattr(m, name)
            for member, m in all_measures.items()
        }
    if extra_columns:
        for name, col in extra_columns.items():
            columns[name] = dict(col)

    members: set[str] = set(all_measures)
    for col in columns.values():
        members |= set(col)

    per_column: dict[str, tuple[dict[str, float | None], dict[str, float | None]]] = {}
    for name, col in columns.items():
        per_column[name] = (midpoint_percentiles(col), ratios_to_mean(col))

    result: dict[str, RelativeMeasures] = {}
    for member in members:
        vals: dict[str, Relative] = {}
        for name, (pcts, ratios) in per_column.items():
            if member in columns[name]:
                vals[name] = Relative(
                    percentile=pcts[member], ratio_to_mean=ratios[member]
                )
            else:
                vals[name] = _UNDEFINED
        result[member] = RelativeMeasures(member=member, values=vals)
    return result


def activity_to_csv(
    measures: Mapping[str, ActivityMeasures],
    relatives: Mapping[str, RelativeMeasures] | None = None,
) -> str:
    """CSV export of raw measures, plus percentile/ratio columns when given.

    Undefined values serialize as empty cells.
    """

    def cell(v: float | int | None) -> str:
        return "" if v is None else repr(v)

    header = ["member", *_RELATIVIZED_FIELDS]
    if relatives is not None:
        for name in _RELATIVIZED_FIELDS:
            header.append(f"{name}_percentile")
            header.append(f"{name}_ratio_to_mean")
    lines = [",".join(header)]
    for member in sorted(measures):
        m = measures[member]
        row = [member] + [cell(getattr(m, name)) for name in _RELATIVIZED_FIELDS]
        if relatives is not None:
            rel = relatives[member]
            for name in _RELATIVIZED_FIELDS:
                row.append(cell(rel.percentile(name)))
                row.append(cell(rel.ratio_to_mean(name)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
