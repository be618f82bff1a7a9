"""Rule-based role classification and the snapshot pipeline that feeds it.

Precedence is fixed: Departed > Visitor > Troll > Novice > Leader > Active >
Passive, with Passive as the default when nothing fires. classify() is a pure
function of (FeatureVector, ThresholdConfig); the pipeline functions assemble
feature vectors from an event log and run it over sliding snapshots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .activity import SECONDS_PER_DAY, compute_activity, relativize
from .centrality import CentralityRow, compute_centralities
from .errors import InvalidWindow
from .events import EventKind, EventLog
from .graph import build_graph, churn_between
from .lifecycle import DistributionVector
from .roles import (
    TROLL_OUT_DEGREE_PERCENTILE_MIN,
    FeatureVector,
    Role,
    RoleAssignment,
    ThresholdConfig,
)

# Rule predicates, keyed by the identifier that fired_rules entries start
# with. Each predicate re-evaluates exactly the comparison its rule id names,
# so an assignment can be replayed from its fired_rules alone.
RULE_PREDICATES: dict[str, Callable[[FeatureVector, ThresholdConfig], bool]] = {}


def _rule(rule_id: str):
    def register(fn: Callable[[FeatureVector, ThresholdConfig], bool]):
        RULE_PREDICATES[rule_id] = fn
        return fn

    return register


@_rule("departed.explicit")
def _departed_explicit(f: FeatureVector, c: ThresholdConfig) -> bool:
    return f.explicit_departure


@_rule("departed.login_inactivity")
def _departed_login_inactivity(f: FeatureVector, c: ThresholdConfig) -> bool:
    tsll = f.activity.time_since_last_login
    return tsll is not None and tsll > c.departed_inactivity_days * SECONDS_PER_DAY


@_rule("departed.trace_inactivity")
def _departed_trace_inactivity(f: FeatureVector, c: ThresholdConfig) -> bool:
    # Only reached when the member never logged in at all: their newest
    # trace of any kind must be as stale as the login rule demands.
    if f.activity.time_since_last_login is not None:
        return False
    gap = f.seconds_since_last_activity
    return gap is not None and gap > c.departed_inactivity_days * SECONDS_PER_DAY


@_rule("visitor.no_signup")
def _visitor_no_signup(f: FeatureVector, c: ThresholdConfig) -> bool:
    return not f.has_signup


@_rule("troll.burstiness")
def _troll_burstiness(f: FeatureVector, c: ThresholdConfig) -> bool:
    b = f.activity.burstiness
    return b is not None and b >= c.troll_burstiness_min


@_rule("troll.flags")
def _troll_flags(f: FeatureVector, c: ThresholdConfig) -> bool:
    return f.activity.flags_received >= c.troll_flags_min


@_rule("troll.unreciprocated")
def _troll_unreciprocated(f: FeatureVector, c: ThresholdConfig) -> bool:
    out_pct = f.relative.percentile("degree_out")
    return (
        f.centrality.reciprocity <= c.troll_reciprocity_max
        and out_pct is not None
        and out_pct >= TROLL_OUT_DEGREE_PERCENTILE_MIN
    )


@_rule("novice.recent_signup")
def _novice_recent_signup(f: FeatureVector, c: ThresholdConfig) -> bool:
    d = f.activity.days_since_signup
    return d is not None and d <= c.novice_max_days


@_rule("leader.degree")
def _leader_degree(f: FeatureVector, c: ThresholdConfig) -> bool:
    pct = f.relative.percentile("degree_total")
    return pct is not None and pct >= c.leader_degree_percentile_min


@_rule("leader.brokerage")
def _leader_brokerage(f: FeatureVector, c: ThresholdConfig) -> bool:
    # The brokerage evidence is a disjunction: betweenness, closeness OR
    # eigenvector standing, so the max of the three percentiles is gated.
    pcts = [
        f.relative.percentile("betweenness"),
        f.relative.percentile("closeness"),
        f.relative.percentile("eigenvector"),
    ]
    defined = [p for p in pcts if p is not None]
    return bool(defined) and max(defined) >= c.leader_broker_percentile_min


@_rule("leader.activity")
def _leader_activity(f: FeatureVector, c: ThresholdConfig) -> bool:
    pct = f.relative.percentile("post_count")
    return pct is not None and pct >= c.leader_activity_percentile_min


@_rule("active.recency")
def _active_recency(f: FeatureVector, c: ThresholdConfig) -> bool:
    ratio = f.relative.ratio_to_mean("time_since_last_login")
    return ratio is not None and ratio <= c.active_recency_ratio_max


@_rule("active.login_gap")
def _active_login_gap(f: FeatureVector, c: ThresholdConfig) -> bool:
    ratio = f.relative.ratio_to_mean("mean_inter_login_gap")
    return ratio is not None and ratio <= c.active_gap_ratio_max


@_rule("active.degree_band")
def _active_degree_band(f: FeatureVector, c: ThresholdConfig) -> bool:
    pct = f.relative.percentile("degree_total")
    return (
        pct is not None
        and c.active_degree_percentile_min <= pct <= c.active_degree_percentile_max
    )


@_rule("passive.low_posts")
def _passive_low_posts(f: FeatureVector, c: ThresholdConfig) -> bool:
    pct = f.relative.percentile("post_count")
    return pct is not None and pct <= c.passive_post_percentile_max


@_rule("passive.long_gaps")
def _passive_long_gaps(f: FeatureVector, c: ThresholdConfig) -> bool:
    ratio = f.relative.ratio_to_mean("mean_inter_login_gap")
    return ratio is not None and ratio >= c.passive_gap_ratio_min


@_rule("passive.stable_network")
def _passive_stable_network(f: FeatureVector, c: ThresholdConfig) -> bool:
    return f.edge_churn <= c.passive_churn_max


def _fire(rule_id: str, f: FeatureVector, c: ThresholdConfig) -> str | None:
    return rule_id if RULE_PREDICATES[rule_id](f, c) else None


def classify(features: FeatureVector, config: ThresholdConfig) -> RoleAssignment:
    """Assign exactly one role; fired_rules holds the winning rule chain."""
    f, c = features, config

    def result(role: Role, fired: Sequence[str]) -> RoleAssignment:
        return RoleAssignment(
            member=f.member,
            role=role,
            snapshot=f.window,
            fired_rules=tuple(fired),
        )

    if _fire("departed.explicit", f, c):
        return result(Role.DEPARTED, ["departed.explicit"])
    if _fire("departed.login_inactivity", f, c):
        return result(Role.DEPARTED, ["departed.login_inactivity"])
    if _fire("departed.trace_inactivity", f, c):
        return result(Role.DEPARTED, ["departed.trace_inactivity"])

    if _fire("visitor.no_signup", f, c):
        return result(Role.VISITOR, ["visitor.no_signup"])

    if _fire("troll.burstiness", f, c):
        if _fire("troll.flags", f, c):
            return result(Role.TROLL, ["troll.burstiness", "troll.flags"])
        if _fire("troll.unreciprocated", f, c):
            return result(Role.TROLL, ["troll.burstiness", "troll.unreciprocated"])

    if _fire("novice.recent_signup", f, c):
        return result(Role.NOVICE, ["novice.recent_signup"])

    leader_rules = ["leader.degree", "leader.brokerage", "leader.activity"]
    if all(_fire(r, f, c) for r in leader_rules):
        return result(Role.LEADER, leader_rules)

    active_rules = ["active.recency", "active.login_gap", "active.degree_band"]
    if all(_fire(r, f, c) for r in active_rules):
        return result(Role.ACTIVE, active_rules)

    engagement = _fire("passive.low_posts", f, c) or _fire("passive.long_gaps", f, c)
    if engagement and _fire("passive.stable_network", f, c):
        fired = [r for r in ("passive.low_posts", "passive.long_gaps") if _fire(r, f, c)]
        fired.append("passive.stable_network")
        return result(Role.PASSIVE, fired)

    return result(Role.PASSIVE, [])


def replay(assignment: RoleAssignment, features: FeatureVector, config: ThresholdConfig) -> bool:
    """True when every recorded fired rule still holds for the features."""
    return all(
        RULE_PREDICATES[rule_id](features, config)
        for rule_id in assignment.fired_rules
    )


def featurize(
    log: EventLog,
    start: int,
    end: int,
    config: ThresholdConfig,
    now: int | None = None,
) -> dict[str, FeatureVector]:
    """Build feature vectors for every member visible by the window's end.

    A member is visible once their first trace (as actor or target) is
    strictly before `end`. Churn compares the window against the adjacent
    preceding window of equal width.
    """
    if end < start:
        raise InvalidWindow(f"window end {end} precedes start {start}")
    if now is None:
        now = end

    visible = [
        m
        for m in log.members
        if log.first_seen(m) is not None and log.first_seen(m) < end
    ]

    graph = build_graph(log, start, end, config.edge_semantics)
    report = compute_centralities(graph)

    # Visible members with no trace inside the window are absent from the
    # graph; they rank with zero scores (reciprocity vacuously 1.0).
    def row(m: str) -> CentralityRow:
        if m in report:
            return report[m]
        return CentralityRow(
            member=m,
            degree_in=0.0,
            degree_out=0.0,
            degree_total=0.0,
            closeness=0.0,
            betweenness=0.0,
            eigenvector=0.0,
            reciprocity=1.0,
        )

    rows = {m: row(m) for m in visible}
    measures = {m: compute_activity(log, m, start, end, now) for m in visible}

    # Graph-derived columns are undefined (sentinel) for members outside the
    # window graph: they are not ranked among the window's participants, so
    # stale members cannot dilute the percentile population.
    def col(attr: str) -> dict[str, float | None]:
        return {
            m: getattr(rows[m], attr) if m in report else None for m in visible
        }

    extra = {
        "degree_total": col("degree_total"),
        "degree_out": col("degree_out"),
        "betweenness": col("betweenness"),
        "closeness": col("closeness"),
        "eigenvector": col("eigenvector"),
    }
    relatives = relativize(measures, extra_columns=extra)

    departures: dict[str, int] = {}
    for rec in log:
        if rec.kind is EventKind.DEPARTURE and rec.member not in departures:
            departures[rec.member] = rec.timestamp

    width = end - start
    prev_graph = build_graph(log, start - width, start, config.edge_semantics)
    out: dict[str, FeatureVector] = {}
    for m in visible:
        signup = log.signup_time(m)
        last = log.last_activity(m, now)
        out[m] = FeatureVector(
            member=m,
            window=(start, end),
            centrality=rows[m],
            activity=measures[m],
            relative=relatives[m],
            edge_churn=churn_between(prev_graph, graph, m),
            has_signup=signup is not None and signup < now,
            explicit_departure=m in departures and departures[m] < now,
            seconds_since_last_activity=float(now - last) if last is not None else None,
        )
    return out


def classify_all(
    log: EventLog,
    start: int,
    end: int,
    config: ThresholdConfig,
    now: int | None = None,
) -> tuple[dict[str, RoleAssignment], DistributionVector | None]:
    """Classify every visible member; None distribution for zero members."""
    features = featurize(log, start, end, config, now)
    assignments = {m: classify(f, config) for m, f in features.items()}
    if not assignments:
        return {}, None
    counts: dict[Role, int] = {}
    for a in assignments.values():
        counts[a.role] = counts.get(a.role, 0) + 1
    return assignments, DistributionVector.from_counts(counts)


@dataclass(frozen=True)
class AssignmentSeries:
    """Per-member role assignments over a sliding snapshot grid.

    Each member's tuple starts at the first snapshot in which they are
    visible and covers every later snapshot; consecutive duplicates are
    preserved because self-transitions carry dwell mass.
    """

    snapshots: tuple[tuple[int, int], ...]
    by_member: Mapping[str, tuple[RoleAssignment, ...]]
    first_index: Mapping[str, int]

    def role_sequences(self) -> dict[str, tuple[Role, ...]]:
        return {
            m: tuple(a.role for a in series) for m, series in self.by_member.items()
        }

    def distribution(self, snapshot_index: int) -> DistributionVector | None:
        counts: dict[Role, int] = {}
        for m, series in self.by_member.items():
            offset = snapshot_index - self.first_index[m]
            if 0 <= offset < len(series):
                role = series[offset].role
                counts[role] = counts.get(role, 0) + 1
        if not counts:
            return None
        return DistributionVector.from_counts(counts)

    def distribution_series(self) -> list[DistributionVector | None]:
        return [self.distribution(i) for i in range(len(self.snapshots))]


def assignment_series(
    log: EventLog,
    window_width: int,
    step: int,
    config: ThresholdConfig,
    origin: int | None = None,
) -> AssignmentSeries:
    """Classify the community over sliding snapshots of width window_width.

    Snapshots start at origin (default: the first event timestamp) and
    advance by step until the one whose start passes the last event. Each
    snapshot is evaluated at its own end (now = window end).
    """
    if step <= 0:
        raise InvalidWindow("step must be positive")
    if window_width <= 0:
        raise InvalidWindow("window width must be positive")
    span = log.span()
    if span is None:
        return AssignmentSeries(snapshots=(), by_member={}, first_index={})
    first_ts, last_ts = span
    if origin is None:
        origin = first_ts

    snapshots: list[tuple[int, int]] = []
    i = 0
    while origin + i * step <= last_ts:
        s = origin + i * step
        snapshots.append((s, s + window_width))
        i += 1

    by_member: dict[str, list[RoleAssignment]] = {}
    first_index: dict[str, int] = {}
    for idx, (s, e) in enumerate(snapshots):
        assignments, _ = classify_all(log, s, e, config, now=e)
        for m, a in assignments.items():
            if m not in by_member:
                by_member[m] = []
                first_index[m] = idx
            by_member[m].append(a)
    return AssignmentSeries(
        snapshots=tuple(snapshots),
        by_member={m: tuple(v) for m, v in by_member.items()},
        first_index=first_index,
    )


ASSIGNMENT_CSV_HEADER = "member,snapshot_from,snapshot_to,role,fired_rules"


def assignments_to_csv(series: AssignmentSeries) -> str:
    """CSV export: member,snapshot_from,snapshot_to,role,fired_rules."""
    lines = [ASSIGNMENT_CSV_HEADER]
    for m in sorted(series.by_member):
        for a in series.by_member[m]:
            fired = ";".join(a.fired_rules)
            lines.append(f"{m},{a.snapshot[0]},{a.snapshot[1]},{a.role.value},{fired}")
    return "\n".join(lines) + "\n"
