"""Shared builders for tests: terse event-log and feature-vector construction."""

from __future__ import annotations

import json

from rolecycle import (
    ActivityMeasures,
    CentralityRow,
    EventKind,
    EventLog,
    EventRecord,
    FeatureVector,
    Relative,
    RelativeMeasures,
)

DAY = 86400

KIND = {k.value: k for k in EventKind}

MEASURE_KEYS = (
    "days_since_signup",
    "time_since_last_login",
    "mean_inter_login_gap",
    "post_count",
    "burstiness",
    "flags_received",
    "degree_total",
    "degree_out",
    "betweenness",
    "closeness",
    "eigenvector",
)


def ev(
    member: str,
    kind: str,
    ts: int,
    target: str | None = None,
    payload_size: int | None = None,
) -> EventRecord:
    return EventRecord(
        member=member,
        kind=KIND[kind],
        timestamp=ts,
        target=target,
        payload_size=payload_size,
    )


def log_of(*records: EventRecord) -> EventLog:
    return EventLog(sorted(records, key=lambda r: r.timestamp))


def jsonl(*objs: dict) -> bytes:
    return ("\n".join(json.dumps(o) for o in objs) + "\n").encode()


def fv(
    member="m",
    days_since_signup=None,
    time_since_last_login=None,
    mean_inter_login_gap=None,
    post_count=0,
    burstiness=None,
    flags_received=0,
    reciprocity=1.0,
    has_signup=True,
    explicit_departure=False,
    edge_churn=0.0,
    seconds_since_last_activity=0.0,
    percentiles=None,
    ratios=None,
) -> FeatureVector:
    """Hand-built feature vector; relative values default to undefined."""
    pcts = dict(percentiles or {})
    rats = dict(ratios or {})
    rel = RelativeMeasures(
        member=member,
        values={
            k: Relative(percentile=pcts.get(k), ratio_to_mean=rats.get(k))
            for k in MEASURE_KEYS
        },
    )
    return FeatureVector(
        member=member,
        window=(0, 100),
        centrality=CentralityRow(
            member=member,
            degree_in=0.0,
            degree_out=0.0,
            degree_total=0.0,
            closeness=0.0,
            betweenness=0.0,
            eigenvector=0.0,
            reciprocity=reciprocity,
        ),
        activity=ActivityMeasures(
            member=member,
            days_since_signup=days_since_signup,
            time_since_last_login=time_since_last_login,
            mean_inter_login_gap=mean_inter_login_gap,
            post_count=post_count,
            burstiness=burstiness,
            flags_received=flags_received,
        ),
        relative=rel,
        edge_churn=edge_churn,
        has_signup=has_signup,
        explicit_departure=explicit_departure,
        seconds_since_last_activity=seconds_since_last_activity,
    )
