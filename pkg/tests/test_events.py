"""Event ingestion: schema validation, ordering, windowing, serialization."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ev, jsonl, log_of
from rolecycle import (
    EventKind,
    EventLog,
    InvalidWindow,
    MalformedRecord,
    OrderingConflict,
    UnknownMember,
    parse_events,
    serialize_events,
    window,
)


class TestParseBasics:
    def test_parses_and_sorts_by_timestamp(self):
        log = parse_events(
            jsonl(
                {"member": "a", "kind": "Post", "timestamp": 30},
                {"member": "a", "kind": "Signup", "timestamp": 10},
            )
        )
        assert [r.timestamp for r in log] == [10, 30]
        assert [r.kind for r in log] == [EventKind.SIGNUP, EventKind.POST]

    def test_equal_timestamps_keep_input_order(self):
        log = parse_events(
            jsonl(
                {"member": "a", "kind": "Signup", "timestamp": 5},
                {"member": "b", "kind": "Signup", "timestamp": 5},
            )
        )
        assert [r.member for r in log] == ["a", "b"]

    def test_blank_lines_skipped(self):
        raw = b'\n{"member": "a", "kind": "Signup", "timestamp": 0}\n\n'
        assert len(parse_events(raw)) == 1

    def test_accepts_str_and_file_sources(self, tmp_path):
        data = jsonl({"member": "a", "kind": "Signup", "timestamp": 0})
        assert len(parse_events(data.decode())) == 1
        p = tmp_path / "events.jsonl"
        p.write_bytes(data)
        with open(p, "rb") as fh:
            assert len(parse_events(fh)) == 1

    def test_empty_input_is_empty_log(self):
        log = parse_events(b"")
        assert len(log) == 0
        assert log.span() is None


class TestSchemaRejections:
    def test_invalid_json_line(self):
        with pytest.raises(MalformedRecord):
            parse_events(b"{not json}\n")

    def test_non_object_line(self):
        with pytest.raises(MalformedRecord):
            parse_events(b"[1, 2]\n")

    def test_unknown_field_rejected(self):
        with pytest.raises(MalformedRecord, match="unknown fields"):
            parse_events(
                jsonl({"member": "a", "kind": "Signup", "timestamp": 0, "extra": 1})
            )

    @pytest.mark.parametrize("missing", ["member", "kind", "timestamp"])
    def test_missing_required_field(self, missing):
        obj = {"member": "a", "kind": "Signup", "timestamp": 0}
        del obj[missing]
        with pytest.raises(MalformedRecord, match="missing required field"):
            parse_events(jsonl(obj))

    def test_unknown_kind(self):
        with pytest.raises(MalformedRecord, match="unknown event kind"):
            parse_events(jsonl({"member": "a", "kind": "Dance", "timestamp": 0}))

    @pytest.mark.parametrize("bad_ts", [-1, 1.5, "10", True, None])
    def test_bad_timestamp(self, bad_ts):
        with pytest.raises(MalformedRecord):
            parse_events(jsonl({"member": "a", "kind": "Signup", "timestamp": bad_ts}))

    def test_empty_member_rejected(self):
        with pytest.raises(MalformedRecord, match="member"):
            parse_events(jsonl({"member": "", "kind": "Signup", "timestamp": 0}))

    @pytest.mark.parametrize("kind", ["Reply", "EdgeAdd", "EdgeRemove", "Reaction"])
    def test_target_required(self, kind):
        with pytest.raises(MalformedRecord, match="require a target"):
            parse_events(jsonl({"member": "a", "kind": kind, "timestamp": 0}))

    @pytest.mark.parametrize("kind", ["Signup", "Login", "Post", "Departure"])
    def test_target_forbidden(self, kind):
        with pytest.raises(MalformedRecord, match="do not take a target"):
            parse_events(
                jsonl({"member": "a", "kind": kind, "timestamp": 0, "target": "b"})
            )

    def test_flag_target_optional(self):
        log = parse_events(
            jsonl(
                {"member": "a", "kind": "ModerationFlag", "timestamp": 0},
                {"member": "a", "kind": "ModerationFlag", "timestamp": 1, "target": "b"},
            )
        )
        assert len(log) == 2

    @pytest.mark.parametrize("kind", ["EdgeAdd", "EdgeRemove"])
    def test_self_edge_rejected(self, kind):
        with pytest.raises(MalformedRecord, match="cannot target their own member"):
            parse_events(
                jsonl({"member": "a", "kind": kind, "timestamp": 0, "target": "a"})
            )

    def test_self_reply_allowed(self):
        log = parse_events(
            jsonl({"member": "a", "kind": "Reply", "timestamp": 0, "target": "a"})
        )
        assert len(log) == 1

    def test_payload_size_only_on_content_kinds(self):
        with pytest.raises(MalformedRecord, match="payload_size"):
            parse_events(
                jsonl({"member": "a", "kind": "Login", "timestamp": 0, "payload_size": 3})
            )

    @pytest.mark.parametrize("bad", [-1, 2.5, True])
    def test_bad_payload_size(self, bad):
        with pytest.raises(MalformedRecord):
            parse_events(
                jsonl(
                    {"member": "a", "kind": "Post", "timestamp": 0, "payload_size": bad}
                )
            )


class TestCrossRecordRules:
    def test_double_signup_rejected(self):
        with pytest.raises(OrderingConflict, match="already signed up"):
            parse_events(
                jsonl(
                    {"member": "a", "kind": "Signup", "timestamp": 0},
                    {"member": "a", "kind": "Signup", "timestamp": 5},
                )
            )

    def test_post_before_signup_rejected(self):
        # Post at t=50 with Signup at t=100 violates signup precedence.
        with pytest.raises(MalformedRecord, match="precedes their Signup"):
            parse_events(
                jsonl(
                    {"member": "a", "kind": "Post", "timestamp": 50},
                    {"member": "a", "kind": "Signup", "timestamp": 100},
                )
            )

    @pytest.mark.parametrize("kind", ["Login", "Post"])
    def test_gated_kinds_without_any_signup_allowed(self, kind):
        log = parse_events(jsonl({"member": "a", "kind": kind, "timestamp": 0}))
        assert log.signup_time("a") is None

    def test_gated_event_at_signup_instant_allowed(self):
        log = parse_events(
            jsonl(
                {"member": "a", "kind": "Signup", "timestamp": 100},
                {"member": "a", "kind": "Login", "timestamp": 100},
            )
        )
        assert len(log) == 2

    def test_reaction_before_signup_allowed(self):
        # Reactions are not signup-gated: anonymous visitors react.
        log = parse_events(
            jsonl(
                {"member": "b", "kind": "Signup", "timestamp": 0},
                {"member": "a", "kind": "Reaction", "timestamp": 5, "target": "b"},
                {"member": "a", "kind": "Signup", "timestamp": 10},
            )
        )
        assert len(log) == 3

    def test_constructor_rejects_out_of_order_events(self):
        with pytest.raises(MalformedRecord, match="not timestamp-ordered"):
            EventLog([ev("a", "Signup", 10), ev("b", "Signup", 5)])


class TestLogAccessors:
    def test_members_include_targets(self):
        log = log_of(ev("a", "Reaction", 0, target="b"))
        assert "a" in log and "b" in log
        assert log.signup_time("b") is None

    def test_unknown_member_raises(self):
        log = log_of(ev("a", "Signup", 0))
        for fn in (log.signup_time, log.first_seen, log.events_by):
            with pytest.raises(UnknownMember):
                fn("ghost")
        with pytest.raises(UnknownMember):
            log.last_activity("ghost", 100)

    def test_events_by_is_actor_only(self):
        log = log_of(ev("a", "Reaction", 0, target="b"), ev("b", "Signup", 1))
        assert [r.kind for r in log.events_by("b")] == [EventKind.SIGNUP]

    def test_last_activity_prefers_acting(self):
        log = log_of(
            ev("b", "Signup", 0),
            ev("b", "Post", 10),
            ev("a", "Reaction", 50, target="b"),
        )
        assert log.last_activity("b", 100) == 10

    def test_last_activity_falls_back_to_targeted(self):
        log = log_of(ev("a", "Reaction", 50, target="b"))
        assert log.last_activity("b", 100) == 50
        assert log.last_activity("b", 49) is None

    def test_last_activity_is_inclusive_of_before(self):
        log = log_of(ev("a", "Signup", 50))
        assert log.last_activity("a", 50) == 50

    def test_span(self):
        log = log_of(ev("a", "Signup", 3), ev("a", "Post", 9))
        assert log.span() == (3, 9)


class TestWindowing:
    def test_half_open_window(self):
        # Events at 10, 20, 30: [15, 30) keeps exactly the t=20 event.
        log = log_of(
            ev("a", "Signup", 10), ev("a", "Post", 20), ev("a", "Post", 30)
        )
        sliced = window(log, 15, 30)
        assert [r.timestamp for r in sliced] == [20]

    def test_window_start_inclusive(self):
        log = log_of(ev("a", "Signup", 10))
        assert len(log.window(10, 11)) == 1

    def test_window_keeps_member_table(self):
        log = log_of(ev("a", "Signup", 0), ev("a", "Post", 100))
        sliced = log.window(50, 200)
        assert sliced.signup_time("a") == 0

    def test_inverted_window_rejected(self):
        log = log_of(ev("a", "Signup", 0))
        with pytest.raises(InvalidWindow):
            log.window(10, 5)

    def test_empty_window_allowed(self):
        log = log_of(ev("a", "Signup", 0))
        assert len(log.window(5, 5)) == 0


class TestSerialization:
    def test_round_trip_simple(self):
        log = log_of(
            ev("a", "Signup", 0),
            ev("a", "Post", 5, payload_size=120),
            ev("b", "Reaction", 7, target="a"),
        )
        assert parse_events(serialize_events(log)) == log

    def test_serialized_lines_are_json_objects(self):
        log = log_of(ev("a", "Signup", 0))
        lines = serialize_events(log).decode().splitlines()
        assert json.loads(lines[0]) == {"member": "a", "kind": "Signup", "timestamp": 0}

    def test_empty_log_serializes_empty(self):
        assert serialize_events(EventLog([])) == b""


_MEMBERS = ("m1", "m2", "m3", "m4")


@st.composite
def _event_lists(draw):
    """Valid event lists: everyone signs up at t=0, so gating never trips."""
    records = [ev(m, "Signup", 0) for m in _MEMBERS]
    n = draw(st.integers(min_value=0, max_value=30))
    for _ in range(n):
        m = draw(st.sampled_from(_MEMBERS))
        ts = draw(st.integers(min_value=0, max_value=10_000))
        kind = draw(
            st.sampled_from(
                ["Login", "Post", "Reply", "EdgeAdd", "Reaction", "ModerationFlag"]
            )
        )
        if kind in ("Reply", "EdgeAdd", "Reaction"):
            target = draw(st.sampled_from([x for x in _MEMBERS if x != m]))
            records.append(ev(m, kind, ts, target=target))
        elif kind == "Post":
            size = draw(st.one_of(st.none(), st.integers(0, 5000)))
            records.append(ev(m, kind, ts, payload_size=size))
        else:
            records.append(ev(m, kind, ts))
    return sorted(records, key=lambda r: r.timestamp)


@given(_event_lists())
@settings(max_examples=60, deadline=None)
def test_serialize_parse_round_trip(records):
    log = EventLog(records)
    assert parse_events(serialize_events(log)) == log


@given(_event_lists(), st.integers(0, 10_000), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_window_bounds_property(records, a, b):
    lo, hi = min(a, b), max(a, b)
    log = EventLog(records)
    sliced = log.window(lo, hi)
    assert all(lo <= r.timestamp < hi for r in sliced)


@given(_event_lists(), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_window_split_is_lossless(records, mid):
    log = EventLog(records)
    left = log.window(0, mid)
    right = log.window(mid, 10_001)
    assert left.events + right.events == log.events
