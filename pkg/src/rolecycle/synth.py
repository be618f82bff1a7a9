"""Seeded synthetic community generator: the oracle for classifier recovery
and transition-matrix estimation tests.

Agents arrive as visitors, take one immediate transition draw (stay browsing,
sign up, or bounce), then walk the ground-truth matrix M* at every snapshot
boundary, emitting events per their current role's behavior profile. The
pseudo-random generator is SplitMix64, a published 64-bit algorithm with
known reference outputs, so identical seeds give byte-identical logs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import InvalidProfile
from .events import EventKind, EventLog, EventRecord
from .lifecycle import TAG_MASKED, TransitionMatrix
from .roles import ROLE_INDEX, ROLE_ORDER, Role, role_from_name

_MASK64 = (1 << 64) - 1
SECONDS_PER_DAY = 86400


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea & Flood's 64-bit mixer).

    Reference outputs from seed 0: 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
    0x06C45D188009454F. Doubles take the top 53 bits of one output.
    """

    __slots__ = ("_state", "_spare")

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_normal(self) -> float:
        """Standard normal via Box-Muller; caches the paired deviate."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = self.next_float()
        while u1 <= 0.0:
            u1 = self.next_float()
        u2 = self.next_float()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def next_lognormal(self, mean: float, std: float) -> float:
        """Log-normal parameterized by its real-space mean and stddev."""
        if mean <= 0:
            raise ValueError("lognormal mean must be positive")
        if std < 0:
            raise ValueError("lognormal std must be non-negative")
        if std == 0:
            return mean
        sigma2 = math.log(1.0 + (std / mean) ** 2)
        mu = math.log(mean) - sigma2 / 2.0
        return math.exp(mu + math.sqrt(sigma2) * self.next_normal())

    def choice_index(self, n: int) -> int:
        """Uniform index in [0, n)."""
        if n <= 0:
            raise ValueError("cannot choose from an empty range")
        i = int(self.next_float() * n)
        return min(i, n - 1)


@dataclass(frozen=True)
class RoleBehavior:
    """Event-emission parameters for one role.

    login_gap_mean/std are in seconds; the per-day rates apply to a role's
    active emission period (a whole snapshot for steady roles, the burst
    window for trolls). flag_rate is the expected number of moderation flags
    a troll's burst attracts, not a per-day rate.
    """

    login_gap_mean: float = 0.0
    login_gap_std: float = 0.0
    post_rate: float = 0.0
    edge_formation_rate: float = 0.0
    edge_drop_rate: float = 0.0
    burst_probability: float = 0.0
    flag_rate: float = 0.0

    def validate(self, role_name: str) -> None:
        for name in (
            "login_gap_mean",
            "login_gap_std",
            "post_rate",
            "edge_formation_rate",
            "edge_drop_rate",
            "flag_rate",
        ):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise InvalidProfile(f"{role_name}.{name} must be a number")
            if not math.isfinite(v) or v < 0:
                raise InvalidProfile(f"{role_name}.{name} must be finite and >= 0")
        if not 0.0 <= self.burst_probability <= 1.0:
            raise InvalidProfile(f"{role_name}.burst_probability outside [0, 1]")


@dataclass(frozen=True)
class BehaviorProfile:
    """Per-role behaviors, population entry rate, snapshot width, and M*."""

    behaviors: Mapping[Role, RoleBehavior]
    entry_rate: float  # new arrivals per day; 0 means everyone arrives at t=0
    snapshot_days: int
    matrix: TransitionMatrix  # ground-truth M*, graph-masked

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        missing = [r.value for r in ROLE_ORDER if r not in self.behaviors]
        if missing:
            raise InvalidProfile(f"profile missing role behaviors: {missing}")
        for role, behavior in self.behaviors.items():
            behavior.validate(role.value)
        if not isinstance(self.entry_rate, (int, float)) or isinstance(
            self.entry_rate, bool
        ):
            raise InvalidProfile("entry_rate must be a number")
        if not math.isfinite(self.entry_rate) or self.entry_rate < 0:
            raise InvalidProfile("entry_rate must be finite and >= 0")
        if isinstance(self.snapshot_days, bool) or not isinstance(
            self.snapshot_days, int
        ):
            raise InvalidProfile("snapshot_days must be an integer")
        if self.snapshot_days < 1:
            raise InvalidProfile("snapshot_days must be at least 1")
        if self.matrix.tag != TAG_MASKED:
            raise InvalidProfile("ground-truth matrix must be graph-masked")

    def replace(self, **kwargs) -> "BehaviorProfile":
        data = {
            "behaviors": self.behaviors,
            "entry_rate": self.entry_rate,
            "snapshot_days": self.snapshot_days,
            "matrix": self.matrix,
        }
        data.update(kwargs)
        return BehaviorProfile(**data)

    def to_json(self) -> str:
        return json.dumps(
            {
                "entry_rate": self.entry_rate,
                "snapshot_days": self.snapshot_days,
                "behaviors": {
                    role.value: {
                        "login_gap_mean": b.login_gap_mean,
                        "login_gap_std": b.login_gap_std,
                        "post_rate": b.post_rate,
                        "edge_formation_rate": b.edge_formation_rate,
                        "edge_drop_rate": b.edge_drop_rate,
                        "burst_probability": b.burst_probability,
                        "flag_rate": b.flag_rate,
                    }
                    for role, b in sorted(
                        self.behaviors.items(), key=lambda kv: ROLE_INDEX[kv[0]]
                    )
                },
                "matrix": {
                    from_role.value: {
                        to_role.value: self.matrix[from_role, to_role]
                        for to_role in ROLE_ORDER
                        if self.matrix[from_role, to_role] > 0
                    }
                    for from_role in ROLE_ORDER
                },
            },
            indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BehaviorProfile":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidProfile(f"profile is not valid JSON: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise InvalidProfile("profile must be a JSON object")
        unknown = set(raw) - {"entry_rate", "snapshot_days", "behaviors", "matrix"}
        if unknown:
            raise InvalidProfile(f"unknown profile keys: {sorted(unknown)}")
        behaviors_raw = raw.get("behaviors", {})
        if not isinstance(behaviors_raw, dict):
            raise InvalidProfile("behaviors must be a JSON object")
        behaviors = {}
        for name, fields_raw in behaviors_raw.items():
            role = role_from_name(name)
            known = {
                "login_gap_mean",
                "login_gap_std",
                "post_rate",
                "edge_formation_rate",
                "edge_drop_rate",
                "burst_probability",
                "flag_rate",
            }
            bad = set(fields_raw) - known
            if bad:
                raise InvalidProfile(f"unknown behavior keys for {name}: {sorted(bad)}")
            behaviors[role] = RoleBehavior(**fields_raw)
        matrix_raw = raw.get("matrix", {})
        rows = [[0.0] * len(ROLE_ORDER) for _ in ROLE_ORDER]
        for from_name, row in matrix_raw.items():
            i = ROLE_INDEX[role_from_name(from_name)]
            for to_name, p in row.items():
                rows[i][ROLE_INDEX[role_from_name(to_name)]] = float(p)
        try:
            matrix = TransitionMatrix(rows, TAG_MASKED)
        except Exception as exc:
            raise InvalidProfile(f"profile matrix is invalid: {exc}") from exc
        return cls(
            behaviors=behaviors,
            entry_rate=float(raw.get("entry_rate", 0.0)),
            snapshot_days=int(raw.get("snapshot_days", 14)),
            matrix=matrix,
        )


# Ground-truth transition matrix for the default profile. Novice has no
# self-loop so a member's novice phase lasts exactly one snapshot, matching
# the classifier's days-since-signup gate at snapshot granularity.
_DEFAULT_MATRIX_ROWS: dict[Role, dict[Role, float]] = {
    Role.VISITOR: {Role.VISITOR: 0.20, Role.NOVICE: 0.70, Role.DEPARTED: 0.10},
    Role.NOVICE: {
        Role.ACTIVE: 0.55,
        Role.PASSIVE: 0.27,
        Role.TROLL: 0.08,
        Role.DEPARTED: 0.10,
    },
    Role.ACTIVE: {
        Role.ACTIVE: 0.55,
        Role.LEADER: 0.10,
        Role.PASSIVE: 0.20,
        Role.TROLL: 0.04,
        Role.DEPARTED: 0.11,
    },
    Role.LEADER: {
        Role.LEADER: 0.55,
        Role.ACTIVE: 0.25,
        Role.PASSIVE: 0.12,
        Role.TROLL: 0.03,
        Role.DEPARTED: 0.05,
    },
    Role.PASSIVE: {Role.PASSIVE: 0.60, Role.ACTIVE: 0.25, Role.DEPARTED: 0.15},
    Role.TROLL: {Role.TROLL: 0.25, Role.DEPARTED: 0.75},
    Role.DEPARTED: {Role.DEPARTED: 1.0},
}


def default_matrix() -> TransitionMatrix:
    rows = [[0.0] * len(ROLE_ORDER) for _ in ROLE_ORDER]
    for from_role, row in _DEFAULT_MATRIX_ROWS.items():
        for to_role, p in row.items():
            rows[ROLE_INDEX[from_role]][ROLE_INDEX[to_role]] = p
    return TransitionMatrix(rows, TAG_MASKED)


def default_profile() -> BehaviorProfile:
    """Well-separated role behaviors for oracle experiments.

    The numbers are synthetic test fixtures chosen so each role's observable
    signature is unambiguous at 14-day snapshots: leaders post and connect an
    order of magnitude more than actives, passives log in rarely but steadily,
    trolls compress everything into one short burst that draws flags.
    """
    day = float(SECONDS_PER_DAY)
    return BehaviorProfile(
        behaviors={
            Role.VISITOR: RoleBehavior(edge_formation_rate=0.3),
            Role.NOVICE: RoleBehavior(
                login_gap_mean=2.0 * day,
                login_gap_std=1.0 * day,
                post_rate=1.2,
                edge_formation_rate=0.8,
            ),
            Role.ACTIVE: RoleBehavior(
                login_gap_mean=0.4 * day,
                login_gap_std=0.25 * day,
                post_rate=2.5,
                edge_formation_rate=0.5,
                edge_drop_rate=0.05,
            ),
            Role.LEADER: RoleBehavior(
                login_gap_mean=0.3 * day,
                login_gap_std=0.15 * day,
                post_rate=14.0,
                edge_formation_rate=2.5,
                edge_drop_rate=0.05,
            ),
            Role.PASSIVE: RoleBehavior(
                login_gap_mean=6.0 * day,
                login_gap_std=3.0 * day,
                post_rate=0.04,
                edge_formation_rate=0.02,
                edge_drop_rate=0.02,
            ),
            Role.TROLL: RoleBehavior(
                login_gap_mean=0.05 * day,
                login_gap_std=0.02 * day,
                post_rate=30.0,
                edge_formation_rate=12.0,
                burst_probability=1.0,
                flag_rate=5.0,
            ),
            Role.DEPARTED: RoleBehavior(),
        },
        entry_rate=6.0,
        snapshot_days=14,
        matrix=default_matrix(),
    )


@dataclass(frozen=True)
class GroundTruth:
    """True role per member per snapshot, from each member's arrival on."""

    snapshot_days: int
    n_snapshots: int
    roles: Mapping[str, Mapping[int, Role]]

    def role_at(self, member: str, snapshot: int) -> Role | None:
        return self.roles.get(member, {}).get(snapshot)

    def sequences(self) -> dict[str, tuple[Role, ...]]:
        """Chronological role series per member (consecutive snapshots)."""
        out = {}
        for member, by_snapshot in self.roles.items():
            indices = sorted(by_snapshot)
            out[member] = tuple(by_snapshot[i] for i in indices)
        return out

    def to_csv(self) -> str:
        lines = ["member,snapshot_index,true_role"]
        for member in sorted(self.roles):
            for snapshot in sorted(self.roles[member]):
                lines.append(f"{member},{snapshot},{self.roles[member][snapshot].value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, snapshot_days: int) -> "GroundTruth":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines or lines[0] != "member,snapshot_index,true_role":
            raise ValueError("bad ground-truth header")
        roles: dict[str, dict[int, Role]] = {}
        top = 0
        for line in lines[1:]:
            member, snapshot, role_name = line.split(",")
            idx = int(snapshot)
            roles.setdefault(member, {})[idx] = role_from_name(role_name)
            top = max(top, idx + 1)
        return cls(snapshot_days=snapshot_days, n_snapshots=top, roles=roles)


# Troll bursts span slightly less than the burstiness sub-window (1/20 of a
# snapshot) so a whole burst always fits inside one sub-window.
_BURST_WIDTH_FRACTION = 0.045


class _Generator:
    def __init__(self, profile: BehaviorProfile, members: int, days: int, seed: int):
        self.profile = profile
        self.members = members
        self.days = days
        self.rng = SplitMix64(seed)
        self.width = profile.snapshot_days * SECONDS_PER_DAY
        self.horizon = days * SECONDS_PER_DAY
        self.n_snapshots = math.ceil(days / profile.snapshot_days)
        pad = len(str(members))
        self.ids = [f"m{i + 1:0{pad}d}" for i in range(members)]
        self.events: list[EventRecord] = []

        # Cumulative M* rows in fixed role order for inverse-CDF sampling.
        self.cumrows: dict[Role, list[tuple[float, Role]]] = {}
        for from_role in ROLE_ORDER:
            acc = 0.0
            row = []
            for to_role in ROLE_ORDER:
                p = profile.matrix[from_role, to_role]
                if p > 0:
                    acc += p
                    row.append((acc, to_role))
            self.cumrows[from_role] = row

    def step(self, role: Role) -> Role:
        row = self.cumrows[role]
        u = self.rng.next_float()
        for threshold, to_role in row:
            if u < threshold:
                return to_role
        return row[-1][1]

    def run(self) -> tuple[EventLog, GroundTruth]:
        arrivals = self._arrivals()
        truth, signup_ts, departure_ts = self._walk(arrivals)
        signed, flaggers = self._rosters(signup_ts, departure_ts)
        self._emit(arrivals, truth, signup_ts, departure_ts, signed, flaggers)
        self.events.sort(key=lambda rec: rec.timestamp)
        log = EventLog(self.events)
        ground = GroundTruth(
            snapshot_days=self.profile.snapshot_days,
            n_snapshots=self.n_snapshots,
            roles={m: dict(truth[m]) for m in truth},
        )
        return log, ground

    def _arrivals(self) -> list[int]:
        arrivals = []
        if self.profile.entry_rate == 0:
            return [0] * self.members
        gap_mean = SECONDS_PER_DAY / self.profile.entry_rate
        t = 0.0
        for _ in range(self.members):
            t += self.rng.next_lognormal(gap_mean, gap_mean)
            arrivals.append(min(int(t), self.horizon - 1))
        return arrivals

    def _walk(
        self, arrivals: list[int]
    ) -> tuple[
        dict[str, dict[int, Role]], dict[str, int | None], dict[str, int | None]
    ]:
        """Sample each agent's role per snapshot; roles enter at exact times.

        The arrival snapshot's role is one step from Visitor (browse, join,
        or bounce on first contact); later snapshots step at their boundary.
        Signup happens on Novice entry, Departure on Departed entry; both can
        land mid-snapshot (at arrival) or exactly on a boundary.
        """
        truth: dict[str, dict[int, Role]] = {}
        signup_ts: dict[str, int | None] = {}
        departure_ts: dict[str, int | None] = {}
        for i, member in enumerate(self.ids):
            arrival = arrivals[i]
            first_snapshot = arrival // self.width
            role = self.step(Role.VISITOR)
            signup_ts[member] = arrival if role is Role.NOVICE else None
            departure_ts[member] = arrival if role is Role.DEPARTED else None
            series = {first_snapshot: role}
            for s in range(first_snapshot + 1, self.n_snapshots):
                if role is not Role.DEPARTED:
                    prev = role
                    role = self.step(role)
                    boundary = s * self.width
                    if role is Role.NOVICE and prev is not Role.NOVICE:
                        signup_ts[member] = boundary
                    if role is Role.DEPARTED:
                        departure_ts[member] = boundary
                series[s] = role
            truth[member] = series
        return truth, signup_ts, departure_ts

    def _rosters(
        self, signup_ts: dict[str, int | None], departure_ts: dict[str, int | None]
    ) -> tuple[list[list[str]], list[list[str]]]:
        """Per snapshot: signed-and-present members (targets and flaggers)."""
        signed: list[list[str]] = []
        for s in range(self.n_snapshots):
            boundary = s * self.width
            roster = [
                m
                for m in self.ids
                if signup_ts[m] is not None
                and signup_ts[m] <= boundary
                and (departure_ts[m] is None or departure_ts[m] > boundary)
            ]
            signed.append(roster)
        return signed, signed

    def _pick(self, roster: list[str], exclude: str) -> str | None:
        pool = [m for m in roster if m != exclude]
        if not pool:
            return None
        return pool[self.rng.choice_index(len(pool))]

    def _emit(
        self,
        arrivals: list[int],
        truth: dict[str, dict[int, Role]],
        signup_ts: dict[str, int | None],
        departure_ts: dict[str, int | None],
        signed: list[list[str]],
        flaggers: list[list[str]],
    ) -> None:
        behaviors = self.profile.behaviors
        for i, member in enumerate(self.ids):
            arrival = arrivals[i]
            contacts: list[str] = []
            contact_set: set[str] = set()
            for s in sorted(truth[member]):
                role = truth[member][s]
                seg_start = max(arrival, s * self.width)
                seg_end = min((s + 1) * self.width, self.horizon)
                if seg_start >= seg_end:
                    continue
                if (
                    signup_ts[member] is not None
                    and seg_start <= signup_ts[member] < seg_end
                ):
                    self._add(member, EventKind.SIGNUP, signup_ts[member])
                if departure_ts[member] is not None and (
                    seg_start <= departure_ts[member] < seg_end
                ):
                    self._add(member, EventKind.DEPARTURE, departure_ts[member])
                if role is Role.DEPARTED:
                    continue
                behavior = behaviors[role]
                if role is Role.VISITOR:
                    self._emit_visitor(member, behavior, seg_start, seg_end, signed[s])
                elif role is Role.TROLL:
                    self._emit_troll(
                        member, behavior, seg_start, seg_end, signed[s], flaggers[s]
                    )
                else:
                    self._emit_steady(
                        member,
                        behavior,
                        seg_start,
                        seg_end,
                        signed[s],
                        contacts,
                        contact_set,
                    )

    def _add(
        self,
        member: str,
        kind: EventKind,
        ts: int,
        target: str | None = None,
        payload_size: int | None = None,
    ) -> None:
        if 0 <= ts < self.horizon:
            self.events.append(
                EventRecord(
                    member=member,
                    kind=kind,
                    timestamp=ts,
                    target=target,
                    payload_size=payload_size,
                )
            )

    def _times(self, rate_per_day: float, start: int, end: int) -> Iterator[int]:
        """Event times from log-normal gaps at the given daily rate."""
        if rate_per_day <= 0 or end <= start:
            return
        gap_mean = SECONDS_PER_DAY / rate_per_day
        t = float(start)
        while True:
            t += self.rng.next_lognormal(gap_mean, gap_mean)
            if t >= end:
                return
            yield int(t)

    def _emit_visitor(
        self,
        member: str,
        behavior: RoleBehavior,
        seg_start: int,
        seg_end: int,
        roster: list[str],
    ) -> None:
        # Visitors have no account: their only trace is anonymous reactions
        # to existing members' content.
        for ts in self._times(behavior.edge_formation_rate, seg_start, seg_end):
            target = self._pick(roster, member)
            if target is not None:
                self._add(member, EventKind.REACTION, ts, target=target)

    def _emit_steady(
        self,
        member: str,
        behavior: RoleBehavior,
        seg_start: int,
        seg_end: int,
        roster: list[str],
        contacts: list[str],
        contact_set: set[str],
    ) -> None:
        if behavior.login_gap_mean > 0:
            t = float(seg_start)
            while True:
                t += self.rng.next_lognormal(
                    behavior.login_gap_mean, behavior.login_gap_std
                )
                if t >= seg_end:
                    break
                self._add(member, EventKind.LOGIN, int(t))
        for ts in self._times(behavior.post_rate, seg_start, seg_end):
            if self.rng.next_float() < 0.5:
                size = max(1, int(self.rng.next_lognormal(400.0, 600.0)))
                self._add(member, EventKind.POST, ts, payload_size=size)
            else:
                target = self._pick(roster, member)
                if target is None:
                    size = max(1, int(self.rng.next_lognormal(400.0, 600.0)))
                    self._add(member, EventKind.POST, ts, payload_size=size)
                else:
                    size = max(1, int(self.rng.next_lognormal(200.0, 300.0)))
                    self._add(
                        member, EventKind.REPLY, ts, target=target, payload_size=size
                    )
        for ts in self._times(behavior.edge_formation_rate, seg_start, seg_end):
            target = self._pick(roster, member)
            if target is not None:
                self._add(member, EventKind.EDGE_ADD, ts, target=target)
                if target not in contact_set:
                    contact_set.add(target)
                    contacts.append(target)
                    contacts.sort()
        for ts in self._times(behavior.edge_drop_rate, seg_start, seg_end):
            if not contacts:
                continue
            target = contacts[self.rng.choice_index(len(contacts))]
            contacts.remove(target)
            contact_set.discard(target)
            self._add(member, EventKind.EDGE_REMOVE, ts, target=target)

    def _emit_troll(
        self,
        member: str,
        behavior: RoleBehavior,
        seg_start: int,
        seg_end: int,
        roster: list[str],
        flagger_roster: list[str],
    ) -> None:
        """One short violent burst per troll snapshot, then silence.

        The burst width stays under the burstiness sub-window so the whole
        spree lands in a single sub-window; moderation flags from other
        members follow during and shortly after.
        """
        if self.rng.next_float() >= behavior.burst_probability:
            return
        burst_end = min(seg_start + int(self.width * _BURST_WIDTH_FRACTION), seg_end)
        if burst_end <= seg_start:
            return
        self._add(member, EventKind.LOGIN, seg_start)
        if behavior.login_gap_mean > 0:
            t = float(seg_start)
            while True:
                t += self.rng.next_lognormal(
                    behavior.login_gap_mean, behavior.login_gap_std
                )
                if t >= burst_end:
                    break
                self._add(member, EventKind.LOGIN, int(t))
        for ts in self._times(behavior.post_rate, seg_start, burst_end):
            target = self._pick(roster, member)
            if target is None or self.rng.next_float() < 0.3:
                size = max(1, int(self.rng.next_lognormal(300.0, 400.0)))
                self._add(member, EventKind.POST, ts, payload_size=size)
            else:
                size = max(1, int(self.rng.next_lognormal(150.0, 200.0)))
                self._add(
                    member, EventKind.REPLY, ts, target=target, payload_size=size
                )
        for ts in self._times(behavior.edge_formation_rate, seg_start, burst_end):
            target = self._pick(roster, member)
            if target is not None:
                self._add(member, EventKind.EDGE_ADD, ts, target=target)

        n_flags = int(behavior.flag_rate)
        if self.rng.next_float() < behavior.flag_rate - n_flags:
            n_flags += 1
        flag_span = max(1, min(2 * (burst_end - seg_start), seg_end - seg_start))
        for _ in range(n_flags):
            ts = seg_start + int(self.rng.next_float() * flag_span)
            flagger = self._pick(flagger_roster, member)
            if flagger is None:
                # Nobody else is around to lodge the flag; record it against
                # the troll directly (targetless form).
                self._add(member, EventKind.MODERATION_FLAG, ts)
            else:
                self._add(flagger, EventKind.MODERATION_FLAG, ts, target=member)


def generate(
    profile: BehaviorProfile, members: int, days: int, seed: int
) -> tuple[EventLog, GroundTruth]:
    """Deterministic synthetic community: (event log, ground truth).

    Identical (profile, members, days, seed) give byte-identical serialized
    logs. Every generated log passes ingest validation, and every ground
    truth sequence respects the allowed-transition structure by construction.
    """
    profile.validate()
    if members < 1:
        raise ValueError("members must be at least 1")
    if days < 1:
        raise ValueError("days must be at least 1")
    return _Generator(profile, members, days, seed).run()
