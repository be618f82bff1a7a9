"""Role vocabulary, classifier thresholds, and classification result types."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from typing import Mapping

from .activity import ActivityMeasures, RelativeMeasures
from .centrality import CentralityRow
from .errors import InvalidConfig
from .graph import EDGE_SEMANTICS, DEFAULT_EDGE_SEMANTICS


class Role(Enum):
    VISITOR = "Visitor"
    NOVICE = "Novice"
    ACTIVE = "Active"
    LEADER = "Leader"
    PASSIVE = "Passive"
    TROLL = "Troll"
    DEPARTED = "Departed"


# Fixed index order for matrices and distribution vectors.
ROLE_ORDER: tuple[Role, ...] = (
    Role.VISITOR,
    Role.NOVICE,
    Role.ACTIVE,
    Role.LEADER,
    Role.PASSIVE,
    Role.TROLL,
    Role.DEPARTED,
)

ROLE_INDEX: Mapping[Role, int] = {role: i for i, role in enumerate(ROLE_ORDER)}

_ROLE_BY_NAME = {role.value: role for role in Role}


def role_from_name(name: str) -> Role:
    if name not in _ROLE_BY_NAME:
        raise InvalidConfig(f"unknown role name {name!r}")
    return _ROLE_BY_NAME[name]


# Out-degree percentile a member must reach for the unreciprocated-relations
# troll signal: the pattern is many outgoing ties that nobody answers, so it
# only means anything for members who reach out a lot in the first place.
TROLL_OUT_DEGREE_PERCENTILE_MIN = 0.75


@dataclass(frozen=True)
class ThresholdConfig:
    """All classifier thresholds, JSON-round-trippable.

    Ratio thresholds compare a member's measure against the community mean
    (0.8 means 20% below average); percentile thresholds rank within members
    that have the measure defined.
    """

    novice_max_days: float = 14.0
    active_gap_ratio_max: float = 0.8
    active_recency_ratio_max: float = 1.0
    active_degree_percentile_min: float = 0.25
    active_degree_percentile_max: float = 0.95
    leader_degree_percentile_min: float = 0.90
    leader_broker_percentile_min: float = 0.90
    leader_activity_percentile_min: float = 0.75
    passive_gap_ratio_min: float = 1.5
    passive_post_percentile_max: float = 0.25
    passive_churn_max: float = 0.2
    troll_burstiness_min: float = 0.8
    troll_flags_min: int = 3
    troll_reciprocity_max: float = 0.25
    departed_inactivity_days: float = 90.0
    edge_semantics: str = DEFAULT_EDGE_SEMANTICS

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        percentile_fields = (
            "active_degree_percentile_min",
            "active_degree_percentile_max",
            "leader_degree_percentile_min",
            "leader_broker_percentile_min",
            "leader_activity_percentile_min",
            "passive_post_percentile_max",
            "troll_reciprocity_max",
            "troll_burstiness_min",
            "passive_churn_max",
        )
        for name in percentile_fields:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise InvalidConfig(f"{name} must be a number")
            if not 0.0 <= float(v) <= 1.0:
                raise InvalidConfig(f"{name}={v} outside [0, 1]")
        for name in (
            "novice_max_days",
            "active_gap_ratio_max",
            "active_recency_ratio_max",
            "passive_gap_ratio_min",
            "departed_inactivity_days",
        ):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise InvalidConfig(f"{name} must be a number")
            if float(v) < 0:
                raise InvalidConfig(f"{name}={v} must be non-negative")
        if isinstance(self.troll_flags_min, bool) or not isinstance(
            self.troll_flags_min, int
        ):
            raise InvalidConfig("troll_flags_min must be an integer")
        if self.troll_flags_min < 0:
            raise InvalidConfig("troll_flags_min must be non-negative")
        if self.active_degree_percentile_min > self.active_degree_percentile_max:
            raise InvalidConfig("active degree percentile band is inverted")
        if self.edge_semantics not in EDGE_SEMANTICS:
            raise InvalidConfig(
                f"edge_semantics must be one of {sorted(EDGE_SEMANTICS)}"
            )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ThresholdConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config is not valid JSON: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise InvalidConfig("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def with_overrides(self, **kwargs) -> "ThresholdConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class FeatureVector:
    """Everything classify() needs for one member in one snapshot window.

    seconds_since_last_activity is measured over the whole log (not just the
    window) so dormancy can be inferred for members who never log in; None
    when the member has no trace at or before `now`.
    """

    member: str
    window: tuple[int, int]
    centrality: CentralityRow
    activity: ActivityMeasures
    relative: RelativeMeasures
    edge_churn: float
    has_signup: bool
    explicit_departure: bool
    seconds_since_last_activity: float | None = None


@dataclass(frozen=True)
class RoleAssignment:
    """Classification outcome; fired_rules lists the comparisons that held.

    fired_rules is empty only when the member fell through to the default
    role. The assignment is reproducible from (FeatureVector, ThresholdConfig).
    """

    member: str
    role: Role
    snapshot: tuple[int, int]
    fired_rules: tuple[str, ...] = field(default_factory=tuple)
