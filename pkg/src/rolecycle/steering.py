"""Steering: compare distributions, model interventions as matrix edits,
and search an intervention catalog for plans that approach a target.

An intervention multiplies selected allowed transition cells and renormalizes
the affected rows; zero cells stay zero, so a plan can never manufacture a
structurally forbidden transition.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import comb, fsum
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateRow,
    EmptyCatalog,
    InvalidConfig,
    InvalidEdit,
    InvalidMatrix,
)
from .lifecycle import (
    ALLOWED_TRANSITIONS,
    N_ROLES,
    TAG_MASKED,
    DistributionVector,
    TransitionMatrix,
    project_distribution,
)
from .roles import ROLE_INDEX, ROLE_ORDER, Role, role_from_name

# recommend() switches from exhaustive subset evaluation to greedy forward
# selection above this many candidate plans.
EXHAUSTIVE_PLAN_LIMIT = 10_000


def distance(a: DistributionVector, b: DistributionVector) -> float:
    """Total variation distance: half the L1 difference, in [0, 1]."""
    return 0.5 * fsum(abs(x - y) for x, y in zip(a.data, b.data))


@dataclass(frozen=True)
class TargetDistribution:
    """Operator-defined goal shares plus a per-role tolerance band."""

    distribution: DistributionVector
    tolerance: tuple[float, ...] = field(default=(0.0,) * N_ROLES)

    def __post_init__(self):
        if len(self.tolerance) != N_ROLES:
            raise InvalidConfig(f"tolerance must have {N_ROLES} entries")
        if any(t < 0 for t in self.tolerance):
            raise InvalidConfig("tolerance bands must be non-negative")

    def within_tolerance(self, d: DistributionVector) -> tuple[bool, ...]:
        # bool() strips the numpy scalar so the flags serialize as JSON.
        return tuple(
            bool(abs(d.data[i] - self.distribution.data[i]) <= self.tolerance[i])
            for i in range(N_ROLES)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "distribution": self.distribution.as_dict(),
                "tolerance": {
                    role.value: self.tolerance[i] for i, role in enumerate(ROLE_ORDER)
                },
            },
            indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TargetDistribution":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"target is not valid JSON: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise InvalidConfig("target must be a JSON object")
        if "distribution" in raw:
            dist_raw = raw["distribution"]
            tol_raw = raw.get("tolerance", {})
            unknown = set(raw) - {"distribution", "tolerance"}
            if unknown:
                raise InvalidConfig(f"unknown target keys: {sorted(unknown)}")
        else:
            # Bare role->share object: zero tolerance everywhere.
            dist_raw = raw
            tol_raw = {}
        if not isinstance(dist_raw, Mapping):
            raise InvalidConfig("target distribution must be a JSON object")
        dist = DistributionVector.from_dict(dist_raw)
        tol = [0.0] * N_ROLES
        if not isinstance(tol_raw, Mapping):
            raise InvalidConfig("tolerance must be a JSON object")
        for name, t in tol_raw.items():
            tol[ROLE_INDEX[role_from_name(name)]] = float(t)
        return cls(distribution=dist, tolerance=tuple(tol))


@dataclass(frozen=True)
class InterventionSpec:
    """One catalog action: multiplicative edits to allowed transition cells."""

    id: str
    label: str
    edits: tuple[tuple[Role, Role, float], ...]
    cost: float = 0.0

    def __post_init__(self):
        if not self.id:
            raise InvalidConfig("intervention id must be non-empty")
        if not self.edits:
            raise InvalidEdit(f"intervention {self.id!r} has no edits")
        for from_role, to_role, multiplier in self.edits:
            if (from_role, to_role) not in ALLOWED_TRANSITIONS:
                raise InvalidEdit(
                    f"intervention {self.id!r} edits disallowed transition "
                    f"{from_role.value}->{to_role.value}"
                )
            if not np.isfinite(multiplier) or multiplier <= 0:
                raise InvalidEdit(
                    f"intervention {self.id!r} multiplier must be finite and > 0"
                )
        if not np.isfinite(self.cost) or self.cost < 0:
            raise InvalidConfig(f"intervention {self.id!r} cost must be >= 0")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "edits": [
                {"from": f.value, "to": t.value, "multiplier": m}
                for f, t, m in self.edits
            ],
            "cost": self.cost,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "InterventionSpec":
        unknown = set(raw) - {"id", "label", "edits", "cost"}
        if unknown:
            raise InvalidConfig(f"unknown intervention keys: {sorted(unknown)}")
        edits = []
        for e in raw.get("edits", []):
            unknown_e = set(e) - {"from", "to", "multiplier"}
            if unknown_e:
                raise InvalidConfig(f"unknown edit keys: {sorted(unknown_e)}")
            edits.append(
                (
                    role_from_name(e["from"]),
                    role_from_name(e["to"]),
                    float(e["multiplier"]),
                )
            )
        return cls(
            id=str(raw.get("id", "")),
            label=str(raw.get("label", "")),
            edits=tuple(edits),
            cost=float(raw.get("cost", 0.0)),
        )


def load_catalog(text: str) -> list[InterventionSpec]:
    """Parse a JSON catalog: a list of intervention objects with unique ids."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"catalog is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, list):
        raise InvalidConfig("catalog must be a JSON list")
    specs = [InterventionSpec.from_dict(item) for item in raw]
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise InvalidConfig("catalog intervention ids must be unique")
    return specs


def catalog_to_json(catalog: Sequence[InterventionSpec]) -> str:
    return json.dumps([s.to_dict() for s in catalog], indent=2) + "\n"


def apply_intervention(
    matrix: TransitionMatrix, spec: InterventionSpec
) -> TransitionMatrix:
    """Multiply edited cells, renormalize affected rows, leave others alone.

    Untouched rows are bit-identical to the input; edited rows are checked
    against total-mass collapse (impossible with positive multipliers, kept
    as a hard guard anyway).
    """
    if matrix.tag != TAG_MASKED:
        raise InvalidMatrix("interventions apply to graph-masked matrices only")
    arr = matrix.data.copy()
    touched: set[int] = set()
    for from_role, to_role, multiplier in spec.edits:
        i, j = ROLE_INDEX[from_role], ROLE_INDEX[to_role]
        arr[i, j] *= multiplier
        touched.add(i)
    for i in touched:
        total = arr[i].sum()
        if total <= 0:
            raise DegenerateRow(
                f"intervention {spec.id!r} left row {ROLE_ORDER[i].value} empty"
            )
        arr[i] /= total
    return TransitionMatrix(arr, TAG_MASKED)


def apply_plan(
    matrix: TransitionMatrix, specs: Sequence[InterventionSpec]
) -> TransitionMatrix:
    """Apply interventions in sequence; edits commute up to renormalization."""
    for spec in specs:
        matrix = apply_intervention(matrix, spec)
    return matrix


@dataclass(frozen=True)
class SteeringPlan:
    """One evaluated intervention subset at a fixed horizon."""

    intervention_ids: tuple[str, ...]
    horizon: int
    projected: DistributionVector
    residual: float
    total_cost: float
    within_tolerance: tuple[bool, ...]

    def to_dict(self) -> dict:
        return {
            "interventions": list(self.intervention_ids),
            "horizon": self.horizon,
            "projected": self.projected.as_dict(),
            "residual": self.residual,
            "total_cost": self.total_cost,
            "within_tolerance": {
                role.value: self.within_tolerance[i]
                for i, role in enumerate(ROLE_ORDER)
            },
        }


def plans_to_json(plans: Sequence[SteeringPlan]) -> str:
    return json.dumps([p.to_dict() for p in plans], indent=2) + "\n"


def _evaluate(
    current: DistributionVector,
    matrix: TransitionMatrix,
    target: TargetDistribution,
    specs: Sequence[InterventionSpec],
    horizon: int,
) -> SteeringPlan:
    edited = apply_plan(matrix, specs)
    projected = project_distribution(current, edited, horizon)
    return SteeringPlan(
        intervention_ids=tuple(s.id for s in specs),
        horizon=horizon,
        projected=projected,
        residual=distance(projected, target.distribution),
        total_cost=fsum(s.cost for s in specs),
        within_tolerance=target.within_tolerance(projected),
    )


def _rank_key(plan: SteeringPlan) -> tuple:
    return (plan.residual, plan.total_cost, plan.intervention_ids)


def recommend(
    current: DistributionVector,
    matrix: TransitionMatrix,
    target: TargetDistribution,
    catalog: Sequence[InterventionSpec],
    horizon: int,
    max_plan_len: int = 2,
    strategy: str = "auto",
) -> list[SteeringPlan]:
    """Ranked plans approaching the target at the given horizon.

    All unordered catalog subsets up to max_plan_len are evaluated when their
    count stays within EXHAUSTIVE_PLAN_LIMIT; beyond that, greedy forward
    selection evaluates the empty plan plus one best-addition chain. Ranking
    is by residual, then total cost, then lexicographic ids; the empty plan
    always participates, so the top plan can never be worse than doing
    nothing. strategy forces "exhaustive" or "greedy" explicitly.
    """
    if not catalog:
        raise EmptyCatalog("intervention catalog is empty")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if max_plan_len < 1:
        raise ValueError("max_plan_len must be at least 1")
    if strategy not in ("auto", "exhaustive", "greedy"):
        raise ValueError(f"unknown strategy {strategy!r}")
    ids = [s.id for s in catalog]
    if len(set(ids)) != len(ids):
        raise InvalidConfig("catalog intervention ids must be unique")

    by_id = {s.id: s for s in catalog}
    # Within a plan, application order does not matter (edits commute up to
    # renormalization); canonical id order keeps evaluation deterministic.
    ordered = sorted(catalog, key=lambda s: s.id)
    depth = min(max_plan_len, len(catalog))
    n_subsets = sum(comb(len(catalog), k) for k in range(depth + 1))

    if strategy == "exhaustive" or (
        strategy == "auto" and n_subsets <= EXHAUSTIVE_PLAN_LIMIT
    ):
        plans = [
            _evaluate(current, matrix, target, subset, horizon)
            for k in range(depth + 1)
            for subset in itertools.combinations(ordered, k)
        ]
    else:
        plans = [_evaluate(current, matrix, target, (), horizon)]
        chosen: list[InterventionSpec] = []
        best = plans[0]
        while len(chosen) < depth:
            candidates = [
                _evaluate(current, matrix, target, (*chosen, s), horizon)
                for s in ordered
                if s.id not in {c.id for c in chosen}
            ]
            if not candidates:
                break
            step_best = min(candidates, key=_rank_key)
            if step_best.residual >= best.residual:
                break
            plans.append(step_best)
            chosen = [by_id[i] for i in step_best.intervention_ids]
            best = step_best

    plans.sort(key=_rank_key)
    return plans
