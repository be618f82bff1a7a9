"""HTTP API serving the analysis pipeline to operators and the steering UI.

Read/compute only: the event log is sealed at session build time and every
response is a pure function of (session, request). Heavy endpoints are plain
sync handlers so the framework runs them in its threadpool, keeping /health
responsive while a large steer request grinds.
"""

from __future__ import annotations

import os
import uuid
from dataclasses import asdict
from typing import Any, Mapping

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .classify import AssignmentSeries, assignment_series, featurize
from .errors import (
    DegenerateRow,
    EmptyCatalog,
    InvalidConfig,
    InvalidEdit,
    InvalidMatrix,
    RolecycleError,
    UnknownMember,
)
from .events import EventLog
from .lifecycle import (
    DistributionVector,
    TransitionMatrix,
    estimate_transition_matrix,
    trajectory,
    validate_sequence,
)
from .roles import ROLE_ORDER, ThresholdConfig
from .steering import (
    InterventionSpec,
    TargetDistribution,
    apply_plan,
    recommend,
)

DEFAULT_PORT = 8000
PORT_ENV_VAR = "ROLECYCLE_PORT"
DATA_ENV_VAR = "ROLECYCLE_DATA"

# Validation slack for distributions arriving over the wire; accepted
# vectors are renormalized to machine precision before use.
_WIRE_SIMPLEX_TOL = 1e-6


class ApiError(RolecycleError):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


class AnalysisSession:
    """Sealed log plus every derived artifact the endpoints serve.

    All caches are pure derivations of (log, config, window grid); a config
    change means building a fresh session.
    """

    def __init__(
        self,
        log: EventLog,
        config: ThresholdConfig,
        window_width: int,
        step: int,
        origin: int | None = None,
        min_dwell: int = 1,
        smoothing: float = 0.0,
    ):
        self.session_id = str(uuid.uuid4())
        self.log = log
        self.config = config
        self.window_width = window_width
        self.step = step
        self.series: AssignmentSeries = assignment_series(
            log, window_width, step, config, origin=origin
        )
        self.distributions = self.series.distribution_series()
        sequences = self.series.role_sequences()
        self.violations = {
            member: validate_sequence(seq, min_dwell=min_dwell)
            for member, seq in sequences.items()
        }
        self.violations = {m: v for m, v in self.violations.items() if v}
        try:
            self.raw_matrix: TransitionMatrix | None = estimate_transition_matrix(
                sequences.values(), smoothing=smoothing, masked=False
            )
            self.masked_matrix: TransitionMatrix | None = estimate_transition_matrix(
                sequences.values(), smoothing=smoothing, masked=True
            )
        except RolecycleError:
            self.raw_matrix = None
            self.masked_matrix = None

    def latest_distribution(self) -> DistributionVector | None:
        for dist in reversed(self.distributions):
            if dist is not None:
                return dist
        return None

    def snapshot_bounds(self, index: int) -> tuple[int, int]:
        if not 0 <= index < len(self.series.snapshots):
            raise ApiError(404, "unknown_snapshot", f"no snapshot {index}")
        return self.series.snapshots[index]


def _require_masked(session: AnalysisSession) -> TransitionMatrix:
    if session.masked_matrix is None:
        raise ApiError(
            422, "no_observations", "the log yields no transitions to model"
        )
    return session.masked_matrix


def _distribution_payload(
    session: AnalysisSession, index: int, dist: DistributionVector | None
) -> dict[str, Any]:
    start, end = session.series.snapshots[index]
    return {
        "snapshot": index,
        "from": start,
        "to": end,
        "distribution": dist.as_dict() if dist is not None else None,
        "defined": dist is not None,
    }


def _parse_distribution(raw: Any, field: str) -> DistributionVector:
    if not isinstance(raw, Mapping):
        raise ApiError(400, "bad_payload", f"{field} must be an object of role shares")
    unknown = set(raw) - {r.value for r in ROLE_ORDER}
    if unknown:
        raise ApiError(400, "bad_payload", f"{field} has unknown roles {sorted(unknown)}")
    values = []
    for role in ROLE_ORDER:
        v = raw.get(role.value, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ApiError(400, "bad_payload", f"{field}[{role.value}] must be a number")
        values.append(float(v))
    total = sum(values)
    if any(v < 0 for v in values) or abs(total - 1.0) > _WIRE_SIMPLEX_TOL:
        raise ApiError(
            422,
            "not_on_simplex",
            f"{field} shares must be non-negative and sum to 1 (got {total!r})",
        )
    return DistributionVector([v / total for v in values])


def _parse_interventions(raw: Any, field: str) -> list[InterventionSpec]:
    if not isinstance(raw, list):
        raise ApiError(400, "bad_payload", f"{field} must be a list")
    specs = []
    for i, item in enumerate(raw):
        if not isinstance(item, Mapping):
            raise ApiError(400, "bad_payload", f"{field}[{i}] must be an object")
        try:
            specs.append(InterventionSpec.from_dict(item))
        except (InvalidEdit, InvalidConfig, KeyError, TypeError, ValueError) as exc:
            raise ApiError(422, "bad_intervention", f"{field}[{i}]: {exc}") from exc
    ids = [s.id for s in specs]
    if len(set(ids)) != len(ids):
        raise ApiError(422, "bad_intervention", f"{field} ids must be unique")
    return specs


def _parse_steps(raw: Any, field: str, maximum: int = 10_000) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ApiError(400, "bad_payload", f"{field} must be an integer")
    if raw < 0:
        raise ApiError(422, "bad_steps", f"{field} must be non-negative")
    if raw > maximum:
        raise ApiError(422, "bad_steps", f"{field} must be at most {maximum}")
    return raw


def create_app(session: AnalysisSession) -> FastAPI:
    app = FastAPI(title="rolecycle", docs_url=None, redoc_url=None)
    app.state.session = session

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad_payload", "message": str(exc.errors())}},
        )

    @app.exception_handler(RolecycleError)
    async def handle_domain_error(request: Request, exc: RolecycleError):
        return JSONResponse(
            status_code=422,
            content={
                "error": {"code": type(exc).__name__, "message": str(exc)}
            },
        )

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "session": session.session_id,
            "snapshots": len(session.series.snapshots),
            "members": len(session.series.by_member),
        }

    @app.get("/distribution")
    def get_distribution(snapshot: int | None = Query(default=None)):
        if snapshot is not None:
            session.snapshot_bounds(snapshot)
            return _distribution_payload(
                session, snapshot, session.distributions[snapshot]
            )
        return {
            "series": [
                _distribution_payload(session, i, dist)
                for i, dist in enumerate(session.distributions)
            ]
        }

    @app.get("/assignments")
    def get_assignments(snapshot: int | None = Query(default=None)):
        if snapshot is None:
            snapshot = len(session.series.snapshots) - 1
        start, end = session.snapshot_bounds(snapshot)
        rows = []
        for member in sorted(session.series.by_member):
            offset = snapshot - session.series.first_index[member]
            series = session.series.by_member[member]
            if 0 <= offset < len(series):
                a = series[offset]
                rows.append(
                    {
                        "member": member,
                        "role": a.role.value,
                        "fired_rules": list(a.fired_rules),
                    }
                )
        return {"snapshot": snapshot, "from": start, "to": end, "assignments": rows}

    @app.get("/matrix")
    def get_matrix(masked: bool = Query(default=True)):
        matrix = session.masked_matrix if masked else session.raw_matrix
        if matrix is None:
            raise ApiError(
                422, "no_observations", "the log yields no transitions to model"
            )
        return {
            "tag": matrix.tag,
            "roles": [r.value for r in ROLE_ORDER],
            "rows": [[float(v) for v in row] for row in matrix.data],
        }

    @app.get("/violations")
    def get_violations():
        return {
            "violations": {
                member: [
                    {
                        "index": v.index,
                        "from": v.from_role.value,
                        "to": v.to_role.value,
                        "kind": v.kind,
                        "detail": v.detail,
                    }
                    for v in found
                ]
                for member, found in sorted(session.violations.items())
            }
        }

    @app.post("/project")
    async def post_project(payload: dict):
        steps = _parse_steps(payload.get("steps"), "steps")
        unknown = set(payload) - {"steps", "distribution"}
        if unknown:
            raise ApiError(400, "bad_payload", f"unknown fields {sorted(unknown)}")
        if "distribution" in payload:
            current = _parse_distribution(payload["distribution"], "distribution")
        else:
            current = session.latest_distribution()
            if current is None:
                raise ApiError(422, "no_members", "no classified members to project")
        matrix = _require_masked(session)
        path = trajectory(current, matrix, steps)
        return {
            "steps": steps,
            "trajectory": [d.as_dict() for d in path],
        }

    @app.post("/whatif")
    def post_whatif(payload: dict):
        unknown = set(payload) - {"steps", "interventions", "distribution"}
        if unknown:
            raise ApiError(400, "bad_payload", f"unknown fields {sorted(unknown)}")
        steps = _parse_steps(payload.get("steps"), "steps")
        specs = _parse_interventions(payload.get("interventions", []), "interventions")
        if "distribution" in payload:
            current = _parse_distribution(payload["distribution"], "distribution")
        else:
            current = session.latest_distribution()
            if current is None:
                raise ApiError(422, "no_members", "no classified members to project")
        matrix = _require_masked(session)
        try:
            edited = apply_plan(matrix, specs)
        except (InvalidEdit, DegenerateRow, InvalidMatrix) as exc:
            raise ApiError(422, type(exc).__name__, str(exc)) from exc
        path = trajectory(current, edited, steps)
        return {
            "steps": steps,
            "interventions": [s.id for s in specs],
            "trajectory": [d.as_dict() for d in path],
        }

    @app.post("/steer")
    def post_steer(payload: dict):
        unknown = set(payload) - {
            "target",
            "catalog",
            "horizon",
            "max_plan_len",
            "distribution",
        }
        if unknown:
            raise ApiError(400, "bad_payload", f"unknown fields {sorted(unknown)}")
        if "target" not in payload or "catalog" not in payload:
            raise ApiError(400, "bad_payload", "target and catalog are required")
        target_raw = payload["target"]
        if isinstance(target_raw, Mapping) and "distribution" in target_raw:
            dist = _parse_distribution(target_raw["distribution"], "target.distribution")
            tol_raw = target_raw.get("tolerance", {})
            if not isinstance(tol_raw, Mapping):
                raise ApiError(400, "bad_payload", "target.tolerance must be an object")
            tol = [0.0] * len(ROLE_ORDER)
            for name, t in tol_raw.items():
                names = {r.value: i for i, r in enumerate(ROLE_ORDER)}
                if name not in names:
                    raise ApiError(400, "bad_payload", f"unknown role {name!r}")
                if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
                    raise ApiError(422, "bad_tolerance", "tolerances must be >= 0")
                tol[names[name]] = float(t)
            target = TargetDistribution(distribution=dist, tolerance=tuple(tol))
        else:
            target = TargetDistribution(
                distribution=_parse_distribution(target_raw, "target")
            )
        specs = _parse_interventions(payload["catalog"], "catalog")
        horizon = _parse_steps(payload.get("horizon"), "horizon", maximum=10_000)
        if horizon < 1:
            raise ApiError(422, "bad_steps", "horizon must be at least 1")
        max_plan_len = payload.get("max_plan_len", 2)
        if isinstance(max_plan_len, bool) or not isinstance(max_plan_len, int):
            raise ApiError(400, "bad_payload", "max_plan_len must be an integer")
        if max_plan_len < 1:
            raise ApiError(422, "bad_steps", "max_plan_len must be at least 1")
        if "distribution" in payload:
            current = _parse_distribution(payload["distribution"], "distribution")
        else:
            current = session.latest_distribution()
            if current is None:
                raise ApiError(422, "no_members", "no classified members to steer")
        matrix = _require_masked(session)
        try:
            plans = recommend(
                current, matrix, target, specs, horizon, max_plan_len=max_plan_len
            )
        except EmptyCatalog as exc:
            raise ApiError(422, "empty_catalog", str(exc)) from exc
        return {"plans": [p.to_dict() for p in plans]}

    @app.get("/members/{member_id}/features")
    def get_member_features(member_id: str, snapshot: int | None = Query(default=None)):
        if snapshot is None:
            snapshot = len(session.series.snapshots) - 1
        start, end = session.snapshot_bounds(snapshot)
        if member_id not in session.series.by_member:
            raise ApiError(404, "unknown_member", f"no member {member_id!r}")
        offset = snapshot - session.series.first_index[member_id]
        series = session.series.by_member[member_id]
        if not 0 <= offset < len(series):
            raise ApiError(
                404,
                "unknown_member",
                f"member {member_id!r} is not visible in snapshot {snapshot}",
            )
        features = featurize(session.log, start, end, session.config, now=end)
        f = features[member_id]
        assignment = series[offset]
        return {
            "member": member_id,
            "snapshot": snapshot,
            "from": start,
            "to": end,
            "role": assignment.role.value,
            "fired_rules": list(assignment.fired_rules),
            "centrality": asdict(f.centrality),
            "activity": asdict(f.activity),
            "relative": {
                name: {"percentile": r.percentile, "ratio_to_mean": r.ratio_to_mean}
                for name, r in sorted(f.relative.values.items())
            },
            "edge_churn": f.edge_churn,
            "has_signup": f.has_signup,
            "explicit_departure": f.explicit_departure,
            "seconds_since_last_activity": f.seconds_since_last_activity,
        }

    return app


def resolve_port(flag_value: int | None) -> int:
    """Port precedence: env override, then flag, then default."""
    env = os.environ.get(PORT_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidConfig(f"{PORT_ENV_VAR}={env!r} is not a port") from exc
    if flag_value is not None:
        return flag_value
    return DEFAULT_PORT


def resolve_data_path(flag_value: str | None) -> str | None:
    """Data path precedence: env override, then flag."""
    return os.environ.get(DATA_ENV_VAR) or flag_value
