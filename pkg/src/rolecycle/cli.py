"""Command-line driver for the analytics pipeline.

One subcommand per operator step: validate a log, classify members over
sliding windows, estimate transition matrices, project distributions
forward, rank steering plans, generate synthetic communities, and serve
the HTTP API. Failures exit non-zero with a machine-readable error JSON
on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .classify import assignment_series, assignments_to_csv
from .errors import InvalidConfig, MalformedRecord, RolecycleError
from .events import parse_events, serialize_events
from .lifecycle import (
    DistributionVector,
    TransitionMatrix,
    distribution_from_json,
    distribution_to_json,
    estimate_transition_matrix,
    trajectory,
    validate_sequence,
)
from .roles import ROLE_ORDER, ThresholdConfig
from .steering import TargetDistribution, load_catalog, plans_to_json, recommend
from .synth import BehaviorProfile, default_profile, generate

DEFAULT_WINDOW_DAYS = 30.0
DEFAULT_STEP_DAYS = 30.0
_DAY = 86_400


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures follow the error-JSON contract."""

    def error(self, message: str):
        _print_error("usage", message)
        raise SystemExit(2)


def _print_error(code: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"error": {"code": code, "message": message}}) + "\n"
    )


def _read_log(path: str):
    data = Path(path).read_bytes()
    return parse_events(data)


def _load_config(path: str | None) -> ThresholdConfig:
    if path is None:
        return ThresholdConfig()
    return ThresholdConfig.from_json(Path(path).read_text(encoding="utf-8"))


def _window_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="threshold config JSON file")
    parser.add_argument(
        "--window",
        type=float,
        default=DEFAULT_WINDOW_DAYS,
        help=f"snapshot width in days (default {DEFAULT_WINDOW_DAYS:g})",
    )
    parser.add_argument(
        "--step",
        type=float,
        default=DEFAULT_STEP_DAYS,
        help=f"snapshot stride in days (default {DEFAULT_STEP_DAYS:g})",
    )
    parser.add_argument(
        "--origin", type=int, help="first snapshot start (epoch seconds)"
    )


def _series_for(args: argparse.Namespace):
    log = _read_log(args.events)
    config = _load_config(args.config)
    width = int(round(args.window * _DAY))
    step = int(round(args.step * _DAY))
    return assignment_series(log, width, step, config, origin=args.origin)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(str(path))


def _distribution_document(series) -> dict[str, Any]:
    """Latest defined snapshot's role shares, or an undefined marker."""
    for i in range(len(series.snapshots) - 1, -1, -1):
        dist = series.distribution(i)
        if dist is not None:
            start, end = series.snapshots[i]
            return {
                "defined": True,
                "snapshot": i,
                "from": start,
                "to": end,
                "distribution": dist.as_dict(),
            }
    return {"defined": False, "snapshot": None, "distribution": None}


def _load_distribution(path: str) -> DistributionVector:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and "distribution" in doc:
        if not doc.get("defined", True) or doc["distribution"] is None:
            raise InvalidConfig(f"{path} holds an undefined distribution")
        doc = doc["distribution"]
    return distribution_from_json(json.dumps(doc))


def _cmd_ingest(args: argparse.Namespace) -> int:
    log = _read_log(args.events)
    signups = sum(1 for m in log.members if log.signup_time(m) is not None)
    print(
        json.dumps(
            {
                "events": len(log.events),
                "members": len(log.members),
                "signed_up": signups,
                "span": list(log.span()) if log.span() is not None else None,
            },
            indent=2,
        )
    )
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    series = _series_for(args)
    out = Path(args.out_dir)
    _write(out / "assignments.csv", assignments_to_csv(series))
    _write(
        out / "distribution.json",
        json.dumps(_distribution_document(series), indent=2) + "\n",
    )
    return 0


def _cmd_transitions(args: argparse.Namespace) -> int:
    series = _series_for(args)
    sequences = series.role_sequences()
    out = Path(args.out_dir)
    raw = estimate_transition_matrix(
        sequences.values(), smoothing=args.smoothing, masked=False
    )
    masked = estimate_transition_matrix(
        sequences.values(), smoothing=args.smoothing, masked=True
    )
    _write(out / "matrix_raw.csv", raw.to_csv())
    _write(out / "matrix_masked.csv", masked.to_csv())
    violations = {}
    for member, seq in sorted(sequences.items()):
        found = validate_sequence(seq, min_dwell=args.min_dwell)
        if found:
            violations[member] = [
                {
                    "index": v.index,
                    "from": v.from_role.value,
                    "to": v.to_role.value,
                    "kind": v.kind,
                    "detail": v.detail,
                }
                for v in found
            ]
    _write(
        out / "violations.json",
        json.dumps({"violations": violations}, indent=2) + "\n",
    )
    return 0


def _cmd_project(args: argparse.Namespace) -> int:
    matrix = TransitionMatrix.from_csv(
        Path(args.matrix).read_text(encoding="utf-8")
    ).masked()
    current = _load_distribution(args.distribution)
    path = trajectory(current, matrix, args.steps)
    doc = {
        "steps": args.steps,
        "trajectory": [d.as_dict() for d in path],
    }
    _write(Path(args.out), json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_steer(args: argparse.Namespace) -> int:
    matrix = TransitionMatrix.from_csv(
        Path(args.matrix).read_text(encoding="utf-8")
    ).masked()
    current = _load_distribution(args.distribution)
    target = TargetDistribution.from_json(
        Path(args.target).read_text(encoding="utf-8")
    )
    catalog = load_catalog(Path(args.catalog).read_text(encoding="utf-8"))
    plans = recommend(
        current,
        matrix,
        target,
        catalog,
        args.horizon,
        max_plan_len=args.max_plan_len,
        strategy=args.strategy,
    )
    _write(Path(args.out), plans_to_json(plans))
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.profile is not None:
        profile = BehaviorProfile.from_json(
            Path(args.profile).read_text(encoding="utf-8")
        )
    else:
        profile = default_profile()
    log, truth = generate(profile, args.members, args.days, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "events.jsonl").write_bytes(serialize_events(log))
    print(str(out / "events.jsonl"))
    _write(out / "ground_truth.csv", truth.to_csv())
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import AnalysisSession, create_app, resolve_data_path, resolve_port

    data = resolve_data_path(args.events)
    if data is None:
        raise InvalidConfig("an events file is required (argument or ROLECYCLE_DATA)")
    log = parse_events(Path(data).read_bytes())
    config = _load_config(args.config)
    width = int(round(args.window * _DAY))
    step = int(round(args.step * _DAY))
    session = AnalysisSession(
        log, config, width, step, origin=args.origin, min_dwell=args.min_dwell
    )
    app = create_app(session)
    uvicorn.run(app, host=args.host, port=resolve_port(args.port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rolecycle", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate an event log and print counts")
    p.add_argument("events", help="JSONL event log")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser(
        "classify", help="assign roles over sliding snapshots"
    )
    p.add_argument("events", help="JSONL event log")
    _window_args(p)
    p.add_argument("--out-dir", default=".", help="artifact directory")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser(
        "transitions", help="estimate raw and masked transition matrices"
    )
    p.add_argument("events", help="JSONL event log")
    _window_args(p)
    p.add_argument("--smoothing", type=float, default=0.0)
    p.add_argument("--min-dwell", type=int, default=1)
    p.add_argument("--out-dir", default=".", help="artifact directory")
    p.set_defaults(func=_cmd_transitions)

    p = sub.add_parser(
        "project", help="project a role distribution forward k steps"
    )
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--matrix", required=True, help="transition matrix CSV")
    p.add_argument(
        "--distribution", required=True, help="current distribution JSON"
    )
    p.add_argument("--out", default="projection.json")
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("steer", help="rank intervention plans toward a target")
    p.add_argument("--target", required=True, help="target distribution JSON")
    p.add_argument("--catalog", required=True, help="intervention catalog JSON")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--matrix", required=True, help="transition matrix CSV")
    p.add_argument(
        "--distribution", required=True, help="current distribution JSON"
    )
    p.add_argument("--max-plan-len", type=int, default=2)
    p.add_argument(
        "--strategy", choices=["auto", "exhaustive", "greedy"], default="auto"
    )
    p.add_argument("--out", default="plans.json")
    p.set_defaults(func=_cmd_steer)

    p = sub.add_parser("synth", help="generate a synthetic community log")
    p.add_argument("--profile", help="behavior profile JSON")
    p.add_argument("--members", type=int, required=True)
    p.add_argument("--days", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", default=".", help="artifact directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument(
        "events", nargs="?", help="JSONL event log (or ROLECYCLE_DATA)"
    )
    _window_args(p)
    p.add_argument("--min-dwell", type=int, default=1)
    p.add_argument("--port", type=int, help="listen port (or ROLECYCLE_PORT)")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MalformedRecord as exc:
        _print_error("malformed_record", str(exc))
        return 1
    except RolecycleError as exc:
        _print_error(type(exc).__name__, str(exc))
        return 1
    except FileNotFoundError as exc:
        _print_error("file_not_found", str(exc))
        return 1
    except json.JSONDecodeError as exc:
        _print_error("invalid_json", str(exc))
        return 1
    except ValueError as exc:
        _print_error("invalid_value", str(exc))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
