"""Lifecycle transition model: allowed-transition graph, sequence validation,
matrix estimation, and distribution projection.

Matrices are 7x7 over ROLE_ORDER. A matrix is tagged either "empirical-raw"
(counts normalized as observed, possibly with mass on disallowed pairs from
classifier noise) or "graph-masked" (support restricted to the allowed
transition structure); only masked matrices may be projected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidMatrix, NoObservations
from .roles import ROLE_INDEX, ROLE_ORDER, Role, role_from_name

TAG_RAW = "empirical-raw"
TAG_MASKED = "graph-masked"

N_ROLES = len(ROLE_ORDER)

_ROW_SUM_TOL = 1e-12

# Allowed successor structure. Self-loops carry dwell mass for every role
# that can persist; Departed is absorbing; Trolls have no successor roles;
# Passive cannot jump straight to Leader.
ALLOWED_TRANSITIONS: frozenset[tuple[Role, Role]] = frozenset(
    {
        (Role.VISITOR, Role.VISITOR),
        (Role.VISITOR, Role.NOVICE),
        (Role.VISITOR, Role.DEPARTED),
        (Role.NOVICE, Role.NOVICE),
        (Role.NOVICE, Role.ACTIVE),
        (Role.NOVICE, Role.PASSIVE),
        (Role.NOVICE, Role.TROLL),
        (Role.NOVICE, Role.DEPARTED),
        (Role.ACTIVE, Role.ACTIVE),
        (Role.ACTIVE, Role.PASSIVE),
        (Role.ACTIVE, Role.LEADER),
        (Role.ACTIVE, Role.TROLL),
        (Role.ACTIVE, Role.DEPARTED),
        (Role.LEADER, Role.LEADER),
        (Role.LEADER, Role.ACTIVE),
        (Role.LEADER, Role.PASSIVE),
        (Role.LEADER, Role.TROLL),
        (Role.LEADER, Role.DEPARTED),
        (Role.PASSIVE, Role.PASSIVE),
        (Role.PASSIVE, Role.ACTIVE),
        (Role.PASSIVE, Role.DEPARTED),
        (Role.TROLL, Role.TROLL),
        (Role.TROLL, Role.DEPARTED),
        (Role.DEPARTED, Role.DEPARTED),
    }
)

# Allowed but operationally surprising: members rarely quit cold from full
# engagement, so validation flags it without rejecting it.
UNUSUAL_TRANSITIONS: frozenset[tuple[Role, Role]] = frozenset(
    {(Role.ACTIVE, Role.DEPARTED)}
)

_MASK = np.zeros((N_ROLES, N_ROLES), dtype=bool)
for _from, _to in ALLOWED_TRANSITIONS:
    _MASK[ROLE_INDEX[_from], ROLE_INDEX[_to]] = True
_MASK.setflags(write=False)


def allowed_mask() -> np.ndarray:
    """Boolean 7x7 mask of allowed transitions in ROLE_ORDER indexing."""
    return _MASK.copy()


def is_valid_transition(from_role: Role, to_role: Role) -> bool:
    return (from_role, to_role) in ALLOWED_TRANSITIONS


@dataclass(frozen=True)
class Violation:
    """One problem found in an observed role sequence."""

    index: int  # position of the destination role in the series
    from_role: Role
    to_role: Role
    kind: str  # "disallowed" | "premature" | "unusual"
    detail: str


def validate_sequence(series: Sequence[Role], min_dwell: int = 1) -> list[Violation]:
    """Check a chronological role series against the transition structure.

    Reports disallowed adjacent pairs, non-self transitions leaving a role
    held for fewer than min_dwell snapshots (flap suppression), and allowed
    but unusual pairs. Never mutates the series.
    """
    if min_dwell < 1:
        raise ValueError("min_dwell must be at least 1")
    violations: list[Violation] = []
    dwell = 1
    for i in range(1, len(series)):
        prev, cur = series[i - 1], series[i]
        if not is_valid_transition(prev, cur):
            violations.append(
                Violation(
                    index=i,
                    from_role=prev,
                    to_role=cur,
                    kind="disallowed",
                    detail=f"{prev.value}->{cur.value} is not an allowed transition",
                )
            )
        elif (prev, cur) in UNUSUAL_TRANSITIONS:
            violations.append(
                Violation(
                    index=i,
                    from_role=prev,
                    to_role=cur,
                    kind="unusual",
                    detail=f"{prev.value}->{cur.value} is allowed but atypical",
                )
            )
        if cur is not prev:
            if dwell < min_dwell:
                violations.append(
                    Violation(
                        index=i,
                        from_role=prev,
                        to_role=cur,
                        kind="premature",
                        detail=(
                            f"left {prev.value} after {dwell} snapshot(s); "
                            f"minimum dwell is {min_dwell}"
                        ),
                    )
                )
            dwell = 1
        else:
            dwell += 1
    return violations


class TransitionMatrix:
    """Row-stochastic 7x7 matrix over ROLE_ORDER with a provenance tag."""

    __slots__ = ("_data", "_tag")

    def __init__(self, data: np.ndarray | Sequence[Sequence[float]], tag: str):
        arr = np.array(data, dtype=float)
        if arr.shape != (N_ROLES, N_ROLES):
            raise InvalidMatrix(f"matrix shape {arr.shape} is not 7x7")
        if not np.all(np.isfinite(arr)):
            raise InvalidMatrix("matrix entries must be finite")
        if np.any(arr < 0):
            raise InvalidMatrix("matrix entries must be non-negative")
        sums = arr.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > _ROW_SUM_TOL):
            worst = int(np.argmax(np.abs(sums - 1.0)))
            raise InvalidMatrix(
                f"row {ROLE_ORDER[worst].value} sums to {sums[worst]!r}, not 1"
            )
        if tag not in (TAG_RAW, TAG_MASKED):
            raise InvalidMatrix(f"unknown matrix tag {tag!r}")
        if tag == TAG_MASKED and np.any(arr[~_MASK] != 0.0):
            raise InvalidMatrix("masked matrix has mass on disallowed transitions")
        arr.setflags(write=False)
        self._data = arr
        self._tag = tag

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def tag(self) -> str:
        return self._tag

    def __getitem__(self, pair: tuple[Role, Role]) -> float:
        from_role, to_role = pair
        return float(self._data[ROLE_INDEX[from_role], ROLE_INDEX[to_role]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TransitionMatrix):
            return NotImplemented
        return self._tag == other._tag and np.array_equal(self._data, other._data)

    @classmethod
    def identity(cls, tag: str = TAG_MASKED) -> "TransitionMatrix":
        return cls(np.eye(N_ROLES), tag)

    def masked(self) -> "TransitionMatrix":
        """Project support onto allowed transitions and renormalize rows.

        Rows left with zero mass become identity rows. Masking a masked
        matrix returns it unchanged (idempotence is exact).
        """
        if self._tag == TAG_MASKED:
            return self
        arr = np.where(_MASK, self._data, 0.0)
        for i in range(N_ROLES):
            total = arr[i].sum()
            if total == 0.0:
                arr[i, i] = 1.0
            else:
                arr[i] /= total
        return TransitionMatrix(arr, TAG_MASKED)

    def to_csv(self) -> str:
        names = [role.value for role in ROLE_ORDER]
        lines = ["role," + ",".join(names)]
        for i, role in enumerate(ROLE_ORDER):
            cells = ",".join(repr(float(v)) for v in self._data[i])
            lines.append(f"{role.value},{cells}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, tag: str | None = None) -> "TransitionMatrix":
        """Parse the to_csv format. When tag is omitted it is inferred:
        any mass on a disallowed pair means empirical-raw, else graph-masked."""
        lines = [line for line in text.splitlines() if line.strip()]
        if len(lines) != N_ROLES + 1:
            raise InvalidMatrix(
                f"expected header plus {N_ROLES} rows, got {len(lines)} lines"
            )
        header = lines[0].split(",")
        expected = ["role"] + [role.value for role in ROLE_ORDER]
        if header != expected:
            raise InvalidMatrix(f"bad header {lines[0]!r}")
        arr = np.zeros((N_ROLES, N_ROLES))
        for line in lines[1:]:
            cells = line.split(",")
            if len(cells) != N_ROLES + 1:
                raise InvalidMatrix(f"bad row {line!r}")
            role = role_from_name(cells[0])
            try:
                arr[ROLE_INDEX[role]] = [float(c) for c in cells[1:]]
            except ValueError as exc:
                raise InvalidMatrix(f"non-numeric cell in row {cells[0]!r}") from exc
        if tag is None:
            tag = TAG_RAW if np.any(arr[~_MASK] != 0.0) else TAG_MASKED
        return cls(arr, tag)


class DistributionVector:
    """Role shares on the 7-role simplex, in ROLE_ORDER."""

    __slots__ = ("_data",)

    def __init__(self, data: np.ndarray | Sequence[float]):
        arr = np.array(data, dtype=float)
        if arr.shape != (N_ROLES,):
            raise InvalidMatrix(f"distribution shape {arr.shape} is not ({N_ROLES},)")
        if not np.all(np.isfinite(arr)):
            raise InvalidMatrix("distribution entries must be finite")
        if np.any(arr < 0):
            raise InvalidMatrix("distribution entries must be non-negative")
        if abs(float(arr.sum()) - 1.0) > _ROW_SUM_TOL:
            raise InvalidMatrix(f"distribution sums to {float(arr.sum())!r}, not 1")
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __getitem__(self, role: Role) -> float:
        return float(self._data[ROLE_INDEX[role]])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DistributionVector):
            return NotImplemented
        return np.array_equal(self._data, other._data)

    def as_dict(self) -> dict[str, float]:
        return {role.value: float(self._data[i]) for i, role in enumerate(ROLE_ORDER)}

    @classmethod
    def from_dict(cls, mapping: Mapping[str, float]) -> "DistributionVector":
        unknown = set(mapping) - {role.value for role in ROLE_ORDER}
        if unknown:
            raise InvalidMatrix(f"unknown roles in distribution: {sorted(unknown)}")
        arr = np.zeros(N_ROLES)
        for name, share in mapping.items():
            arr[ROLE_INDEX[role_from_name(name)]] = share
        return cls(arr)

    @classmethod
    def from_counts(cls, counts: Mapping[Role, int]) -> "DistributionVector":
        total = sum(counts.values())
        if total <= 0:
            raise NoObservations("cannot form a distribution over zero members")
        arr = np.zeros(N_ROLES)
        for role, c in counts.items():
            arr[ROLE_INDEX[role]] = c / total
        # Exact simplex repair for the rounding dust division leaves behind.
        arr /= arr.sum()
        return cls(arr)


def estimate_transition_matrix(
    all_series: Iterable[Sequence[Role]],
    smoothing: float = 0.0,
    masked: bool = True,
) -> TransitionMatrix:
    """Estimate the matrix from adjacent pairs across all members' series.

    Smoothing (Laplace-style, default off) is added to allowed cells only,
    in both variants. The masked variant zeroes disallowed counts before
    normalizing; rows with no mass become identity rows.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be non-negative")
    counts = np.zeros((N_ROLES, N_ROLES))
    pairs = 0
    for series in all_series:
        for a, b in zip(series, series[1:]):
            counts[ROLE_INDEX[a], ROLE_INDEX[b]] += 1.0
            pairs += 1
    if pairs == 0:
        raise NoObservations("no adjacent role pairs observed")

    work = counts.copy()
    if masked:
        work[~_MASK] = 0.0
    if smoothing > 0:
        work[_MASK] += smoothing
    for i in range(N_ROLES):
        total = work[i].sum()
        if total == 0.0:
            work[i, i] = 1.0
        else:
            work[i] /= total
    return TransitionMatrix(work, TAG_MASKED if masked else TAG_RAW)


def project_distribution(
    d: DistributionVector, matrix: TransitionMatrix, k: int
) -> DistributionVector:
    """d . M^k by iterated vector-matrix products; k = 0 returns d."""
    if isinstance(k, bool) or not isinstance(k, int):
        raise ValueError("k must be an integer")
    if k < 0:
        raise ValueError("k must be non-negative")
    if matrix.tag != TAG_MASKED:
        raise InvalidMatrix("projection requires a graph-masked matrix")
    if k == 0:
        return d
    vec = d.data.copy()
    for _ in range(k):
        vec = vec @ matrix.data
        # Row sums are stochastic only to 1e-12, so raw products can drift
        # off the simplex over long horizons; renormalizing every step keeps
        # the iterate exactly where the math says it belongs.
        vec = np.maximum(vec, 0.0)
        vec /= vec.sum()
    return DistributionVector(vec)


def trajectory(
    d: DistributionVector, matrix: TransitionMatrix, steps: int
) -> list[DistributionVector]:
    """[d, d.M, ..., d.M^steps]: the projection path, steps+1 entries."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    out = [d]
    for _ in range(steps):
        out.append(project_distribution(out[-1], matrix, 1))
    return out


def distribution_to_json(d: DistributionVector) -> str:
    import json

    return json.dumps(d.as_dict(), indent=2) + "\n"


def distribution_from_json(text: str) -> DistributionVector:
    import json

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidMatrix(f"distribution is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise InvalidMatrix("distribution must be a JSON object of role shares")
    return DistributionVector.from_dict(raw)
