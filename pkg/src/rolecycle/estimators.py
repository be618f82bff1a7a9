"""Scikit-learn style estimator facades over the rule engine and the
transition-matrix estimator.

Both classes follow the standard estimator contract: all constructor
arguments are hyperparameters exposed through get_params/set_params, fit
validates and freezes state into trailing-underscore attributes, and
predict/transform consume plain sequences. The rule-based classifier has
nothing to learn, so its fit only validates configuration; that keeps it
compose-able with standard tooling without pretending it trains.
"""

from __future__ import annotations

from dataclasses import fields
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .classify import classify, classify_all, featurize
from .errors import RolecycleError
from .events import EventLog
from .lifecycle import (
    DistributionVector,
    TransitionMatrix,
    estimate_transition_matrix,
    project_distribution,
    validate_sequence,
)
from .roles import FeatureVector, Role, RoleAssignment, ThresholdConfig

_CONFIG_FIELDS = tuple(f.name for f in fields(ThresholdConfig))


def check_feature_vectors(X: Iterable[FeatureVector]) -> list[FeatureVector]:
    """Validate that X is a sequence of FeatureVector instances."""
    items = list(X)
    for i, item in enumerate(items):
        if not isinstance(item, FeatureVector):
            raise TypeError(
                f"X[{i}] is {type(item).__name__}, expected FeatureVector"
            )
    return items


def check_role_sequences(X: Iterable[Sequence[Role]]) -> list[tuple[Role, ...]]:
    """Validate that X is a collection of Role sequences."""
    series = []
    for i, seq in enumerate(X):
        roles = tuple(seq)
        for j, role in enumerate(roles):
            if not isinstance(role, Role):
                raise TypeError(
                    f"X[{i}][{j}] is {type(role).__name__}, expected Role"
                )
        series.append(roles)
    return series


class RoleClassifier(BaseEstimator):
    """Rule-based role classifier with thresholds as hyperparameters.

    Parameters mirror ThresholdConfig field for field; see that type for
    semantics and defaults.
    """

    def __init__(
        self,
        novice_max_days: float = 14.0,
        active_gap_ratio_max: float = 0.8,
        active_recency_ratio_max: float = 1.0,
        active_degree_percentile_min: float = 0.25,
        active_degree_percentile_max: float = 0.95,
        leader_degree_percentile_min: float = 0.90,
        leader_broker_percentile_min: float = 0.90,
        leader_activity_percentile_min: float = 0.75,
        passive_gap_ratio_min: float = 1.5,
        passive_post_percentile_max: float = 0.25,
        passive_churn_max: float = 0.2,
        troll_burstiness_min: float = 0.8,
        troll_flags_min: int = 3,
        troll_reciprocity_max: float = 0.25,
        departed_inactivity_days: float = 90.0,
        edge_semantics: str = "explicit+communication",
    ):
        self.novice_max_days = novice_max_days
        self.active_gap_ratio_max = active_gap_ratio_max
        self.active_recency_ratio_max = active_recency_ratio_max
        self.active_degree_percentile_min = active_degree_percentile_min
        self.active_degree_percentile_max = active_degree_percentile_max
        self.leader_degree_percentile_min = leader_degree_percentile_min
        self.leader_broker_percentile_min = leader_broker_percentile_min
        self.leader_activity_percentile_min = leader_activity_percentile_min
        self.passive_gap_ratio_min = passive_gap_ratio_min
        self.passive_post_percentile_max = passive_post_percentile_max
        self.passive_churn_max = passive_churn_max
        self.troll_burstiness_min = troll_burstiness_min
        self.troll_flags_min = troll_flags_min
        self.troll_reciprocity_max = troll_reciprocity_max
        self.departed_inactivity_days = departed_inactivity_days
        self.edge_semantics = edge_semantics

    def _config(self) -> ThresholdConfig:
        return ThresholdConfig(
            **{name: getattr(self, name) for name in _CONFIG_FIELDS}
        )

    def fit(self, X=None, y=None) -> "RoleClassifier":
        """Validate hyperparameters; rule-based, so nothing is learned."""
        self.config_ = self._config()
        return self

    def predict(self, X: Iterable[FeatureVector]) -> np.ndarray:
        """Roles for a sequence of feature vectors, as an object array."""
        self._check_fitted()
        items = check_feature_vectors(X)
        return np.array(
            [classify(f, self.config_).role for f in items], dtype=object
        )

    def transform(self, X: Iterable[FeatureVector]) -> list[RoleAssignment]:
        """Full assignments (role plus fired rules) per feature vector."""
        self._check_fitted()
        return [classify(f, self.config_) for f in check_feature_vectors(X)]

    def featurize_log(
        self, log: EventLog, start: int, end: int, now: int | None = None
    ) -> dict[str, FeatureVector]:
        """Feature vectors for every visible member of a log window."""
        self._check_fitted()
        return featurize(log, start, end, self.config_, now)

    def classify_log(
        self, log: EventLog, start: int, end: int, now: int | None = None
    ) -> tuple[dict[str, RoleAssignment], DistributionVector | None]:
        """End-to-end pipeline over one window of an event log."""
        self._check_fitted()
        return classify_all(log, start, end, self.config_, now)

    def _check_fitted(self) -> None:
        if not hasattr(self, "config_"):
            raise RolecycleError("RoleClassifier is not fitted; call fit() first")


class TransitionMatrixEstimator(BaseEstimator):
    """Estimates the lifecycle transition matrix from role sequences.

    fit consumes an iterable of chronological Role sequences and exposes
    raw_matrix_ (empirical-raw), matrix_ (graph-masked), violations_ (from
    sequence validation at min_dwell), and n_pairs_.
    """

    def __init__(self, smoothing: float = 0.0, min_dwell: int = 1):
        self.smoothing = smoothing
        self.min_dwell = min_dwell

    def fit(self, X: Iterable[Sequence[Role]], y=None) -> "TransitionMatrixEstimator":
        series = check_role_sequences(X)
        if self.smoothing < 0:
            raise ValueError("smoothing must be non-negative")
        if self.min_dwell < 1:
            raise ValueError("min_dwell must be at least 1")
        self.raw_matrix_ = estimate_transition_matrix(
            series, smoothing=self.smoothing, masked=False
        )
        self.matrix_ = estimate_transition_matrix(
            series, smoothing=self.smoothing, masked=True
        )
        violations = {}
        for i, seq in enumerate(series):
            found = validate_sequence(seq, min_dwell=self.min_dwell)
            if found:
                violations[i] = found
        self.violations_ = violations
        self.n_pairs_ = sum(max(0, len(s) - 1) for s in series)
        return self

    def project(self, d: DistributionVector, steps: int) -> DistributionVector:
        """Forward-project a distribution with the fitted masked matrix."""
        self._check_fitted()
        return project_distribution(d, self.matrix_, steps)

    def predict(self, X: Iterable[DistributionVector], steps: int = 1) -> list[DistributionVector]:
        """Project each distribution in X forward by `steps` snapshots."""
        self._check_fitted()
        return [self.project(d, steps) for d in X]

    def masked_matrix(self) -> TransitionMatrix:
        self._check_fitted()
        return self.matrix_

    def _check_fitted(self) -> None:
        if not hasattr(self, "matrix_"):
            raise RolecycleError(
                "TransitionMatrixEstimator is not fitted; call fit() first"
            )
