"""Community-role lifecycle analytics.

Ingest member event logs, build interaction graphs, score activity and
centrality, classify members into lifecycle roles, estimate and project
role-transition dynamics, and rank interventions that steer the role
distribution toward a target.
"""

from .activity import (
    ActivityMeasures,
    Relative,
    RelativeMeasures,
    activity_to_csv,
    burstiness,
    compute_activity,
    midpoint_percentiles,
    ratios_to_mean,
    relativize,
)
from .api import AnalysisSession, ApiError, create_app
from .centrality import (
    CENTRALITY_CSV_HEADER,
    CentralityReport,
    CentralityRow,
    betweenness_centrality,
    centralities_to_csv,
    closeness_centrality,
    compute_centralities,
    degree_centrality,
    eigenvector_centrality,
    reciprocity,
)
from .classify import (
    ASSIGNMENT_CSV_HEADER,
    RULE_PREDICATES,
    AssignmentSeries,
    assignment_series,
    assignments_to_csv,
    classify,
    classify_all,
    featurize,
    replay,
)
from .estimators import (
    RoleClassifier,
    TransitionMatrixEstimator,
    check_feature_vectors,
    check_role_sequences,
)
from .errors import (
    DegenerateRow,
    EmptyCatalog,
    InvalidConfig,
    InvalidEdit,
    InvalidMatrix,
    InvalidProfile,
    InvalidWindow,
    MalformedRecord,
    NoConvergence,
    NoObservations,
    OrderingConflict,
    RolecycleError,
    UnknownMember,
)
from .events import (
    EventKind,
    EventLog,
    EventRecord,
    parse_events,
    serialize_events,
    window,
)
from .graph import (
    DEFAULT_EDGE_SEMANTICS,
    EDGE_SEMANTICS,
    EgoNetwork,
    InteractionGraph,
    build_graph,
    churn_between,
    edge_churn,
    graph_to_csv,
)
from .lifecycle import (
    ALLOWED_TRANSITIONS,
    N_ROLES,
    TAG_MASKED,
    TAG_RAW,
    UNUSUAL_TRANSITIONS,
    DistributionVector,
    TransitionMatrix,
    Violation,
    allowed_mask,
    distribution_from_json,
    distribution_to_json,
    estimate_transition_matrix,
    is_valid_transition,
    project_distribution,
    trajectory,
    validate_sequence,
)
from .roles import (
    ROLE_INDEX,
    ROLE_ORDER,
    TROLL_OUT_DEGREE_PERCENTILE_MIN,
    FeatureVector,
    Role,
    RoleAssignment,
    ThresholdConfig,
    role_from_name,
)
from .steering import (
    EXHAUSTIVE_PLAN_LIMIT,
    InterventionSpec,
    SteeringPlan,
    TargetDistribution,
    apply_intervention,
    apply_plan,
    catalog_to_json,
    distance,
    load_catalog,
    plans_to_json,
    recommend,
)
from .synth import (
    BehaviorProfile,
    GroundTruth,
    RoleBehavior,
    SplitMix64,
    default_matrix,
    default_profile,
    generate,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityMeasures",
    "Relative",
    "RelativeMeasures",
    "activity_to_csv",
    "burstiness",
    "compute_activity",
    "midpoint_percentiles",
    "ratios_to_mean",
    "relativize",
    "AnalysisSession",
    "ApiError",
    "create_app",
    "CENTRALITY_CSV_HEADER",
    "CentralityReport",
    "CentralityRow",
    "betweenness_centrality",
    "centralities_to_csv",
    "closeness_centrality",
    "compute_centralities",
    "degree_centrality",
    "eigenvector_centrality",
    "reciprocity",
    "ASSIGNMENT_CSV_HEADER",
    "RULE_PREDICATES",
    "AssignmentSeries",
    "assignment_series",
    "assignments_to_csv",
    "classify",
    "classify_all",
    "featurize",
    "replay",
    "RoleClassifier",
    "TransitionMatrixEstimator",
    "check_feature_vectors",
    "check_role_sequences",
    "DegenerateRow",
    "EmptyCatalog",
    "InvalidConfig",
    "InvalidEdit",
    "InvalidMatrix",
    "InvalidProfile",
    "InvalidWindow",
    "MalformedRecord",
    "NoConvergence",
    "NoObservations",
    "OrderingConflict",
    "RolecycleError",
    "UnknownMember",
    "EventKind",
    "EventLog",
    "EventRecord",
    "parse_events",
    "serialize_events",
    "window",
    "DEFAULT_EDGE_SEMANTICS",
    "EDGE_SEMANTICS",
    "EgoNetwork",
    "InteractionGraph",
    "build_graph",
    "churn_between",
    "edge_churn",
    "graph_to_csv",
    "ALLOWED_TRANSITIONS",
    "N_ROLES",
    "TAG_MASKED",
    "TAG_RAW",
    "UNUSUAL_TRANSITIONS",
    "DistributionVector",
    "TransitionMatrix",
    "Violation",
    "allowed_mask",
    "distribution_from_json",
    "distribution_to_json",
    "estimate_transition_matrix",
    "is_valid_transition",
    "project_distribution",
    "trajectory",
    "validate_sequence",
    "ROLE_INDEX",
    "ROLE_ORDER",
    "TROLL_OUT_DEGREE_PERCENTILE_MIN",
    "FeatureVector",
    "Role",
    "RoleAssignment",
    "ThresholdConfig",
    "role_from_name",
    "EXHAUSTIVE_PLAN_LIMIT",
    "InterventionSpec",
    "SteeringPlan",
    "TargetDistribution",
    "apply_intervention",
    "apply_plan",
    "catalog_to_json",
    "distance",
    "load_catalog",
    "plans_to_json",
    "recommend",
    "BehaviorProfile",
    "GroundTruth",
    "RoleBehavior",
    "SplitMix64",
    "default_matrix",
    "default_profile",
    "generate",
    "__version__",
]
