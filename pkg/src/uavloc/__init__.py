"""Range-based localization of ground devices with a drone anchor.

The package splits into exact geometry, measurement-error models and bounds,
air-to-ground link feasibility, the trilateration solver with its worst-case
analysis, six localization algorithms, and a seeded Monte Carlo mission
engine with a CSV/CLI surface on top.
"""

from .channel import Environment, LinkBudget, link_up, los_probability
from .errors import (
    AccuracyProfile,
    GroundErrorBound,
    NoiseSample,
    bound_altitude,
    bound_combined,
    bound_instrumental,
    bound_rolling,
    measure,
    sample_noise,
)
from .estimators import (
    ALGORITHMS,
    EstimateOutcome,
    EstimateStatus,
    NoValidTripleError,
    SelectionConstraints,
    estimate_drbc,
    estimate_drf,
    estimate_ioa,
    estimate_ioc,
    estimate_omni,
    estimate_scan,
    select_triple,
)
from .geometry import (
    GroundPoint,
    GroundProjection,
    TriangleGeometry,
    Waypoint,
    beta_angles,
    elevation_angle,
    ground_distance,
    project_slant_to_ground,
    slant_distance,
)
from .mission import (
    Deployment,
    GroundDevice,
    MissionConfig,
    TrialResult,
    centered_triangular_deployment,
    deploy_triangular,
    field_profile,
    generate_scan_path,
    run_mission,
    sweep,
    trilateration_error_samples,
)
from .trilateration import (
    CollinearAnchorsError,
    RangeMeasurement,
    TrilaterationResult,
    check_lemma,
    star_vertex_distance,
    trilaterate,
    trilateration_accuracy,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AccuracyProfile",
    "CollinearAnchorsError",
    "Deployment",
    "EstimateOutcome",
    "EstimateStatus",
    "Environment",
    "GroundDevice",
    "GroundErrorBound",
    "GroundPoint",
    "GroundProjection",
    "LinkBudget",
    "MissionConfig",
    "NoValidTripleError",
    "NoiseSample",
    "RangeMeasurement",
    "SelectionConstraints",
    "TriangleGeometry",
    "TrialResult",
    "TrilaterationResult",
    "Waypoint",
    "beta_angles",
    "bound_altitude",
    "bound_combined",
    "bound_instrumental",
    "bound_rolling",
    "centered_triangular_deployment",
    "check_lemma",
    "deploy_triangular",
    "elevation_angle",
    "estimate_drbc",
    "estimate_drf",
    "estimate_ioa",
    "estimate_ioc",
    "estimate_omni",
    "estimate_scan",
    "field_profile",
    "generate_scan_path",
    "ground_distance",
    "link_up",
    "los_probability",
    "measure",
    "project_slant_to_ground",
    "run_mission",
    "sample_noise",
    "select_triple",
    "slant_distance",
    "star_vertex_distance",
    "sweep",
    "trilaterate",
    "trilateration_accuracy",
    "trilateration_error_samples",
]
