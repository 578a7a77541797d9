"""Flight paths, device deployments, and the Monte Carlo mission engine.

A mission flies a lawnmower path of broadcast waypoints over a rectangular
area, lets every deployed ground device record the ranging exchanges the link
allows, and then runs the requested localization algorithms on each device's
log. Randomness is consumed from per-(trial, device) substreams derived from
the mission seed, so results are bit-identical regardless of how trials are
scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import Environment, LinkBudget, los_probability_batch
from .errors import AccuracyProfile, DISTRIBUTIONS, _noise_from_uniforms, measure_batch
from .estimators import ALGORITHMS, EstimateOutcome, EstimateStatus, SelectionConstraints
from .geometry import GroundPoint, Waypoint
from .trilateration import RangeMeasurement, trilaterate

# Accuracy maxima fitted from field measurements at the three flight
# altitudes: ranging accuracy is constant, drift accuracies grow with height.
FIELD_FIT_EPS_S = 0.10
FIELD_FIT_GAMMA_D = {10.0: 0.6, 20.0: 0.8, 30.0: 1.2}
FIELD_FIT_GAMMA_H = {10.0: 0.1, 20.0: 0.15, 30.0: 0.2}

# los_probability_batch handles arbitrarily large ratios; this cap just avoids
# feeding inf through the table lookup for overhead waypoints.
LOS_RATIO_CAP = 1e6


def field_profile(h: float) -> AccuracyProfile:
    """The fitted accuracy preset for a supported altitude (10, 20 or 30 m)."""
    key = float(h)
    if key not in FIELD_FIT_GAMMA_D:
        raise ValueError(f"no field-fit profile for altitude {h}; supported: 10, 20, 30")
    return AccuracyProfile(FIELD_FIT_EPS_S, FIELD_FIT_GAMMA_D[key], FIELD_FIT_GAMMA_H[key])


@dataclass(frozen=True)
class GroundDevice:
    id: int
    position: GroundPoint


@dataclass(frozen=True)
class Deployment:
    devices: tuple[GroundDevice, ...]

    def __post_init__(self) -> None:
        ids = [d.id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise ValueError("device ids must be unique")


@dataclass(frozen=True)
class MissionConfig:
    area: tuple[float, float]
    altitude: float
    inter_waypoint: float
    scan_spacing: float
    home: GroundPoint
    environment: Environment
    budget: LinkBudget
    profile: AccuracyProfile
    constraints: SelectionConstraints
    trials: int
    seed: int
    noise_model: str = "uniform"

    def __post_init__(self) -> None:
        if self.inter_waypoint <= 0:
            raise ValueError(f"inter_waypoint must be > 0, got {self.inter_waypoint}")
        if self.scan_spacing <= 0:
            raise ValueError(f"scan_spacing must be > 0, got {self.scan_spacing}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError(f"area sides must be > 0, got {self.area}")
        if self.noise_model not in DISTRIBUTIONS:
            raise ValueError(f"noise_model must be one of {DISTRIBUTIONS}")


@dataclass(frozen=True)
class MeasurementRecord:
    gd_id: int
    waypoint: Waypoint
    s_measured: float
    clamped: bool
    ground_error: float


@dataclass(frozen=True)
class EstimateRecord:
    gd_id: int
    algorithm: str
    outcome: EstimateOutcome
    error: float | None


@dataclass(frozen=True)
class TrialResult:
    trial: int
    measurements: tuple[MeasurementRecord, ...]
    estimates: tuple[EstimateRecord, ...]


def _segment_points(start: GroundPoint, end: GroundPoint, step: float, include_start: bool):
    """Points every ``step`` along the segment, endpoint always included."""
    length = start.distance_to(end)
    pts: list[GroundPoint] = [start] if include_start else []
    if length == 0.0:
        return pts
    n_steps = int(math.floor(length / step + 1e-9))
    ux, uy = (end.x - start.x) / length, (end.y - start.y) / length
    for k in range(1, n_steps + 1):
        pts.append(GroundPoint(start.x + k * step * ux, start.y + k * step * uy))
    if pts and pts[-1].distance_to(end) > 1e-9:
        pts.append(end)
    elif not pts:
        pts.append(end)
    return pts


def generate_scan_path(cfg: MissionConfig) -> list[Waypoint]:
    """Lawnmower path: vertical scans joined by short crossovers.

    Broadcast positions sit every ``inter_waypoint`` along every flown
    segment; the path starts and finishes at home. Vertical scans carry scan
    line ids, crossovers and the home legs do not.
    """
    width, height = cfg.area
    xs = [float(x) for x in np.arange(0.0, width + 1e-9, cfg.scan_spacing)]
    if width - xs[-1] > 1e-9:
        xs.append(width)

    # (segment start, segment end, scan-line id or None)
    segments: list[tuple[GroundPoint, GroundPoint, int | None]] = []
    cursor = cfg.home
    for line_id, x in enumerate(xs):
        y_from, y_to = (0.0, height) if line_id % 2 == 0 else (height, 0.0)
        line_start = GroundPoint(x, y_from)
        line_end = GroundPoint(x, y_to)
        segments.append((cursor, line_start, None))
        segments.append((line_start, line_end, line_id))
        cursor = line_end
    segments.append((cursor, cfg.home, None))

    waypoints: list[Waypoint] = []
    first = True
    for start, end, line_id in segments:
        for p in _segment_points(start, end, cfg.inter_waypoint, include_start=first):
            waypoints.append(Waypoint(p, cfg.altitude, len(waypoints), line_id))
        first = False
    return waypoints


def deploy_triangular(side: float, count: int, origin: GroundPoint = GroundPoint(0.0, 0.0)) -> Deployment:
    """Vertices of a triangular lattice, filled row by row from the widest row.

    Neighboring vertices are exactly ``side`` apart, so the devices outline a
    series of equilateral triangles.
    """
    if side <= 0:
        raise ValueError(f"lattice side must be > 0, got {side}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rows = 1
    while rows * (rows + 1) // 2 < count:
        rows += 1
    row_height = side * math.sqrt(3.0) / 2.0
    devices: list[GroundDevice] = []
    for r in range(rows):
        y = origin.y + r * row_height
        x0 = origin.x + r * side / 2.0
        for k in range(rows - r):
            if len(devices) == count:
                break
            devices.append(GroundDevice(len(devices), GroundPoint(x0 + k * side, y)))
    return Deployment(tuple(devices))


def centered_triangular_deployment(side: float, count: int, area: tuple[float, float]) -> Deployment:
    """Triangular lattice translated to the center of the mission area."""
    raw = deploy_triangular(side, count)
    xs = [d.position.x for d in raw.devices]
    ys = [d.position.y for d in raw.devices]
    dx = (area[0] - (max(xs) - min(xs))) / 2.0 - min(xs)
    dy = (area[1] - (max(ys) - min(ys))) / 2.0 - min(ys)
    return Deployment(
        tuple(
            GroundDevice(d.id, GroundPoint(d.position.x + dx, d.position.y + dy))
            for d in raw.devices
        )
    )


def _device_log(
    cfg: MissionConfig,
    path: list[Waypoint],
    wp_xy: np.ndarray,
    alts: np.ndarray,
    device: GroundDevice,
    trial: int,
) -> list[MeasurementRecord]:
    """Simulate every ranging exchange between one device and the fly-over."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, trial, device.id]))
    draws = rng.random((len(path), 5))
    e_s, psi, radius, e_h = _noise_from_uniforms(draws[:, :4], cfg.profile, cfg.noise_model)

    delta = wp_xy - np.asarray([device.position.x, device.position.y])
    d_true = np.hypot(delta[:, 0], delta[:, 1])
    slant = np.hypot(d_true, alts)
    with np.errstate(divide="ignore"):
        ratios = np.where(d_true > 0, alts / np.where(d_true > 0, d_true, 1.0), np.inf)
    p_los = los_probability_batch(cfg.environment, np.minimum(ratios, LOS_RATIO_CAP))
    linked = (slant <= cfg.budget.nlos_range) | (
        (slant <= cfg.budget.los_range) & (draws[:, 4] < p_los)
    )

    measured = measure_batch(wp_xy, alts, device.position, e_s, psi, radius, e_h)
    records: list[MeasurementRecord] = []
    for idx in np.flatnonzero(linked):
        wp = path[idx]
        m = RangeMeasurement.from_slant(wp, float(measured[idx]))
        records.append(
            MeasurementRecord(
                gd_id=device.id,
                waypoint=wp,
                s_measured=m.measured_slant,
                clamped=m.clamped,
                ground_error=abs(m.projected_ground - float(d_true[idx])),
            )
        )
    return records


def _run_trial(
    cfg: MissionConfig,
    deployment: Deployment,
    algorithms: tuple[str, ...],
    path: list[Waypoint],
    wp_xy: np.ndarray,
    alts: np.ndarray,
    trial: int,
) -> TrialResult:
    constraints = cfg.constraints
    if constraints.inter_waypoint is None:
        constraints = replace(constraints, inter_waypoint=cfg.inter_waypoint)
    measurements: list[MeasurementRecord] = []
    estimates: list[EstimateRecord] = []
    for device in deployment.devices:
        records = _device_log(cfg, path, wp_xy, alts, device, trial)
        measurements.extend(records)
        log = [RangeMeasurement.from_slant(r.waypoint, r.s_measured) for r in records]
        for name in algorithms:
            outcome = ALGORITHMS[name](log, constraints)
            error = (
                outcome.estimate.distance_to(device.position)
                if outcome.status is EstimateStatus.OK
                else None
            )
            estimates.append(EstimateRecord(device.id, name, outcome, error))
    return TrialResult(trial, tuple(measurements), tuple(estimates))


def run_mission(
    cfg: MissionConfig,
    deployment: Deployment,
    algorithms,
    workers: int = 1,
) -> list[TrialResult]:
    """Simulate all trials and run every requested algorithm per device.

    Estimator failures are recorded in the results rather than raised. The
    output depends only on (cfg, deployment, algorithms), never on ``workers``.
    """
    algorithms = tuple(algorithms)
    if not algorithms or not deployment.devices:
        raise ValueError("need at least one algorithm and one deployed device")
    unknown = [a for a in algorithms if a not in ALGORITHMS]
    if unknown:
        raise ValueError(f"unknown algorithms {unknown}; available: {sorted(ALGORITHMS)}")
    for d in deployment.devices:
        if not (0 <= d.position.x <= cfg.area[0] and 0 <= d.position.y <= cfg.area[1]):
            raise ValueError(f"device {d.id} at {d.position} lies outside the area {cfg.area}")

    path = generate_scan_path(cfg)
    wp_xy = np.asarray([(w.position.x, w.position.y) for w in path])
    alts = np.asarray([w.altitude for w in path])

    def job(trial: int) -> TrialResult:
        return _run_trial(cfg, deployment, algorithms, path, wp_xy, alts, trial)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(cfg.trials)))
    else:
        results = [job(t) for t in range(cfg.trials)]
    return sorted(results, key=lambda r: r.trial)


def mean_ci(values, confidence: float = 0.95) -> tuple[float, float, float]:
    """Sample mean with a Student-t confidence interval."""
    xs = np.asarray(list(values), dtype=float)
    if xs.size == 0:
        return math.nan, math.nan, math.nan
    mean = float(xs.mean())
    if xs.size < 2:
        return mean, math.nan, math.nan
    from scipy.stats import t

    half = float(t.ppf(0.5 + confidence / 2.0, xs.size - 1) * xs.std(ddof=1) / math.sqrt(xs.size))
    return mean, mean - half, mean + half


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float | tuple[float, float]
    algorithm: str
    n_ok: int
    n_total: int
    mean_error: float
    ci_low: float
    ci_high: float


SWEEP_AXES = ("d", "beta", "h", "h_over_d")


def _cfg_for_sweep_value(cfg: MissionConfig, axis: str, value, field_fit: bool) -> MissionConfig:
    c = cfg.constraints
    if axis == "d":
        return replace(cfg, constraints=replace(c, target_d=value, d_min=max(value - c.tolerance, 0.0)))
    if axis == "beta":
        return replace(cfg, constraints=replace(c, min_beta=value))
    if axis == "h":
        profile = field_profile(value) if field_fit else cfg.profile
        return replace(cfg, altitude=value, profile=profile)
    if axis == "h_over_d":
        h, d = value
        profile = field_profile(h) if field_fit else cfg.profile
        return replace(
            cfg,
            altitude=h,
            profile=profile,
            constraints=replace(c, target_d=d, d_min=max(d - c.tolerance, 0.0)),
        )
    raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def sweep(
    cfg: MissionConfig,
    deployment: Deployment,
    axis: str,
    values,
    algorithms,
    field_fit: bool = False,
    workers: int = 1,
) -> list[SweepRow]:
    """Mission statistics along one experiment axis.

    Each axis value is simulated with the same seed, so cells are paired and
    the rows are directly plottable: mean localization error with its 95%
    confidence interval per (algorithm, value).
    """
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    algorithms = tuple(algorithms)
    rows: list[SweepRow] = []
    for value in values:
        cell_cfg = _cfg_for_sweep_value(cfg, axis, value, field_fit)
        results = run_mission(cell_cfg, deployment, algorithms, workers=workers)
        per_alg: dict[str, list[float]] = {a: [] for a in algorithms}
        totals: dict[str, int] = {a: 0 for a in algorithms}
        for trial in results:
            for rec in trial.estimates:
                totals[rec.algorithm] += 1
                if rec.error is not None:
                    per_alg[rec.algorithm].append(rec.error)
        for a in algorithms:
            mean, lo, hi = mean_ci(per_alg[a])
            rows.append(SweepRow(axis, value, a, len(per_alg[a]), totals[a], mean, lo, hi))
    return rows


def controlled_anchor_triple(d: float, beta_min: float, h: float) -> list[Waypoint]:
    """Three waypoints at ground distance ``d`` whose lines at the origin meet
    at exactly ``beta_min`` minimum angle (the other two angles split evenly).

    This reproduces the single-device geometry used to study how the
    trilateration error responds to distance and angle in isolation.
    """
    if not 0 < beta_min <= math.pi / 3 + 1e-12:
        raise ValueError(f"beta_min must lie in (0, pi/3], got {beta_min}")
    if d <= 0:
        raise ValueError(f"ground distance must be > 0, got {d}")
    bearings = (0.0, beta_min, beta_min + (math.pi - beta_min) / 2.0)
    return [
        Waypoint(GroundPoint(d * math.cos(b), d * math.sin(b)), h, i)
        for i, b in enumerate(bearings)
    ]


def trilateration_error_samples(
    profile: AccuracyProfile,
    h: float,
    d: float,
    beta_min: float,
    trials: int,
    seed: int,
    distribution: str = "uniform",
) -> np.ndarray:
    """Monte Carlo localization errors of plain trilateration at a fixed
    anchor geometry: distance ``d`` and minimum line angle ``beta_min``.

    Each trial perturbs all three measurements independently, projects them to
    the ground and solves for the position; the returned array holds the
    distances from the solution to the true position.
    """
    anchors = controlled_anchor_triple(d, beta_min, h)
    wp_xy = np.asarray([(w.position.x, w.position.y) for w in anchors])
    alts = np.asarray([w.altitude for w in anchors])
    target = GroundPoint(0.0, 0.0)
    rng = np.random.default_rng(np.random.SeedSequence([seed]))
    draws = rng.random((trials, 3, 4))
    errors = np.empty(trials)
    for t in range(trials):
        e_s, psi, radius, e_h = _noise_from_uniforms(draws[t], profile, distribution)
        slants = measure_batch(wp_xy, alts, target, e_s, psi, radius, e_h)
        ms = [RangeMeasurement.from_slant(w, float(s)) for w, s in zip(anchors, slants)]
        result = trilaterate(*ms)
        errors[t] = result.estimate.distance_to(target)
    return errors
