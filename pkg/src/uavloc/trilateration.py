"""Three-range position solving and its worst-case error analysis.

With noisy ranges the three ground circles no longer meet in a point; the
estimate is the minimizer of the sum of squared range residuals. The
worst-case displacement of that estimate from the true point has a closed
form: each extreme-error circle pair intersects at a star vertex whose
distance from the truth is the ground accuracy amplified by 1/sin or 1/cos of
half the angle between the two anchor lines, and the farthest vertex is the
same-sign vertex at the minimum angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyProfile, bound_combined
from .geometry import (
    GroundPoint,
    GroundProjection,
    TriangleGeometry,
    Waypoint,
    anchors_collinear,
    project_slant_to_ground,
)

GRADIENT_TOL = 1e-9
MAX_ITERATIONS = 200


class CollinearAnchorsError(ValueError):
    """The three anchor projections lie on one line; the fix is ambiguous."""


@dataclass(frozen=True)
class RangeMeasurement:
    """One stored ranging record: the broadcasting waypoint, the measured
    slant distance, and its ground projection."""

    waypoint: Waypoint
    measured_slant: float
    projected_ground: float
    clamped: bool

    def __post_init__(self) -> None:
        if self.measured_slant < 0:
            raise ValueError(f"measured slant must be >= 0, got {self.measured_slant}")

    @classmethod
    def from_slant(cls, waypoint: Waypoint, measured_slant: float) -> "RangeMeasurement":
        proj: GroundProjection = project_slant_to_ground(measured_slant, waypoint.altitude)
        return cls(waypoint, measured_slant, proj.distance, proj.clamped)


@dataclass(frozen=True)
class TrilaterationResult:
    estimate: GroundPoint
    residuals: tuple[float, float, float]
    objective: float
    converged: bool = True


def _linear_initial_guess(anchors: np.ndarray, dists: np.ndarray) -> np.ndarray:
    """Closed-form start point from subtracting pairs of circle equations.

    Differencing |x - a_i|^2 = d_i^2 cancels the quadratic term and leaves a
    linear system in x, solved in the least-squares sense over all pairs.
    """
    rows = []
    rhs = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        rows.append(2.0 * (anchors[j] - anchors[i]))
        rhs.append(
            float(anchors[j] @ anchors[j] - anchors[i] @ anchors[i] - dists[j] ** 2 + dists[i] ** 2)
        )
    solution, *_ = np.linalg.lstsq(np.asarray(rows), np.asarray(rhs), rcond=None)
    return solution


def trilaterate(
    m1: RangeMeasurement,
    m2: RangeMeasurement,
    m3: RangeMeasurement,
    initial_guess: GroundPoint | None = None,
) -> TrilaterationResult:
    """Least-squares position from three ground-projected ranges.

    Minimizes the sum of squared residuals d_i - |anchor_i - x| with
    Gauss-Newton steps, falling back to Levenberg damping whenever a step
    fails to decrease the objective. Non-convergence is reported on the
    result, not raised, so mission statistics can count it.
    """
    measurements = (m1, m2, m3)
    anchors = np.asarray([(m.waypoint.position.x, m.waypoint.position.y) for m in measurements])
    dists = np.asarray([m.projected_ground for m in measurements])

    pts = [m.waypoint.position for m in measurements]
    for i in range(3):
        for j in range(i + 1, 3):
            if pts[i].x == pts[j].x and pts[i].y == pts[j].y:
                raise CollinearAnchorsError("two anchor projections coincide")
    if anchors_collinear(pts[0], pts[1], pts[2]):
        raise CollinearAnchorsError("anchor projections are collinear")

    if initial_guess is not None:
        x = np.asarray([initial_guess.x, initial_guess.y], dtype=float)
    else:
        x = _linear_initial_guess(anchors, dists)

    def residuals_at(pos: np.ndarray) -> np.ndarray:
        return dists - np.hypot(*(anchors - pos).T)

    lam = 0.0
    r = residuals_at(x)
    best_x, best_obj = x.copy(), float(r @ r)
    converged = False
    for _ in range(MAX_ITERATIONS):
        delta = anchors - x
        norms = np.maximum(np.hypot(delta[:, 0], delta[:, 1]), 1e-12)
        jac = delta / norms[:, None]  # d residual_i / d x
        grad = 2.0 * jac.T @ r
        if math.hypot(grad[0], grad[1]) <= GRADIENT_TOL:
            converged = True
            break
        stepped = False
        for _ in range(40):
            lhs = jac.T @ jac + lam * np.eye(2)
            try:
                step = np.linalg.solve(lhs, -jac.T @ r)
            except np.linalg.LinAlgError:
                lam = max(lam * 10.0, 1e-8)
                continue
            candidate = x + step
            r_new = residuals_at(candidate)
            if float(r_new @ r_new) <= best_obj + 1e-15:
                x, r = candidate, r_new
                lam = lam / 10.0 if lam > 1e-12 else 0.0
                stepped = True
                break
            lam = max(lam * 10.0, 1e-8)
        obj = float(r @ r)
        if obj < best_obj:
            best_obj, best_x = obj, x.copy()
        if not stepped:
            break

    r_best = residuals_at(best_x)
    return TrilaterationResult(
        estimate=GroundPoint(float(best_x[0]), float(best_x[1])),
        residuals=(float(r_best[0]), float(r_best[1]), float(r_best[2])),
        objective=float(r_best @ r_best),
        converged=converged,
    )


def star_vertex_distance(e_d: float, beta: float, same_signs: bool) -> float:
    """Distance from the truth to the star vertex of one extreme circle pair.

    When both ranges err in the same direction the vertex sits at
    e_d / sin(beta/2); with opposite signs it sits at e_d / cos(beta/2).
    """
    if e_d < 0:
        raise ValueError(f"ground error must be >= 0, got {e_d}")
    if not 0 <= beta < math.pi:
        raise ValueError(f"beta must lie in [0, pi), got {beta}")
    if same_signs:
        if beta == 0:
            raise ValueError("same-sign vertex is unbounded at beta = 0")
        return e_d / math.sin(beta / 2.0)
    return e_d / math.cos(beta / 2.0)


def trilateration_accuracy(
    profile: AccuracyProfile, h: float, d_min: float, beta_min: float
) -> float:
    """Worst-case position error of three-range least squares.

    The ground accuracy at the minimum allowed distance, amplified by the
    same-sign star vertex at the minimum anchor-line angle. Valid for
    beta_min in (0, pi/3]; it is minimized as beta_min approaches 60 degrees.
    """
    if not 0 < beta_min <= math.pi / 3 + 1e-12:
        raise ValueError(f"beta_min must lie in (0, pi/3], got {beta_min}")
    eps_d = bound_combined(profile, h, d_min).combined
    return eps_d / math.sin(beta_min / 2.0)


def check_lemma(geom: TriangleGeometry) -> bool:
    """sin(beta_min/2) <= cos(beta_max/2) for any three angles summing to pi.

    This is what makes the same-sign minimum-angle vertex the farthest one;
    exposed as a property-test oracle.
    """
    return math.sin(geom.beta_min / 2.0) <= math.cos(geom.beta_max / 2.0) + 1e-15
