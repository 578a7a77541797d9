"""Exact geometric primitives for drone-anchor localization.

Points live on the 2D ground plane; the drone flies at a fixed altitude, so a
waypoint is a ground position plus a height. All functions here are pure and
operate on exact geometry (no measurement noise, no linearization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

# A waypoint triple whose minimum line angle at the target falls below this is
# treated as collinear and unusable for trilateration.
COLLINEAR_BETA_MIN = 1e-3  # radians

ANGLE_SUM_TOL = 1e-9  # absolute tolerance on beta angles summing to pi


@dataclass(frozen=True)
class GroundPoint:
    """A 2D position on the ground plane, in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"ground point coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: "GroundPoint") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Waypoint:
    """A scheduled drone broadcast position: ground projection plus altitude.

    ``scan_line`` identifies the straight scan segment the waypoint belongs to
    (None for path stretches that are not part of a scan line, e.g. the legs
    connecting scans).
    """

    position: GroundPoint
    altitude: float
    id: int
    scan_line: int | None = None

    def __post_init__(self) -> None:
        if self.altitude < 0:
            raise ValueError(f"waypoint altitude must be >= 0, got {self.altitude}")


@dataclass(frozen=True)
class TriangleGeometry:
    """The three angles that the lines from a target to three anchors cut at
    the target, sorted ascending. They always sum to pi (lines, not rays)."""

    beta: tuple[float, float, float]

    def __post_init__(self) -> None:
        b = self.beta
        if any(x < 0 or x >= math.pi for x in b):
            raise ValueError(f"each angle must lie in [0, pi), got {b}")
        if not (b[0] <= b[1] <= b[2]):
            raise ValueError(f"angles must be sorted ascending, got {b}")
        if abs(sum(b) - math.pi) > ANGLE_SUM_TOL:
            raise ValueError(f"angles must sum to pi, got sum {sum(b)!r}")

    @property
    def beta_min(self) -> float:
        return self.beta[0]

    @property
    def beta_max(self) -> float:
        return self.beta[2]

    @property
    def collinear(self) -> bool:
        """True when some pair of anchor directions degenerates to one line."""
        return self.beta[0] < COLLINEAR_BETA_MIN


class GroundProjection(NamedTuple):
    """Result of projecting a slant range onto the ground plane."""

    distance: float
    clamped: bool


def ground_distance(w: Waypoint, p: GroundPoint) -> float:
    """Distance from ``p`` to the waypoint's ground projection."""
    return w.position.distance_to(p)


def slant_distance(w: Waypoint, p: GroundPoint) -> float:
    """3D distance from the waypoint to the ground point."""
    return math.hypot(ground_distance(w, p), w.altitude)


def elevation_angle(h: float, d: float) -> float:
    """Angle between the ground plane and the drone-target line, in [0, pi/2].

    ``d`` is the ground distance and ``h`` the altitude; the drone directly
    overhead (d = 0) gives pi/2. Both zero is undefined.
    """
    if h < 0 or d < 0:
        raise ValueError(f"altitude and ground distance must be >= 0, got h={h}, d={d}")
    if h == 0 and d == 0:
        raise ValueError("elevation angle is undefined for h = d = 0")
    return math.atan2(h, d)


def project_slant_to_ground(s_measured: float, h: float) -> GroundProjection:
    """Invert the slant from altitude ``h`` back to a ground distance.

    Uses the exact inverse sqrt(s'^2 - h^2). A measurement shorter than the
    altitude has no real projection; it clamps to 0 with ``clamped`` set so
    that callers can discard it.
    """
    if s_measured < 0:
        raise ValueError(f"slant measurement must be >= 0, got {s_measured}")
    if h < 0:
        raise ValueError(f"altitude must be >= 0, got {h}")
    if s_measured < h:
        return GroundProjection(0.0, True)
    return GroundProjection(math.sqrt(max(s_measured * s_measured - h * h, 0.0)), False)


def beta_angles(p: GroundPoint, w1: GroundPoint, w2: GroundPoint, w3: GroundPoint) -> TriangleGeometry:
    """Angles between the three lines through ``p`` and each anchor.

    Line orientations are taken modulo pi, so the three gaps always sum to pi
    regardless of which side of ``p`` an anchor lies on.
    """
    anchors = (w1, w2, w3)
    for w in anchors:
        if w.x == p.x and w.y == p.y:
            raise ValueError("target coincides with an anchor; angles are undefined")
    for i in range(3):
        for j in range(i + 1, 3):
            if anchors[i].x == anchors[j].x and anchors[i].y == anchors[j].y:
                raise ValueError("two anchors coincide; angles are undefined")

    phi = sorted(math.atan2(w.y - p.y, w.x - p.x) % math.pi for w in anchors)
    gaps = [phi[1] - phi[0], phi[2] - phi[1], math.pi - (phi[2] - phi[0])]
    gaps.sort()
    # Guard against rounding pushing a gap infinitesimally outside [0, pi).
    b0 = min(max(gaps[0], 0.0), math.pi)
    b1 = gaps[1]
    b2 = math.pi - b0 - b1
    ordered = tuple(sorted((b0, b1, b2)))
    return TriangleGeometry(ordered)  # type: ignore[arg-type]


def anchors_collinear(w1: GroundPoint, w2: GroundPoint, w3: GroundPoint) -> bool:
    """True when three anchor points are (nearly) on one straight line.

    The test compares the smallest angle of the anchor triangle against the
    collinearity threshold, which is scale invariant.
    """
    a = w1.distance_to(w2)
    b = w2.distance_to(w3)
    c = w3.distance_to(w1)
    if a == 0.0 or b == 0.0 or c == 0.0:
        return True
    # Smallest interior angle is opposite the shortest side.
    sides = sorted((a, b, c))
    cos_small = (sides[1] ** 2 + sides[2] ** 2 - sides[0] ** 2) / (2 * sides[1] * sides[2])
    cos_small = min(1.0, max(-1.0, cos_small))
    return math.acos(cos_small) < COLLINEAR_BETA_MIN
