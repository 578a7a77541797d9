"""Measurement-error models: ground-error bounds and the noise sampler.

Three independent hardware accuracies drive everything: the ranging chip
(instrumental, eps_s), the horizontal drift of the drone (rolling, gamma_d)
and its vertical drift (altitude, gamma_h). Each accuracy is the maximum
absolute error of its component. The closed-form bounds here give the largest
error the slant-to-ground projection can suffer; the sampler draws
perturbations inside the same supports so that Monte Carlo runs can be checked
against the bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GroundPoint, Waypoint, slant_distance

DISTRIBUTIONS = ("uniform", "truncated-gaussian")

# For the truncated-gaussian option the accuracy maximum is placed at three
# standard deviations, so the truncation removes ~0.3% of the mass.
_TRUNC_SIGMAS = 3.0


@dataclass(frozen=True)
class AccuracyProfile:
    """Maximum absolute errors of the three independent hardware components."""

    eps_s: float
    gamma_d: float
    gamma_h: float

    def __post_init__(self) -> None:
        if self.eps_s < 0 or self.gamma_d < 0 or self.gamma_h < 0:
            raise ValueError(f"accuracies must be >= 0, got {self}")


@dataclass(frozen=True)
class NoiseSample:
    """One joint draw of the three perturbations.

    The roll angle is measured from the bearing waypoint-to-target, so 0 rolls
    the drone toward the target and pi away from it.
    """

    e_s: float
    roll_angle: float
    roll_radius: float
    e_h: float

    def __post_init__(self) -> None:
        if self.roll_radius < 0:
            raise ValueError(f"roll radius must be >= 0, got {self.roll_radius}")
        if not 0 <= self.roll_angle < 2 * math.pi:
            raise ValueError(f"roll angle must lie in [0, 2*pi), got {self.roll_angle}")


@dataclass(frozen=True)
class GroundErrorBound:
    """Worst-case ground error split by component; ``combined`` is their sum."""

    instrumental: float
    rolling: float
    altitude: float
    combined: float

    def __post_init__(self) -> None:
        parts = self.instrumental + self.rolling + self.altitude
        if abs(self.combined - parts) > 1e-9 * max(1.0, parts):
            raise ValueError("combined bound must equal the sum of its components")


def bound_instrumental(eps_s: float, h: float, d: float) -> float:
    """Worst ground error from ranging error alone: eps_s / cos(elevation).

    Diverges as d -> 0 (drone overhead), so d must be positive.
    """
    if eps_s < 0:
        raise ValueError(f"eps_s must be >= 0, got {eps_s}")
    if d <= 0:
        raise ValueError(f"ground distance must be > 0, got {d}")
    return eps_s * math.sqrt(1.0 + (h * h) / (d * d))


def bound_rolling(gamma_d: float) -> float:
    """Worst ground error from horizontal drift: the drift radius itself.

    Valid in the regime gamma_d << d, where the slant change projects to the
    ground without amplification.
    """
    if gamma_d < 0:
        raise ValueError(f"gamma_d must be >= 0, got {gamma_d}")
    return gamma_d


def bound_altitude(gamma_h: float, h: float, d: float) -> float:
    """Worst ground error from vertical drift: gamma_h scaled by h/d."""
    if gamma_h < 0:
        raise ValueError(f"gamma_h must be >= 0, got {gamma_h}")
    if d <= 0:
        raise ValueError(f"ground distance must be > 0, got {d}")
    return gamma_h * h / d


def bound_combined(profile: AccuracyProfile, h: float, d: float) -> GroundErrorBound:
    """Component-wise worst-case ground error at altitude ``h``, distance ``d``.

    The components are derived independently and added linearly; evaluating at
    the minimum allowed ground distance gives the mission-wide ground accuracy.
    """
    instrumental = bound_instrumental(profile.eps_s, h, d)
    rolling = bound_rolling(profile.gamma_d)
    altitude = bound_altitude(profile.gamma_h, h, d)
    return GroundErrorBound(
        instrumental=instrumental,
        rolling=rolling,
        altitude=altitude,
        combined=instrumental + rolling + altitude,
    )


def _noise_from_uniforms(
    u: np.ndarray, profile: AccuracyProfile, distribution: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Map uniform draws of shape (..., 4) to (e_s, psi, radius, e_h).

    Keeping the mapping a pure function of the uniforms makes the draw count
    independent of the distribution choice, which keeps seeded streams aligned.
    """
    if distribution not in DISTRIBUTIONS:
        raise ValueError(f"distribution must be one of {DISTRIBUTIONS}, got {distribution!r}")
    u0, u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2], u[..., 3]
    psi = 2 * math.pi * u1
    if distribution == "uniform":
        e_s = (2 * u0 - 1) * profile.eps_s
        radius = np.sqrt(u2) * profile.gamma_d
        e_h = (2 * u3 - 1) * profile.gamma_h
    else:
        from scipy.stats import truncnorm

        def trunc_sym(uu: np.ndarray, bound: float) -> np.ndarray:
            if bound == 0:
                return np.zeros_like(uu)
            sigma = bound / _TRUNC_SIGMAS
            return truncnorm.ppf(uu, -_TRUNC_SIGMAS, _TRUNC_SIGMAS) * sigma

        e_s = trunc_sym(u0, profile.eps_s)
        e_h = trunc_sym(u3, profile.gamma_h)
        if profile.gamma_d == 0:
            radius = np.zeros_like(u2)
        else:
            # Radial inverse CDF of a 2D isotropic Gaussian truncated at the
            # drift radius.
            sigma = profile.gamma_d / _TRUNC_SIGMAS
            mass = 1.0 - math.exp(-(profile.gamma_d**2) / (2 * sigma * sigma))
            radius = sigma * np.sqrt(-2.0 * np.log1p(-u2 * mass))
    return e_s, psi, radius, e_h


def sample_noise(
    profile: AccuracyProfile,
    rng: np.random.Generator,
    distribution: str = "uniform",
) -> NoiseSample:
    """Draw one joint perturbation from the given seeded generator.

    The default draws e_s and e_h uniformly on their supports and the drone
    drift uniformly on the disk of radius gamma_d (angle uniform, radius
    sqrt(U)-scaled). ``truncated-gaussian`` concentrates mass near zero
    instead, for sensitivity studies.
    """
    e_s, psi, radius, e_h = _noise_from_uniforms(rng.random(4), profile, distribution)
    return NoiseSample(float(e_s), float(psi), float(radius), float(e_h))


def measure(w: Waypoint, p: GroundPoint, noise: NoiseSample) -> float:
    """Slant distance as measured from the perturbed drone position.

    The drone actually sits at the scheduled waypoint shifted by the roll
    vector and the altitude error; the ranging error e_s is then added to the
    true 3D distance from that perturbed position. Never negative.
    """
    d = w.position.distance_to(p)
    if d > 0:
        ux, uy = (p.x - w.position.x) / d, (p.y - w.position.y) / d
    else:
        ux, uy = 1.0, 0.0  # direction is irrelevant when the target is underneath
    cos_a, sin_a = math.cos(noise.roll_angle), math.sin(noise.roll_angle)
    dx = noise.roll_radius * (cos_a * ux - sin_a * uy)
    dy = noise.roll_radius * (cos_a * uy + sin_a * ux)
    actual_x = w.position.x + dx
    actual_y = w.position.y + dy
    actual_h = w.altitude + noise.e_h
    dist = math.sqrt((actual_x - p.x) ** 2 + (actual_y - p.y) ** 2 + actual_h**2)
    return max(dist + noise.e_s, 0.0)


def measure_batch(
    wp_xy: np.ndarray,
    altitudes: np.ndarray,
    target: GroundPoint,
    e_s: np.ndarray,
    psi: np.ndarray,
    radius: np.ndarray,
    e_h: np.ndarray,
) -> np.ndarray:
    """Vectorized :func:`measure` over many waypoints for one target.

    ``wp_xy`` is (n, 2); the remaining arrays are (n,). Matches the scalar
    function exactly, including the roll-angle frame anchored at the bearing
    toward the target.
    """
    delta = np.asarray([target.x, target.y]) - wp_xy
    d = np.hypot(delta[:, 0], delta[:, 1])
    safe = d > 0
    ux = np.where(safe, np.divide(delta[:, 0], d, out=np.ones_like(d), where=safe), 1.0)
    uy = np.where(safe, np.divide(delta[:, 1], d, out=np.zeros_like(d), where=safe), 0.0)
    cos_a, sin_a = np.cos(psi), np.sin(psi)
    dx = radius * (cos_a * ux - sin_a * uy)
    dy = radius * (cos_a * uy + sin_a * ux)
    gx = wp_xy[:, 0] + dx - target.x
    gy = wp_xy[:, 1] + dy - target.y
    dist = np.sqrt(gx * gx + gy * gy + (altitudes + e_h) ** 2)
    return np.maximum(dist + e_s, 0.0)


def noiseless(w: Waypoint, p: GroundPoint) -> float:
    """Exact slant distance, i.e. ``measure`` with a null perturbation."""
    return slant_distance(w, p)
