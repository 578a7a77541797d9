"""Air-to-ground link feasibility.

UWB ranging works through obstructions at short range but needs line of sight
beyond that. Whether a link at a given elevation is in LoS is probabilistic
and depends on how built-up the environment is; the probabilities come from a
published table keyed by the altitude/ground-distance ratio.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class Environment(enum.Enum):
    SUB_URBAN = "sub-urban"
    URBAN = "urban"
    DENSE = "dense"
    HIGHRISE = "highrise"


# Rows: h/d ratio threshold -> P(LoS) per environment. The lookup is a step
# function on the largest threshold <= h/d; anything at or above the top row
# is fully LoS in every environment. The table is coarse on purpose: smoothing
# it would invent data the source model does not give.
_LOS_TABLE: list[tuple[float, dict[Environment, float]]] = [
    (1.0 / 3.0, {Environment.SUB_URBAN: 1.00, Environment.URBAN: 0.40,
                 Environment.DENSE: 0.20, Environment.HIGHRISE: 0.00}),
    (1.0 / 2.0, {Environment.SUB_URBAN: 1.00, Environment.URBAN: 0.75,
                 Environment.DENSE: 0.30, Environment.HIGHRISE: 0.05}),
    (1.0, {Environment.SUB_URBAN: 1.00, Environment.URBAN: 0.97,
           Environment.DENSE: 0.85, Environment.HIGHRISE: 0.30}),
    (math.sqrt(3.0), {Environment.SUB_URBAN: 1.00, Environment.URBAN: 1.00,
                      Environment.DENSE: 1.00, Environment.HIGHRISE: 0.60}),
    (5.67, {Environment.SUB_URBAN: 1.00, Environment.URBAN: 1.00,
            Environment.DENSE: 1.00, Environment.HIGHRISE: 1.00}),
]

LOS_TABLE_RATIOS = tuple(ratio for ratio, _ in _LOS_TABLE)


@dataclass(frozen=True)
class LinkBudget:
    """Point-to-point UWB ranges: ``nlos_range`` works regardless of LoS,
    ``los_range`` is the ceiling when the link is in LoS."""

    los_range: float = 60.0
    nlos_range: float = 35.0

    def __post_init__(self) -> None:
        if not self.los_range >= self.nlos_range > 0:
            raise ValueError(
                f"need los_range >= nlos_range > 0, got {self.los_range}, {self.nlos_range}"
            )


def los_probability(env: Environment, h_over_d: float) -> float:
    """Probability that the air-to-ground link is in line of sight.

    Below the smallest tabulated ratio links are mixed and may or may not
    work; we answer with the smallest row's probability (which is already 0
    for highrise) rather than inventing a separate state.
    """
    if h_over_d < 0:
        raise ValueError(f"h/d ratio must be >= 0, got {h_over_d}")
    chosen = _LOS_TABLE[0][1]
    for ratio, row in _LOS_TABLE:
        if h_over_d >= ratio:
            chosen = row
        else:
            break
    return chosen[env]


def los_probability_batch(env: Environment, ratios: np.ndarray) -> np.ndarray:
    """Vectorized :func:`los_probability` over an array of h/d ratios."""
    ratios = np.asarray(ratios, dtype=float)
    if np.any(ratios < 0):
        raise ValueError("h/d ratios must be >= 0")
    values = np.asarray([row[env] for _, row in _LOS_TABLE])
    idx = np.searchsorted(LOS_TABLE_RATIOS, ratios, side="right") - 1
    return values[np.clip(idx, 0, len(values) - 1)]


def link_up(
    env: Environment,
    budget: LinkBudget,
    slant: float,
    h_over_d: float,
    rng: np.random.Generator,
) -> bool:
    """Whether a ranging exchange succeeds at the given slant distance.

    Within the NLoS range the link always works. Between the NLoS and LoS
    ranges it works only if the LoS draw succeeds; beyond the LoS range it
    never does. Exactly one uniform is consumed per call so seeded streams
    stay aligned regardless of the branch taken.
    """
    u = float(rng.random())
    return link_up_given(env, budget, slant, h_over_d, u)


def link_up_given(
    env: Environment, budget: LinkBudget, slant: float, h_over_d: float, u: float
) -> bool:
    """Deterministic core of :func:`link_up` for a fixed uniform draw ``u``."""
    if slant < 0:
        raise ValueError(f"slant distance must be >= 0, got {slant}")
    if slant <= budget.nlos_range:
        return True
    if slant > budget.los_range:
        return False
    return u < los_probability(env, h_over_d)
