"""Trail-deviation measure and the saturating step penalty.

The per-step deviation A is the area spanned between the agent's segment
and the target's segment over one step: the sum of the absolute areas of
triangles (pa_prev, pa_cur, pt_cur) and (pa_prev, pt_cur, pt_prev). The
two-triangle sum is cancellation-free on self-intersecting ("bow-tie")
configurations and equals the quadrilateral area whenever the diagonal
pa_prev - pt_cur is interior.

Two penalty conventions are provided, both mapping u = kappa * A into
[-1, 0] via u / sqrt(1 + u^2):

    MONOTONE (default):  r = -u / sqrt(1 + u^2)      0 at alignment, -> -1
    LITERAL:             r = -(1 - u / sqrt(1 + u^2))  -1 at alignment, -> 0

MONOTONE rewards perfect trail alignment with 0 and grows more negative
with deviation; LITERAL keeps the offset form for fidelity experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import ConfigError

Point = Sequence[float]


class RewardMode(str, Enum):
    MONOTONE = "monotone"
    LITERAL = "literal"


@dataclass(frozen=True)
class RewardConfig:
    mode: RewardMode = RewardMode.MONOTONE
    kappa: float = 0.01  # area scale, 1/px^2; saturation half-point at 1/kappa

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be > 0, got {self.kappa}")
        if not isinstance(self.mode, RewardMode):
            object.__setattr__(self, "mode", RewardMode(self.mode))


@dataclass(frozen=True)
class TrailPair:
    """Two equal-length point sequences: agent trail and target trail."""

    agent: list[tuple[float, float]]
    target: list[tuple[float, float]]

    def __post_init__(self):
        if len(self.agent) != len(self.target):
            raise ValueError(
                f"trail lengths differ: agent {len(self.agent)} vs target {len(self.target)}")
        if len(self.agent) < 1:
            raise ValueError("trails must contain at least one point")


def _tri_area(a: Point, b: Point, c: Point) -> float:
    return 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def trail_area_step(pa_prev: Point, pa_cur: Point, pt_prev: Point, pt_cur: Point) -> float:
    """Area spanned between one agent step and one target step, in px^2.

    Zero iff the four points are collinear (degenerate configurations
    included); always non-negative.
    """
    return _tri_area(pa_prev, pa_cur, pt_cur) + _tri_area(pa_prev, pt_cur, pt_prev)


def step_penalty(area: float, config: RewardConfig) -> float:
    """Saturating per-step penalty in [-1, 0] for a non-negative area."""
    if area < 0.0:
        raise ValueError(f"area must be non-negative, got {area}")
    u = config.kappa * area
    core = u / math.sqrt(1.0 + u * u)
    if config.mode == RewardMode.MONOTONE:
        return -core
    return core - 1.0


def episode_reward(trails: TrailPair, config: RewardConfig) -> float:
    """Sum of step penalties over t = 1..T for trails of T+1 points."""
    total = 0.0
    pa, pt = trails.agent, trails.target
    for t in range(1, len(pa)):
        total += step_penalty(trail_area_step(pa[t - 1], pa[t], pt[t - 1], pt[t]), config)
    return total
