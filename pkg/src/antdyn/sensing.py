"""Segmented vision and observation assembly.

The agent's surroundings are split into 8 angular sectors: five equal
sectors covering the forward span (default 180 deg, so 36 deg each) and
three equal sectors covering the rest (60 deg each by default). Bearings
are measured counter-clockwise from the heading:

    fl1 [54, 90)   fl2 [18, 54)   fc [-18, 18)   fr2 [-54, -18)   fr1 [-90, -54)
    l   [90, 150)  b [150, 180] u (-180, -150)   r [-150, -90)

Each channel reports a saturating count of ants within the vision radius:
min(count / n_norm, 1). The full observation is the 13-vector

    [x, y, s, theta, theta_dot, V_fl1, V_fl2, V_fc, V_fr2, V_fr1, V_r, V_b, V_l]

with x, y scaled by the frame resolution, s by v_max, theta by pi and
theta_dot by omega_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from .arena import AgentState, KinematicParams, wrap_angle
from .errors import ConfigError

OBS_SIZE = 13
OBS_FIELDS = ("x", "y", "s", "theta", "theta_dot",
              "v_fl1", "v_fl2", "v_fc", "v_fr2", "v_fr1", "v_r", "v_b", "v_l")


class Segment(IntEnum):
    """Vision sectors, in observation-channel order."""

    FL1 = 0
    FL2 = 1
    FC = 2
    FR2 = 3
    FR1 = 4
    R = 5
    B = 6
    L = 7


_FORWARD_ORDER = (Segment.FR1, Segment.FR2, Segment.FC, Segment.FL2, Segment.FL1)
_REAR_ORDER = (Segment.L, Segment.B, Segment.R)


@dataclass(frozen=True)
class VisionConfig:
    radius: float = 100.0      # px
    n_norm: int = 5            # saturation denominator
    forward_span: float = math.pi  # total forward aperture, radians

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError(f"vision radius must be > 0, got {self.radius}")
        if self.n_norm < 1:
            raise ConfigError(f"n_norm must be >= 1, got {self.n_norm}")
        if not 0.0 < self.forward_span < math.tau:
            raise ConfigError(f"forward_span must be in (0, 2*pi), got {self.forward_span}")


def segment_index(relative_bearing: float, forward_span: float = math.pi) -> Segment:
    """Map a relative bearing (rad, CCW from heading) to its vision sector.

    The forward span is split into five equal sectors, the remainder into
    three; every sector includes its clockwise edge. Every bearing maps to
    exactly one sector.
    """
    phi = wrap_angle(relative_bearing)
    half = forward_span / 2.0
    if -half <= phi < half:
        w = forward_span / 5.0
        if phi < -half + 2.0 * w:
            return Segment.FR1 if phi < -half + w else Segment.FR2
        if phi < half - 2.0 * w:
            return Segment.FC
        return Segment.FL2 if phi < half - w else Segment.FL1
    rear_w = (math.tau - forward_span) / 3.0
    if half <= phi < half + rear_w:
        return Segment.L
    if half + 2.0 * rear_w - math.tau <= phi < -half:
        return Segment.R
    return Segment.B


def sense_segments(agent: AgentState, other_positions: Iterable[Sequence[float]],
                   vision: VisionConfig) -> list[float]:
    """Count ants per sector within the vision radius; saturate at n_norm.

    Returns the 8 channels in observation order (fl1, fl2, fc, fr2, fr1,
    r, b, l), each in [0, 1]. Ants exactly at the radius are included; an
    ant exactly at the agent's position counts toward the centre sector.
    """
    counts = [0] * 8
    r = vision.radius
    for px, py in other_positions:
        dx = px - agent.x
        dy = py - agent.y
        if math.hypot(dx, dy) > r:
            continue
        if dx == 0.0 and dy == 0.0:
            seg = Segment.FC  # coincident ant: bearing defined as 0
        else:
            seg = segment_index(math.atan2(dy, dx) - agent.theta, vision.forward_span)
        counts[seg] += 1
    n = vision.n_norm
    return [min(c / n, 1.0) for c in counts]


def build_observation(agent: AgentState, other_positions: Iterable[Sequence[float]],
                      meta, kinematics: KinematicParams, vision: VisionConfig,
                      raw_pose: bool = False) -> np.ndarray:
    """Assemble the ordered 13-input observation vector.

    ``meta`` is the active recording metadata (supplies resolution_px).
    With raw_pose=True the five pose inputs are passed through unscaled;
    the vision channels are saturating counts either way.
    """
    v = sense_segments(agent, other_positions, vision)
    if raw_pose:
        pose = [agent.x, agent.y, agent.s, agent.theta, agent.theta_dot]
    else:
        res = meta.resolution_px
        pose = [agent.x / res, agent.y / res, agent.s / kinematics.v_max,
                agent.theta / math.pi, agent.theta_dot / kinematics.omega_max]
    return np.array(pose + v, dtype=np.float64)
