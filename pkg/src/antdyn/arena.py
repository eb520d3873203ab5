"""Agent kinematics and arena geometry.

The agent is a point with pose (x, y, theta) and first-order velocities
(s, theta_dot). Discrete actions drive exactly one control channel per
step; both channels are damped and clamped, so actions modulate the state
rather than teleporting it. The arena is a disc inscribed in the square
image: centre (r, r) and radius r = resolution_px / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import TYPE_CHECKING

from .errors import ConfigError

if TYPE_CHECKING:
    from .recording import RecordingMeta


class Action(IntEnum):
    FORWARD = 0
    BACKWARD = 1
    TURN_LEFT = 2
    TURN_RIGHT = 3


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(theta, math.tau)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class KinematicParams:
    """Motion-model parameters. Defaults reach v_max in ~0.5 s and turn a
    half-circle in ~1 s at the default arena scale (12.8 px/mm)."""

    dt: float = 0.1            # s
    v_max: float = 192.0       # px/s
    a_lin: float = 384.0       # px/s^2
    omega_max: float = math.pi # rad/s
    a_ang: float = math.tau    # rad/s^2
    damping: float = 0.9       # per-step velocity retention

    def __post_init__(self):
        for name in ("dt", "v_max", "a_lin", "omega_max", "a_ang"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"KinematicParams.{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.damping <= 1.0:
            raise ConfigError(f"KinematicParams.damping must be in [0, 1], got {self.damping}")


@dataclass(frozen=True)
class ArenaGeometry:
    """Disc inscribed in the square recording frame."""

    cx: float
    cy: float
    radius: float

    @classmethod
    def from_resolution(cls, resolution_px: float) -> "ArenaGeometry":
        r = resolution_px / 2.0
        return cls(r, r, r)

    def contains(self, x: float, y: float, slack: float = 1e-6) -> bool:
        return math.hypot(x - self.cx, y - self.cy) <= self.radius + slack

    def project_inside(self, x: float, y: float) -> tuple[float, float, bool]:
        """Radially project (x, y) onto the boundary circle if it lies outside.

        Returns (x, y, hit_boundary). The projected point is pulled a hair
        inside the circle so the disc invariant holds under float rounding.
        """
        dx = x - self.cx
        dy = y - self.cy
        d = math.hypot(dx, dy)
        if d <= self.radius:
            return x, y, False
        f = self.radius / d * (1.0 - 1e-12)
        return self.cx + dx * f, self.cy + dy * f, True


@dataclass(frozen=True)
class AgentState:
    """Controllable ant pose: position (px), signed speed (px/s), heading
    (rad, in (-pi, pi]), angular velocity (rad/s)."""

    x: float
    y: float
    s: float = 0.0
    theta: float = 0.0
    theta_dot: float = 0.0

    def validate(self, params: KinematicParams, geom: ArenaGeometry) -> None:
        if not geom.contains(self.x, self.y):
            raise ValueError(f"agent at ({self.x}, {self.y}) is outside the arena disc")
        if abs(self.s) > params.v_max * (1.0 + 1e-12):
            raise ValueError(f"|s|={abs(self.s)} exceeds v_max={params.v_max}")
        if abs(self.theta_dot) > params.omega_max * (1.0 + 1e-12):
            raise ValueError(f"|theta_dot|={abs(self.theta_dot)} exceeds omega_max={params.omega_max}")
        if not (-math.pi < self.theta <= math.pi):
            raise ValueError(f"theta={self.theta} not wrapped to (-pi, pi]")


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def apply_action(state: AgentState, action: Action, params: KinematicParams,
                 geom: ArenaGeometry) -> AgentState:
    """Advance the agent one step under a single discrete action.

    The chosen action drives one control channel (linear or angular) while
    the other channel only decays. Order of integration: velocities first,
    then heading, then position along the new heading. Leaving the disc
    projects the position back onto the boundary and zeroes the speed.
    """
    if action == Action.FORWARD:
        a_lin, a_ang = params.a_lin, 0.0
    elif action == Action.BACKWARD:
        a_lin, a_ang = -params.a_lin, 0.0
    elif action == Action.TURN_LEFT:
        a_lin, a_ang = 0.0, params.a_ang   # + is counter-clockwise
    elif action == Action.TURN_RIGHT:
        a_lin, a_ang = 0.0, -params.a_ang
    else:
        raise ValueError(f"unknown action: {action!r}")

    dt = params.dt
    s = _clamp(params.damping * state.s + a_lin * dt, -params.v_max, params.v_max)
    theta_dot = _clamp(params.damping * state.theta_dot + a_ang * dt,
                       -params.omega_max, params.omega_max)
    theta = wrap_angle(state.theta + theta_dot * dt)
    x = state.x + s * dt * math.cos(theta)
    y = state.y + s * dt * math.sin(theta)
    x, y, hit = geom.project_inside(x, y)
    if hit:
        s = 0.0
    return AgentState(x, y, s, theta, theta_dot)


def px_of_mm(value_mm: float, meta: "RecordingMeta") -> float:
    """Convert millimetres to pixels at the recording's scale."""
    return value_mm * meta.resolution_px / meta.arena_diameter_mm
