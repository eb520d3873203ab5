"""Episode orchestration: reset, step, termination, deterministic seeding.

An episode replays a colony recording for a fixed horizon of
T = t_lim_s / dt steps. At reset a target ant window is drawn (uniformly
over all windows moving at least d_min) from a PRNG derived solely from
the seed; the agent starts exactly on the target's first position, heading
along its initial motion. Each step advances the replayed colony by dt,
applies the agent's action, extends both trails and scores the new
trail segment pair. Episodes never terminate early: ``terminated`` is
always False and ``truncated`` flips at step T.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .arena import Action, AgentState, ArenaGeometry, KinematicParams, apply_action, wrap_angle
from .errors import ConfigError
from .recording import ColonyRecording, RecordingMeta, TargetSelection, is_on_grid, resample, select_target
from .reward import RewardConfig, RewardMode, step_penalty, trail_area_step
from .sensing import VisionConfig, build_observation

INFO_KEYS = ("area_t", "target_x", "target_y", "dist_to_target")


@dataclass(frozen=True)
class EnvConfig:
    meta: RecordingMeta = field(default_factory=RecordingMeta)
    kinematics: KinematicParams = field(default_factory=KinematicParams)
    vision: VisionConfig = field(default_factory=VisionConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    t_lim_s: float = 30.0
    d_min: float = 128.0    # px; 10 mm at the default 12.8 px/mm scale
    show_target: bool = False
    seed: int = 0
    raw_pose: bool = False  # pass pose inputs through unscaled

    def __post_init__(self):
        if not self.t_lim_s > 0:
            raise ConfigError(f"t_lim_s must be > 0, got {self.t_lim_s}")
        if self.d_min < 0:
            raise ConfigError(f"d_min must be >= 0, got {self.d_min}")
        steps = self.t_lim_s / self.kinematics.dt
        if abs(steps - round(steps)) > 1e-6:
            raise ConfigError(
                f"t_lim_s={self.t_lim_s} is not a whole number of dt={self.kinematics.dt} steps")

    @property
    def horizon(self) -> int:
        """Episode length T in steps."""
        return int(round(self.t_lim_s / self.kinematics.dt))

    def to_dict(self) -> dict[str, Any]:
        return {
            "meta": {
                "arena_diameter_mm": self.meta.arena_diameter_mm,
                "resolution_px": self.meta.resolution_px,
                "sample_rate_hz": self.meta.sample_rate_hz,
            },
            "kinematics": {
                "dt": self.kinematics.dt,
                "v_max": self.kinematics.v_max,
                "a_lin": self.kinematics.a_lin,
                "omega_max": self.kinematics.omega_max,
                "a_ang": self.kinematics.a_ang,
                "damping": self.kinematics.damping,
            },
            "vision": {
                "radius": self.vision.radius,
                "n_norm": self.vision.n_norm,
                "forward_span": self.vision.forward_span,
            },
            "reward": {
                "reward_mode": self.reward.mode.value,
                "kappa": self.reward.kappa,
            },
            "t_lim_s": self.t_lim_s,
            "d_min": self.d_min,
            "show_target": self.show_target,
            "seed": self.seed,
            "raw_pose": self.raw_pose,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EnvConfig":
        """Build a config from a (possibly partial) dict; unknown keys are
        rejected so typos do not silently fall back to defaults."""

        def take(section: dict, allowed: dict[str, type]) -> dict:
            unknown = set(section) - set(allowed)
            if unknown:
                raise ConfigError(f"unknown config keys: {sorted(unknown)}")
            return section

        top = take(dict(data), {
            "meta": dict, "kinematics": dict, "vision": dict, "reward": dict,
            "t_lim_s": float, "d_min": float, "show_target": bool, "seed": int,
            "raw_pose": bool,
        })
        kwargs: dict[str, Any] = {}
        try:
            if "meta" in top:
                kwargs["meta"] = RecordingMeta(**take(top["meta"], {
                    "arena_diameter_mm": float, "resolution_px": int, "sample_rate_hz": float}))
            if "kinematics" in top:
                kwargs["kinematics"] = KinematicParams(**take(top["kinematics"], {
                    "dt": float, "v_max": float, "a_lin": float, "omega_max": float,
                    "a_ang": float, "damping": float}))
            if "vision" in top:
                kwargs["vision"] = VisionConfig(**take(top["vision"], {
                    "radius": float, "n_norm": int, "forward_span": float}))
            if "reward" in top:
                r = take(top["reward"], {"reward_mode": str, "kappa": float})
                rkw = {}
                if "reward_mode" in r:
                    try:
                        rkw["mode"] = RewardMode(r["reward_mode"])
                    except ValueError as e:
                        raise ConfigError(f"unknown reward_mode: {r['reward_mode']!r}") from e
                if "kappa" in r:
                    rkw["kappa"] = r["kappa"]
                kwargs["reward"] = RewardConfig(**rkw)
            for key in ("t_lim_s", "d_min", "show_target", "seed", "raw_pose"):
                if key in top:
                    kwargs[key] = top[key]
            return cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"bad config value: {e}") from e

    @classmethod
    def from_json(cls, path: str | Path) -> "EnvConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        except OSError as e:
            raise ConfigError(f"{path}: {e}") from e
        return cls.from_dict(data)


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    terminated: bool   # never True: the environment has no failure states
    truncated: bool
    info: dict[str, Any]


@dataclass
class EpisodeState:
    """Mutable per-episode state. Single-threaded; distinct episodes over the
    same recording may run in parallel."""

    config: EnvConfig
    meta: RecordingMeta             # effective metadata (from the recording)
    target: TargetSelection
    agent: AgentState
    step_index: int
    horizon: int
    agent_trail: list[tuple[float, float]]
    target_trail: list[tuple[float, float]]
    cumulative_reward: float
    geometry: ArenaGeometry
    # replayed positions per step: list over visible ants of (ant_id, [(x, y)] * (T+1))
    replay: list[tuple[int, list[tuple[float, float]]]]
    frozen_ants: list[int]          # ants whose recordings do not span the window

    @property
    def truncated(self) -> bool:
        return self.step_index >= self.horizon

    def others_at(self, k: int) -> list[tuple[float, float]]:
        return [track[k] for _, track in self.replay]


def _initial_heading(trail: np.ndarray) -> float:
    dx = float(trail[1, 1] - trail[0, 1])
    dy = float(trail[1, 2] - trail[0, 2])
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return wrap_angle(math.atan2(dy, dx))


def _observe(ep: EpisodeState, k: int) -> np.ndarray:
    return build_observation(ep.agent, ep.others_at(k), ep.meta, ep.config.kinematics,
                             ep.config.vision, raw_pose=ep.config.raw_pose)


def reset(config: EnvConfig, recording: ColonyRecording,
          seed: int | None = None) -> tuple[EpisodeState, np.ndarray]:
    """Start an episode: resample the recording to dt, draw a target window
    with a PRNG derived solely from the seed, and place the agent on the
    target's first position heading along its initial motion."""
    if seed is None:
        seed = config.seed
    dt = config.kinematics.dt
    if not is_on_grid(recording, dt):
        recording = resample(recording, dt)
    rng = np.random.default_rng(seed)
    target = select_target(recording, config.t_lim_s, config.d_min, rng)

    horizon = config.horizon
    trail = target.trail
    start = np.array([trail[0, 1], trail[0, 2]])
    agent = AgentState(x=float(start[0]), y=float(start[1]), s=0.0,
                       theta=_initial_heading(trail), theta_dot=0.0)

    window_t = trail[:, 0]
    replay: list[tuple[int, list[tuple[float, float]]]] = []
    frozen: list[int] = []
    for ant_id in recording.ant_ids:
        if ant_id == target.ant_id and not config.show_target:
            continue
        if ant_id == target.ant_id:
            track = [(float(x), float(y)) for x, y in trail[:, 1:3]]
        else:
            series = recording.ants[ant_id]
            if window_t[0] < series[0, 0] - 1e-9 or window_t[-1] > series[-1, 0] + 1e-9:
                frozen.append(ant_id)  # clamped to its first/last position outside its span
            xs = np.interp(window_t, series[:, 0], series[:, 1])
            ys = np.interp(window_t, series[:, 0], series[:, 2])
            track = list(zip(xs.tolist(), ys.tolist()))
        replay.append((ant_id, track))

    ep = EpisodeState(
        config=config,
        meta=recording.meta,
        target=target,
        agent=agent,
        step_index=0,
        horizon=horizon,
        agent_trail=[(agent.x, agent.y)],
        target_trail=[(float(start[0]), float(start[1]))],
        cumulative_reward=0.0,
        geometry=recording.meta.geometry(),
        replay=replay,
        frozen_ants=frozen,
    )
    return ep, _observe(ep, 0)


def _advance(ep: EpisodeState, new_agent: AgentState) -> StepResult:
    k = ep.step_index + 1
    ep.agent = new_agent
    pa_prev = ep.agent_trail[-1]
    pt_prev = ep.target_trail[-1]
    pa = (new_agent.x, new_agent.y)
    pt = (float(ep.target.trail[k, 1]), float(ep.target.trail[k, 2]))
    ep.agent_trail.append(pa)
    ep.target_trail.append(pt)

    area = trail_area_step(pa_prev, pa, pt_prev, pt)
    r = step_penalty(area, ep.config.reward)
    ep.cumulative_reward += r
    ep.step_index = k

    obs = _observe(ep, k)
    info: dict[str, Any] = {
        "area_t": area,
        "target_x": pt[0],
        "target_y": pt[1],
        "dist_to_target": math.hypot(pa[0] - pt[0], pa[1] - pt[1]),
    }
    if ep.frozen_ants:
        info["frozen_ants"] = list(ep.frozen_ants)
    return StepResult(observation=obs, reward=r, terminated=False,
                      truncated=(k >= ep.horizon), info=info)


def step(ep: EpisodeState, action: Action | int) -> StepResult:
    """Advance one step: replayed ants move to their recorded positions, the
    action drives the agent, trails extend, and the new segment pair is
    scored."""
    if ep.truncated:
        raise RuntimeError("episode already truncated; call reset() for a new one")
    new_agent = apply_action(ep.agent, Action(action), ep.config.kinematics, ep.geometry)
    return _advance(ep, new_agent)


def replay_step(ep: EpisodeState) -> StepResult:
    """Debug oracle: teleport the agent onto the target trail, bypassing
    kinematics. Perfect alignment by construction."""
    if ep.truncated:
        raise RuntimeError("episode already truncated; call reset() for a new one")
    k = ep.step_index + 1
    x = float(ep.target.trail[k, 1])
    y = float(ep.target.trail[k, 2])
    prev = ep.agent_trail[-1]
    dt = ep.config.kinematics.dt
    heading = math.atan2(y - prev[1], x - prev[0]) if (x, y) != prev else ep.agent.theta
    # keep the pose invariants intact even though kinematics are bypassed
    speed = min(math.hypot(x - prev[0], y - prev[1]) / dt, ep.config.kinematics.v_max)
    new_agent = AgentState(x=x, y=y, s=speed, theta=wrap_angle(heading),
                           theta_dot=0.0)
    return _advance(ep, new_agent)
