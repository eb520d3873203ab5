"""Thin episodic-RL adapter over the antdyn boundary interface.

The adapter adds no behaviour: observations, rewards and flags are exactly
the core's, crossing the boundary as flat lists and JSON. When gymnasium
is installed the env subclasses ``gymnasium.Env`` and can be registered as
``AntDynamics-v0``; without it the same class still provides the standard
reset/step five-tuple plus minimal space descriptors.

Action indices follow the core's listing: 0=forward, 1=backward,
2=turn-left, 3=turn-right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from antdyn import boundary

try:
    import gymnasium as _gym
    from gymnasium import spaces as _spaces
except ImportError:  # pragma: no cover - exercised on hosts without gymnasium
    _gym = None
    _spaces = None

ENV_ID = "AntDynamics-v0"

N_OBS = 13
N_ACTIONS = 4

# pose bounds then the 8 vision channels
_OBS_LOW = np.array([0.0, 0.0, -1.0, -1.0, -1.0] + [0.0] * 8, dtype=np.float64)
_OBS_HIGH = np.ones(N_OBS, dtype=np.float64)

# a registered env must work with no arguments: small deterministic colony
DEFAULT_SYNTHETIC = {"n_ants": 8, "duration_s": 60.0, "seed": 0}
DEFAULT_CONFIG = {"d_min": 64.0}


@dataclass
class _MiniBox:
    """Fallback observation-space descriptor when gymnasium is absent."""

    low: np.ndarray
    high: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return self.low.shape

    dtype = np.float64

    def contains(self, x) -> bool:
        arr = np.asarray(x, dtype=np.float64)
        return arr.shape == self.low.shape and bool(
            np.all(arr >= self.low) and np.all(arr <= self.high))


@dataclass
class _MiniDiscrete:
    """Fallback action-space descriptor when gymnasium is absent."""

    n: int

    def contains(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and 0 <= int(x) < self.n

    def sample(self) -> int:
        return int(np.random.default_rng().integers(self.n))


_EnvBase = _gym.Env if _gym is not None else object


class AntTrailEnv(_EnvBase):
    """Episodic trail-replication environment wrapping one core handle."""

    metadata = {"render_modes": []}

    def __init__(self, config: dict[str, Any] | None = None,
                 data: str | None = None,
                 synthetic: dict[str, Any] | None = None):
        payload = dict(DEFAULT_CONFIG if config is None else config)
        if data is not None:
            payload["data"] = data
        elif synthetic is not None:
            payload["synthetic"] = dict(synthetic)
        else:
            payload["synthetic"] = dict(DEFAULT_SYNTHETIC)
        self._handle: int | None = boundary.create(json.dumps(payload))
        if _spaces is not None:
            self.observation_space = _spaces.Box(low=_OBS_LOW, high=_OBS_HIGH,
                                                 dtype=np.float64)
            self.action_space = _spaces.Discrete(N_ACTIONS)
        else:
            self.observation_space = _MiniBox(_OBS_LOW, _OBS_HIGH)
            self.action_space = _MiniDiscrete(N_ACTIONS)

    def _require_handle(self) -> int:
        if self._handle is None:
            raise RuntimeError("environment is closed")
        return self._handle

    def reset(self, *, seed: int | None = None,
              options: dict[str, Any] | None = None) -> tuple[np.ndarray, dict]:
        if _gym is not None:
            super().reset(seed=seed)
        obs = boundary.reset(self._require_handle(), seed)
        return np.asarray(obs, dtype=np.float64), {}

    def step(self, action) -> tuple[np.ndarray, float, bool, bool, dict]:
        if isinstance(action, np.ndarray):
            action = action.item()
        if not isinstance(action, (int, np.integer)) or isinstance(action, bool):
            raise ValueError(f"action must be an integer in 0..{N_ACTIONS - 1}, got {action!r}")
        obs, reward, terminated, truncated, info_json = boundary.step(
            self._require_handle(), int(action))
        return (np.asarray(obs, dtype=np.float64), float(reward),
                bool(terminated), bool(truncated), json.loads(info_json))

    def close(self) -> None:
        if self._handle is not None:
            boundary.destroy(self._handle)
            self._handle = None


def register() -> None:
    """Register AntDynamics-v0 with gymnasium (idempotent). Raises when
    gymnasium is not installed."""
    if _gym is None:
        raise ImportError("gymnasium is not installed; pip install antdyn-gym[gym]")
    if ENV_ID not in _gym.registry:
        _gym.register(id=ENV_ID, entry_point="antdyn_gym.env:AntTrailEnv",
                      max_episode_steps=None)
