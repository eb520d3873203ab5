"""Handle-based boundary functions for foreign adapters.

The surface is deliberately flat so that thin wrappers in other runtimes
can sit on top without touching package internals: configuration crosses
as a JSON string, observations as plain float lists, step results as a
(obs, reward, terminated, truncated, info_json) tuple.

The config JSON accepts every EnvConfig field plus exactly one data
source::

    {"data": "path/to/bundle", ...env fields...}
    {"synthetic": {"n_ants": 10, "duration_s": 60, "seed": 7, ...}, ...}

Handles are process-local integers. Each handle is single-threaded;
distinct handles are independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .env import EnvConfig, EpisodeState, reset as env_reset, step as env_step
from .errors import ConfigError
from .recording import ColonyRecording, SyntheticParams, gen_synthetic, is_on_grid, load_recording, resample

_registry: dict[int, "_Instance"] = {}
_next_handle = 1


@dataclass
class _Instance:
    config: EnvConfig
    recording: ColonyRecording
    episode: EpisodeState | None = None


def create(config_json: str) -> int:
    """Build an environment instance from a JSON config string; returns a
    handle for use with reset/step/destroy."""
    global _next_handle
    try:
        raw = json.loads(config_json)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config JSON must be an object")

    data_path = raw.pop("data", None)
    synthetic = raw.pop("synthetic", None)
    if (data_path is None) == (synthetic is None):
        raise ConfigError("config must name exactly one data source: 'data' or 'synthetic'")

    config = EnvConfig.from_dict(raw)
    if data_path is not None:
        recording = load_recording(data_path)
    else:
        synth = dict(synthetic)
        seed = synth.pop("seed", 0)
        try:
            params = SyntheticParams(**synth)
        except TypeError as e:
            raise ConfigError(f"bad synthetic params: {e}") from e
        recording = gen_synthetic(params, np.random.default_rng(seed))
    if not is_on_grid(recording, config.kinematics.dt):
        recording = resample(recording, config.kinematics.dt)

    handle = _next_handle
    _next_handle += 1
    _registry[handle] = _Instance(config=config, recording=recording)
    return handle


def _instance(handle: int) -> _Instance:
    inst = _registry.get(handle)
    if inst is None:
        raise ConfigError(f"unknown or destroyed environment handle: {handle}")
    return inst


def reset(handle: int, seed: int | None = None) -> list[float]:
    """Start a new episode; returns the 13-value observation."""
    inst = _instance(handle)
    inst.episode, obs = env_reset(inst.config, inst.recording, seed)
    return obs.tolist()


def step(handle: int, action: int) -> tuple[list[float], float, bool, bool, str]:
    """Advance one step; returns (obs, reward, terminated, truncated, info_json)."""
    inst = _instance(handle)
    if inst.episode is None:
        raise RuntimeError("reset() must be called before step()")
    if not isinstance(action, (int, np.integer)) or isinstance(action, bool):
        raise ValueError(f"action must be an integer in 0..3, got {action!r}")
    if not 0 <= int(action) <= 3:
        raise ValueError(f"action {action} out of range: valid actions are 0..3")
    result = env_step(inst.episode, int(action))
    info = {k: (v if not isinstance(v, float) or math.isfinite(v) else None)
            for k, v in result.info.items()}
    return (result.observation.tolist(), result.reward, result.terminated,
            result.truncated, json.dumps(info))


def destroy(handle: int) -> None:
    """Release a handle; further use raises."""
    if handle not in _registry:
        raise ConfigError(f"unknown or destroyed environment handle: {handle}")
    del _registry[handle]
