"""antdyn: deterministic ant-colony trail-replication simulator.

Replays recorded colony trajectories, exposes one controllable agent with
segmented vision and four discrete actions, scores it by a saturating
trail-deviation penalty, and ships a small neuroevolution harness plus CLI
tooling for synthesis, validation, simulation and rendering.
"""

from .arena import Action, AgentState, ArenaGeometry, KinematicParams, apply_action, px_of_mm, wrap_angle
from .env import EnvConfig, EpisodeState, StepResult, replay_step, reset, step
from .errors import AntdynError, ConfigError, DataError, NoCandidateError
from .evolution import (
    EvolutionConfig,
    Genome,
    MutationRates,
    evaluate_fitness,
    evolve,
    forward_pass,
    load_genome,
    mutate,
    save_genome,
)
from .recording import (
    ColonyRecording,
    RecordingMeta,
    SyntheticParams,
    TargetSelection,
    gen_synthetic,
    load_recording,
    resample,
    select_target,
    write_recording,
)
from .reward import RewardConfig, RewardMode, TrailPair, episode_reward, step_penalty, trail_area_step
from .sensing import OBS_FIELDS, OBS_SIZE, Segment, VisionConfig, build_observation, segment_index, sense_segments

__version__ = "0.1.0"

__all__ = [
    "Action", "AgentState", "ArenaGeometry", "KinematicParams", "apply_action",
    "px_of_mm", "wrap_angle",
    "EnvConfig", "EpisodeState", "StepResult", "replay_step", "reset", "step",
    "AntdynError", "ConfigError", "DataError", "NoCandidateError",
    "EvolutionConfig", "Genome", "MutationRates", "evaluate_fitness", "evolve",
    "forward_pass", "load_genome", "mutate", "save_genome",
    "ColonyRecording", "RecordingMeta", "SyntheticParams", "TargetSelection",
    "gen_synthetic", "load_recording", "resample", "select_target", "write_recording",
    "RewardConfig", "RewardMode", "TrailPair", "episode_reward", "step_penalty",
    "trail_area_step",
    "OBS_FIELDS", "OBS_SIZE", "Segment", "VisionConfig", "build_observation",
    "segment_index", "sense_segments",
    "__version__",
]
