"""Command-line entry point.

Subcommands: gen-synth, validate, simulate, evolve, replay-check, render.
Exit codes: 0 success, 2 data errors, 3 config/usage errors, 4 internal
contract violations.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evolution
from .env import EnvConfig, EpisodeState, replay_step, reset, step
from .errors import ConfigError, DataError
from .recording import SyntheticParams, gen_synthetic, load_recording, write_recording
from .render import RenderSpec, FRAME_PATTERN, frame_steps, render_frame, trails_svg

EXIT_OK = 0
EXIT_DATA = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antdyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic colony recording")
    p.add_argument("--ants", type=int, default=10)
    p.add_argument("--seconds", type=float, default=60.0)
    p.add_argument("--rate", type=float, default=10.0, help="sample rate, Hz")
    p.add_argument("--noise", type=float, default=6.0, help="walk noise, px per step")
    p.add_argument("--cluster-pull", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True, help="bundle stem (writes .csv + .meta.json)")

    p = sub.add_parser("validate", help="load a recording bundle and report problems")
    p.add_argument("--data", required=True)

    for name in ("simulate", "replay-check", "render"):
        p = sub.add_parser(name, help={
            "simulate": "run one episode under a policy",
            "replay-check": "alias for simulate --policy replay (alignment oracle)",
            "render": "run one episode and write frames + trail plot",
        }[name])
        p.add_argument("--data", required=True)
        p.add_argument("--config", help="EnvConfig JSON file")
        p.add_argument("--seed", type=int, default=None)
        if name != "replay-check":
            p.add_argument("--policy", default="replay" if name == "render" else "random",
                           help="random | replay | genome:<path>")
        if name == "simulate":
            p.add_argument("--render", action="store_true")
        p.add_argument("-o", "--output", default=None, help="output directory")
        p.add_argument("--frame-stride", type=int, default=10)

    p = sub.add_parser("evolve", help="run the neuroevolution loop")
    p.add_argument("--data", required=True)
    p.add_argument("--config", help="EnvConfig JSON file")
    p.add_argument("--pop", type=int, default=32)
    p.add_argument("--gens", type=int, default=50)
    p.add_argument("--elitism", type=int, default=2)
    p.add_argument("--tournament", type=int, default=3)
    p.add_argument("--episodes", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", required=True, help="output directory")
    return parser


def _load_env_config(path: str | None) -> EnvConfig:
    if path is None:
        return EnvConfig()
    return EnvConfig.from_json(path)


def _make_policy(spec: str, seed: int):
    """Returns (kind, act_fn); act_fn maps an observation to an action."""
    if spec == "replay":
        return "replay", None
    if spec == "random":
        rng = np.random.default_rng(np.random.SeedSequence((seed, 0xAC710)))
        return "random", lambda obs: int(rng.integers(4))
    if spec.startswith("genome:"):
        genome = evolution.load_genome(spec.split(":", 1)[1])
        policy = evolution.compile_policy(genome)
        return "genome", lambda obs: evolution.argmax_action(policy(obs.tolist()))
    raise ConfigError(f"unknown policy {spec!r} (expected random, replay, or genome:<path>)")


def _run_episode(ep: EpisodeState, obs, kind: str, act_fn, spec: RenderSpec | None) -> None:
    emit_at = set(frame_steps(ep.horizon, spec.frame_stride)) if spec else set()
    if spec:
        spec.output_dir.mkdir(parents=True, exist_ok=True)
        if 0 in emit_at:
            render_frame(ep, spec.output_dir / (FRAME_PATTERN % 0))
    while not ep.truncated:
        if kind == "replay":
            result = replay_step(ep)
        else:
            result = step(ep, act_fn(obs))
        obs = result.observation
        if spec and ep.step_index in emit_at:
            render_frame(ep, spec.output_dir / (FRAME_PATTERN % ep.step_index))
    if spec:
        trails_svg(ep, spec.output_dir / "trails.svg")


def _cmd_gen_synth(args) -> int:
    params = SyntheticParams(
        n_ants=args.ants, duration_s=args.seconds, sample_rate_hz=args.rate,
        noise_px=args.noise, cluster_pull=args.cluster_pull)
    rec = gen_synthetic(params, np.random.default_rng(args.seed))
    csv_path, meta_path = write_recording(rec, args.output)
    print(f"wrote {csv_path} and {meta_path} ({params.n_ants} ants, {params.duration_s} s)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    rec = load_recording(args.data)
    n_samples = sum(a.shape[0] for a in rec.ants.values())
    print(f"OK: {len(rec.ants)} ants, {n_samples} samples, "
          f"{rec.meta.resolution_px} px frame, {rec.meta.sample_rate_hz} Hz")
    return EXIT_OK


def _cmd_simulate(args, policy_override: str | None = None, force_render: bool = False) -> int:
    config = _load_env_config(args.config)
    recording = load_recording(args.data)
    seed = args.seed if args.seed is not None else config.seed
    policy_spec = policy_override or getattr(args, "policy", "random")
    kind, act_fn = _make_policy(policy_spec, seed)

    spec = None
    if force_render or getattr(args, "render", False):
        out = args.output or "out/run"
        spec = RenderSpec(output_dir=Path(out), frame_stride=args.frame_stride)

    ep, obs = reset(config, recording, seed)
    _run_episode(ep, obs, kind, act_fn, spec)

    summary = {
        "episode_reward": ep.cumulative_reward,
        "steps": ep.step_index,
        "target_ant_id": ep.target.ant_id,
        "start_time": ep.target.start_time,
    }
    print(json.dumps(summary))
    if args.output:
        out_dir = Path(args.output)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                              encoding="utf-8")
    return EXIT_OK


def _cmd_evolve(args) -> int:
    config = _load_env_config(args.config)
    recording = load_recording(args.data)
    evo = evolution.EvolutionConfig(
        population_size=args.pop, generations=args.gens, elitism_count=args.elitism,
        tournament_size=args.tournament, episodes_per_eval=args.episodes,
        seed=args.seed, workers=args.workers)
    best, history = evolution.evolve(evo, config, recording)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    evolution.save_genome(best, out_dir / "best_genome.json")
    evolution.write_history_csv(history, out_dir / "history.csv")
    print(json.dumps({
        "generations": len(history),
        "best_fitness": max(h.best for h in history),
        "genome": str(out_dir / "best_genome.json"),
        "history": str(out_dir / "history.csv"),
    }))
    return EXIT_OK


def execute(argv: list[str]) -> int:
    """Run one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    try:
        if args.command == "gen-synth":
            return _cmd_gen_synth(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "replay-check":
            return _cmd_simulate(args, policy_override="replay")
        if args.command == "render":
            return _cmd_simulate(args, force_render=True)
        if args.command == "evolve":
            return _cmd_evolve(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, AssertionError, ValueError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(execute(sys.argv[1:]))


if __name__ == "__main__":
    main()
