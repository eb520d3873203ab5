"""Desk-scale neuroevolution of feed-forward DAG policy networks.

A genome is a list of node genes (13 inputs, 4 outputs, any number of
hidden nodes, one activation each) and edge genes (weighted, with an
enabled flag). Structural mutations follow the classic topology-growth
moves: perturb weights, add a non-cycle-creating edge, split an enabled
edge into two via a fresh hidden node, or swap a hidden activation. No
crossover and no speciation; selection is tournament plus elitism.

Fitness is the mean episode reward under the greedy (argmax) policy over
a shared list of episode seeds, so genomes within a generation are
compared on identical worlds.
"""

from __future__ import annotations

import copy
import csv
import heapq
import json
import math
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .arena import Action
from .env import EnvConfig, reset, step
from .errors import ConfigError, DataError
from .recording import ColonyRecording, is_on_grid, resample
from .sensing import OBS_SIZE

N_INPUTS = OBS_SIZE
N_OUTPUTS = len(Action)

GENOME_FORMAT_VERSION = 1

ROLES = ("input", "hidden", "output")


def _sigmoid(x: float) -> float:
    if x < -60.0:
        return 0.0
    if x > 60.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(-x))


ACTIVATIONS: dict[str, Callable[[float], float]] = {
    "identity": lambda x: x,
    "tanh": math.tanh,
    "sigmoid": _sigmoid,
    "relu": lambda x: x if x > 0.0 else 0.0,
    "sin": math.sin,
    "gauss": lambda x: math.exp(-x * x) if abs(x) < 60.0 else 0.0,
}
ACTIVATION_NAMES = tuple(ACTIVATIONS)


class GenomeError(ValueError):
    """Genome structure violates an invariant."""


@dataclass
class NodeGene:
    id: int
    role: str
    activation: str = "tanh"


@dataclass
class EdgeGene:
    src: int
    dst: int
    weight: float
    enabled: bool = True


@dataclass
class Genome:
    """Feed-forward DAG policy network description."""

    nodes: list[NodeGene]
    edges: list[EdgeGene]

    def input_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.role == "input")

    def output_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.role == "output")

    def hidden_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.role == "hidden")

    def validate(self) -> None:
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise GenomeError("duplicate node ids")
        for n in self.nodes:
            if n.role not in ROLES:
                raise GenomeError(f"node {n.id}: unknown role {n.role!r}")
            if n.activation not in ACTIVATIONS:
                raise GenomeError(f"node {n.id}: unknown activation {n.activation!r}")
        if len(self.input_ids()) != N_INPUTS:
            raise GenomeError(f"expected {N_INPUTS} input nodes, got {len(self.input_ids())}")
        if len(self.output_ids()) != N_OUTPUTS:
            raise GenomeError(f"expected {N_OUTPUTS} output nodes, got {len(self.output_ids())}")
        roles = {n.id: n.role for n in self.nodes}
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            if e.src not in roles or e.dst not in roles:
                raise GenomeError(f"edge ({e.src}, {e.dst}) references a missing node")
            if roles[e.dst] == "input":
                raise GenomeError(f"edge ({e.src}, {e.dst}) terminates at an input node")
            if roles[e.src] == "output":
                raise GenomeError(f"edge ({e.src}, {e.dst}) originates at an output node")
            if (e.src, e.dst) in seen:
                raise GenomeError(f"duplicate edge ({e.src}, {e.dst})")
            if not math.isfinite(e.weight):
                raise GenomeError(f"edge ({e.src}, {e.dst}) has non-finite weight")
            seen.add((e.src, e.dst))
        _topological_order(self)  # raises on cycles among enabled edges

    def to_dict(self) -> dict:
        return {
            "format_version": GENOME_FORMAT_VERSION,
            "nodes": [{"id": n.id, "role": n.role, "activation": n.activation}
                      for n in self.nodes],
            "edges": [{"src": e.src, "dst": e.dst, "weight": e.weight, "enabled": e.enabled}
                      for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Genome":
        version = data.get("format_version")
        if version != GENOME_FORMAT_VERSION:
            raise DataError(f"unsupported genome format_version: {version!r}")
        try:
            nodes = [NodeGene(int(n["id"]), str(n["role"]), str(n["activation"]))
                     for n in data["nodes"]]
            edges = [EdgeGene(int(e["src"]), int(e["dst"]), float(e["weight"]), bool(e["enabled"]))
                     for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed genome file: {exc}") from exc
        genome = cls(nodes=nodes, edges=edges)
        genome.validate()
        return genome


def save_genome(genome: Genome, path: str | Path) -> None:
    Path(path).write_text(json.dumps(genome.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_genome(path: str | Path) -> Genome:
    p = Path(path)
    if not p.exists():
        raise DataError(f"genome file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{p}: invalid JSON ({e})") from e
    return Genome.from_dict(data)


def new_genome(rng: np.random.Generator, weight_scale: float = 0.5) -> Genome:
    """Minimal starting topology: inputs fully connected to outputs with
    Gaussian weights, identity output activations (argmax scores)."""
    nodes = [NodeGene(i, "input", "identity") for i in range(N_INPUTS)]
    nodes += [NodeGene(N_INPUTS + j, "output", "identity") for j in range(N_OUTPUTS)]
    edges = []
    for j in range(N_OUTPUTS):
        for i in range(N_INPUTS):
            edges.append(EdgeGene(i, N_INPUTS + j, float(rng.normal(0.0, weight_scale)), True))
    return Genome(nodes=nodes, edges=edges)


def _topological_order(genome: Genome) -> list[int]:
    """Kahn's algorithm over enabled edges, smallest node id first."""
    indeg = {n.id: 0 for n in genome.nodes}
    adj: dict[int, list[int]] = {n.id: [] for n in genome.nodes}
    for e in genome.edges:
        if e.enabled:
            adj[e.src].append(e.dst)
            indeg[e.dst] += 1
    ready = [nid for nid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        nid = heapq.heappop(ready)
        order.append(nid)
        for m in adj[nid]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(ready, m)
    if len(order) != len(genome.nodes):
        raise GenomeError("cycle detected among enabled edges")
    return order


def compile_policy(genome: Genome) -> Callable[[Sequence[float]], list[float]]:
    """Build a fast evaluator: obs (13 floats) -> 4 output scores.

    The evaluation plan (topological order, incoming edge lists) is fixed
    once, so repeated calls only do the weighted sums.
    """
    genome.validate()
    order = _topological_order(genome)
    roles = {n.id: n.role for n in genome.nodes}
    acts = {n.id: ACTIVATIONS[n.activation] for n in genome.nodes}
    incoming: dict[int, list[tuple[int, float]]] = {n.id: [] for n in genome.nodes}
    for e in genome.edges:
        if e.enabled:
            incoming[e.dst].append((e.src, e.weight))
    plan = [(nid, acts[nid], tuple(incoming[nid]))
            for nid in order if roles[nid] != "input"]
    input_ids = genome.input_ids()
    output_ids = genome.output_ids()

    def run(obs: Sequence[float]) -> list[float]:
        values = dict(zip(input_ids, obs))
        for nid, act, inc in plan:
            total = 0.0
            for src, w in inc:
                total += values[src] * w
            values[nid] = act(total)
        return [values[o] for o in output_ids]

    return run


def forward_pass(genome: Genome, observation: Sequence[float]) -> list[float]:
    """Evaluate the network once. Deterministic; inputs are taken in
    ascending input-node-id order."""
    if len(observation) != N_INPUTS:
        raise ValueError(f"observation must have {N_INPUTS} values, got {len(observation)}")
    return compile_policy(genome)([float(v) for v in observation])


def argmax_action(scores: Sequence[float]) -> int:
    """Greedy action choice; ties resolve to the lowest index."""
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


@dataclass(frozen=True)
class MutationRates:
    perturb_weight: float = 0.8
    add_edge: float = 0.1
    add_node: float = 0.05
    change_activation: float = 0.05
    weight_sigma: float = 0.5  # stddev of Gaussian weight perturbations

    def __post_init__(self):
        for name in ("perturb_weight", "add_edge", "add_node", "change_activation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"mutation rate {name} must be in [0, 1], got {v}")
        if not self.weight_sigma > 0:
            raise ConfigError(f"weight_sigma must be > 0, got {self.weight_sigma}")


def _reachable(adj: dict[int, list[int]], start: int, goal: int) -> bool:
    stack = [start]
    seen = {start}
    while stack:
        nid = stack.pop()
        if nid == goal:
            return True
        for m in adj[nid]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return False


def _mutate_add_edge(g: Genome, rng: np.random.Generator) -> None:
    existing = {(e.src, e.dst) for e in g.edges}
    adj: dict[int, list[int]] = {n.id: [] for n in g.nodes}
    for e in g.edges:
        if e.enabled:
            adj[e.src].append(e.dst)
    candidates = []
    for s in g.nodes:
        if s.role == "output":
            continue
        for d in g.nodes:
            if d.role == "input" or d.id == s.id or (s.id, d.id) in existing:
                continue
            if _reachable(adj, d.id, s.id):  # adding s->d would close a cycle
                continue
            candidates.append((s.id, d.id))
    if not candidates:
        return
    src, dst = candidates[int(rng.integers(len(candidates)))]
    g.edges.append(EdgeGene(src, dst, float(rng.normal(0.0, 1.0)), True))


def _mutate_add_node(g: Genome, rng: np.random.Generator) -> None:
    enabled = [e for e in g.edges if e.enabled]
    if not enabled:
        return
    edge = enabled[int(rng.integers(len(enabled)))]
    new_id = max(n.id for n in g.nodes) + 1
    activation = ACTIVATION_NAMES[int(rng.integers(len(ACTIVATION_NAMES)))]
    g.nodes.append(NodeGene(new_id, "hidden", activation))
    edge.enabled = False
    # classic split: unit weight in, original weight out
    g.edges.append(EdgeGene(edge.src, new_id, 1.0, True))
    g.edges.append(EdgeGene(new_id, edge.dst, edge.weight, True))


def _mutate_change_activation(g: Genome, rng: np.random.Generator) -> None:
    hidden = [n for n in g.nodes if n.role == "hidden"]
    if not hidden:
        return
    node = hidden[int(rng.integers(len(hidden)))]
    choices = [a for a in ACTIVATION_NAMES if a != node.activation]
    node.activation = choices[int(rng.integers(len(choices)))]


def mutate(genome: Genome, rates: MutationRates, rng: np.random.Generator) -> Genome:
    """Return a mutated copy; the input genome is untouched. Inapplicable
    operators (no splittable edge, no hidden node, no legal pair) skip."""
    g = copy.deepcopy(genome)
    if rng.random() < rates.perturb_weight:
        for e in g.edges:
            e.weight += float(rng.normal(0.0, rates.weight_sigma))
    if rng.random() < rates.add_edge:
        _mutate_add_edge(g, rng)
    if rng.random() < rates.add_node:
        _mutate_add_node(g, rng)
    if rng.random() < rates.change_activation:
        _mutate_change_activation(g, rng)
    return g


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 32
    generations: int = 50
    elitism_count: int = 2
    tournament_size: int = 3
    rates: MutationRates = field(default_factory=MutationRates)
    episodes_per_eval: int = 3
    seed: int = 0
    # False keeps one evaluation seed list for the whole run, which makes
    # best-so-far fitness non-decreasing under elitism; True redraws the
    # shared list every generation (lower long-run selection bias).
    reseed_per_generation: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.elitism_count < 1:
            raise ConfigError(f"elitism_count must be >= 1, got {self.elitism_count}")
        if self.population_size < self.elitism_count:
            raise ConfigError("population_size must be >= elitism_count")
        if self.tournament_size < 1:
            raise ConfigError(f"tournament_size must be >= 1, got {self.tournament_size}")
        if self.episodes_per_eval < 1:
            raise ConfigError(f"episodes_per_eval must be >= 1, got {self.episodes_per_eval}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best: float
    mean: float
    worst: float


def write_history_csv(history: Sequence[GenerationStats], path: str | Path) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["generation", "best", "mean", "worst"])
        for row in history:
            writer.writerow([row.generation, repr(row.best), repr(row.mean), repr(row.worst)])


def evaluate_fitness(genome: Genome, env_config: EnvConfig, recording: ColonyRecording,
                     episode_seeds: Sequence[int]) -> float:
    """Mean episode reward of the greedy policy over the given seeds."""
    policy = compile_policy(genome)
    total = 0.0
    for seed in episode_seeds:
        ep, obs = reset(env_config, recording, int(seed))
        for _ in range(ep.horizon):
            action = argmax_action(policy(obs.tolist()))
            result = step(ep, action)
            obs = result.observation
        total += ep.cumulative_reward
    return total / len(episode_seeds)


# -- parallel evaluation ------------------------------------------------------
# Workers receive the (config, recording) pair once via the pool initializer;
# results are reduced in genome-index order so parallel and serial runs are
# bit-identical.

_WORKER_CTX: tuple[EnvConfig, ColonyRecording] | None = None


def _worker_init(env_config: EnvConfig, recording: ColonyRecording) -> None:
    global _WORKER_CTX
    _WORKER_CTX = (env_config, recording)


def _worker_eval(args: tuple[Genome, tuple[int, ...]]) -> float:
    genome, seeds = args
    assert _WORKER_CTX is not None
    env_config, recording = _WORKER_CTX
    return evaluate_fitness(genome, env_config, recording, seeds)


def _evaluate_population(population: Sequence[Genome], env_config: EnvConfig,
                         recording: ColonyRecording, seeds: tuple[int, ...],
                         executor: ProcessPoolExecutor | None) -> list[float]:
    if executor is None:
        return [evaluate_fitness(g, env_config, recording, seeds) for g in population]
    return list(executor.map(_worker_eval, [(g, seeds) for g in population]))


def evolve(evo: EvolutionConfig, env_config: EnvConfig,
           recording: ColonyRecording) -> tuple[Genome, list[GenerationStats]]:
    """Generational loop: shared-seed evaluation, elitist copy-through,
    tournament selection plus mutation for the remainder.

    Returns the best genome seen across the whole run and the per-generation
    fitness history.
    """
    if not is_on_grid(recording, env_config.kinematics.dt):
        recording = resample(recording, env_config.kinematics.dt)
    master = np.random.default_rng(evo.seed)
    population = [new_genome(master) for _ in range(evo.population_size)]
    fixed_seeds = tuple(int(s) for s in master.integers(2**63 - 1, size=evo.episodes_per_eval))

    executor: ProcessPoolExecutor | None = None
    if evo.workers > 1:
        executor = ProcessPoolExecutor(
            max_workers=evo.workers,
            mp_context=multiprocessing.get_context("spawn"),
            initializer=_worker_init,
            initargs=(env_config, recording),
        )
    history: list[GenerationStats] = []
    best_genome: Genome | None = None
    best_fitness = -math.inf
    try:
        for gen in range(evo.generations):
            if evo.reseed_per_generation:
                seeds = tuple(int(s) for s in master.integers(2**63 - 1, size=evo.episodes_per_eval))
            else:
                seeds = fixed_seeds
            fitness = _evaluate_population(population, env_config, recording, seeds, executor)
            order = sorted(range(len(population)), key=lambda i: (-fitness[i], i))
            gen_best = fitness[order[0]]
            if gen_best > best_fitness:
                best_fitness = gen_best
                best_genome = copy.deepcopy(population[order[0]])
            history.append(GenerationStats(
                generation=gen,
                best=gen_best,
                mean=sum(fitness) / len(fitness),
                worst=min(fitness),
            ))
            if gen == evo.generations - 1:
                break
            next_population = [copy.deepcopy(population[i]) for i in order[:evo.elitism_count]]
            while len(next_population) < evo.population_size:
                entrants = master.integers(0, evo.population_size, size=evo.tournament_size)
                winner = min((int(i) for i in entrants), key=lambda i: (-fitness[i], i))
                next_population.append(mutate(population[winner], evo.rates, master))
            population = next_population
    finally:
        if executor is not None:
            executor.shutdown()
    assert best_genome is not None
    return best_genome, history
