"""Experiment drivers, metrics and CSV persistence."""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .agents import DQNAgent, DQNPolicy, TrainConfig, baseline_policy, decode_joint_action, joint_action_count
from .env import PanderingEnv, observation_size
from .model import CandidateKind, ConfigError, RngStream, SystemConfig, majority_vector

log = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "experiment",
    "system",
    "beta1",
    "beta2",
    "beta3",
    "strategic_kind",
    "strategic_count",
    "seed",
    "episodes",
    "disagreement_fraction",
    "mean_strategic_reward",
    "stderr_reward",
)
CURVE_COLUMNS = ("train_round", "eval_mean_reward", "eval_stderr", "epsilon")
AGGREGATE_SEED = "all"


@dataclass
class MetricRow:
    experiment: str
    system: str
    beta1: float
    beta2: float
    beta3: float
    strategic_kind: str
    strategic_count: int
    seed: int | str
    episodes: int
    disagreement_fraction: float
    mean_strategic_reward: float
    stderr_reward: float

    def __post_init__(self):
        if not 0.0 <= self.disagreement_fraction <= 1.0:
            raise ValueError(f"disagreement fraction {self.disagreement_fraction} outside [0, 1]")


# --- metrics --------------------------------------------------------------


def _flat(vectors) -> np.ndarray:
    if isinstance(vectors, (list, tuple)):
        return np.concatenate([np.ravel(v) for v in vectors])
    return np.ravel(vectors)


def disagreement_fraction(outcomes, majorities) -> float:
    outcomes, majorities = _flat(outcomes), _flat(majorities)
    if outcomes.shape != majorities.shape:
        raise ValueError("need one outcome per issue")
    return float(np.mean(outcomes != majorities))


def disagreement(outcomes, profiles, rng: np.random.Generator) -> float:
    """Share of issues whose outcome differs from the voter majority.

    ``outcomes`` and ``profiles`` are per-round lists (or a single round);
    tied majorities are resolved with ``rng``.
    """
    if not isinstance(profiles, list):
        profiles, outcomes = [profiles], [outcomes]
    majorities = [majority_vector(np.asarray(p), rng) for p in profiles]
    return disagreement_fraction(list(outcomes), majorities)


def stderr(values) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


# --- episodes -------------------------------------------------------------


@dataclass
class EpisodeStats:
    disagreement_fraction: float
    round_rewards: np.ndarray
    issues: int

    @property
    def mean_reward(self) -> float:
        return float(self.round_rewards.mean()) if self.round_rewards.size else 0.0


def run_episode(config: SystemConfig, policy, rng: RngStream | None = None) -> EpisodeStats:
    env = PanderingEnv(config, rng)
    env.reset()
    wrong = 0
    rewards = []
    while not env.done:
        res = env.step(**policy.plan(env))
        wrong += res.disagreements
        rewards.append(float(res.rewards.mean()) if res.rewards.size else 0.0)
    issues = config.r * config.rounds
    return EpisodeStats(wrong / issues, np.array(rewards), issues)


def _row(experiment, cfg: SystemConfig, seed, episodes, dis, reward, err) -> MetricRow:
    return MetricRow(
        experiment=experiment,
        system=cfg.system.value,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        beta3=cfg.beta3,
        strategic_kind=cfg.strategic_kind.value,
        strategic_count=cfg.strategic_count,
        seed=seed,
        episodes=episodes,
        disagreement_fraction=dis,
        mean_strategic_reward=reward,
        stderr_reward=err,
    )


def aggregate(rows: list[MetricRow], experiment: str | None = None) -> MetricRow:
    """Seed-mean row; ``stderr_reward`` is the standard error across seeds."""
    first = rows[0]
    rewards = [r.mean_strategic_reward for r in rows]
    return MetricRow(
        experiment=experiment or first.experiment,
        system=first.system,
        beta1=first.beta1,
        beta2=first.beta2,
        beta3=first.beta3,
        strategic_kind=first.strategic_kind,
        strategic_count=first.strategic_count,
        seed=AGGREGATE_SEED,
        episodes=sum(r.episodes for r in rows),
        disagreement_fraction=float(np.mean([r.disagreement_fraction for r in rows])),
        mean_strategic_reward=float(np.mean(rewards)),
        stderr_reward=stderr(rewards),
    )


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- single-round study ---------------------------------------------------


def fig1_config(**overrides) -> SystemConfig:
    base = dict(n=50, m=10, k=5, r=900, rounds=1, strategic_count=1, strategic_kind="malicious")
    base.update(overrides)
    return SystemConfig(**base)


def _fig1_cell(args):
    cfg, seed = args
    stats = run_episode(cfg.replace(seed=seed), baseline_policy("greedy"), RngStream(seed, "fig1"))
    return _row("fig1", cfg, seed, 1, stats.disagreement_fraction, stats.mean_reward, 0.0)


def run_fig1(beta1_grid, seeds, config: SystemConfig | None = None, systems=("RD", "FRD"), workers: int = 1) -> list[MetricRow]:
    """One greedy-pandering malicious candidate in a single long round.

    The same seed produces the same profile and candidates for every
    ``beta1`` and system, so cells differ only in the governance rule.
    """
    config = config or fig1_config()
    if config.rounds != 1 or config.strategic_kind is not CandidateKind.MALICIOUS:
        raise ConfigError("fig1 needs a single round with malicious strategic candidates")
    jobs = [(config.replace(system=s, beta1=b), seed) for s in systems for b in beta1_grid for seed in seeds]
    return _map(_fig1_cell, jobs, workers)


# --- evaluation -----------------------------------------------------------


def _eval_cell(args):
    experiment, cfg, policy, seed = args
    stats = run_episode(cfg.replace(seed=seed), policy, RngStream(seed, "eval"))
    return _row(experiment, cfg, seed, 1, stats.disagreement_fraction, stats.mean_reward, stderr(stats.round_rewards))


def run_eval(policy, config: SystemConfig, seeds, experiment: str = "eval", workers: int = 1, with_aggregate: bool = True) -> list[MetricRow]:
    """Full episodes at epsilon 0, one per seed, plus a seed-mean row."""
    policy = resolve_policy(policy, config)
    rows = _map(_eval_cell, [(experiment, config, policy, s) for s in seeds], workers)
    if with_aggregate and rows:
        rows.append(aggregate(rows))
    return rows


def check_checkpoint(agent: DQNAgent, config: SystemConfig) -> None:
    want_obs = observation_size(config)
    want_actions = joint_action_count(config.r, config.strategic_count) if config.strategic_kind is CandidateKind.MALICIOUS else config.r + 1
    if agent.obs_size != want_obs or agent.n_actions != want_actions:
        raise ValueError(
            f"checkpoint expects obs {agent.obs_size} / actions {agent.n_actions}, "
            f"config needs obs {want_obs} / actions {want_actions}"
        )


def resolve_policy(source, config: SystemConfig):
    """Accept a policy object, a baseline name, an agent or a checkpoint path."""
    if hasattr(source, "plan"):
        return source
    if isinstance(source, DQNAgent):
        check_checkpoint(source, config)
        return DQNPolicy(source)
    if isinstance(source, str) and source in ("honest", "random", "random_solver", "greedy"):
        return baseline_policy(source)
    path = Path(source)
    if not path.exists():
        raise ValueError(f"no such policy or checkpoint: {source!r}")
    agent = DQNAgent.load(path)
    check_checkpoint(agent, config)
    return DQNPolicy(agent)


# --- training -------------------------------------------------------------


@dataclass
class CurveRow:
    train_round: int
    eval_mean_reward: float
    eval_stderr: float
    epsilon: float


def training_config_for(config: SystemConfig) -> SystemConfig:
    """Selfish learners train alone and are replicated at evaluation time."""
    if config.strategic_kind is CandidateKind.SELFISH:
        return config.replace(strategic_count=1)
    return config


def run_training(config: SystemConfig, train_config: TrainConfig, eval_seeds=range(10), checkpoint_path=None, curve_path=None):
    """Train a DQN attacker; returns ``(agent, curve_rows)``.

    Every ``eval_interval`` training rounds the greedy policy is evaluated on
    ``train_config.eval_episodes`` of the held-out ``eval_seeds``.
    """
    cfg = training_config_for(config)
    if cfg.strategic_count < 1:
        raise ConfigError("training needs at least one strategic candidate")
    tc = train_config
    malicious = cfg.strategic_kind is CandidateKind.MALICIOUS
    n_actions = joint_action_count(cfg.r, cfg.strategic_count) if malicious else cfg.r + 1
    stream = RngStream(tc.seed, "train")
    agent = DQNAgent(observation_size(cfg), n_actions, tc, init_rng=stream["init"])
    explore, replay = stream["exploration"], stream["replay"]
    curve_seeds = list(eval_seeds)[: tc.eval_episodes]

    curve = []
    env, obs, episode = None, None, 0
    for step in range(1, tc.total_training_rounds + 1):
        if env is None or env.done:
            env = PanderingEnv(cfg, stream.child("episode", episode))
            obs = env.reset()
            episode += 1
        eps = tc.epsilon(step - 1)
        action = agent.act(obs[0], eps, explore)
        budgets = decode_joint_action(action, cfg.r, cfg.strategic_count) if malicious else [action]
        res = env.step(budgets=budgets)
        agent.observe(obs[0], action, float(res.rewards[0]), res.observations[0], res.done)
        obs = res.observations
        if step % tc.train_frequency == 0:
            agent.update(replay)
        if step % tc.eval_interval == 0:
            rows = run_eval(DQNPolicy(agent), cfg, curve_seeds, with_aggregate=False)
            rewards = [r.mean_strategic_reward for r in rows]
            curve.append(CurveRow(step, float(np.mean(rewards)), stderr(rewards), eps))
            log.info("round %d: eval reward %.4f (eps %.3f)", step, curve[-1].eval_mean_reward, eps)

    if checkpoint_path is not None:
        agent.save(checkpoint_path, observation_spec(cfg), cfg.to_dict())
    if curve_path is not None:
        write_csv(curve_path, curve, CURVE_COLUMNS)
    return agent, curve


def observation_spec(cfg: SystemConfig) -> dict:
    return {
        "kind": cfg.strategic_kind.value,
        "size": observation_size(cfg),
        "r": cfg.r,
        "strategic_count": cfg.strategic_count,
        "layout": "support[r], truth[r], credibility, round_frac"
        if cfg.strategic_kind is CandidateKind.SELFISH
        else "support[r], credibility[strategic_count], round_frac",
    }


# --- sweeps ---------------------------------------------------------------


def checkpoint_name(system: str, beta1: float, kind: str, count: int) -> str:
    """File name of the learner used for one sweep cell.

    Selfish cells share the single-candidate learner of their (system, beta1).
    """
    if kind == CandidateKind.SELFISH.value:
        return f"{system}_b{beta1:g}_selfish.json"
    return f"{system}_b{beta1:g}_malicious{count}.json"


def sweep_cells(grid: dict, base: SystemConfig) -> list[SystemConfig]:
    cells = []
    for system in grid.get("system", ["RD", "FRD"]):
        for beta1 in grid.get("beta1", [0.9, 0.95]):
            for kind in grid.get("strategic_kind", ["selfish", "malicious"]):
                for count in grid.get("strategic_count", [1, 2, 3]):
                    cells.append(base.replace(system=system, beta1=beta1, strategic_kind=kind, strategic_count=count))
    return cells


def run_sweep(grid: dict, seeds, base: SystemConfig | None = None, policy: str = "dqn", checkpoint_dir=None, workers: int = 1) -> list[MetricRow]:
    """Seed-mean rows for every cell of the grid, in grid order.

    ``policy`` is a baseline name or ``"dqn"``, which loads one checkpoint
    per cell from ``checkpoint_dir`` (see ``checkpoint_name``).
    """
    base = base or SystemConfig()
    cells = sweep_cells(grid, base)
    sources = []
    for cfg in cells:
        if cfg.strategic_count == 0 or policy != "dqn":
            sources.append("honest" if cfg.strategic_count == 0 else policy)
            continue
        name = checkpoint_name(cfg.system.value, cfg.beta1, cfg.strategic_kind.value, cfg.strategic_count)
        path = Path(checkpoint_dir or ".") / name
        if not path.exists():
            raise FileNotFoundError(
                f"missing checkpoint {path} for cell system={cfg.system.value} beta1={cfg.beta1:g} "
                f"kind={cfg.strategic_kind.value} count={cfg.strategic_count}"
            )
        sources.append(str(path))
    out = []
    for cfg, src in zip(cells, sources):
        rows = run_eval(src, cfg, list(seeds), experiment="sweep", workers=workers, with_aggregate=False)
        out.append(aggregate(rows))
    return out


# --- persistence ----------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


def format_csv(rows, columns=METRIC_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in columns])
    return buf.getvalue()


def write_csv(path, rows, columns=METRIC_COLUMNS) -> None:
    Path(path).write_text(format_csv(rows, columns))


def read_metric_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def metric_row_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(MetricRow))
