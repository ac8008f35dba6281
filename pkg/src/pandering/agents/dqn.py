"""DQN learner: replay buffer, target network and epsilon-greedy exploration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .network import MLP, Adam

CHECKPOINT_FORMAT = "pandering-dqn/1"


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainConfig:
    learning_rate: float = 5e-4
    batch_size: int = 64
    buffer_capacity: int = 50_000
    target_sync_interval: int = 100
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 20_000
    gamma: float = 1.0
    total_training_rounds: int = 50_000
    eval_interval: int = 5_000
    hidden_layer_sizes: list = field(default_factory=lambda: [64, 64])
    learning_starts: int = 1_000
    train_frequency: int = 1
    max_grad_norm: float = 10.0
    eval_episodes: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError("need 0 <= epsilon_end <= epsilon_start <= 1")
        if self.batch_size < 1 or self.buffer_capacity < 1:
            raise ValueError("batch_size and buffer_capacity must be positive")
        if self.eval_interval < 1 or self.total_training_rounds < 0:
            raise ValueError("eval_interval must be positive and total_training_rounds non-negative")
        self.hidden_layer_sizes = [int(h) for h in self.hidden_layer_sizes]

    def epsilon(self, step: int) -> float:
        """Linear decay from epsilon_start to epsilon_end, then constant."""
        if self.epsilon_decay_steps <= 0:
            return self.epsilon_end
        frac = min(step / self.epsilon_decay_steps, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)

    def to_dict(self) -> dict:
        return asdict(self)


class ReplayBuffer:
    """Fixed-capacity ring buffer of transitions; the oldest are evicted first."""

    def __init__(self, capacity: int, obs_size: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_size))
        self.next_obs = np.zeros((capacity, obs_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity, dtype=bool)
        self.pos = 0
        self.size = 0

    def __len__(self):
        return self.size

    def push(self, obs, action, reward, next_obs, done) -> None:
        i = self.pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = done
        self.pos = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return self.obs[idx], self.actions[idx], self.rewards[idx], self.next_obs[idx], self.dones[idx]


def greedy_action(values) -> int:
    """Argmax; ties go to the lowest index."""
    return int(np.argmax(values))


def epsilon_greedy(values, epsilon: float, rng: np.random.Generator) -> int:
    values = np.asarray(values)
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(0, values.shape[-1]))
    return greedy_action(values)


def td_loss(online: MLP, target: MLP, batch, gamma: float):
    """Mean squared TD error and its gradient w.r.t. the online parameters.

    Targets are ``reward + gamma * max_a' target(next_obs, a')``; terminal
    transitions use the reward alone.
    """
    obs, actions, rewards, next_obs, dones = batch
    actions = np.asarray(actions, dtype=np.int64)
    batch_size = actions.shape[0]
    if batch_size == 0:
        raise ValueError("empty batch")
    q, cache = online.forward(obs)
    bootstrap = target(next_obs).max(axis=1)
    y = np.asarray(rewards, dtype=float) + gamma * np.where(dones, 0.0, bootstrap)
    rows = np.arange(batch_size)
    err = q[rows, actions] - y
    loss = float(np.mean(err**2))
    grad_out = np.zeros_like(q)
    grad_out[rows, actions] = 2.0 * err / batch_size
    return loss, online.backward(cache, grad_out)


class DQNAgent:
    def __init__(self, obs_size: int, n_actions: int, config: TrainConfig | None = None, seed: int | None = None, init_rng=None):
        self.config = config or TrainConfig()
        self.seed = self.config.seed if seed is None else int(seed)
        self.obs_size = int(obs_size)
        self.n_actions = int(n_actions)
        sizes = [self.obs_size, *self.config.hidden_layer_sizes, self.n_actions]
        if init_rng is None:
            init_rng = np.random.default_rng(self.seed)
        self.online = MLP.initialized(sizes, init_rng)
        self.target = self.online.copy()
        self.optimizer = Adam(self.online.n_params, lr=self.config.learning_rate)
        self.buffer = ReplayBuffer(self.config.buffer_capacity, self.obs_size)
        self.updates = 0
        self.observation_spec = None
        self.system_config = None

    def values(self, obs) -> np.ndarray:
        return self.online(obs)[0]

    def act(self, obs, epsilon: float = 0.0, rng: np.random.Generator | None = None) -> int:
        if epsilon == 0.0:
            return greedy_action(self.values(obs))
        return epsilon_greedy(self.values(obs), epsilon, rng)

    def observe(self, obs, action, reward, next_obs, done) -> None:
        self.buffer.push(obs, action, reward, next_obs, done)

    def train_step(self, batch) -> float:
        """One Adam step on the TD loss; syncs the target network on schedule."""
        cfg = self.config
        # overflow is reported below as TrainingDiverged, not as numpy warnings
        with np.errstate(over="ignore", invalid="ignore"):
            loss, grad = td_loss(self.online, self.target, batch, cfg.gamma)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise TrainingDiverged(f"non-finite loss {loss} after {self.updates} updates")
        norm = float(np.linalg.norm(grad))
        if cfg.max_grad_norm and norm > cfg.max_grad_norm:
            grad = grad * (cfg.max_grad_norm / norm)
        with np.errstate(over="ignore", invalid="ignore"):
            self.optimizer.step(self.online.params, grad)
        if not np.all(np.isfinite(self.online.params)):
            raise TrainingDiverged(f"non-finite parameters after {self.updates + 1} updates")
        self.updates += 1
        if self.updates % cfg.target_sync_interval == 0:
            self.sync_target()
        return loss

    def update(self, rng: np.random.Generator) -> float | None:
        if len(self.buffer) < max(self.config.batch_size, self.config.learning_starts):
            return None
        return self.train_step(self.buffer.sample(self.config.batch_size, rng))

    def sync_target(self) -> None:
        self.target.params[:] = self.online.params

    # -- checkpoints ---------------------------------------------------

    def checkpoint(self, observation: dict | None = None, system_config: dict | None = None) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "layer_sizes": self.online.sizes,
            "activations": self.online.activations,
            "params": self.online.params.tolist(),
            "observation": observation or {"size": self.obs_size},
            "n_actions": self.n_actions,
            "train_config": self.config.to_dict(),
            "system_config": system_config,
            "seed": self.seed,
        }

    def save(self, path, observation: dict | None = None, system_config: dict | None = None) -> None:
        Path(path).write_text(json.dumps(self.checkpoint(observation, system_config), indent=1) + "\n")

    @classmethod
    def from_checkpoint(cls, ckpt: dict) -> "DQNAgent":
        if ckpt.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"unrecognised checkpoint format {ckpt.get('format')!r}")
        agent = cls(ckpt["layer_sizes"][0], ckpt["n_actions"], TrainConfig(**ckpt["train_config"]), seed=ckpt["seed"])
        agent.online = MLP(ckpt["layer_sizes"], ckpt["activations"], np.array(ckpt["params"], dtype=np.float64))
        agent.target = agent.online.copy()
        agent.observation_spec = ckpt.get("observation")
        agent.system_config = ckpt.get("system_config")
        return agent

    @classmethod
    def load(cls, path) -> "DQNAgent":
        return cls.from_checkpoint(json.loads(Path(path).read_text()))
