"""Policies that drive the strategic candidates of a ``PanderingEnv``.

``plan(env)`` returns the keyword arguments for ``env.step``: either
``budgets`` (fed to the constrained solver) or ``reports`` (used verbatim).
Baseline randomness comes from the environment's ``baseline`` stream so an
episode is reproducible from its seed alone.
"""

from __future__ import annotations

import numpy as np

from ..solver import random_budget, random_report
from .dqn import DQNAgent

BASELINES = ("honest", "random", "random_solver", "greedy")


def joint_action_count(r: int, strategic_count: int) -> int:
    return (r + 1) ** strategic_count


def decode_joint_action(index: int, r: int, strategic_count: int) -> np.ndarray:
    """Joint action index to one budget per candidate (first candidate most significant)."""
    return np.array(np.unravel_index(int(index), (r + 1,) * strategic_count), dtype=int).reshape(strategic_count)


def encode_joint_action(budgets, r: int) -> int:
    budgets = tuple(int(b) for b in budgets)
    return int(np.ravel_multi_index(budgets, (r + 1,) * len(budgets)))


class HonestPolicy:
    name = "honest"

    def plan(self, env) -> dict:
        return {"budgets": np.zeros(env.config.strategic_count, dtype=int)}


class RandomPolicy:
    """Report a uniformly random vector, bypassing the solver."""

    name = "random"

    def plan(self, env) -> dict:
        gen = env.rng["baseline"]
        return {"reports": np.array([random_report(env.truths[c], gen) for c in env.strategic_ids]).reshape(-1, env.config.r)}


class RandomSolverPolicy:
    """Uniform budget in 0..r, fed to the solver."""

    name = "random_solver"

    def plan(self, env) -> dict:
        gen = env.rng["baseline"]
        return {"budgets": np.array([random_budget(env.config.r, gen) for _ in env.strategic_ids], dtype=int)}


class GreedyPolicy:
    """Report the issue-wise voter majority."""

    name = "greedy"

    def plan(self, env) -> dict:
        return {"reports": np.repeat(env.majority[None, :], env.config.strategic_count, axis=0)}


class ConstantBudgetPolicy:
    def __init__(self, budget: int):
        self.budget = int(budget)
        self.name = f"budget{self.budget}"

    def plan(self, env) -> dict:
        return {"budgets": np.full(env.config.strategic_count, self.budget, dtype=int)}


class DQNPolicy:
    """Greedy (or epsilon-greedy) play of a trained value network.

    Selfish candidates each query the shared network with their own
    observation; a malicious coalition maps one joint action to all budgets.
    """

    name = "dqn"

    def __init__(self, agent: DQNAgent, epsilon: float = 0.0):
        self.agent = agent
        self.epsilon = epsilon

    def plan(self, env) -> dict:
        cfg = env.config
        obs = env.observations()
        gen = env.rng["exploration"]
        if not obs:
            return {"budgets": np.zeros(0, dtype=int)}
        if env.malicious:
            index = self.agent.act(obs[0], self.epsilon, gen)
            return {"budgets": decode_joint_action(index, cfg.r, cfg.strategic_count)}
        return {"budgets": np.array([self.agent.act(o, self.epsilon, gen) for o in obs], dtype=int)}


def baseline_policy(kind: str):
    try:
        return {
            "honest": HonestPolicy,
            "random": RandomPolicy,
            "random_solver": RandomSolverPolicy,
            "greedy": GreedyPolicy,
        }[kind]()
    except KeyError:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINES}") from None
