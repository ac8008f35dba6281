"""Multi-round pandering environment for selfish and malicious candidates.

Each step is one round: strategic candidates choose how many issues they are
willing to lie about (or submit reports directly), the committee is elected,
the round is played out, and rewards are computed against a counterfactual
round in which every strategic candidate reports honestly. The counterfactual
branches from the same round-start credibilities and reuses the actual
round's tie-break draws.

Strategic candidates occupy ids ``0 .. strategic_count - 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .elections import draw_priority, elect, tally
from .governance import RoundLedger, run_round
from .model import (
    BIT_DTYPE,
    CandidateKind,
    CandidateState,
    RngStream,
    SystemConfig,
    as_issue_vector,
    hamming,
    majority_vector,
    sample_profile,
)
from .solver import ReportCache


class EpisodeDone(RuntimeError):
    """Raised when stepping an environment whose episode has ended."""


@dataclass
class StepResult:
    observations: list
    rewards: np.ndarray
    done: bool
    ledger: RoundLedger
    committee: np.ndarray
    outcomes: np.ndarray
    counterfactual_outcomes: np.ndarray
    majority: np.ndarray
    elected_by_pandering: np.ndarray
    reports: np.ndarray
    priority: np.ndarray

    @property
    def disagreements(self) -> int:
        return hamming(self.outcomes, self.majority)


def issue_support(profile) -> np.ndarray:
    """Fraction of voters preferring 1 on each issue."""
    profile = np.asarray(profile)
    return profile.mean(axis=0)


def compress_observation(profile, credibilities, truths, round_index: int, config: SystemConfig, agent: int | None = None):
    """Observation vector for one selfish candidate, or the joint malicious one.

    Selfish (``agent`` given): support, own truth, own credibility, round fraction.
    Malicious (``agent`` None): support, every strategic credibility, round fraction.
    """
    support = issue_support(profile)
    frac = np.array([round_index / config.rounds])
    h = np.asarray(credibilities, dtype=float)
    if agent is not None:
        return np.concatenate([support, np.asarray(truths[agent], dtype=float), h[agent : agent + 1], frac])
    return np.concatenate([support, h[: config.strategic_count], frac])


def observation_size(config: SystemConfig) -> int:
    if config.strategic_kind is CandidateKind.MALICIOUS:
        return config.r + config.strategic_count + 1
    return 2 * config.r + 2


def selfish_reward(elected_by_pandering: bool, outcomes, truth) -> float:
    if not elected_by_pandering:
        return 0.0
    r = np.asarray(truth).shape[0]
    return 1.0 - hamming(outcomes, truth) / r


def malicious_reward(outcomes, counterfactual_outcomes) -> float:
    r = np.asarray(outcomes).shape[0]
    return hamming(outcomes, counterfactual_outcomes) / r


def elected_by_pandering(c: int, counts, honest_count: int, committee, k: int, priority) -> bool:
    """True iff ``c`` won the election but would lose it reporting honestly.

    ``honest_count`` is c's approval count with an honest report; all other
    counts and the tie-break ``priority`` are held fixed.
    """
    if c not in committee:
        return False
    alt = np.array(counts, copy=True)
    alt[c] = honest_count
    return c not in elect(alt, k, priority=priority)


class PanderingEnv:
    """One episode of ``config.rounds`` rounds.

    ``observations`` holds one vector per selfish candidate, or a single
    joint vector for the malicious coalition (empty when there are no
    strategic candidates).
    """

    def __init__(self, config: SystemConfig, rng: RngStream | None = None):
        self.config = config
        self.rng = rng if rng is not None else RngStream(config.seed)
        self.weight_basis = config.frd_weight_basis
        self.round = 0
        self.done = True
        self.credibility = np.ones(config.m)
        self.profile = None
        self.truths = None
        self.majority = None
        self._cache = None

    # -- episode control -----------------------------------------------

    def reset(self) -> list:
        cfg = self.config
        self.round = 0
        self.done = False
        self.credibility = np.ones(cfg.m)
        self._sample_round()
        return self.observations()

    def _sample_round(self) -> None:
        cfg = self.config
        gen = self.rng["profile"]
        self.profile = sample_profile(cfg.n, cfg.r, cfg.p, gen)
        self.truths = sample_profile(cfg.m, cfg.r, cfg.p, gen)
        self.majority = majority_vector(self.profile, self.rng["majority"])
        if cfg.strategic_kind is CandidateKind.MALICIOUS and cfg.strategic_count:
            self.truths[: cfg.strategic_count] = 1 - self.majority
        self._cache = ReportCache(self.profile)

    @property
    def strategic_ids(self) -> range:
        return range(self.config.strategic_count)

    @property
    def malicious(self) -> bool:
        return self.config.strategic_kind is CandidateKind.MALICIOUS

    def observations(self) -> list:
        cfg = self.config
        if cfg.strategic_count == 0:
            return []
        args = (self.profile, self.credibility, self.truths, self.round, cfg)
        if self.malicious:
            return [compress_observation(*args)]
        return [compress_observation(*args, agent=i) for i in self.strategic_ids]

    def candidates(self) -> list[CandidateState]:
        kind = self.config.strategic_kind
        return [
            CandidateState(
                id=c,
                kind=kind if c < self.config.strategic_count else CandidateKind.TRUTHFUL,
                truth=self.truths[c],
                report=self.truths[c],
                credibility=float(self.credibility[c]),
            )
            for c in range(self.config.m)
        ]

    def solve(self, c: int, budget: int):
        return self._cache.solve(self.truths[c], int(budget))

    # -- dynamics ------------------------------------------------------

    def step(self, budgets=None, reports=None) -> StepResult:
        """Play one round.

        Pass ``budgets`` (one per strategic candidate, each in 0..r) to have
        reports chosen by the constrained solver, or ``reports`` to submit
        the strategic candidates' public positions directly.
        """
        if self.done:
            raise EpisodeDone("episode is over; call reset()")
        cfg = self.config
        s = cfg.strategic_count
        all_reports = self.truths.copy()
        if reports is not None:
            reports = np.asarray(reports).reshape(s, cfg.r)
            for i in self.strategic_ids:
                all_reports[i] = as_issue_vector(reports[i], cfg.r)
        elif s:
            budgets = np.asarray(budgets if budgets is not None else np.zeros(s, dtype=int)).reshape(s)
            for i in self.strategic_ids:
                b = int(budgets[i])
                if not 0 <= b <= cfg.r:
                    raise ValueError(f"budget {b} outside 0..{cfg.r}")
                all_reports[i] = self.solve(i, b).report

        priority = draw_priority(cfg.m, self.rng["election"])
        coins = self.rng["outcome"].integers(0, 2, size=cfg.r).astype(BIT_DTYPE)
        h0 = self.credibility

        counts = tally(self.profile, all_reports, h0)
        committee = elect(counts, cfg.k, priority=priority)
        honest_counts = tally(self.profile, self.truths, h0)
        pivotal = np.array(
            [elected_by_pandering(c, counts, honest_counts[c], committee, cfg.k, priority) for c in self.strategic_ids],
            dtype=bool,
        )

        play = dict(beta1=cfg.beta1, beta2=cfg.beta2, beta3=cfg.beta3, coins=coins, weight_basis=self.weight_basis)
        ledger = run_round(cfg.system, self.profile, self.truths, all_reports, h0, committee, **play)
        honest_committee = elect(honest_counts, cfg.k, priority=priority)
        if np.array_equal(all_reports, self.truths):
            cf_outcomes = ledger.outcomes.copy()
        else:
            cf = run_round(cfg.system, self.profile, self.truths, self.truths, h0, honest_committee, **play)
            cf_outcomes = cf.outcomes

        if self.malicious:
            rewards = np.full(s, malicious_reward(ledger.outcomes, cf_outcomes))
        else:
            rewards = np.array([selfish_reward(pivotal[i], ledger.outcomes, self.truths[i]) for i in self.strategic_ids])

        majority = self.majority
        self.credibility = ledger.final_credibility.copy()
        self.round += 1
        self.done = self.round >= cfg.rounds
        if not self.done:
            self._sample_round()
        return StepResult(
            observations=self.observations(),
            rewards=rewards,
            done=self.done,
            ledger=ledger,
            committee=committee,
            outcomes=ledger.outcomes,
            counterfactual_outcomes=cf_outcomes,
            majority=majority,
            elected_by_pandering=pivotal,
            reports=all_reports,
            priority=priority,
        )

    # -- snapshots -----------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "round": self.round,
            "done": self.done,
            "credibility": self.credibility.tolist(),
            "profile": None if self.profile is None else self.profile.tolist(),
            "truths": None if self.truths is None else self.truths.tolist(),
            "majority": None if self.majority is None else self.majority.tolist(),
            "rng": self.rng.get_state(),
        }

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True)

    @classmethod
    def restore(cls, snap: dict | str) -> "PanderingEnv":
        if isinstance(snap, str):
            snap = json.loads(snap)
        env = cls(SystemConfig(**snap["config"]), RngStream.from_state(snap["rng"]))
        env.round = snap["round"]
        env.done = snap["done"]
        env.credibility = np.array(snap["credibility"], dtype=float)
        if snap["profile"] is not None:
            env.profile = np.array(snap["profile"], dtype=BIT_DTYPE)
            env.truths = np.array(snap["truths"], dtype=BIT_DTYPE)
            env.majority = np.array(snap["majority"], dtype=BIT_DTYPE)
            env._cache = ReportCache(env.profile)
        return env
