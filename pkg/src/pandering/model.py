"""Domain types, seeded randomness and the Hamming/agreement primitives.

Issue vectors are 1-d ``numpy`` arrays of ``0``/``1`` values (``int8``) and a
round profile is an ``(n, r)`` array holding one voter per row.
"""

from __future__ import annotations

import enum
import zlib
from dataclasses import asdict, dataclass

import numpy as np

BIT_DTYPE = np.int8


class ConfigError(ValueError):
    """Raised for configurations that violate their documented invariants."""


class System(str, enum.Enum):
    RD = "RD"
    FRD = "FRD"


class CandidateKind(str, enum.Enum):
    TRUTHFUL = "truthful"
    SELFISH = "selfish"
    MALICIOUS = "malicious"


def as_issue_vector(bits, r: int | None = None) -> np.ndarray:
    """Validate ``bits`` and return them as a binary ``int8`` vector."""
    vec = np.asarray(bits)
    if vec.ndim != 1:
        raise ValueError(f"issue vector must be 1-d, got shape {vec.shape}")
    if r is not None and vec.shape[0] != r:
        raise ValueError(f"issue vector has length {vec.shape[0]}, expected {r}")
    if vec.size and not ((vec == 0) | (vec == 1)).all():
        raise ValueError("issue vector entries must be 0 or 1")
    return vec.astype(BIT_DTYPE, copy=False)


def as_profile(rows, r: int | None = None) -> np.ndarray:
    prof = np.asarray(rows)
    if prof.ndim != 2:
        raise ValueError(f"profile must be 2-d (voters x issues), got shape {prof.shape}")
    if r is not None and prof.shape[1] != r:
        raise ValueError(f"profile has {prof.shape[1]} issues, expected {r}")
    if prof.size and not ((prof == 0) | (prof == 1)).all():
        raise ValueError("profile entries must be 0 or 1")
    return prof.astype(BIT_DTYPE, copy=False)


def hamming(x, y) -> int:
    """Number of issues on which ``x`` and ``y`` differ."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return int(np.count_nonzero(x != y))


def agreement(x, y) -> float:
    """Fraction of issues on which ``x`` and ``y`` agree."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    r = x.shape[-1]
    if r == 0:
        raise ValueError("agreement is undefined for empty vectors")
    return 1.0 - hamming(x, y) / r


def hamming_to_rows(profile: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Distance from ``vec`` to every row of ``profile``."""
    return np.count_nonzero(profile != vec, axis=1)


# --- randomness -----------------------------------------------------------

PURPOSES = (
    "profile",
    "election",
    "majority",
    "outcome",
    "exploration",
    "baseline",
    "replay",
    "init",
)


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


class RngStream:
    """Deterministic family of named generators.

    Every ``(seed, *path, purpose)`` triple maps to its own PCG64 stream, so
    draws for one purpose never shift the draws of another.
    """

    def __init__(self, seed: int, *path):
        self.seed = int(seed)
        self.path = tuple(path)
        self._gens: dict[str, np.random.Generator] = {}

    def child(self, *path) -> "RngStream":
        return RngStream(self.seed, *self.path, *path)

    def __getitem__(self, purpose: str) -> np.random.Generator:
        gen = self._gens.get(purpose)
        if gen is None:
            if purpose not in PURPOSES:
                raise KeyError(f"unknown rng purpose {purpose!r}")
            key = tuple(_key(p) for p in self.path) + (PURPOSES.index(purpose),)
            seq = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=key)
            gen = np.random.Generator(np.random.PCG64(seq))
            self._gens[purpose] = gen
        return gen

    def get_state(self) -> dict:
        return {
            "seed": self.seed,
            "path": list(self.path),
            "streams": {name: g.bit_generator.state for name, g in self._gens.items()},
        }

    @classmethod
    def from_state(cls, state: dict) -> "RngStream":
        stream = cls(state["seed"], *state["path"])
        for name, bg_state in state["streams"].items():
            stream[name].bit_generator.state = bg_state
        return stream


# --- sampling and majorities ----------------------------------------------


def sample_profile(n: int, r: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Draw an ``(n, r)`` profile of independent Bernoulli(p) bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return (rng.random((n, r)) < p).astype(BIT_DTYPE)


def voter_majority(profile: np.ndarray, t: int, rng: np.random.Generator) -> int:
    """Majority bit on issue ``t``; an exact tie consumes one fair coin."""
    col = profile[:, t]
    ones = int(col.sum())
    n = col.shape[0]
    if 2 * ones > n:
        return 1
    if 2 * ones < n:
        return 0
    return int(rng.integers(0, 2))


def majority_vector(profile: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Issue-wise voter majority.

    One coin is drawn per issue whether or not it is tied, so the number of
    draws does not depend on the profile.
    """
    n, r = profile.shape
    ones = profile.sum(axis=0, dtype=np.int64)
    coins = rng.integers(0, 2, size=r).astype(BIT_DTYPE)
    out = np.where(2 * ones > n, 1, 0).astype(BIT_DTYPE)
    tied = 2 * ones == n
    out[tied] = coins[tied]
    return out


# --- configuration and candidate state ------------------------------------


@dataclass
class SystemConfig:
    n: int = 50
    m: int = 10
    k: int = 5
    r: int = 9
    rounds: int = 100
    system: System = System.RD
    beta1: float = 0.95
    beta2: float = 0.003
    beta3: float = 0.01
    p: float = 0.5
    strategic_count: int = 0
    strategic_kind: CandidateKind = CandidateKind.SELFISH
    seed: int = 0
    # "report": FRD voters weight members by their public positions; "truth": by their votes
    frd_weight_basis: str = "report"

    def __post_init__(self):
        self.system = System(self.system)
        self.strategic_kind = CandidateKind(self.strategic_kind)
        self.validate()

    def validate(self) -> None:
        if self.n < 1 or self.r < 1 or self.rounds < 1:
            raise ConfigError("n, r and rounds must be positive")
        if not 0 < self.k <= self.m:
            raise ConfigError(f"need 0 < k <= m, got k={self.k}, m={self.m}")
        if not 0 <= self.strategic_count <= self.m:
            raise ConfigError(f"strategic_count must be in [0, m], got {self.strategic_count}")
        if self.strategic_count and self.strategic_kind is CandidateKind.TRUTHFUL:
            raise ConfigError("strategic candidates cannot be of kind 'truthful'")
        if not 0.0 <= self.beta1 <= 1.0:
            raise ConfigError(f"beta1 must be in [0, 1], got {self.beta1}")
        if self.beta2 < 0 or self.beta3 < 0:
            raise ConfigError("beta2 and beta3 must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must be in [0, 1], got {self.p}")
        if self.frd_weight_basis not in ("report", "truth"):
            raise ConfigError(f"frd_weight_basis must be 'report' or 'truth', got {self.frd_weight_basis!r}")

    def replace(self, **changes) -> "SystemConfig":
        d = self.to_dict()
        d.update(changes)
        return SystemConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["system"] = self.system.value
        d["strategic_kind"] = self.strategic_kind.value
        return d


@dataclass
class CandidateState:
    id: int
    kind: CandidateKind
    truth: np.ndarray
    report: np.ndarray
    credibility: float = 1.0

    def __post_init__(self):
        self.kind = CandidateKind(self.kind)
        self.truth = as_issue_vector(self.truth)
        self.report = as_issue_vector(self.report, self.truth.shape[0])
        if not 0.0 <= self.credibility <= 1.0:
            raise ValueError(f"credibility must be in [0, 1], got {self.credibility}")
        if self.kind is CandidateKind.TRUTHFUL and not np.array_equal(self.truth, self.report):
            raise ValueError("truthful candidates must report their true preferences")

    @property
    def strategic(self) -> bool:
        return self.kind is not CandidateKind.TRUTHFUL
