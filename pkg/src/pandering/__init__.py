"""Simulation and attack evaluation of candidate pandering in RD and FRD."""

from .elections import approves, elect, tally
from .env import PanderingEnv, StepResult
from .governance import run_round
from .model import CandidateKind, CandidateState, ConfigError, RngStream, System, SystemConfig, agreement, hamming
from .solver import SolverResult, cmap_solve, map_bruteforce

__all__ = [
    "CandidateKind",
    "CandidateState",
    "ConfigError",
    "PanderingEnv",
    "RngStream",
    "SolverResult",
    "StepResult",
    "System",
    "SystemConfig",
    "agreement",
    "approves",
    "cmap_solve",
    "elect",
    "hamming",
    "map_bruteforce",
    "run_round",
    "tally",
]
