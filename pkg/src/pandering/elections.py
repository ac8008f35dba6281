"""Credibility-discounted approvals and k-Approval committee selection."""

from __future__ import annotations

import numpy as np

from .model import hamming


def approves(voter, report, credibility: float) -> bool:
    """True iff agreement(voter, report) * credibility is strictly above 1/2."""
    voter = np.asarray(voter)
    r = voter.shape[0]
    agree = r - hamming(voter, report)
    # 2 * agree * h > r avoids the rounding error of dividing by r first
    return bool(2.0 * agree * credibility > r)


def tally(profile: np.ndarray, reports: np.ndarray, credibilities) -> np.ndarray:
    """Approval count of every candidate.

    ``reports`` is ``(m, r)``; the result has one count per candidate.
    """
    profile = np.asarray(profile)
    reports = np.asarray(reports)
    h = np.asarray(credibilities, dtype=float)
    r = profile.shape[1]
    # agree[v, c]: issues on which voter v agrees with candidate c's report
    agree = r - np.count_nonzero(profile[:, None, :] != reports[None, :, :], axis=2)
    return np.count_nonzero(2.0 * agree * h[None, :] > r, axis=0)


def draw_priority(m: int, rng: np.random.Generator) -> np.ndarray:
    """Random tie-break priority: ``priority[c]`` is candidate c's rank."""
    return rng.permutation(m)


def elect(counts, k: int, rng: np.random.Generator | None = None, priority=None) -> np.ndarray:
    """Pick the k most-approved candidates, sorted by id.

    Ties at the cut are broken by ``priority`` (lower rank wins). Pass a
    frozen ``priority`` to replay an election with identical tie-breaks;
    otherwise one is drawn from ``rng``. Candidates strictly above the cut
    are never displaced.
    """
    counts = np.asarray(counts)
    m = counts.shape[0]
    if not 0 < k <= m:
        raise ValueError(f"cannot elect k={k} of m={m} candidates")
    if priority is None:
        if rng is None:
            raise ValueError("elect needs either rng or a frozen priority")
        priority = draw_priority(m, rng)
    order = np.lexsort((priority, -counts))
    return np.sort(order[:k])
