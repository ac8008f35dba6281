"""Issue-by-issue decisions under RD and FRD and the credibility dynamics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BIT_DTYPE, System

WEIGHT_TOL = 1e-9


def _tie_bit(rng, coin) -> int:
    if coin is not None:
        return int(coin)
    if rng is None:
        raise ValueError("a tied decision needs an rng or a pre-drawn coin")
    return int(rng.integers(0, 2))


def rd_decide(committee_truths, t: int, rng=None, coin=None) -> int:
    """Simple majority of the committee's true preferences on issue ``t``."""
    col = np.asarray(committee_truths)[:, t]
    if col.shape[0] == 0:
        raise ValueError("committee is empty")
    ones = int(col.sum())
    if 2 * ones > col.shape[0]:
        return 1
    if 2 * ones < col.shape[0]:
        return 0
    return _tie_bit(rng, coin)


def frd_weights(profile, positions, credibilities, t: int) -> np.ndarray:
    """Weight each voter gives each committee member on issue ``t``.

    ``positions`` holds the members' positions the voters compare against
    (one row per member). A voter splits one unit of weight over the members
    that agree with them on ``t``, in proportion to credibility; a voter with
    no agreeing member of positive credibility splits it evenly.
    """
    profile = np.asarray(profile)
    positions = np.asarray(positions)
    h = np.asarray(credibilities, dtype=float)
    k = positions.shape[0]
    agree = profile[:, t][:, None] == positions[:, t][None, :]
    raw = agree * h[None, :]
    denom = raw.sum(axis=1)
    w = np.empty_like(raw)
    pos = denom > 0
    w[pos] = raw[pos] / denom[pos, None]
    w[~pos] = 1.0 / k
    return w


def frd_decide(weights, committee_truths, t: int, n: int, rng=None, coin=None) -> int:
    """Weighted majority: 1 iff the weight behind 1 exceeds n/2."""
    member_weight = np.asarray(weights).sum(axis=0)
    support = float(member_weight @ np.asarray(committee_truths)[:, t])
    half = n / 2.0
    if support > half + WEIGHT_TOL:
        return 1
    if support < half - WEIGHT_TOL:
        return 0
    return _tie_bit(rng, coin)


def credibility_after_vote(h: float, pandered: bool, beta1: float, beta2: float) -> float:
    if pandered:
        return beta1 * h
    return min((1.0 + beta2) * h, 1.0)


def credibility_unelected(h: float, beta3: float) -> float:
    return min((1.0 + beta3) * h, 1.0)


@dataclass
class RoundLedger:
    """Record of one round of decisions.

    ``credibility_trajectory`` has ``r + 1`` rows: row 0 is the round start,
    row ``t`` the value after issue ``t``. Unelected recovery is folded into
    the last row, which is the credibility entering the next round.
    """

    outcomes: np.ndarray
    pander_reveals: np.ndarray
    credibility_trajectory: np.ndarray
    max_weight_error: float = 0.0

    @property
    def final_credibility(self) -> np.ndarray:
        return self.credibility_trajectory[-1]


def run_round(
    system: System,
    profile,
    truths,
    reports,
    credibilities,
    committee,
    beta1: float,
    beta2: float,
    beta3: float,
    rng=None,
    coins=None,
    weight_basis: str = "report",
) -> RoundLedger:
    """Decide all issues of one round and evolve every candidate's credibility.

    ``truths``/``reports``/``credibilities`` cover all m candidates; only the
    ``committee`` rows vote. ``coins`` are pre-drawn tie-break bits for each
    issue, so two runs sharing them resolve ties identically; without them
    ties draw from ``rng``.
    """
    system = System(system)
    profile = np.asarray(profile)
    truths = np.asarray(truths)
    reports = np.asarray(reports)
    committee = np.asarray(committee)
    h = np.array(credibilities, dtype=float)
    n, r = profile.shape
    m = h.shape[0]

    member_truths = truths[committee]
    member_reports = reports[committee]
    lied = member_truths != member_reports
    positions = member_reports if weight_basis == "report" else member_truths

    outcomes = np.zeros(r, dtype=BIT_DTYPE)
    trajectory = np.empty((r + 1, m))
    trajectory[0] = h
    max_err = 0.0
    if system is System.FRD:
        # agree[v, i, t]: voter v shares member i's position on issue t
        agree = profile[:, None, :] == positions[None, :, :]
    hc = h[committee]
    for t in range(r):
        coin = None if coins is None else coins[t]
        if system is System.RD:
            outcomes[t] = rd_decide(member_truths, t, rng=rng, coin=coin)
        else:
            raw = agree[:, :, t] * hc
            denom = raw.sum(axis=1)
            if (denom <= 0).any():
                w = frd_weights(profile, positions, hc, t)
            else:
                w = raw / denom[:, None]
            max_err = max(max_err, float(np.abs(w.sum(axis=1) - 1.0).max()))
            outcomes[t] = frd_decide(w, member_truths, t, n, rng=rng, coin=coin)
        # same arithmetic as credibility_after_vote, applied member-wise
        hc = np.where(lied[:, t], beta1 * hc, np.minimum((1.0 + beta2) * hc, 1.0))
        h[committee] = hc
        trajectory[t + 1] = h

    unelected = np.ones(m, dtype=bool)
    unelected[committee] = False
    h[unelected] = np.minimum((1.0 + beta3) * h[unelected], 1.0)
    trajectory[r] = h

    assert np.all((trajectory >= 0.0) & (trajectory <= 1.0)), "credibility left [0, 1]"
    return RoundLedger(
        outcomes=outcomes,
        pander_reveals=lied,
        credibility_trajectory=trajectory,
        max_weight_error=max_err,
    )
