"""Exact approval-maximizing report search and the baseline report generators.

A voter approves a report (at full credibility) iff they agree on strictly
more than half of the issues, i.e. ``2 * hamming(voter, report) < r``.

Ties among optimal reports are broken by fewest lies, then by the
lexicographically smallest report, so every solver here is deterministic.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import BIT_DTYPE, as_issue_vector, as_profile, hamming, majority_vector

MAP_MAX_ISSUES = 22
BALL_ENUMERATION_LIMIT = 2**20
_CHUNK = 1 << 16


class UnsupportedSize(ValueError):
    pass


@dataclass(frozen=True)
class SolverResult:
    report: np.ndarray
    approvals: int
    lies: int

    def __eq__(self, other):
        if not isinstance(other, SolverResult):
            return NotImplemented
        return (
            self.approvals == other.approvals
            and self.lies == other.lies
            and np.array_equal(self.report, other.report)
        )


def count_approvals(profile: np.ndarray, report) -> int:
    """Voters approving ``report`` at full credibility."""
    profile = np.asarray(profile)
    r = profile.shape[1]
    d = np.count_nonzero(profile != np.asarray(report), axis=1)
    return int(np.count_nonzero(2 * d < r))


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack rows of bits into integers, first issue as the most significant bit."""
    r = bits.shape[-1]
    weights = np.left_shift(np.int64(1), np.arange(r - 1, -1, -1, dtype=np.int64))
    return (bits.astype(np.int64) * weights).sum(axis=-1)


def _unpack(value: int, r: int) -> np.ndarray:
    shifts = np.arange(r - 1, -1, -1, dtype=np.int64)
    return ((np.int64(value) >> shifts) & 1).astype(BIT_DTYPE)


def map_bruteforce(profile) -> SolverResult:
    """Scan all 2^r reports for the one approved by the most voters."""
    profile = as_profile(profile)
    n, r = profile.shape
    if r > MAP_MAX_ISSUES:
        raise UnsupportedSize(f"exhaustive scan limited to r <= {MAP_MAX_ISSUES}, got r={r}")
    voters = _pack(profile)
    best_val, best_app = 0, -1
    for start in range(0, 1 << r, _CHUNK):
        cand = np.arange(start, min(start + _CHUNK, 1 << r), dtype=np.int64)
        d = np.bitwise_count(cand[:, None] ^ voters[None, :])
        app = np.count_nonzero(2 * d < r, axis=1)
        i = int(np.argmax(app))  # first maximum is the smallest report in the chunk
        if app[i] > best_app:
            best_app, best_val = int(app[i]), int(cand[i])
    return SolverResult(report=_unpack(best_val, r), approvals=best_app, lies=0)


@functools.lru_cache(maxsize=256)
def _flip_sets(r: int, size: int) -> np.ndarray:
    if size == 0:
        return np.zeros((1, 0), dtype=np.intp)
    return np.array(list(itertools.combinations(range(r), size)), dtype=np.intp)


def ball_size(r: int, a: int) -> int:
    return sum(math.comb(r, i) for i in range(a + 1))


def _flip_chunks(r: int, size: int):
    if math.comb(r, size) <= _CHUNK:
        yield _flip_sets(r, size)
        return
    it = itertools.combinations(range(r), size)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _apply_flips(truth: np.ndarray, flips: np.ndarray) -> np.ndarray:
    reports = np.repeat(truth[None, :], flips.shape[0], axis=0)
    if flips.shape[1]:
        rows = np.arange(flips.shape[0])[:, None]
        reports[rows, flips] ^= 1
    return reports


def cmap_enumerate(profile, truth, a: int) -> SolverResult:
    """Exhaustive search over the Hamming ball of radius ``a`` around ``truth``."""
    profile, truth = _check_cmap(profile, truth, a)
    n, r = profile.shape
    base = np.count_nonzero(profile != truth, axis=1)
    # flipping issue i moves voter v one step closer if they disagree with truth there
    delta = np.where(profile == truth, 1, -1).astype(np.int64)

    best_app, best_size, best_reports = -1, -1, []
    # sizes visited in increasing order, so the first size reaching the optimum has the fewest lies
    for size in range(a + 1):
        for flips in _flip_chunks(r, size):
            d = base[None, :] + delta[:, flips].sum(axis=2).T
            app = np.count_nonzero(2 * d < r, axis=1)
            top = int(app.max())
            if top > best_app:
                best_app, best_size = top, size
                best_reports = [_apply_flips(truth, flips[app == top])]
            elif top == best_app and size == best_size:
                best_reports.append(_apply_flips(truth, flips[app == top]))
    tied = np.concatenate(best_reports)
    order = np.lexsort(tied.T[::-1])
    report = tied[order[0]]
    return SolverResult(report=report, approvals=best_app, lies=hamming(report, truth))


def cmap_branch_and_bound(profile, truth, a: int) -> SolverResult:
    """Depth-first branch and bound over issues in index order.

    The bound for a partial report counts voters that could still be
    approved if every remaining flip were spent in their favour.
    """
    profile, truth = _check_cmap(profile, truth, a)
    n, r = profile.shape
    mismatch = (profile != truth).astype(np.int64)
    # suffix[:, j]: disagreements of each voter with truth on issues j..r-1
    suffix = np.zeros((n, r + 1), dtype=np.int64)
    suffix[:, :r] = np.cumsum(mismatch[:, ::-1], axis=1)[:, ::-1]

    best = {"app": count_approvals(profile, truth), "lies": 0, "report": truth.copy()}
    report = truth.copy()

    def bound(j, dist, lies):
        spare = a - lies
        reachable = dist + np.maximum(suffix[:, j] - spare, 0)
        return int(np.count_nonzero(2 * reachable < r))

    def visit(j, dist, lies):
        ub = bound(j, dist, lies)
        if ub < best["app"] or (ub == best["app"] and lies >= best["lies"]):
            return
        if j == r:
            best.update(app=ub, lies=lies, report=report.copy())
            return
        for bit in (0, 1):
            lie = int(bit != truth[j])
            if lies + lie > a:
                continue
            report[j] = bit
            visit(j + 1, dist + (profile[:, j] != bit), lies + lie)
        report[j] = truth[j]

    visit(0, np.zeros(n, dtype=np.int64), 0)
    return SolverResult(report=best["report"], approvals=best["app"], lies=best["lies"])


def cmap_solve(profile, truth, a: int, method: str = "auto") -> SolverResult:
    """Best report within ``a`` lies of ``truth``.

    ``method`` is ``"enumerate"``, ``"bnb"`` or ``"auto"`` (enumerate while the
    ball has at most 2^20 points).
    """
    profile, truth = _check_cmap(profile, truth, a)
    if method == "auto":
        method = "enumerate" if ball_size(truth.shape[0], a) <= BALL_ENUMERATION_LIMIT else "bnb"
    if method == "enumerate":
        return cmap_enumerate(profile, truth, a)
    if method == "bnb":
        return cmap_branch_and_bound(profile, truth, a)
    raise ValueError(f"unknown method {method!r}")


def _check_cmap(profile, truth, a):
    profile = as_profile(profile)
    truth = as_issue_vector(truth, profile.shape[1])
    r = truth.shape[0]
    if not 0 <= a <= r:
        raise ValueError(f"budget a must be in [0, {r}], got {a}")
    return profile, truth


class ReportCache:
    """Memoizes ``cmap_solve`` per round: one candidate's reports for every budget.

    The ball around ``truth`` is scanned once and answers all budgets, which
    is how baselines and learners query it repeatedly within a round.
    """

    def __init__(self, profile):
        self.profile = as_profile(profile)
        self._by_truth: dict[bytes, list[SolverResult]] = {}

    def solve(self, truth, a: int) -> SolverResult:
        truth = as_issue_vector(truth, self.profile.shape[1])
        key = truth.tobytes()
        table = self._by_truth.get(key)
        if table is None:
            table = _all_budgets(self.profile, truth)
            self._by_truth[key] = table
        return table[a]


def _all_budgets(profile, truth) -> list[SolverResult]:
    n, r = profile.shape
    if r > MAP_MAX_ISSUES:
        return [cmap_solve(profile, truth, a) for a in range(r + 1)]
    voters = _pack(profile)
    t = int(_pack(truth))
    masks = np.arange(1 << r, dtype=np.int64)
    lies = np.bitwise_count(masks)
    reports = masks ^ t
    app = np.count_nonzero(2 * np.bitwise_count(reports[:, None] ^ voters[None, :]) < r, axis=1)
    # rank: most approvals, then fewest lies, then smallest report
    order = np.lexsort((reports, lies, -app))
    results = []
    best = None
    for a in range(r + 1):
        feasible = order[lies[order] <= a]
        i = int(feasible[0])
        if best is None or best[0] != i:
            best = (i, SolverResult(report=_unpack(int(reports[i]), r), approvals=int(app[i]), lies=int(lies[i])))
        results.append(best[1])
    return results


def greedy_report(profile, rng: np.random.Generator) -> np.ndarray:
    """Issue-wise voter majority."""
    return majority_vector(as_profile(profile), rng)


def random_report(truth, rng: np.random.Generator) -> np.ndarray:
    r = np.asarray(truth).shape[0]
    return rng.integers(0, 2, size=r).astype(BIT_DTYPE)


def random_budget(r: int, rng: np.random.Generator) -> int:
    return int(rng.integers(0, r + 1))
