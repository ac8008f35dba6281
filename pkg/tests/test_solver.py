import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pandering.model import hamming
from pandering.solver import (
    ReportCache,
    UnsupportedSize,
    ball_size,
    cmap_branch_and_bound,
    cmap_enumerate,
    cmap_solve,
    count_approvals,
    greedy_report,
    map_bruteforce,
    random_budget,
    random_report,
)

V3 = np.array([[1, 1, 1], [1, 1, 0], [0, 0, 0]])


def oracle(profile, truth, a):
    """Plain itertools scan: (approvals, lies, report) under the documented tie order."""
    r = profile.shape[1]
    best = None
    for bits in itertools.product((0, 1), repeat=r):
        lies = sum(b != t for b, t in zip(bits, truth))
        if lies > a:
            continue
        app = sum(2 * sum(b != v for b, v in zip(bits, row)) < r for row in profile.tolist())
        key = (-app, lies, bits)
        if best is None or key < best:
            best = key
    return -best[0], best[1], np.array(best[2])


def instances(max_n=8, max_r=6):
    return st.integers(0, 2**32 - 1).map(lambda s: _instance(s, max_n, max_r))


def _instance(seed, max_n, max_r):
    rng = np.random.default_rng(seed)
    n, r = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_r + 1))
    return rng.integers(0, 2, (n, r)), rng.integers(0, 2, r), int(rng.integers(0, r + 1))


def test_map_examples():
    res = map_bruteforce([[1, 0, 1]])
    # copying the voter is optimal, but (0, 0, 1) ties and is lexicographically smaller
    assert res.approvals == count_approvals([[1, 0, 1]], [1, 0, 1]) == 1
    assert res.report.tolist() == [0, 0, 1]
    assert map_bruteforce(V3).approvals == 2
    assert map_bruteforce(np.tile([0, 1, 1, 0], (6, 1))).approvals == 6


def test_map_size_guard():
    with pytest.raises(UnsupportedSize):
        map_bruteforce(np.zeros((1, 23), dtype=int))


def test_cmap_examples():
    truth = np.zeros(3, dtype=int)
    res = cmap_solve(V3, truth, 0)
    assert res.report.tolist() == [0, 0, 0] and res.lies == 0
    res = cmap_solve(V3, truth, 1)
    assert (res.report.tolist(), res.approvals, res.lies) == ([0, 1, 0], 2, 1)
    assert cmap_solve(V3, truth, 3).approvals == map_bruteforce(V3).approvals == 2


def test_cmap_budget_range():
    with pytest.raises(ValueError):
        cmap_solve(V3, [0, 0, 0], 4)
    with pytest.raises(ValueError):
        cmap_solve(V3, [0, 0, 0], -1)


@settings(max_examples=250, deadline=None)
@given(instances())
def test_solvers_match_oracle(inst):
    prof, truth, a = inst
    app, lies, rep = oracle(prof, truth, a)
    for method in ("enumerate", "bnb"):
        res = cmap_solve(prof, truth, a, method=method)
        assert (res.approvals, res.lies, res.report.tolist()) == (app, lies, rep.tolist()), method
    assert ReportCache(prof).solve(truth, a) == cmap_solve(prof, truth, a)
    full = cmap_solve(prof, truth, prof.shape[1])
    assert full.approvals == map_bruteforce(prof).approvals


@settings(max_examples=100, deadline=None)
@given(instances(max_n=12, max_r=9))
def test_budget_monotone_and_feasible(inst):
    prof, truth, _ = inst
    r = prof.shape[1]
    cache = ReportCache(prof)
    prev = -1
    for a in range(r + 1):
        res = cache.solve(truth, a)
        assert hamming(truth, res.report) == res.lies <= a
        assert count_approvals(prof, res.report) == res.approvals
        assert res.approvals >= prev
        prev = res.approvals


def test_branch_and_bound_agrees_beyond_enumeration_limit():
    rng = np.random.default_rng(9)
    for _ in range(2):
        prof = rng.integers(0, 2, (20, 24))
        truth = rng.integers(0, 2, 24)
        a = 8
        assert ball_size(24, a) > 2**20
        auto = cmap_solve(prof, truth, a)  # dispatches to branch-and-bound
        assert auto == cmap_branch_and_bound(prof, truth, a)
        assert hamming(truth, auto.report) <= a
    # on a size both paths handle, they agree exactly
    prof, truth = rng.integers(0, 2, (15, 14)), rng.integers(0, 2, 14)
    for a in (3, 7, 14):
        assert cmap_enumerate(prof, truth, a) == cmap_branch_and_bound(prof, truth, a)


def test_greedy_report_examples():
    rng = np.random.default_rng(0)
    assert greedy_report(V3, rng).tolist() == [1, 1, 0]
    assert greedy_report(np.tile([0, 1, 1], (4, 1)), rng).tolist() == [0, 1, 1]
    assert greedy_report([[1, 0, 0, 1]], rng).tolist() == [1, 0, 0, 1]


def test_random_budget_uniform():
    rng = np.random.default_rng(1)
    r = 9
    freq = np.bincount([random_budget(r, rng) for _ in range(10_000)], minlength=r + 1) / 10_000
    assert np.all(np.abs(freq - 1 / (r + 1)) <= 0.01)


def test_random_report_fair_and_deterministic():
    truth = np.zeros(9, dtype=int)
    rng = np.random.default_rng(2)
    bits = np.array([random_report(truth, rng) for _ in range(10_000)])
    assert np.all(np.abs(bits.mean(axis=0) - 0.5) <= 0.02)
    a = random_report(truth, np.random.default_rng(5))
    assert np.array_equal(a, random_report(truth, np.random.default_rng(5)))
