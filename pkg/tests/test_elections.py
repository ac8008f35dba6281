import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pandering.elections import approves, draw_priority, elect, tally
from pandering.model import agreement

V3 = np.array([[1, 1, 1], [1, 1, 0], [0, 0, 0]])


def test_approves_examples():
    v = np.ones(9, dtype=int)
    assert approves(v, v, 1.0)
    assert not approves(v, v, 0.45)
    five_of_nine = np.array([1, 1, 1, 1, 1, 0, 0, 0, 0])
    assert agreement(v, five_of_nine) == pytest.approx(5 / 9)
    assert approves(v, five_of_nine, 1.0)
    # 5/9 * 0.9 == 1/2 exactly, and the threshold is strict
    assert not approves(v, five_of_nine, 0.9)


def test_tally_examples():
    assert tally(V3, V3[[0, 0]], [1.0, 1.0]).tolist() == [2, 2]
    assert tally(V3, np.array([[1, 1, 0]]), [1.0]).tolist() == [2]
    same = np.tile([1, 0, 1], (4, 1))
    assert tally(same, same[:2], [1.0, 1.0]).tolist() == [4, 4]
    assert tally(same, same[:2], [0.0, 1.0]).tolist() == [0, 4]


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_tally_matches_scalar_oracle(seed):
    rng = np.random.default_rng(seed)
    n, m, r = rng.integers(1, 8), rng.integers(1, 5), rng.integers(1, 7)
    prof = rng.integers(0, 2, (n, r))
    reps = rng.integers(0, 2, (m, r))
    h = rng.choice([0.0, 0.3, 0.6, 0.75, 0.9, 1.0], size=m)
    expect = [sum(approves(v, reps[c], h[c]) for v in prof) for c in range(m)]
    assert tally(prof, reps, h).tolist() == expect


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1))
def test_tally_monotone_in_credibility(seed, h1, h2):
    rng = np.random.default_rng(seed)
    prof = rng.integers(0, 2, (10, 5))
    rep = rng.integers(0, 2, (1, 5))
    lo, hi = sorted((h1, h2))
    assert tally(prof, rep, [lo])[0] <= tally(prof, rep, [hi])[0]


def test_elect_examples():
    rng = np.random.default_rng(0)
    assert elect([5, 4, 3, 2, 1], 2, rng).tolist() == [0, 1]
    assert elect([5, 5, 5], 3, rng).tolist() == [0, 1, 2]


def test_elect_tie_at_cut_is_uniform():
    wins = Counter(tuple(elect([5, 3, 3, 1], 2, np.random.default_rng(s)).tolist()) for s in range(10_000))
    assert set(wins) == {(0, 1), (0, 2)}
    assert abs(wins[(0, 1)] / 10_000 - 0.5) <= 0.02


def test_elect_frozen_priority_replays():
    prio = draw_priority(6, np.random.default_rng(3))
    counts = [2, 2, 2, 2, 2, 2]
    a = elect(counts, 3, priority=prio)
    assert np.array_equal(a, elect(counts, 3, priority=prio))


def test_elect_requires_randomness_source():
    with pytest.raises(ValueError):
        elect([1, 2], 1)
    with pytest.raises(ValueError):
        elect([1, 2], 3, np.random.default_rng(0))


def test_elect_strict_winners_exhaustive():
    # over every tally in {0..3}^4 and every k, under every priority order
    for counts in itertools.product(range(4), repeat=4):
        counts = np.array(counts)
        for k in range(1, 5):
            cut = np.sort(counts)[::-1][k - 1]
            must = set(np.flatnonzero(counts > cut))
            for prio in itertools.permutations(range(4)):
                won = elect(counts, k, priority=np.array(prio))
                assert len(set(won.tolist())) == k
                assert must <= set(won.tolist())
                assert all(counts[c] >= cut for c in won)
