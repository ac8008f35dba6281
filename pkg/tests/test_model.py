import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pandering.model import (
    CandidateKind,
    CandidateState,
    ConfigError,
    RngStream,
    SystemConfig,
    agreement,
    as_issue_vector,
    hamming,
    majority_vector,
    sample_profile,
    voter_majority,
)


def bitvec(r):
    return st.lists(st.integers(0, 1), min_size=r, max_size=r).map(np.array)


@pytest.mark.parametrize(
    "x, y, d",
    [((0, 0, 0), (0, 0, 0), 0), ((1, 0, 1), (0, 0, 1), 1), ((1, 1, 1), (0, 0, 0), 3)],
)
def test_hamming_examples(x, y, d):
    assert hamming(x, y) == d


@pytest.mark.parametrize(
    "x, y, g",
    [((1, 0, 1), (1, 0, 1), 1.0), ((1, 1, 1), (0, 0, 0), 0.0), ((1, 1, 0), (1, 0, 0), 2 / 3)],
)
def test_agreement_examples(x, y, g):
    assert agreement(x, y) == pytest.approx(g)


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        hamming((1, 0), (1, 0, 1))
    with pytest.raises(ValueError):
        agreement((1,), (1, 0))


def test_issue_vector_validation():
    with pytest.raises(ValueError):
        as_issue_vector([0, 2, 1])
    with pytest.raises(ValueError):
        as_issue_vector([0, 1], r=3)


@settings(max_examples=200)
@given(st.integers(1, 12).flatmap(lambda r: st.tuples(bitvec(r), bitvec(r), bitvec(r))))
def test_hamming_is_a_metric(vecs):
    x, y, z = vecs
    assert hamming(x, y) >= 0
    assert (hamming(x, y) == 0) == np.array_equal(x, y)
    assert hamming(x, y) == hamming(y, x)
    assert hamming(x, z) <= hamming(x, y) + hamming(y, z)


@given(st.integers(1, 12).flatmap(lambda r: st.tuples(bitvec(r), bitvec(r))))
def test_agreement_complements_distance(vecs):
    x, y = vecs
    r = x.shape[0]
    assert agreement(x, y) + hamming(x, y) / r == pytest.approx(1.0, abs=1e-12)


def test_sample_profile_degenerate():
    rng = np.random.default_rng(0)
    assert not sample_profile(7, 5, 0.0, rng).any()
    assert sample_profile(7, 5, 1.0, rng).all()


def test_sample_profile_law_of_large_numbers():
    prof = sample_profile(10_000, 1, 0.5, np.random.default_rng(3))
    assert 0.48 <= prof.mean() <= 0.52


def test_sample_profile_reproducible():
    a = sample_profile(50, 9, 0.5, RngStream(42)["profile"])
    b = sample_profile(50, 9, 0.5, RngStream(42)["profile"])
    assert np.array_equal(a, b)
    c = sample_profile(50, 9, 0.5, RngStream(43)["profile"])
    assert not np.array_equal(a, c)


def test_voter_majority_strict():
    rng = np.random.default_rng(0)
    assert voter_majority(np.array([[1], [1], [0]]), 0, rng) == 1
    assert voter_majority(np.array([[0], [0], [1]]), 0, rng) == 0


def test_voter_majority_tie_is_fair():
    prof = np.array([[1], [0]])
    draws = [voter_majority(prof, 0, np.random.default_rng(seed)) for seed in range(10_000)]
    assert abs(np.mean(draws) - 0.5) <= 0.02


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_voter_majority_ignores_rng_without_ties(s1, s2):
    prof = np.array([[1, 0], [1, 0], [0, 1]])
    a = [voter_majority(prof, t, np.random.default_rng(s1)) for t in range(2)]
    b = [voter_majority(prof, t, np.random.default_rng(s2)) for t in range(2)]
    assert a == b == [1, 0]


def test_majority_vector_consumes_fixed_draws():
    # the stream position after the call must not depend on which issues tied
    tied = np.array([[1, 0], [0, 1]])
    untied = np.array([[1, 1], [1, 1]])
    g1, g2 = np.random.default_rng(5), np.random.default_rng(5)
    majority_vector(tied, g1)
    majority_vector(untied, g2)
    assert g1.random() == g2.random()


def test_rng_substreams_are_independent():
    a, b = RngStream(7), RngStream(7)
    a["election"].random(100)
    assert a["profile"].random() == b["profile"].random()
    assert RngStream(7, "x")["profile"].random() != RngStream(7, "y")["profile"].random()


def test_rng_state_round_trip():
    s = RngStream(11, "t")
    s["outcome"].integers(0, 2, size=17)
    clone = RngStream.from_state(s.get_state())
    assert np.array_equal(s["outcome"].random(5), clone["outcome"].random(5))


@pytest.mark.parametrize(
    "bad",
    [dict(k=0), dict(k=11), dict(strategic_count=11), dict(beta1=1.5), dict(beta2=-0.1), dict(p=2.0), dict(frd_weight_basis="x")],
)
def test_system_config_invariants(bad):
    with pytest.raises(ConfigError):
        SystemConfig(**bad)


def test_system_config_round_trip():
    cfg = SystemConfig(system="FRD", strategic_kind="malicious", strategic_count=2)
    assert SystemConfig(**cfg.to_dict()) == cfg


def test_candidate_state_invariants():
    with pytest.raises(ValueError):
        CandidateState(0, CandidateKind.TRUTHFUL, truth=[1, 0], report=[0, 0])
    with pytest.raises(ValueError):
        CandidateState(0, CandidateKind.SELFISH, truth=[1, 0], report=[0, 0], credibility=1.2)
    c = CandidateState(0, "selfish", truth=[1, 0], report=[0, 0], credibility=0.5)
    assert c.strategic
