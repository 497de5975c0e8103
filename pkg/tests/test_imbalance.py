import itertools

import pytest
from hypothesis import given, strategies as st

from relaysched.imbalance import (apply_interchange, interchange_ranks, kappa, lemma2_predicted_delta,
                                  min_kappa, rank_conditions_hold, valid_rank_pairs)
from relaysched.model import ContractViolation

from .oracles import kappa_direct

vectors = st.lists(st.integers(0, 50), min_size=1, max_size=10)


def test_kappa_examples():
    assert kappa([0, 0, 0, 0]) == 0
    assert kappa_direct([5, 3, 2, 1]) == 13
    assert kappa([5, 3, 2, 1]) == 13
    assert kappa([1, 2, 5, 3]) == 13
    assert kappa([4, 4, 4, 0]) == kappa_direct([4, 4, 4, 0]) == 12


@given(vectors)
def test_kappa_matches_double_sum(v):
    assert kappa(v) == kappa_direct(v)


@given(vectors, st.randoms(), st.integers(-20, 20))
def test_kappa_permutation_and_translation_invariant(v, rnd, shift):
    w = list(v)
    rnd.shuffle(w)
    assert kappa(w) == kappa(v)
    assert kappa([e + shift for e in v]) == kappa(v)


@given(vectors)
def test_kappa_zero_iff_balanced(v):
    assert (kappa(v) == 0) == (len(set(v)) == 1)


def test_apply_interchange_examples():
    assert apply_interchange([5, 3, 2, 1], 0, 3) == (4, 3, 2, 2)
    assert apply_interchange([3, 2], 0, 1) == (2, 3)
    with pytest.raises(ContractViolation):
        apply_interchange([2, 2], 0, 1)
    with pytest.raises(ContractViolation):
        apply_interchange([2, 2], 1, 0)


@given(st.lists(st.integers(0, 30), min_size=2, max_size=8), st.data())
def test_interchange_never_increases_kappa(v, data):
    pairs = [(i, j) for i in range(len(v)) for j in range(len(v)) if i != j and v[i] >= v[j] + 1]
    if not pairs:
        return
    i, j = data.draw(st.sampled_from(pairs))
    assert kappa(apply_interchange(v, i, j)) <= kappa(v)


def test_lemma2_examples():
    assert lemma2_predicted_delta([5, 3, 2, 1], 1, 4) == -6
    assert kappa([4, 3, 2, 2]) - kappa([5, 3, 2, 1]) == -6
    assert lemma2_predicted_delta([3, 2], 1, 2) == 0
    assert sorted(interchange_ranks([3, 2], 1, 2), reverse=True) == [3, 2]


def test_lemma2_rank_convention_regression():
    v = [4, 1, 1]
    # s=3 is not the first rank holding value 1, so the closed form does not apply
    assert not rank_conditions_hold(v, 1, 3)
    with pytest.raises(ContractViolation):
        lemma2_predicted_delta(v, 1, 3)
    observed_s3 = kappa(interchange_ranks(v, 1, 3)) - kappa(v)
    assert observed_s3 == -2 and -2 * (3 - 1) == -4
    assert list(valid_rank_pairs(v)) == [(1, 2)]
    assert lemma2_predicted_delta(v, 1, 2) == -2 == kappa(interchange_ranks(v, 1, 2)) - kappa(v)


def test_lemma2_small_exhaustive_against_double_sum():
    for dim in range(1, 5):
        for v in itertools.combinations_with_replacement(range(4, -1, -1), dim):
            for l, s in valid_rank_pairs(v):
                assert kappa_direct(interchange_ranks(v, l, s)) - kappa_direct(v) == lemma2_predicted_delta(v, l, s)


def test_equal_vectors_have_no_valid_pairs():
    assert list(valid_rank_pairs([3, 3, 3])) == []


def test_min_kappa():
    assert min_kappa(4, 4) == 12 == kappa_direct([4, 4, 4, 0])
    assert min_kappa(3, 0) == 0
    assert min_kappa(6, 1) == 5 == kappa_direct([1, 1, 1, 1, 1, 0])
    with pytest.raises(ContractViolation):
        min_kappa(1, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_min_kappa_is_minimum_over_equal_total(m, level):
    # vectors with dummy 0 whose M real entries sum to M * level
    best = min(kappa_direct((*real, 0)) for real in itertools.product(range(m * level + 1), repeat=m)
               if sum(real) == m * level)
    assert best == min_kappa(m + 1, level)
