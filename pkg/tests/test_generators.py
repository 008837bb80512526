import pytest
from hypothesis import given, settings, strategies as st

from coalgmin.formats import coalg_text
from coalgmin.generators import (
    SplitMix64, WtaSpec, gen_chain_ts, gen_cycle_dfa, gen_prob_ladder, gen_wta,
)
from coalgmin.minimize import minimize, naive_minimize, same_partition
from coalgmin.monoids import MONOIDS
from coalgmin.signature import validate_term

import oracles


def test_splitmix_reference_values():
    # first outputs for seed 1234567, from the published reference implementation
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(3)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
    ]


@given(st.integers(0, 2**64 - 1), st.integers(1, 1000))
def test_below_in_range(seed, bound):
    rng = SplitMix64(seed)
    assert all(0 <= rng.below(bound) < bound for _ in range(20))


@pytest.mark.parametrize("monoid", [m.name for m in MONOIDS])
def test_wta_deterministic_and_valid(monoid):
    a = gen_wta(WtaSpec(10, 2, monoid, 3, 7))
    b = gen_wta(WtaSpec(10, 2, monoid, 3, 7))
    assert coalg_text(a) == coalg_text(b)
    assert coalg_text(a) != coalg_text(gen_wta(WtaSpec(10, 2, monoid, 3, 8)))
    for t in a.terms:
        validate_term(a.functor, t, a.n)
        assert len(t[1]) == 3
        assert len({key for key, _ in t[1]}) == 3
    assert a.m <= 10 * 3 * 2
    assert a.m == sum(len(p) for p in oracles.invert(a.functor, a.terms))


def test_wta_rejects_bad_parameters():
    with pytest.raises(ValueError):
        WtaSpec(10, 0)
    with pytest.raises(ValueError):
        WtaSpec(10, k=0)


def test_wta_small_key_space():
    t = gen_wta(WtaSpec(1, 1, "nat-add", 10, 1))
    assert len(t.terms[0][1]) == 4


def test_wta_int_agrees_with_naive():
    t = gen_wta(WtaSpec(1000, 2, "int-add", 10, 7))
    assert same_partition(minimize(t).assignment, naive_minimize(t).assignment)


@pytest.mark.parametrize("monoid", ["bool-or", "word64-or"])
def test_wta_with_collisions_agrees_with_naive(monoid):
    t = gen_wta(WtaSpec(300, 1, monoid, 1, 3))
    fast = minimize(t)
    assert fast.assignment == naive_minimize(t).assignment


def test_cycle_shape():
    t = gen_cycle_dfa(8)
    assert t.terms[0] == (1, 0, 1)
    assert t.terms[7] == (0, 7, 0)
    assert minimize(t).block_count == 8
    with pytest.raises(ValueError):
        gen_cycle_dfa(1)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_cycle_naive_iterations_linear(n):
    assert naive_minimize(gen_cycle_dfa(n)).stats.iterations >= n // 2


def test_chain_shape():
    t = gen_chain_ts(5)
    assert t.terms == [(1,), (2,), (3,), (4,), ()]
    assert minimize(t).block_count == 5
    assert minimize(gen_chain_ts(1)).block_count == 1


def test_ladder_shape():
    t = gen_prob_ladder(10)
    half = t.terms[0][1][0][1]
    assert t.terms[0] == (1, ((1, half), (5, half)))
    assert t.terms[4] == (0, ((9, half),))
    assert t.terms[6] == (0, ((5, half), (1, half)))
    assert t.terms[9][0] == 1
    assert t.m == sum(len(p) for p in oracles.invert(t.functor, t.terms))
    with pytest.raises(ValueError):
        gen_prob_ladder(7)
    with pytest.raises(ValueError):
        gen_prob_ladder(2)


@settings(max_examples=10)
@given(st.sampled_from([4, 6, 10, 20]))
def test_ladder_matches_oracle(n):
    t = gen_prob_ladder(n)
    assert same_partition(minimize(t).assignment, oracles.bisimulation(t))
    assert same_partition(naive_minimize(t).assignment, oracles.bisimulation(t))
