from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from coalgmin.functor import (
    Coproduct, Distribution, MonoidValued, Neighbourhood, Powerset, Product, parse_functor_expr,
)
from coalgmin.generators import SplitMix64, random_term
from coalgmin.monoids import ArithmeticOverflow
from coalgmin.signature import (
    IDENTITY, TermError, decode_sig, encode_sig, map_term, minimal_sets, normalize_term, renumber,
    renumber_prime, successors, validate_term,
)

from oracles import image

FUNCTORS = [
    "P(X)", "P({a,b} * X)", "{F,T} * X * X", "{F,T} * D(X)", "B^(X)", "N^(X)", "Z^(X)", "W^(X)",
    "Q^(X)", "N(X)", "P(D(X))", "stop: 1 + go: {a,b} * X + fork: P(X) * X",
    "Z * Z^(4 * X^2)", "P(N(X))", "B * Q^(P(X))",
]

functors = st.sampled_from(FUNCTORS).map(parse_functor_expr)
seeds = st.integers(0, 2**64 - 1)


def terms_for(f, seed, n, count):
    rng = SplitMix64(seed)
    return [random_term(rng, f, n) for _ in range(count)]


@given(functors, seeds, st.integers(1, 6), st.lists(st.integers(0, 3), min_size=6, max_size=6))
def test_equal_sigs_iff_equal_images(f, seed, n, p):
    p = p[:n]
    ts = terms_for(f, seed, n, 8)
    for a in ts:
        for b in ts:
            same_sig = encode_sig(f, a, p) == encode_sig(f, b, p)
            assert same_sig == (image(f, a, p) == image(f, b, p))


@given(functors, seeds, st.integers(1, 6), st.lists(st.integers(0, 3), min_size=6, max_size=6),
       st.lists(st.integers(0, 5), min_size=6, max_size=6))
def test_functoriality(f, seed, n, p, g):
    # encoding under p after g equals encoding of the g-renamed term under p
    g = [v % n for v in g[:n]]
    p = p[:n]
    (t,) = terms_for(f, seed, n, 1)
    pg = [p[g[x]] for x in range(n)]
    assert encode_sig(f, t, pg) == encode_sig(f, map_term(f, t, g), p)


def shuffled(f, t, rnd):
    """Permute every set-like collection inside ``t``, recursively."""
    if isinstance(f, Product):
        return tuple(shuffled(c, x, rnd) for c, x in zip(f.components, t))
    if isinstance(f, Coproduct):
        return (t[0], shuffled(f.variants[t[0]][1], t[1], rnd))
    if isinstance(f, Powerset):
        items = [shuffled(f.inner, c, rnd) for c in t]
    elif isinstance(f, (MonoidValued, Distribution)):
        items = [(shuffled(f.inner, c, rnd), w) for c, w in t]
    elif isinstance(f, Neighbourhood):
        items = []
        for a in t:
            a = list(a)
            rnd.shuffle(a)
            items.append(tuple(a))
    else:
        return t
    rnd.shuffle(items)
    return tuple(items)


@given(functors, seeds, st.integers(1, 6), st.lists(st.integers(0, 3), min_size=6, max_size=6),
       st.randoms(use_true_random=False))
def test_order_insensitive(f, seed, n, p, rnd):
    (t,) = terms_for(f, seed, n, 1)
    p = p[:n]
    assert encode_sig(f, shuffled(f, t, rnd), p) == encode_sig(f, t, p)


@given(functors, seeds, st.integers(1, 6), st.lists(st.integers(0, 3), min_size=6, max_size=6))
def test_decode_round_trip(f, seed, n, p):
    p = p[:n]
    (t,) = terms_for(f, seed, n, 1)
    data = encode_sig(f, t, p)
    assert encode_sig(f, normalize_term(f, map_term(f, t, p)), IDENTITY) == data
    decoded = decode_sig(f, data)
    assert decoded == decode_sig(f, encode_sig(f, map_term(f, t, p), IDENTITY))


@given(functors, seeds, st.integers(1, 6), st.lists(st.integers(0, 5), min_size=12, max_size=12))
def test_same_sig_when_successors_agree(f, seed, n, ps):
    (t,) = terms_for(f, seed, n, 1)
    p1 = ps[:n]
    p2 = ps[6:6 + n]
    succ = successors(f, t)
    p2 = [p1[x] if x in succ else p2[x] for x in range(n)]
    assert encode_sig(f, t, p1) == encode_sig(f, t, p2)


def test_powerset_dedup():
    f = parse_functor_expr("P(X)")
    assert encode_sig(f, (1, 1, 1), IDENTITY) == encode_sig(f, (1,), IDENTITY)
    assert decode_sig(f, encode_sig(f, (1, 1, 1), IDENTITY)) == frozenset({1})


def test_markov_collapse():
    f = parse_functor_expr("{F,T} * D(X)")
    t = (0, ((1, Fraction(1, 4)), (3, Fraction(1, 2)), (4, Fraction(1, 4))))
    p = list(range(5))
    p[4] = 1
    p[2] = 1
    expected = (0, ((1, Fraction(1, 2)), (3, Fraction(1, 2))))
    assert encode_sig(f, t, p) == encode_sig(f, expected, IDENTITY)
    assert decode_sig(f, encode_sig(f, t, p)) == (0, frozenset({(1, Fraction(1, 2)), (3, Fraction(1, 2))}))


def test_neighbourhood_antichain():
    f = parse_functor_expr("N(X)")
    sig = encode_sig(f, ((1, 2), (1,), (2, 3)), IDENTITY)
    assert decode_sig(f, sig) == frozenset({frozenset({1}), frozenset({2, 3})})


@given(st.lists(st.lists(st.integers(0, 6), max_size=4), max_size=6))
def test_minimal_sets_is_strict_antichain(family):
    kept = minimal_sets(family)
    sets = [frozenset(s) for s in kept]
    assert len(set(sets)) == len(sets)
    assert not any(a < b for a in sets for b in sets)
    # every input set contains some survivor
    assert all(any(k <= frozenset(s) for k in sets) for s in family)


@given(seeds, st.sampled_from(["B^(X)", "N^(X)", "Z^(X)", "W^(X)", "Q^(X)"]))
def test_zero_weights_absent(seed, text):
    f = parse_functor_expr(text)
    (t,) = terms_for(f, seed, 3, 1)
    p = [0, 0, 0]
    for key, w in decode_sig(f, encode_sig(f, t, p)):
        assert w != f.monoid.zero


@given(seeds, st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_distribution_weights_sum_to_one(seed, p):
    f = parse_functor_expr("D(X)")
    (t,) = terms_for(f, seed, 4, 1)
    decoded = decode_sig(f, encode_sig(f, t, p))
    assert sum(w for _, w in decoded) == 1
    assert all(w > 0 for _, w in decoded)


@pytest.mark.parametrize("text, term", [
    ("Z^(X)", ((0, 2**62), (1, 2**62), (0, 2**62))),
    ("Z^(X)", ((0, -(2**62)), (1, -(2**62)), (0, -(2**62)))),
    ("N^(X)", ((0, 2**63), (0, 2**63))),
    ("Q^(X)", ((0, Fraction(1, 2**40)), (0, Fraction(1, 3**30)))),
])
def test_overflow(text, term):
    f = parse_functor_expr(text)
    with pytest.raises(ArithmeticOverflow):
        encode_sig(f, term, [0, 0])


def test_word64_or_saturates_without_overflow():
    f = parse_functor_expr("W^(X)")
    t = ((0, 2**64 - 1), (0, 2**64 - 1))
    assert decode_sig(f, encode_sig(f, t, [0])) == frozenset({(0, 2**64 - 1)})


def test_successors():
    assert successors(parse_functor_expr("P(X)"), (1, 2, 3)) == {1, 2, 3}
    assert successors(parse_functor_expr("P(X)"), ()) == set()
    f = parse_functor_expr("{F,T} * D(X)")
    assert successors(f, (0, ((1, Fraction(1, 4)), (3, Fraction(1, 2)), (4, Fraction(1, 4))))) == {1, 3, 4}
    assert successors(parse_functor_expr("N(X)"), ((1, 2), (2, 5))) == {1, 2, 5}


@pytest.mark.parametrize("text, term, message", [
    ("P(X)", (5,), "out of range"),
    ("{F,T} * X", (2, 0), "label index"),
    ("{F,T} * X", (0,), "expected 2 components"),
    ("D(X)", ((0, Fraction(1, 3)), (1, Fraction(1, 3))), "does not sum to 1"),
    ("D(X)", ((0, Fraction(3, 2)), (1, Fraction(-1, 2))), "positive"),
    ("Z^(X)", ((0, 0),), "zero weight"),
    ("1 + X", (2, 0), "expected (variant, payload)"),
    ("N(X)", ((0, 9),), "out of range"),
])
def test_validate_errors(text, term, message):
    with pytest.raises(TermError, match=message.replace("(", r"\(").replace(")", r"\)")):
        validate_term(parse_functor_expr(text), term, 2)


@pytest.mark.parametrize("sigs, expected", [
    ([b"b", b"a", b"a", b"c"], [0, 1, 1, 2]),
    ([], []),
    ([b"x"] * 5, [0] * 5),
])
def test_renumber(sigs, expected):
    assert renumber(sigs) == expected


@given(st.lists(st.binary(max_size=2), max_size=30))
def test_renumber_contract(sigs):
    ids = renumber(sigs)
    assert sorted(set(ids)) == list(range(len(set(sigs))))
    for i in range(len(sigs)):
        for j in range(len(sigs)):
            assert (ids[i] == ids[j]) == (sigs[i] == sigs[j])


@pytest.mark.parametrize("dirty, clean, expected", [
    ([b"s", b"t", b"s"], b"t", [1, 0, 1]),
    ([b"s"], None, [0]),
    ([b"s", b"t"], b"r", [1, 2]),
    ([b"t", b"t"], b"t", [0, 0]),
])
def test_renumber_prime(dirty, clean, expected):
    assert renumber_prime(dirty, clean) == expected


@given(st.lists(st.sampled_from([b"a", b"b", b"c"]), max_size=12), st.sampled_from([None, b"a", b"z"]))
def test_renumber_prime_contract(dirty, clean):
    a = renumber_prime(dirty, clean)
    for i in range(len(dirty)):
        if clean is not None:
            assert (a[i] == 0) == (dirty[i] == clean)
        for j in range(len(dirty)):
            assert (a[i] == a[j]) == (dirty[i] == dirty[j])
    assert all(0 <= v <= len(dirty) for v in a)
