import pytest
from hypothesis import given, strategies as st

from coalgmin.functor import (
    Const, Coproduct, Distribution, FunctorSyntaxError, MonoidConst, MonoidValued, Neighbourhood,
    Powerset, Product, StateVar, X, format_functor, parse_functor_expr,
)
from coalgmin.monoids import (
    BOOL_OR, INT_ADD, MONOIDS, NAT_ADD, RATIONAL_ADD, WORD64_OR, ArithmeticOverflow, monoid_by_name,
)

FT = Const(("F", "T"))


@pytest.mark.parametrize("text, expected", [
    ("{F,T} * X * X", Product((FT, X, X))),
    ("P(X)", Powerset(X)),
    ("{F,T} * D(X)", Product((FT, Distribution(X)))),
    ("P({a,b} * X)", Powerset(Product((Const(("a", "b")), X)))),
    ("Q^(X)", MonoidValued(RATIONAL_ADD, X)),
    ("W * W^(4 * X^2)", Product((MonoidConst(WORD64_OR), MonoidValued(WORD64_OR, Product((Const(("0", "1", "2", "3")), X, X)))))),
    ("N(X)", Neighbourhood()),
    ("P(D(X))", Powerset(Distribution(X))),
    ("  P (  X )  ", Powerset(X)),
    ("X^1", Product((X,))),
    ("stop: 1 + go: X", Coproduct((("stop", Const(("0",))), ("go", X)))),
    ("1 + X", Coproduct((("0", Const(("0",))), ("1", X)))),
    ("nat-add^(X)", MonoidValued(NAT_ADD, X)),
])
def test_parse(text, expected):
    assert parse_functor_expr(text) == expected


@pytest.mark.parametrize("text, offset", [
    ("P(", 2),
    ("", 0),
    ("X * ", 4),
    ("P(X))", 4),
    ("Y", 0),
    ("{a, a}", 4),
    ("N({a})", 2),
    ("X^0", 2),
    ("a: X + a: X", 11),
])
def test_syntax_errors(text, offset):
    with pytest.raises(FunctorSyntaxError) as exc:
        parse_functor_expr(text)
    assert exc.value.offset == offset
    assert f"offset {offset}" in str(exc.value)


def test_unknown_monoid():
    with pytest.raises(FunctorSyntaxError, match="unknown monoid"):
        parse_functor_expr("K^(X)")


atoms = st.sampled_from([
    X, FT, Const(("a", "b", "c")), Const(("0", "1")), Const(("x y", 'q"')), Neighbourhood(),
    MonoidConst(INT_ADD), MonoidConst(BOOL_OR),
])


def extend(children):
    return st.one_of(
        st.builds(Powerset, children),
        st.builds(Distribution, children),
        st.builds(MonoidValued, st.sampled_from(MONOIDS), children),
        st.lists(children, min_size=1, max_size=3).map(lambda cs: Product(tuple(cs))),
        st.lists(children, min_size=1, max_size=3).map(
            lambda cs: Coproduct(tuple((f"t{i}", c) for i, c in enumerate(cs)))),
    )


functors = st.recursive(atoms, extend, max_leaves=6)


@given(functors)
def test_format_round_trip(f):
    assert parse_functor_expr(format_functor(f)) == f


@pytest.mark.parametrize("name, monoid", [
    ("B", BOOL_OR), ("bool-or", BOOL_OR), ("nat", NAT_ADD), ("Z", INT_ADD), ("word64-or", WORD64_OR),
    ("rational-add", RATIONAL_ADD),
])
def test_monoid_lookup(name, monoid):
    assert monoid_by_name(name) is monoid


@pytest.mark.parametrize("monoid, value", [
    (NAT_ADD, -1), (NAT_ADD, 2**64), (WORD64_OR, 2**64), (INT_ADD, 2**63), (INT_ADD, -(2**63) - 1),
])
def test_monoid_range(monoid, value):
    with pytest.raises(ArithmeticOverflow):
        monoid.encode(value)


@pytest.mark.parametrize("monoid, text, value", [
    (RATIONAL_ADD, "2/4", RATIONAL_ADD.normalize(0.5)),
    (RATIONAL_ADD, "3", 3),
    (INT_ADD, "-0x10", -16),
    (BOOL_OR, "true", True),
    (BOOL_OR, "0", False),
])
def test_monoid_parse(monoid, text, value):
    assert monoid.parse(text) == value


@given(st.sampled_from(MONOIDS), st.integers(0, 2**62))
def test_monoid_encode_decode(monoid, raw):
    v = monoid.normalize(raw % 1000 if monoid is RATIONAL_ADD else raw)
    assert monoid.decode(monoid.encode(v)) == v
    assert len(monoid.encode(v)) == monoid.width
