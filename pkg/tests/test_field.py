from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import element_pairs, elements, laurent_polynomials
from tdscale.errors import ContextMismatchError, ParseError
from tdscale.field import INF, FieldContext, arith, component, format_element, parse_element

L2 = FieldContext.from_spec("laurent:2")
L3 = FieldContext.from_spec("laurent:3")
P2 = FieldContext.from_spec("padic:2")
P3 = FieldContext.from_spec("padic:3")


def test_padic_sum_of_inverse_powers():
    assert arith("add", P3("1/3"), P3("1/9")) == P3("4/9")


def test_laurent_product_over_f2():
    assert arith("mul", L2("X^-1 + 1"), L2("X + 1")) == L2("X^-1 + X")


@pytest.mark.parametrize("ctx", [L2, L3, P2, P3])
def test_add_zero(ctx):
    x = ctx("3") if ctx.kind == "padic" else ctx("X^-2 + 2*X")
    assert arith("add", x, ctx.zero) == x


def test_valuations():
    assert L2("X^-2 + X").valuation == -2
    assert P2("3/4").valuation == -2
    assert P3(0).valuation == INF
    assert L3(0).valuation == INF
    assert L3("(1)/(X^2 + X^3)").valuation == -2


def test_division_by_zero_and_context_mismatch():
    with pytest.raises(ZeroDivisionError):
        arith("div", P3(1), P3(0))
    with pytest.raises(ZeroDivisionError):
        arith("div", L2("X"), L2(0))
    with pytest.raises(ContextMismatchError):
        arith("add", P3(1), P2(1))
    with pytest.raises(ContextMismatchError):
        arith("add", L2(1), L3(1))


def test_components_of_sample():
    z = L3("X^-2 + X^-1 + 1 + X")
    expected = {1: "X", 2: "X^-2 + X^-1", 3: "1", 4: "1 + X", 5: "X^-1", 6: "X^-2"}
    for j, text in expected.items():
        assert component(z, j) == L3(text)
    for j in range(1, 7):
        assert component(L3(0), j) == L3(0)


def test_component_rejections():
    with pytest.raises(ContextMismatchError):
        component(P3(1), 1)
    with pytest.raises(ValueError):
        component(L3("(1)/(1 + X)"), 1)
    with pytest.raises(ValueError):
        component(L3("X"), 7)


def test_parse_errors_report_positions():
    with pytest.raises(ParseError) as exc:
        parse_element(L2, "X^^2")
    assert exc.value.position == 2
    with pytest.raises(ParseError):
        parse_element(P3, "1/0")
    with pytest.raises(ParseError):
        parse_element(P3, "1/x")
    with pytest.raises(ParseError):
        FieldContext.from_spec("padic:4")


def test_formatting_is_canonical():
    assert format_element(L3("X + 2*X^-1 + 0*X^5 + 1")) == "2*X^-1 + 1 + X^1"
    assert format_element(P3("6/4")) == "3/2"
    assert format_element(L2("X + X")) == "0"


def test_laurent_coefficients_reduce_mod_p():
    assert L3("4*X") == L3("X")
    assert L2("(X + 1)/(X^2 + 1)") == L2("(1)/(X + 1)")


@given(laurent_polynomials())
def test_partition_identities(z):
    c = [None] + [component(z, j) for j in range(1, 7)]
    assert c[1] + c[2] + c[3] == z
    assert c[4] + c[5] + c[6] == z
    assert c[4] == c[1] + c[3]
    assert c[2] == c[5] + c[6]


@given(element_pairs())
def test_ultrametric_inequality(pair):
    x, y = pair
    s = x + y
    assert s.valuation >= min(x.valuation, y.valuation)
    if x.valuation != y.valuation:
        assert s.valuation == min(x.valuation, y.valuation)


@given(element_pairs(nonzero=True))
def test_valuation_is_multiplicative(pair):
    x, y = pair
    assert (x * y).valuation == x.valuation + y.valuation
    assert (x / y).valuation == x.valuation - y.valuation


@settings(max_examples=60)
@given(element_pairs())
def test_ring_laws(pair):
    x, y = pair
    ctx = x.ctx
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) - y == x
    assert x * (y + ctx.one) == x * y + x
    if y:
        assert (x / y) * y == x
        assert y * y.inverse() == ctx.one


@given(elements())
def test_parse_format_roundtrip(x):
    text = format_element(x)
    again = parse_element(x.ctx, text)
    assert again == x
    assert format_element(again) == text
    assert hash(again) == hash(x)


@given(st.integers(-10 ** 6, 10 ** 6), st.integers(1, 10 ** 6))
def test_padic_matches_fraction_arithmetic(a, b):
    x = P3(Fraction(a, b))
    assert x.value == Fraction(a, b)
    assert (x * x).value == Fraction(a, b) ** 2
