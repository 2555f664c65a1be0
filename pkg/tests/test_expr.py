import pytest
from hypothesis import given, settings, strategies as st

from qdc.expr import ParseError, format_poly, parse_expr
from qdc.ncalg import Polynomial, gen_code
from qdc.presentations import presentation
from qdc.scalars import field

from conftest import random_poly


def test_word():
    p = parse_expr("T[1,2]*Om[2,1]", 2)
    assert p.terms == {(gen_code("T", 1, 2), gen_code("Om", 2, 1)): field(2).one}


def test_scalar_expression():
    F = field(2)
    p = parse_expr("q^2 - lam*x", 2)
    assert p.degree() == 0
    assert p == Polynomial.const(F.q**2 - F.lam * F.x, 2)


def test_named_constants():
    F = field(3)
    assert parse_expr("Nq", 3) == Polynomial.const(F.nq, 3)
    assert parse_expr("kq", 3) == Polynomial.const(F.kq, 3)
    assert parse_expr("p^3", 3) == parse_expr("q", 3)


def test_negative_scalar_power():
    F = field(2)
    assert parse_expr("q^-1*T[1,1]", 2) == Polynomial.gen("T", 1, 1, 2).scale(F.q.inv())
    assert parse_expr("(q+1)^-2", 2) == Polynomial.const((F.q + 1) ** -2, 2)


def test_index_out_of_range():
    with pytest.raises(ParseError) as err:
        parse_expr("T[0,1]", 2)
    assert err.value.pos == 2


@pytest.mark.parametrize(
    "text",
    ["T[1,2", "T[1,2]*", "(q", "q)", "T[1;2]", "Foo", "T[1,1]^-1", "2 $ 3", "Om", "^2"],
)
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text, 2)


def test_symbols_and_matrix_symbol_rejected():
    pres = presentation("swz", 2)
    xi = parse_expr("XiX", 2, pres.symbols)
    assert xi == pres.symbols["XiX"]
    with pytest.raises(ParseError):
        parse_expr("OmX", 2, pres.symbols)


def test_leading_minus_and_parentheses():
    a = parse_expr("-(T[1,1] - T[2,2])", 2)
    assert a == parse_expr("T[2,2] - T[1,1]", 2)


def test_format_zero_and_constants():
    assert format_poly(Polynomial({}, 2)) == "0"
    assert format_poly(Polynomial.const(3, 2)) == "(3)"
    assert format_poly(Polynomial.gen("T", 1, 1, 2).scale(-1)) == "-T[1,1]"


def test_format_term_order_is_deterministic():
    p = parse_expr("T[1,1] + T[2,2]*T[1,1] + 2 + L[1,2]", 2)
    assert format_poly(p) == "T[2,2]*T[1,1] + L[1,2] + T[1,1] + (2)"


def test_round_trip_random(rng):
    for k in range(500):
        N = 2 + k % 2
        p = random_poly(rng, N, kinds=("T", "L", "Om", "OmL", "OmT", "Im", "ImL"), max_len=3, n_terms=4)
        s = format_poly(p)
        assert parse_expr(s, N) == p, s
        assert format_poly(parse_expr(s, N)) == s


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(1, 2), st.integers(1, 2)), max_size=4))
def test_round_trip_integer_coefficients(terms):
    p = Polynomial({}, 2)
    for c, i, j in terms:
        p = p + Polynomial.gen("L", i, j, 2).scale(c) * Polynomial.gen("Im", j, i, 2)
    assert parse_expr(format_poly(p), 2) == p
