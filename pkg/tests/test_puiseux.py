import random
from fractions import Fraction

import pytest

from conftest import random_arcs
from lipsnakes.errors import IndeterminateError, ParseError
from lipsnakes.exponents import INF, format_exp, is_inf, parse_exp
from lipsnakes.puiseux import RuledFamily, Series, make_arc, parse_series, tord_arc_family, tord_arcs


def arc(name, *coords):
    return make_arc(name, [parse_series(c) for c in coords])


def test_parse_exp():
    """Exponents read as ints, fractions or inf."""
    assert parse_exp("3/2") == Fraction(3, 2)
    assert parse_exp(" 2 ") == Fraction(2)
    assert is_inf(parse_exp("inf"))
    assert format_exp(Fraction(6, 4)) == "3/2"
    assert format_exp(INF) == "inf"


@pytest.mark.parametrize("text", ["1/0", "x", "1.5", ""])
def test_parse_exp_rejects(text):
    with pytest.raises(ParseError):
        parse_exp(text)


def test_series_terms_and_truncation():
    """Like terms collect; terms past O(.) are dropped."""
    s = parse_series("t - 2*t^(3/2) + 3*t^(3/2) + t^4 + O(t^3)")
    assert s.terms == ((Fraction(1), Fraction(1)), (Fraction(3, 2), Fraction(1)))
    assert s.truncation == 3
    assert not s.is_exact


def test_series_str():
    s = parse_series("t - 2*t^(3/2) + O(t^3)")
    assert str(s) == "t - 2*t^(3/2) + O(t^3)"
    assert str(parse_series("1/2*t^2")) == "1/2*t^2"
    assert str(Series.zero()) == "0"


def test_series_error_column():
    """The column points at the offending character."""
    with pytest.raises(ParseError) as err:
        parse_series("t + 2*x")
    assert err.value.column == 7


def test_series_rejects_decimal_exponent():
    with pytest.raises(ParseError, match="non-rational exponent"):
        parse_series("t^1.5")


def test_leading_exponent_of_truncated_zero():
    with pytest.raises(IndeterminateError):
        Series.of([], truncation=Fraction(2)).leading_exponent()
    assert is_inf(Series.zero().leading_exponent())


def test_arc_must_be_normalized():
    with pytest.raises(ParseError, match="expected 1"):
        arc("bad", "t^2", "t^3")


def test_tord_arcs():
    g1 = arc("g1", "t", "-t^(3/2)", "0")
    g2 = arc("g2", "t", "t^(3/2)", "0")
    l1 = arc("l1", "t", "-t", "t")
    assert tord_arcs(g1, g2) == Fraction(3, 2)
    assert tord_arcs(g1, l1) == 1
    assert is_inf(tord_arcs(g1, g1))


def test_tord_undecided_by_truncation():
    """Cancellation down to the truncation leaves the order unknown."""
    a = arc("a", "t", "t^2 + O(t^3)")
    b = arc("b", "t", "t^2 + O(t^3)")
    c = arc("c", "t", "t^2 + t^(5/2) + O(t^3)")
    with pytest.raises(IndeterminateError):
        tord_arcs(a, b)
    assert tord_arcs(a, c) == Fraction(5, 2)


def test_ruled_family_member():
    a = arc("a", "t", "0")
    b = arc("b", "t", "2*t")
    fam = RuledFamily(a, b, "T")
    mid = fam.member(Fraction(1, 2))
    assert str(mid) == "(t, t)"
    assert mid.name == "T[1/2]"


def test_tord_arc_family_finds_special_member():
    """An arc hugging one ruling inside the family is closer than to either end."""
    a = arc("a", "t", "-t", "0")
    b = arc("b", "t", "t", "0")
    inside = arc("x", "t", "t^2", "0")
    fam = RuledFamily(a, b, "T")
    assert tord_arcs(inside, a) == 1
    assert tord_arcs(inside, b) == 1
    assert tord_arc_family(inside, fam) == 2


HALF_STEPS = (Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3))


def test_tord_is_symmetric_on_random_arcs():
    rng = random.Random(11)
    for _ in range(20):
        arcs = random_arcs(rng, 5, HALF_STEPS)
        for a in arcs:
            assert is_inf(tord_arcs(a, a))
            for b in arcs:
                assert tord_arcs(a, b) == tord_arcs(b, a)


def test_tord_is_non_archimedean_on_random_arcs():
    """tord(b, c) >= min(tord(a, b), tord(a, c)), with equality when the two differ."""
    rng = random.Random(12)
    for _ in range(200):
        a, b, c = random_arcs(rng, 3, HALF_STEPS)
        ab, ac, bc = tord_arcs(a, b), tord_arcs(a, c), tord_arcs(b, c)
        assert bc >= min(ab, ac)
        if ab != ac:
            assert bc == min(ab, ac)


def test_negative_integer_power_round_trips():
    s = Series.of([(-1, 1), (1, 2)])
    assert str(s) == "t^(-1) + 2*t"
    assert parse_series(str(s)) == s


def test_truncated_series_as_expression():
    s = parse_series("t + O(t^2)")
    assert s.as_expr().getO() is not None
    assert s.order_bound() == (1, True)
