from fractions import Fraction

import pytest

from lipsnakes.errors import ParseError
from lipsnakes.models import Topology
from lipsnakes.snk import format_snk, parse_snk


def test_parse_cs2(cs2):
    assert cs2.topology == Topology.CIRCULAR
    assert cs2.beta == 1
    assert [pc.id for pc in cs2.pancakes] == ["X1", "X2", "X3", "X4"]
    assert cs2.arc_order() == ["g4", "g1", "g2", "g3"]
    assert cs2.gluing_arcs() == ["g1", "g2", "g3", "g4"]
    assert cs2.contact_between("g3", "g1").q == 2


def test_internal_defaults_to_beta():
    m = parse_snk("beta 1\ntopology segment\npancake X1 a b c\ninternal X1 b c 3/2\n")
    assert m.pancakes[0].internal_exponents == (Fraction(1), Fraction(3, 2))


def test_format_then_parse_keeps_model(cs2, bubble, cusp_snake):
    for m in (cs2, bubble, cusp_snake):
        assert parse_snk(format_snk(m)) == m


def test_bubble_file_is_canonical(bubble, models_dir):
    assert format_snk(bubble) == (models_dir / "bubble.snk").read_text(encoding="utf-8")


def test_comments_and_blank_lines():
    m = parse_snk("# a horn\n\nbeta 1   # exponent\ntopology circular\npancake X1 a b\npancake X2 b c\npancake X3 c a\n")
    assert m.p == 3


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("beta 1\ntopology segment\nfoo X1\n", 3, "unknown key"),
        ("beta 1\nbeta 2\n", 2, "beta given twice"),
        ("beta 1\ntopology twisted\n", 2, "unknown topology"),
        ("beta 1\ntopology segment\npancake X1 a\n", 3, "at least two arcs"),
        ("beta 1\ntopology segment\npancake X1 a b\ncontact a b\n", 4, "contact <arc> <arc> <q>"),
        ("beta 1\ntopology segment\npancake X1 a b\ninternal X1 b a 2\n", 4, "not consecutive"),
        ("beta 1\ntopology segment\npancake X1 a b\ncontact a b 1/0\n", 4, "zero denominator"),
        ("beta 1\ntopology segment\npancake X1 a b!\n", 3, "bad identifier"),
    ],
)
def test_parse_errors_carry_line(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_snk(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_missing_header():
    with pytest.raises(ParseError, match="missing 'beta'"):
        parse_snk("topology segment\npancake X1 a b\n")
    with pytest.raises(ParseError, match="no pancakes"):
        parse_snk("beta 1\ntopology segment\n")
