import math
import random
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_arcs
from lipsnakes.errors import ModelValidationError, OracleError, ParseError
from lipsnakes.ingest import (
    GluingKind,
    build_linkmodel,
    check_triangle_ne,
    cross_validate,
    cusp_tord,
    estimate_order,
    load_germ,
    numeric_tord,
    parse_germ,
)
from lipsnakes.linkmodel import outer_tord
from lipsnakes.models import ContactEdge, Topology
from lipsnakes.puiseux import RuledFamily, make_arc, parse_series, tord_arc_family, tord_arcs
from lipsnakes.snk import format_snk

BUBBLE = """
arc g1 = (t, -t^(3/2), 0)
arc l1 = (t, -t, t)
arc l2 = (t, t, t)
arc g2 = (t, t^(3/2), 0)
triangle T1 = ruled(g1, l1)
triangle T2 = ruled(l1, l2)
triangle T3 = ruled(l2, g2)
glue chain T1 T2 T3
"""


def test_parse_germ():
    s = parse_germ(BUBBLE)
    assert list(s.arcs) == ["g1", "l1", "l2", "g2"]
    assert s.gluing.kind == GluingKind.CHAIN
    assert [t.arcs for t in s.ordered_triangles()] == [("g1", "l1"), ("l1", "l2"), ("l2", "g2")]


def test_bubble_builds_its_snk(models_dir):
    model = build_linkmodel(load_germ(models_dir / "bubble.germ"))
    assert format_snk(model) == (models_dir / "bubble.snk").read_text(encoding="utf-8")


def test_r4_surface_has_the_cs2_closure(models_dir, cs2):
    """Four ruled triangles in R^4 realize the two-node circular snake."""
    model = build_linkmodel(load_germ(models_dir / "cs2_r4.germ"))
    assert model.topology == Topology.CIRCULAR
    assert {(c.a, c.b, c.q) for c in model.contacts} == {("g4", "g2", 3), ("g1", "g3", 2)}
    for a in cs2.arc_order():
        for b in cs2.arc_order():
            assert outer_tord(model, a, b) == outer_tord(cs2, a, b)


def test_triangle_exponent():
    s = parse_germ(BUBBLE)
    assert check_triangle_ne(s, "T1") == 1


def test_ruling_through_the_origin_direction():
    """Opposite tangent directions leave a ruling arc of order 2."""
    s = parse_germ("arc a = (t, t^2)\narc b = (-t, t^2)\ntriangle T = ruled(a, b)\nglue chain T\n")
    with pytest.raises(ModelValidationError, match="not normalized"):
        check_triangle_ne(s, "T", samples=5)


def test_gluing_must_continue():
    text = "arc a = (t, 0)\narc b = (t, t)\narc c = (t, 2*t)\narc d = (t, 3*t)\n" \
           "triangle T1 = ruled(a, b)\ntriangle T2 = ruled(c, d)\nglue chain T1 T2\n"
    with pytest.raises(ModelValidationError, match="share no boundary arc"):
        build_linkmodel(parse_germ(text))


def test_cycle_must_close():
    text = "arc a = (t, 0)\narc b = (t, t)\narc c = (t, 2*t)\n" \
           "triangle T1 = ruled(a, b)\ntriangle T2 = ruled(b, c)\nglue cycle T1 T2\n"
    with pytest.raises(ModelValidationError, match="does not close"):
        build_linkmodel(parse_germ(text))


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("arc g1 = (t, t + 2*x, 0)\n", 1, "unknown symbol"),
        ("arc g1 = (t, 0)\narc g1 = (t, t)\n", 2, "defined twice"),
        ("arc g1 = (t, 0)\ntriangle T = ruled(g1, g9)\n", 2, "undefined arc g9"),
        ("arc g1 = (t, 0)\nglue chain T\n", 2, "undefined triangle"),
        ("arc g1 = (t, 0)\nsurface S\n", 2, "cannot read"),
        ("arc g1 = (t^2, 0)\n", 1, "expected 1"),
        ("arc a = (t, 0)\narc b = (t, t)\ntriangle T = ruled(a, b)\nglue spiral T\n", 4, "unknown gluing"),
    ],
)
def test_germ_parse_errors(text, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_germ(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_germ_error_column():
    """Columns count from the start of the line, across coordinates."""
    with pytest.raises(ParseError) as err:
        parse_germ("arc g1 = (t, t + 2*x, 0)\n")
    assert err.value.column == 20


def test_missing_glue():
    with pytest.raises(ParseError, match="missing 'glue'"):
        parse_germ("arc a = (t, 0)\n")


# ---------------------------
# numeric oracle
# ---------------------------

def test_numeric_slopes_on_bubble():
    s = parse_germ(BUBBLE)
    assert numeric_tord(s, "g1", "g2").slope == pytest.approx(1.5, abs=1e-6)
    assert numeric_tord(s, "l1", "l2").slope == pytest.approx(1.0, abs=1e-6)
    assert numeric_tord(s, "g1", "l1").slope == pytest.approx(1.0, abs=0.05)


def test_cross_validate_bubble():
    s = parse_germ(BUBBLE)
    report = cross_validate(s, build_linkmodel(s))
    assert report.ok
    assert report.checked == 6
    assert report.mismatches == []


def test_cross_validate_catches_wrong_contact():
    """Raising the g1-g2 contact to 2 disagrees with the measured slope 3/2."""
    s = parse_germ(BUBBLE)
    wrong = replace(build_linkmodel(s), contacts=(ContactEdge("g1", "g2", Fraction(2)),))
    report = cross_validate(s, wrong)
    assert not report.ok
    assert [(p.a, p.b) for p in report.mismatches] == [("g1", "g2")]


def test_identical_arcs_have_infinite_order():
    same = lambda t: np.array([t, 0.0])  # noqa: E731
    assert math.isinf(estimate_order(same, same, ("a", "a")).slope)


def test_cusp_orders():
    """Opposite branches of z^3 = w^2 meet at order 3/2; others at order 1."""
    assert cusp_tord(0.3, 0.3 + math.pi).slope == pytest.approx(1.5, abs=1e-6)
    assert cusp_tord(0.0, 1.0).slope == pytest.approx(1.0, abs=0.05)


@pytest.mark.parametrize("grid", [[1e-2, 1e-3, 1e-4], [1e-4, 1e-3, 1e-2, 1e-1], [1e-2, 0.0, -1e-3, -1e-4]])
def test_bad_grids(grid):
    s = parse_germ(BUBBLE)
    with pytest.raises(OracleError):
        numeric_tord(s, "g1", "g2", t_grid=grid)


def test_unknown_arc_in_oracle():
    with pytest.raises(OracleError, match="unknown arc"):
        numeric_tord(parse_germ(BUBBLE), "g1", "zz")


def _sampler(arc):
    return lambda t: np.array(arc.evaluate(t), dtype=float)


FINE_GRID = [1e-3, 1e-4, 1e-5, 1e-6]


def test_numeric_slopes_match_symbolic_tord_on_random_arcs():
    rng = random.Random(5)
    for _ in range(15):
        arcs = random_arcs(rng, 4, (Fraction(1), Fraction(2), Fraction(3)))
        for i, a in enumerate(arcs):
            for b in arcs[i + 1:]:
                q = tord_arcs(a, b)
                est = estimate_order(_sampler(a), _sampler(b), (a.name, b.name), FINE_GRID)
                if math.isinf(q):
                    assert math.isinf(est.slope)
                else:
                    assert est.slope == pytest.approx(float(q), abs=0.05)


def test_arc_family_order_against_a_grid_over_the_ruling():
    """(t, t^(3/2), t) against the ruling from (t, t, t) to (t, -t, t): the midline is closest."""
    x = make_arc("x", [parse_series(c) for c in ("t", "t^(3/2)", "t")])
    a = make_arc("a", [parse_series(c) for c in ("t", "t", "t")])
    b = make_arc("b", [parse_series(c) for c in ("t", "-t", "t")])
    fam = RuledFamily(a, b, "T")
    slopes = [
        estimate_order(_sampler(x), _sampler(fam.member(Fraction(i, 20))), ("x", f"s{i}"), FINE_GRID).slope
        for i in range(21)
    ]
    assert max(slopes) == pytest.approx(1.5, abs=0.05)
    assert tord_arc_family(x, fam) == Fraction(3, 2)


def test_cross_validate_r4_surface(models_dir):
    s = load_germ(models_dir / "cs2_r4.germ")
    report = cross_validate(s, build_linkmodel(s))
    assert report.ok
    assert report.checked == 6
