"""Coefficient ring: exact Laurent arithmetic, calculus, text round-trips."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gjb.coeffring import Chart, Coefficient, format_coefficient, parse_coefficient
from gjb.errors import DomainError, ParseError, StructuralError

CHART = Chart(("p", "x", "y", "z"), frozenset({"z"}))


def coord(name):
    return Coefficient.coordinate(CHART, name)


def const(v):
    return Coefficient.constant(CHART, v)


# -- chart hygiene ----------------------------------------------------------


def test_chart_rejects_duplicates():
    with pytest.raises(StructuralError):
        Chart(("x", "x"))


def test_chart_rejects_unknown_nonvanishing_flag():
    with pytest.raises(StructuralError):
        Chart(("x",), frozenset({"w"}))


def test_chart_rejects_bad_names():
    with pytest.raises(StructuralError):
        Chart(("2x",))


def test_chart_extend_appends():
    bigger = CHART.extend("w", nonvanishing=True)
    assert bigger.coordinates == ("p", "x", "y", "z", "w")
    assert "w" in bigger.nonvanishing and "z" in bigger.nonvanishing


# -- pinned arithmetic facts -------------------------------------------------


def test_laurent_unit_cancels():
    z = coord("z")
    zinv = Coefficient.coordinate(CHART, "z", -1)
    assert z * zinv == const(1)


def test_subtraction_cancels_shared_term():
    p, y = coord("p"), coord("y")
    H = y * y + const(Fraction(1, 2))
    assert (p + H) - p == H


def test_partial_of_inverse_power():
    zinv = Coefficient.coordinate(CHART, "z", -1)
    assert zinv.partial("z") == Coefficient.coordinate(CHART, "z", -2).scale(-1)


def test_negative_exponent_needs_flag():
    with pytest.raises(DomainError):
        Coefficient.coordinate(CHART, "x", -1)


def test_unit_inverse_round_trip():
    u = Coefficient.coordinate(CHART, "z", 3).scale(Fraction(2, 5))
    assert u * u.unit_inverse() == const(1)
    assert not (coord("x") + const(1)).is_unit()
    with pytest.raises(DomainError):
        (coord("x")).unit_inverse()


def test_integer_powers():
    y = coord("y")
    assert y**0 == const(1)
    assert y**3 == y * y * y
    z = coord("z")
    assert z**-2 == Coefficient.coordinate(CHART, "z", -2)


def test_evaluate_is_exact():
    f = coord("p") * coord("y") ** 2 + Coefficient.coordinate(CHART, "z", -1)
    point = {"p": Fraction(3), "x": 0, "y": Fraction(1, 2), "z": Fraction(2)}
    assert f.evaluate(point) == Fraction(3, 4) + Fraction(1, 2)


def test_evaluate_guards_domain():
    f = coord("z")
    with pytest.raises(DomainError):
        f.evaluate({"p": 0, "x": 0, "y": 0, "z": 0})
    with pytest.raises(StructuralError):
        f.evaluate({"p": 0, "x": 0, "y": 0})


def test_chart_mismatch_raises():
    other = Chart(("a", "b"))
    with pytest.raises(StructuralError):
        coord("x") + Coefficient.coordinate(other, "a")


def test_substitute_is_a_ring_morphism_on_samples():
    target = Chart(("u", "v"), frozenset({"v"}))
    images = {
        "p": Coefficient.coordinate(target, "u") ** 2,
        "x": Coefficient.constant(target, 3),
        "y": Coefficient.coordinate(target, "u") + Coefficient.constant(target, 1),
        "z": Coefficient.coordinate(target, "v"),
    }
    f = coord("p") * coord("y") + Coefficient.coordinate(CHART, "z", -1).scale(2)
    g = coord("y") ** 2 - const(4)
    fs = f.substitute(images, target)
    gs = g.substitute(images, target)
    assert (f * g).substitute(images, target) == fs * gs
    assert (f + g).substitute(images, target) == fs + gs


# -- textual form ------------------------------------------------------------


def test_format_standalone_keeps_rational_prefix():
    f = coord("y") ** 2 * coord("p").scale(Fraction(3, 2)) - Coefficient.coordinate(CHART, "z", -1)
    assert format_coefficient(f) == "3/2*p*y^2 - 1*z^-1"


def test_format_elide_unit_mode():
    f = coord("y") - coord("x")
    assert format_coefficient(f) == "-1*x + 1*y"
    assert format_coefficient(f, elide_unit=True) == "-x + y"


def test_format_zero_and_constants():
    assert format_coefficient(Coefficient.zero(CHART)) == "0"
    assert format_coefficient(const(Fraction(-7, 3))) == "-7/3"


def test_parse_examples():
    assert parse_coefficient(CHART, "3/2*p*y^2 - 1*z^-1") == coord("p") * coord("y") ** 2 * Fraction(
        3, 2
    ) - Coefficient.coordinate(CHART, "z", -1)
    assert parse_coefficient(CHART, "(x + y)^2") == (coord("x") + coord("y")) ** 2
    assert parse_coefficient(CHART, "-x") == -coord("x")
    assert parse_coefficient(CHART, "0") == Coefficient.zero(CHART)


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse_coefficient(CHART, "x + ?")
    assert err.value.column == 4
    with pytest.raises(ParseError):
        parse_coefficient(CHART, "x^y")
    with pytest.raises(ParseError):
        parse_coefficient(CHART, "unknown_name")
    with pytest.raises(ParseError):
        parse_coefficient(CHART, "1/0")


# -- property tests ----------------------------------------------------------

rationals = st.builds(
    Fraction, st.integers(min_value=-40, max_value=40), st.integers(min_value=1, max_value=7)
)


@st.composite
def coefficients(draw, chart=CHART):
    n = draw(st.integers(min_value=0, max_value=4))
    terms = {}
    for _ in range(n):
        expo = []
        for name in chart.coordinates:
            low = -2 if name in chart.nonvanishing else 0
            expo.append(draw(st.integers(min_value=low, max_value=3)))
        terms[tuple(expo)] = draw(rationals)
    return Coefficient(chart, terms)


@given(coefficients(), coefficients(), coefficients())
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f + g == g + f
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f * (g + h) == f * g + f * h
    assert f + Coefficient.zero(CHART) == f
    assert f * Coefficient.one(CHART) == f
    assert f - f == Coefficient.zero(CHART)


@given(coefficients(), coefficients(), st.sampled_from(CHART.coordinates))
def test_leibniz_rule(f, g, name):
    assert (f * g).partial(name) == f.partial(name) * g + f * g.partial(name)


@given(coefficients())
def test_mixed_partials_commute(f):
    assert f.partial("x").partial("y") == f.partial("y").partial("x")
    assert f.partial("z").partial("p") == f.partial("p").partial("z")


@given(coefficients(), coefficients())
@settings(max_examples=40)
def test_evaluation_is_a_homomorphism(f, g):
    point = {"p": Fraction(2), "x": Fraction(-1), "y": Fraction(1, 3), "z": Fraction(5, 2)}
    assert (f + g).evaluate(point) == f.evaluate(point) + g.evaluate(point)
    assert (f * g).evaluate(point) == f.evaluate(point) * g.evaluate(point)


@given(coefficients())
def test_text_round_trip(f):
    assert parse_coefficient(CHART, format_coefficient(f)) == f
