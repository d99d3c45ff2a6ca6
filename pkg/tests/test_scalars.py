from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genformal.errors import InconsistentConjugates, IncompleteAssignment, ParseError, UnknownVariable
from genformal.scalars import (
    I,
    ONE,
    ZERO,
    GaussianRational,
    Poly,
    conjugate,
    format_scalar,
    parse_poly,
    parse_scalar,
    wirtinger,
)
from helpers import rand_poly, rng_for

z0, z1, z2 = Poly.var("z0"), Poly.var("z1"), Poly.var("z2")
zb1, zb2 = Poly.var("zb1"), Poly.var("zb2")

rationals = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 1000)
gauss = st.builds(lambda a, b: GaussianRational(a, b), rationals, rationals)


def test_lowest_terms_and_sign_of_denominator():
    a = GaussianRational(Fraction(6, -4))
    assert a.re.numerator == -3 and a.re.denominator == 2
    assert GaussianRational("2/4") == GaussianRational("1/2")


def test_i_squared():
    assert I * I == -ONE
    assert (ONE + I) * (ONE - I) == GaussianRational(2)


def test_division_is_exact():
    a = GaussianRational(3, 4)
    assert a / a == ONE
    assert a.inverse() == GaussianRational("3/25", "-4/25")


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_floats_rejected():
    with pytest.raises(TypeError):
        GaussianRational.coerce(1.5j)


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if a:
        assert a * a.inverse() == ONE


@given(gauss)
def test_format_parse_round_trip(a):
    assert parse_scalar(format_scalar(a)) == a


def test_conjugate_examples():
    assert conjugate(I * z1) == -I * Poly.var("zb1")
    assert conjugate(Poly.const(GaussianRational("3/2"))) == Poly.const(GaussianRational("3/2"))
    assert conjugate(z0 * z1) == Poly.var("zb0") * Poly.var("zb1")


def test_conjugation_is_an_involution():
    rng = rng_for(1)
    for _ in range(20):
        p = rand_poly(rng, ["z0", "z1", "zb0", "zb1", "x0"], 3, 4)
        assert conjugate(conjugate(p)) == p


def test_wirtinger_examples():
    assert wirtinger(z0 * z1, "z0", "holo") == z1
    assert wirtinger(z0 * z1, "z2", "holo").is_zero()
    assert wirtinger(Poly.var("zb2"), "z2", "holo").is_zero()
    assert wirtinger(Poly.var("zb2") ** 2, "z2", "anti") == Poly.var("zb2") * 2


def test_wirtinger_rejects_foreign_symbol():
    with pytest.raises(UnknownVariable):
        wirtinger(z0, "z7", "holo", chart_vars={"z0", "zb0"})


def test_eval_examples():
    p = z0 * z1
    assert p.eval({"z0": 1, "z1": 0}) == ZERO
    assert p.eval({"z0": ONE + I, "z1": ONE - I}) == GaussianRational(2)


def test_eval_fills_in_conjugates():
    assert (z1 * zb1).eval({"z1": GaussianRational(3, 4)}) == GaussianRational(25)


def test_eval_inconsistent_and_missing():
    with pytest.raises(InconsistentConjugates):
        zb1.eval({"z1": I, "zb1": I})
    with pytest.raises(IncompleteAssignment):
        (z0 * z1).eval({"z0": 1})


def test_eval_commutes_with_conjugation():
    rng = rng_for(2)
    for _ in range(20):
        p = rand_poly(rng, ["z0", "z1", "zb0", "zb1"], 3, 4)
        pt = {"z0": GaussianRational(rng.randint(-3, 3), rng.randint(-3, 3)), "z1": GaussianRational("1/2", 2)}
        assert conjugate(p).eval(pt) == p.eval(pt).conjugate()


def test_poly_ring_laws():
    rng = rng_for(3)
    names = ["z0", "z1", "zb0", "x0"]
    for _ in range(20):
        a, b, c = (rand_poly(rng, names) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()


def test_no_zero_coefficients_stored():
    p = z0 + z1 - z0
    assert p == z1
    assert all(c for c in p.terms.values())


def test_print_parse_round_trip():
    rng = rng_for(4)
    for _ in range(30):
        p = rand_poly(rng, ["z0", "z1", "zb0", "zb1", "x3"], 3, 4)
        assert parse_poly(str(p)) == p


def test_parse_grammar():
    assert parse_poly("(z0 + i*zb0)^2") == (z0 + I * Poly.var("zb0")) ** 2
    assert parse_poly("1/2*z0*zb0 - 3") == z0 * Poly.var("zb0") * GaussianRational("1/2") - 3
    assert parse_poly("-z1") == -z1


def test_parse_error_has_position():
    with pytest.raises(ParseError) as exc:
        parse_poly("z0 + * z1")
    assert "column" in str(exc.value)


@settings(max_examples=50)
@given(st.lists(st.tuples(gauss, st.sampled_from(["z0", "zb0", "z1", "x2"]), st.integers(0, 3)), max_size=5))
def test_parse_round_trip_hypothesis(terms):
    p = Poly()
    for c, v, e in terms:
        p = p + Poly.var(v) ** e * c
    assert parse_poly(str(p)) == p


def test_holomorphic_detection():
    assert (z0 * z1 + 3).is_holomorphic()
    assert not (z0 * zb2).is_holomorphic()
