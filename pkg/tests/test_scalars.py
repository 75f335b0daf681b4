from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tdq.parser import ParseError, parse_scalar
from tdq.scalars import rational_field, ratfunc_field

QF = rational_field()
RF = ratfunc_field(("q", "a", "b"))


class TestParser:
    def test_literal_fraction(self):
        assert parse_scalar("3/4", QF) == Fraction(3, 4)

    def test_polynomial_division_cancels(self):
        assert parse_scalar("(q^2-1)/(q-1)", RF) == parse_scalar("q+1", RF)

    def test_division_by_zero_reports_position(self):
        with pytest.raises(ZeroDivisionError, match="position 1"):
            parse_scalar("1/(q-q)", RF)

    def test_identifier_rejected_in_rational_backend(self):
        with pytest.raises(ParseError, match="rational backend"):
            parse_scalar("q", QF)

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse_scalar("x + 1", RF)

    def test_syntax_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_scalar("3 + * 4", QF)
        assert err.value.position == 4

    def test_precedence_and_associativity(self):
        assert parse_scalar("2-3-4", QF) == Fraction(-5)
        assert parse_scalar("8/2/2", QF) == Fraction(2)
        assert parse_scalar("2+3*4", QF) == Fraction(14)
        assert parse_scalar("-2^2", QF) == Fraction(-4)

    def test_negative_exponents(self):
        assert parse_scalar("2^-2", QF) == Fraction(1, 4)
        assert parse_scalar("q^-1", RF) == RF.one / RF.generator("q")
        assert parse_scalar("q^(-3)", RF) == RF.generator("q") ** -3

    def test_zero_to_negative_power(self):
        with pytest.raises(ZeroDivisionError):
            parse_scalar("0^-1", QF)

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_scalar("1 + 2 )", QF)


class TestArithmetic:
    def test_add(self):
        assert QF.coerce(Fraction(1, 2)) + QF.coerce(Fraction(1, 3)) == Fraction(5, 6)

    def test_inv(self):
        q = RF.generator("q")
        assert q.inv() == parse_scalar("1/q", RF)

    def test_difference_of_squares(self):
        q = RF.generator("q")
        lhs = (q - q ** -1) * (q + q ** -1)
        assert lhs == q ** 2 - q ** -2

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            QF.one / QF.zero
        with pytest.raises(ZeroDivisionError):
            RF.zero.inv()

    def test_backend_mixing_rejected(self):
        with pytest.raises(ValueError):
            QF.one + RF.one


rationals = st.fractions(min_value=-10 ** 6, max_value=10 ** 6, max_denominator=10 ** 4)


class TestFieldAxioms:
    @given(rationals, rationals, rationals)
    def test_rational_ring_axioms(self, x, y, z):
        sx, sy, sz = (QF.coerce(v) for v in (x, y, z))
        assert (sx + sy) + sz == sx + (sy + sz)
        assert sx * (sy + sz) == sx * sy + sx * sz
        assert sx + sy == sy + sx

    @given(rationals)
    def test_rational_inverses(self, x):
        s = QF.coerce(x)
        assert s + (-s) == QF.zero
        if not s.is_zero():
            assert s * s.inv() == QF.one


@st.composite
def ratfuncs(draw):
    q, a = RF.generator("q"), RF.generator("a")
    coeffs = draw(st.lists(st.integers(-4, 4), min_size=1, max_size=3))
    value = RF.zero
    for i, c in enumerate(coeffs):
        value = value + RF.coerce(c) * q ** (i - 1) * a ** (i % 2)
    return value


class TestRatfuncAxioms:
    @settings(max_examples=30, deadline=None)
    @given(ratfuncs(), ratfuncs(), ratfuncs())
    def test_ring_axioms(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert x * (y * z) == (x * y) * z
        assert x * (y + z) == x * y + x * z

    @settings(max_examples=30, deadline=None)
    @given(ratfuncs())
    def test_inverses(self, x):
        assert x + (-x) == RF.zero
        if not x.is_zero():
            assert x * x.inv() == RF.one


class TestRendering:
    @settings(max_examples=50, deadline=None)
    @given(rationals)
    def test_rational_round_trip(self, x):
        s = QF.coerce(x)
        assert parse_scalar(s.render(), QF) == s

    @settings(max_examples=40, deadline=None)
    @given(ratfuncs(), ratfuncs())
    def test_ratfunc_round_trip(self, x, y):
        if y.is_zero():
            y = RF.one + y
        s = x / y
        assert parse_scalar(s.render(), RF) == s

    def test_zero_renders(self):
        assert RF.zero.render() == "0"
        assert parse_scalar("0", RF) == RF.zero

    def test_stable_rendering(self):
        s = parse_scalar("(b + a*q - 1)/(2*q^2 - 2)", RF)
        assert s.render() == parse_scalar(s.render(), RF).render()


class TestBackendAgreement:
    def test_specialization_matches_rational_computation(self):
        q, a, b = (RF.generator(v) for v in ("q", "a", "b"))
        sym = (q ** 2 - a) * (b + 1) / (q - a * b)
        point = {"q": QF.coerce(2), "a": QF.coerce(3), "b": QF.coerce(5)}
        direct = ((Fraction(4) - 3) * 6) / Fraction(2 - 15)
        assert RF.specialize(sym, point) == QF.coerce(direct)

    def test_specialization_detects_pole(self):
        q = RF.generator("q")
        s = RF.one / (q - 2)
        with pytest.raises(ZeroDivisionError):
            RF.specialize(s, {"q": QF.coerce(2), "a": QF.one, "b": QF.one})


class TestRoots:
    def test_rational_sqrt(self):
        assert QF.sqrt(QF.coerce(Fraction(9, 4))) == Fraction(3, 2)
        assert QF.sqrt(QF.coerce(2)) is None
        assert QF.sqrt(QF.coerce(-4)) is None

    def test_ratfunc_sqrt(self):
        s = parse_scalar("(q^2-q^-2)^2", RF)
        root = RF.sqrt(s)
        assert root is not None and root * root == s
        assert RF.sqrt(RF.generator("q") + 1) is None

    def test_poly_roots_rational(self):
        # x^2 - 5/2 x + 1 = (x - 2)(x - 1/2)
        coeffs = [QF.one, QF.coerce(Fraction(-5, 2)), QF.one]
        roots, splits = QF.poly_roots(coeffs)
        assert splits and sorted(str(r) for r in roots) == ["1/2", "2"]

    def test_poly_roots_irreducible(self):
        coeffs = [QF.coerce(-2), QF.zero, QF.one]  # x^2 - 2
        roots, splits = QF.poly_roots(coeffs)
        assert not splits and roots == ()

    def test_poly_roots_ratfunc(self):
        q = RF.generator("q")
        # (x - q)(x - q^-1) = x^2 - (q + q^-1) x + 1
        coeffs = [RF.one, -(q + q ** -1), RF.one]
        roots, splits = RF.poly_roots(coeffs)
        assert splits and set(roots) == {q, q ** -1}
