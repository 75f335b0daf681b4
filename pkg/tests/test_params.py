from fractions import Fraction

import pytest

from tdq.params import ParamValidationError, QRacahParams, validate_params
from tdq.scalars import rational_field, ratfunc_field

QF = rational_field()


def _scalars(*values):
    return [QF.coerce(Fraction(v)) for v in values]


def test_valid_grid_point():
    q, a, b = _scalars(2, 3, 5)
    assert validate_params(3, q, a, b) == []


def test_q_is_one_rejected():
    q, a, b = _scalars(1, 3, 5)
    violations = validate_params(2, q, a, b)
    assert any(v.code == "q4" for v in violations)
    assert any("q^4 = 1" in str(v) for v in violations)


def test_a_square_on_forbidden_list():
    q, a, b = _scalars(2, 4, 5)
    violations = validate_params(3, q, a, b)  # a^2 = 16 = q^(2d-2)
    assert any(v.code == "a2" for v in violations)


def test_a_equal_one_forbidden():
    q, a, b = _scalars(2, 1, 5)  # a^2 = 1 = q^0, exponent 0 always on the list
    assert any(v.code == "a2" for v in validate_params(1, q, a, b))


def test_b_optional():
    q, a, _ = _scalars(2, 3, 5)
    assert validate_params(2, q, a, None) == []
    p = QRacahParams(2, q, a)
    assert p.b is None
    with pytest.raises(ValueError):
        p.theta_star(0)


def test_constructor_raises_on_violations():
    q, a, b = _scalars(1, 3, 5)
    with pytest.raises(ParamValidationError):
        QRacahParams(2, q, a, b)


def test_preconditions_raise():
    q, a, b = _scalars(2, 3, 5)
    with pytest.raises(ValueError):
        validate_params(0, q, a, b)
    with pytest.raises(ValueError):
        validate_params(1, QF.zero, a, b)


def test_symbolic_parameters_are_generically_valid():
    RF = ratfunc_field(("q", "a"))
    p = QRacahParams(4, RF.generator("q"), RF.generator("a"))
    assert p.b is None
    assert p.theta(0) == RF.generator("a") * RF.generator("q") ** 4 \
        + RF.generator("a") ** -1 * RF.generator("q") ** -4


def test_downarrow_inverts_a():
    q, a, b = _scalars(2, 3, 5)
    p = QRacahParams(1, q, a, b)
    pd = p.downarrow()
    assert pd.q == p.q and pd.b == p.b
    assert pd.a == p.a ** -1
    assert pd.downarrow() == p
