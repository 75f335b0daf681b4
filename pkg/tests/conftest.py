from fractions import Fraction

import pytest

from tdq.params import QRacahParams
from tdq.scalars import rational_field, ratfunc_field


@pytest.fixture(scope="session")
def QF():
    return rational_field()


@pytest.fixture(scope="session")
def RF():
    return ratfunc_field(("q", "a", "b"))


@pytest.fixture(scope="session")
def RF_qa():
    return ratfunc_field(("q", "a"))


def make_params(QF, d=1, q=2, a=3, b=5):
    coerce = lambda v: QF.coerce(Fraction(v) if not isinstance(v, Fraction) else v)
    return QRacahParams(d, coerce(q), coerce(a), coerce(b) if b is not None else None)


@pytest.fixture
def params_d1(QF):
    return make_params(QF, d=1)


@pytest.fixture
def params_d2(QF):
    return make_params(QF, d=2)
