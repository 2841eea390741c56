import pytest
from gmpy2 import mpq

from pclab.backend import FLOAT, RATIONAL, format_scalar, get_backend
from pclab.errors import ValidationError


def test_rational_parses_decimals_exactly():
    assert RATIONAL("0.3") == mpq(3, 10)
    assert RATIONAL(0.1) == mpq(1, 10)
    assert RATIONAL("149/243") == mpq(149, 243)
    assert RATIONAL(-2) == -2


def test_float_backend_snaps_within_eps():
    assert FLOAT.eq(0.1 + 0.2, 0.3)
    assert FLOAT.cmp(0.3, 0.3 + 1e-13) == 0
    assert FLOAT.lt(0.3, 0.3 + 1e-9)
    assert not RATIONAL.eq(mpq(3, 10), mpq(3, 10) + mpq(1, 10**15))


def test_format():
    assert RATIONAL.format(mpq(149, 243)) == "149/243"
    assert RATIONAL.format(mpq(4, 2)) == "2"
    assert FLOAT.format(0.25) == "0.25"
    assert format_scalar(mpq(1, 7)) == "1/7"
    assert format_scalar(0.5) == "0.5"


def test_get_backend():
    assert get_backend("rational") is RATIONAL
    assert get_backend(FLOAT) is FLOAT
    assert get_backend("float", eps=1e-6).eps == 1e-6
    with pytest.raises(ValidationError):
        get_backend("decimal")


def test_bad_scalar_string():
    with pytest.raises(ValidationError):
        RATIONAL("three tenths")
