
import pytest

from pclab.backend import RATIONAL
from pclab.experiments import preset
from pclab.maps import PiecewiseContraction, Side, build_inverse


def q(text):
    """Exact rational literal on the rational backend."""
    return RATIONAL(text)


@pytest.fixture
def s2():
    return preset("S2").system


@pytest.fixture
def s3():
    return preset("S3").system


@pytest.fixture
def g2(s2):
    return build_inverse(s2)


@pytest.fixture
def f_left(s2):
    return PiecewiseContraction(s2, (q("0.3"),), Side.LEFT)


@pytest.fixture
def f_right(s2):
    return PiecewiseContraction(s2, (q("0.3"),), Side.RIGHT)


@pytest.fixture
def f1():
    return preset("example-4.1-f1").contraction()


@pytest.fixture
def f2():
    return preset("example-4.1-f2").contraction()
