import math

import pytest

from sksmzi.params import LOSSLESS, InputParams, LossParams, RangeError, reduce_angle


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(alpha_mag=-0.1, beta_mag=1),
        dict(alpha_mag=1, beta_mag=-1),
        dict(alpha_mag=1, beta_mag=1, r=-0.5),
        dict(alpha_mag=201, beta_mag=1),
        dict(alpha_mag=1, beta_mag=1, r=10.5),
        dict(alpha_mag=math.nan, beta_mag=1),
        dict(alpha_mag=1, beta_mag=1, gamma=math.inf),
    ],
)
def test_input_range(kwargs):
    with pytest.raises(RangeError):
        InputParams(**kwargs)


@pytest.mark.parametrize("mu,eta", [(0, 1), (1, 0), (1.2, 1), (1, -0.1), (math.nan, 1)])
def test_loss_range(mu, eta):
    with pytest.raises(RangeError):
        LossParams(mu, eta)


def test_defaults():
    p = InputParams(1.0, 2.0)
    assert p.theta == math.pi and p.gamma == 0 and p.r == 0
    assert LOSSLESS.lossless and LOSSLESS.transmission == 1.0
    assert LossParams(0.6, 0.5).transmission == pytest.approx(0.3)


@pytest.mark.parametrize("x,expected", [(0.0, 0.0), (-1e-300, 0.0), (2 * math.pi, 0.0), (-math.pi / 2, 1.5 * math.pi), (7.0, 7.0 - 2 * math.pi)])
def test_reduce_angle(x, expected):
    y = reduce_angle(x)
    assert 0.0 <= y < 2 * math.pi
    assert y == pytest.approx(expected, abs=1e-15)
