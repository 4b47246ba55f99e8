import math

import pytest

from sksmzi.bounds import benchmark_limits, qfi
from sksmzi.params import InputParams, ZeroPhotonError


def test_reference_qfi(reference):
    # 4 Var(n_arm) on the Fock oracle: 46.957628322765
    assert qfi(reference) == pytest.approx(46.957628322765075, rel=1e-10)


def test_coherent_qfi():
    # coherent light in one port: F = 2 |alpha|^2
    assert qfi(InputParams(3.0, 0.0)) == pytest.approx(18.0, rel=1e-14)


def test_vacuum_qfi():
    assert qfi(InputParams(0.0, 0.0)) == 0.0


def test_coherent_plus_squeezed_vacuum():
    # one-arm generator with the global phase; frozen from 4 Var(n_arm) on the Fock oracle
    assert qfi(InputParams(2.0, 0.0, r=0.7)) == pytest.approx(22.609431204285215, rel=1e-10)
    assert qfi(InputParams(2.0, 0.0, r=0.7, theta=0.0)) == pytest.approx(7.375019192676639, rel=1e-10)


def test_limits(reference):
    b = benchmark_limits(reference)
    assert b.snl == pytest.approx(1 / math.sqrt(b.n_total))
    assert b.hl == pytest.approx(1 / b.n_total)
    assert b.qcrb == pytest.approx(1 / math.sqrt(b.qfi))
    assert b.n_total == pytest.approx(9 + 4.995848785926454)


def test_zero_photons():
    with pytest.raises(ZeroPhotonError):
        benchmark_limits(InputParams(0.0, 0.0))
