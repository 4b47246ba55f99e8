import math

import numpy as np
import pytest

from sksmzi.detection import (
    SCHEMES,
    Scheme,
    caves_reduction,
    delta_phi_array,
    kerr_vacuum_hd,
    phase_sensitivity,
    signal_stats,
    vacuum_port_idd,
    vacuum_port_sid,
)
from sksmzi.moments import joint_moments
from sksmzi.params import InputParams, LossParams, RangeError


def test_scheme_parse():
    assert Scheme.parse("HD") is Scheme.HD
    assert Scheme.parse(Scheme.SID) is Scheme.SID
    with pytest.raises(ValueError, match="unknown scheme"):
        Scheme.parse("xyz")


def test_idd_coherent_stats():
    s = signal_stats("idd", InputParams(3.0, 0.0), math.pi / 2)
    assert s.mean == pytest.approx(0.0, abs=1e-12)
    assert abs(s.slope) == pytest.approx(9.0)
    assert s.variance == pytest.approx(9.0)


@pytest.mark.parametrize("scheme,phi,rel", [(Scheme.SID, 1e-4, 1e-8), (Scheme.IDD, math.pi / 2, 1e-12), (Scheme.HD, 0.0, 1e-12)])
def test_snl_at_no_kerr_no_squeeze(scheme, phi, rel):
    # coherent light alone reaches the shot-noise limit 1/alpha (SID only as phi -> 0)
    d = phase_sensitivity(scheme, InputParams(3.0, 0.0), phi)
    assert d.finite
    assert d.delta_phi == pytest.approx(1 / 3, rel=rel)


def test_idd_vacuum_port_kerr_state():
    d = phase_sensitivity("idd", InputParams(0.0, 5.0, gamma=0.2), math.pi / 2)
    assert d.delta_phi == pytest.approx(0.2, rel=1e-12)


def test_hd_squeezed_vacuum_caves():
    d = phase_sensitivity("hd", InputParams(50.0, 0.0, r=1.5), 0.0)
    assert d.delta_phi == pytest.approx(math.exp(-1.5) / 50, rel=1e-12)
    assert d.delta_phi == pytest.approx(4.4626e-3, rel=1e-4)


def test_hd_kerr_vacuum_reduction():
    p = InputParams(0.0, 5.0, gamma=0.01)
    phi = 7 * math.pi / 4
    assert phase_sensitivity("hd", p, phi).delta_phi == pytest.approx(float(kerr_vacuum_hd(p, phi)), rel=1e-12)
    stats = signal_stats("hd", p, phi)
    assert math.sqrt(stats.variance) / abs(stats.slope) == pytest.approx(float(kerr_vacuum_hd(p, phi)), rel=1e-10)


@pytest.mark.parametrize("gamma", [0.003, 0.05, 0.2, 1.3])
@pytest.mark.parametrize("phi", [0.4, 1.9, 2.9, 4.4])
def test_kerr_vacuum_hd_across_phases(gamma, phi):
    p = InputParams(0.0, 2.5, gamma=gamma)
    assert phase_sensitivity("hd", p, phi).delta_phi == pytest.approx(float(kerr_vacuum_hd(p, phi)), rel=1e-10)


@pytest.mark.parametrize("params", [InputParams(0, 2.0, gamma=0.3, r=0.6, theta=1.0), InputParams(0, 5.0, gamma=0.05)])
@pytest.mark.parametrize("mu", [1.0, 0.7])
def test_vacuum_port_forms(params, mu):
    m = joint_moments(params)
    loss = LossParams(mu)
    phis = np.array([0.3, 1.4, 2.5, 4.0, 5.9])
    np.testing.assert_allclose(delta_phi_array(Scheme.SID, m, phis, loss, 0.0), vacuum_port_sid(m, phis, loss), rtol=1e-10)
    np.testing.assert_allclose(delta_phi_array(Scheme.IDD, m, phis, loss, 0.0), vacuum_port_idd(m, phis, loss), rtol=1e-10)


def test_sid_vacuum_port_removable_point():
    # at phi = pi numerator and slope vanish together; the limit is 1/sqrt(g2)
    d = phase_sensitivity("sid", InputParams(0.0, 5.0, gamma=0.3), math.pi)
    assert d.finite and d.delta_phi == pytest.approx(0.2, rel=1e-12)
    near = phase_sensitivity("sid", InputParams(0.0, 5.0, gamma=0.3), math.pi - 1e-6)
    assert near.delta_phi == pytest.approx(0.2, rel=1e-9)


def test_singular_slope_reports_inf():
    # coherent light, phi = 0: IDD mean is stationary
    d = phase_sensitivity("idd", InputParams(3.0, 0.0), 0.0)
    assert not d.finite and d.delta_phi == math.inf
    d = phase_sensitivity("sid", InputParams(0.0, 5.0), 0.0)
    assert not d.finite


def test_photonless_input_is_singular():
    for scheme in SCHEMES:
        assert not phase_sensitivity(scheme, InputParams(0.0, 0.0), 1.0).finite


@pytest.mark.parametrize("scheme", SCHEMES)
def test_lossless_equals_default(scheme, reference):
    a = phase_sensitivity(scheme, reference, 1.1)
    b = phase_sensitivity(scheme, reference, 1.1, LossParams(1.0, 1.0))
    assert a == b


@pytest.mark.parametrize("scheme", SCHEMES)
def test_loss_product(scheme, reference):
    a = phase_sensitivity(scheme, reference, 2.2, LossParams(0.6, 0.5))
    b = phase_sensitivity(scheme, reference, 2.2, LossParams(0.6 * 0.5, 1.0))
    assert a.delta_phi == b.delta_phi


@pytest.mark.parametrize("scheme", SCHEMES)
def test_reference_sensitivities(scheme, reference):
    # frozen from the finite-difference oracle at phi = 1.1
    expected = {Scheme.SID: 3.5269297616857167, Scheme.IDD: 1.633866994674567, Scheme.HD: 1.6782643915629643}
    assert phase_sensitivity(scheme, reference, 1.1).delta_phi == pytest.approx(expected[scheme], rel=1e-8)


def test_lossy_hd_variance_scaling(reference):
    loss = LossParams(0.7, 0.9)
    t = loss.transmission
    a = signal_stats("hd", reference, 0.8)
    b = signal_stats("hd", reference, 0.8, loss)
    assert b.mean == pytest.approx(math.sqrt(t) * a.mean)
    assert b.slope == pytest.approx(math.sqrt(t) * a.slope)
    assert b.variance == pytest.approx(0.5 + t * (a.variance - 0.5))


def test_lossy_intensity_scaling(reference):
    loss = LossParams(0.5)
    for scheme in (Scheme.SID, Scheme.IDD):
        a = signal_stats(scheme, reference, 0.8)
        b = signal_stats(scheme, reference, 0.8, loss)
        assert b.mean == pytest.approx(0.5 * a.mean)
        assert b.slope == pytest.approx(0.5 * a.slope)


def test_loss_validation():
    with pytest.raises(RangeError):
        phase_sensitivity("hd", InputParams(1, 1), 0.0, LossParams(0.0))


def test_caves_squeezed_vacuum():
    assert caves_reduction(InputParams(50, 0, r=1.5)).delta_phi == pytest.approx(math.exp(-1.5) / 50, rel=1e-12)
    assert caves_reduction(InputParams(1, 0)).delta_phi == pytest.approx(1.0, rel=1e-14)


def test_caves_kerr_regime():
    p = InputParams(50, 30, gamma=0.0018, r=1.5)
    k = caves_reduction(p)
    # s = beta^2 sin 2 gamma just above pi
    assert 3.2 < 900 * math.sin(0.0036) < 3.3
    assert k.delta_phi < math.exp(-1.5) / 50


@pytest.mark.parametrize("beta,gamma", [(0.0, 0.0), (1.0, 0.2), (2.5, 0.9), (3.0, 0.01)])
@pytest.mark.parametrize("mu", [1.0, 0.75])
def test_caves_matches_general_hd(beta, gamma, mu):
    # theta is pinned to pi by the reduction
    p = InputParams(2.0, beta, theta=0.4, gamma=gamma, r=0.9)
    loss = LossParams(mu)
    general = phase_sensitivity("hd", p.with_(theta=math.pi), 0.0, loss).delta_phi
    assert caves_reduction(p, loss).delta_phi == pytest.approx(general, rel=1e-12)


def test_caves_large_beta_conditioning():
    # A -> 0 regime: cancellation limits the agreement to ~1e-10
    p = InputParams(50, 30, gamma=0.0018, r=1.5)
    assert caves_reduction(p).delta_phi == pytest.approx(phase_sensitivity("hd", p, 0.0).delta_phi, rel=1e-9)


def test_phase_reduction(reference):
    a = phase_sensitivity("idd", reference, 1.0)
    b = phase_sensitivity("idd", reference, 1.0 + 4 * math.pi)
    assert a.delta_phi == pytest.approx(b.delta_phi, rel=1e-12)
    assert b.phi == pytest.approx(1.0, abs=1e-14)
