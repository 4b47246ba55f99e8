import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sksmzi.bounds import benchmark_limits, qfi_from_moments
from sksmzi.detection import SCHEMES, delta_phi_array, phase_sensitivity, signal_stats
from sksmzi.moments import joint_moments
from sksmzi.optimize import AllSingularError, optimize_phase_moments
from sksmzi.params import LossParams
from sksmzi.verify import moment_scales

from strategies import angle, input_params, loss_params, transmissivity

DRAWS = settings(max_examples=1000, deadline=None)
schemes = st.sampled_from(SCHEMES)


@DRAWS
@given(input_params())
def test_qfi_real_nonnegative(p):
    # qfi_from_moments raises if the imaginary residue exceeds rounding
    assert qfi_from_moments(joint_moments(p)) >= 0.0


@DRAWS
@given(input_params())
def test_qcrb_below_optimal_phase(p):
    m = joint_moments(p)
    qcrb = benchmark_limits(p).qcrb
    for scheme in SCHEMES:
        try:
            _, d = optimize_phase_moments(scheme, m, p.alpha_mag)
        except AllSingularError:
            # no phase information at all, e.g. HD on squeezed vacuum alone
            continue
        assert d >= qcrb - 1e-9 * max(1.0, qcrb)


@DRAWS
@given(input_params(), schemes, angle, transmissivity, transmissivity)
def test_loss_product_symmetry(p, scheme, phi, mu, eta):
    a = phase_sensitivity(scheme, p, phi, LossParams(mu, eta))
    b = phase_sensitivity(scheme, p, phi, LossParams(mu * eta, 1.0))
    assert a.delta_phi == b.delta_phi or (math.isnan(a.delta_phi) and math.isnan(b.delta_phi))


@DRAWS
@given(input_params(), schemes, angle, transmissivity, transmissivity)
def test_loss_monotonicity(p, scheme, phi, t1, t2):
    lo, hi = sorted((t1, t2))
    d_lo = phase_sensitivity(scheme, p, phi, LossParams(lo)).delta_phi
    d_hi = phase_sensitivity(scheme, p, phi, LossParams(hi)).delta_phi
    assume(math.isfinite(d_hi))
    assert d_lo >= d_hi * (1 - 1e-12)


@DRAWS
@given(input_params())
def test_gamma_period_pi(p):
    a = joint_moments(p)
    b = joint_moments(p.with_(gamma=p.gamma + math.pi))
    scales = moment_scales(a, p.alpha_mag)
    da, db = a.as_dict(), b.as_dict()
    for key, s in scales.items():
        assert abs(da[key] - db[key]) <= 1e-9 * max(abs(s), 1e-10), key


@DRAWS
@given(input_params(), schemes, angle, loss_params)
def test_error_propagation_identity(p, scheme, phi, loss):
    m = joint_moments(p)
    closed = float(delta_phi_array(scheme, m, phi, loss, p.alpha_mag, check=False))
    assume(math.isfinite(closed))
    s = signal_stats(scheme, p, phi, loss)
    assume(s.slope != 0.0)
    assert math.sqrt(s.variance) / abs(s.slope) == pytest.approx(closed, rel=1e-10)


@DRAWS
@given(input_params(), schemes, angle, loss_params, st.integers(-3, 3))
def test_phase_periodicity(p, scheme, phi, loss, k):
    a = phase_sensitivity(scheme, p, phi, loss).delta_phi
    b = phase_sensitivity(scheme, p, phi + 2 * math.pi * k, loss).delta_phi
    # phi + 2 pi k is only known to ~1e-15 absolute; skip phases where that is amplified
    near = [phase_sensitivity(scheme, p, phi + h, loss).delta_phi for h in (-1e-7, 1e-7)]
    assume(all(math.isfinite(x) for x in near + [a]))
    assume(max(abs(x - a) for x in near) < 1e-3 * a)
    assert b == pytest.approx(a, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(input_params(), schemes, angle)
def test_vectorized_matches_scalar(p, scheme, phi):
    m = joint_moments(p)
    vec = delta_phi_array(scheme, m, np.array([phi, phi + 1.0]), LossParams(), p.alpha_mag)
    assert vec[0] == pytest.approx(phase_sensitivity(scheme, p, phi).delta_phi, rel=1e-15)
