"""Detector statistics and phase sensitivity for SID, IDD and HD read-out.

Two routes are kept side by side: ``signal_stats`` builds mean, variance and
slope of the observable, and ``phase_sensitivity`` evaluates the explicit
closed forms directly.  Under ``__debug__`` every sensitivity call checks the two
against each other.

All array-valued helpers broadcast over ``phi``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .moments import Moments, joint_moments, kerr_factors
from .params import LOSSLESS, ConsistencyError, InputParams, LossParams, TWO_PI, reduce_angle

SINGULAR_RTOL = 1e-12
VARIANCE_CLAMP = 1e-12
ROUTE_RTOL = 1e-10
# variances within this many ulps (of the moment scale) of zero are not resolved
RESOLVE_FACTOR = 1e6


class Scheme(str, enum.Enum):
    SID = "sid"
    IDD = "idd"
    HD = "hd"

    @classmethod
    def parse(cls, value: "str | Scheme") -> "Scheme":
        if isinstance(value, Scheme):
            return value
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected one of sid, idd, hd") from None


SCHEMES = (Scheme.SID, Scheme.IDD, Scheme.HD)


@dataclass(frozen=True)
class SignalStats:
    mean: float
    variance: float
    slope: float
    phi: float


@dataclass(frozen=True)
class Sensitivity:
    delta_phi: float
    scheme: Scheme
    phi: float
    finite: bool


def _half_angles(phi):
    return np.sin(phi / 2) ** 2, np.cos(phi / 2) ** 2


def _sid_parts(m: Moments, phi):
    s2, c2 = _half_angles(phi)
    sin = np.sin(phi)
    mean0 = m.g1 * s2 + m.g2 * c2 - 0.5 * m.g3 * sin
    excess0 = (
        (m.g4 - m.g2**2) * c2**2
        + (m.g5 - m.g1**2) * s2**2
        + 0.25 * (m.g6 - m.g3**2 - 2 * m.g1 * m.g2 + 4 * m.g7) * sin**2
        - ((m.g8 - m.g2 * m.g3) * c2 + (m.g9 - m.g1 * m.g3) * s2) * sin
    )
    slope0 = 0.5 * (m.g1 - m.g2) * sin - 0.5 * m.g3 * np.cos(phi)
    return mean0, excess0, slope0


def _idd_parts(m: Moments, phi):
    cos, sin = np.cos(phi), np.sin(phi)
    n = m.g1 + m.g2
    mean0 = (m.g2 - m.g1) * cos - m.g3 * sin
    excess0 = (
        (m.g4 + m.g5 - 2 * m.g7 - (m.g2 - m.g1) ** 2) * cos**2
        + (m.g6 + 2 * m.g7 - m.g3**2) * sin**2
        - (m.g8 - m.g9 - m.g3 * (m.g2 - m.g1)) * np.sin(2 * phi)
    )
    slope0 = (m.g1 - m.g2) * sin - m.g3 * cos
    return mean0, n, excess0, slope0


def _hd_parts(m: Moments, phi, alpha: float):
    """Mean, variance excess over 1/2, and slope of the lossless quadrature."""
    a = m.a_mean
    var_a = m.a2_mean - a * a
    e = np.exp(1j * phi)
    half = np.exp(0.5j * phi)
    _, c2 = _half_angles(phi)
    out_mean = -half * (-np.sin(phi / 2) * alpha + np.cos(phi / 2) * a)
    mean0 = math.sqrt(2.0) * out_mean.real
    excess0 = c2 * ((e * var_a).real + (m.g2 - abs(a) ** 2))
    slope0 = (e * (alpha - 1j * a)).real / math.sqrt(2.0)
    return mean0, excess0, slope0


def _clamp(var, scale):
    var = np.asarray(var, dtype=float)
    floor = -VARIANCE_CLAMP * np.maximum(1.0, scale)
    if np.any(var < floor):
        raise ConsistencyError(f"negative variance {np.min(var)!r} beyond rounding")
    return np.where(var < 0.0, 0.0, var)


def stats_arrays(scheme: Scheme, m: Moments, phi, loss: LossParams, alpha: float):
    """(mean, variance, slope) arrays of the detected observable."""
    t = loss.transmission
    if scheme is Scheme.SID:
        mean0, excess0, slope0 = _sid_parts(m, phi)
        mean, var, slope = t * mean0, t * mean0 + t * t * excess0, t * slope0
        scale = m.n_total**2
    elif scheme is Scheme.IDD:
        mean0, n, excess0, slope0 = _idd_parts(m, phi)
        mean, var, slope = t * mean0, t * n + t * t * excess0, t * slope0
        scale = m.n_total**2
    else:
        mean0, excess0, slope0 = _hd_parts(m, phi, alpha)
        rt = math.sqrt(t)
        mean, var, slope = rt * mean0, 0.5 + t * excess0, rt * slope0
        scale = m.n_total
    return mean, _clamp(var, scale), slope


def closed_form_arrays(scheme: Scheme, m: Moments, phi, loss: LossParams, alpha: float):
    """Explicit closed forms for the (lossy) sensitivity; returns (numerator, denominator)."""
    t = loss.transmission
    if scheme is Scheme.SID:
        s2, c2 = _half_angles(phi)
        sin = np.sin(phi)
        inner = (
            (m.g1 * s2 + m.g2 * c2 - 0.5 * m.g3 * sin) / t
            + (m.g4 - m.g2**2) * c2**2
            + (m.g5 - m.g1**2) * s2**2
            + 0.25 * (m.g6 - m.g3**2 - 2 * m.g1 * m.g2 + 4 * m.g7) * sin**2
            - ((m.g8 - m.g2 * m.g3) * c2 + (m.g9 - m.g1 * m.g3) * s2) * sin
        )
        num = 2.0 * np.sqrt(np.maximum(inner, 0.0))
        den = np.abs((m.g1 - m.g2) * sin - m.g3 * np.cos(phi))
    elif scheme is Scheme.IDD:
        cos, sin = np.cos(phi), np.sin(phi)
        inner = (
            (m.g1 + m.g2) / t
            + (m.g4 + m.g5 - 2 * m.g7 - (m.g2 - m.g1) ** 2) * cos**2
            + (m.g6 + 2 * m.g7 - m.g3**2) * sin**2
            - (m.g8 - m.g9 - m.g3 * (m.g2 - m.g1)) * np.sin(2 * phi)
        )
        num = np.sqrt(np.maximum(inner, 0.0))
        den = np.abs((m.g1 - m.g2) * sin - m.g3 * cos)
    else:
        a = m.a_mean
        e = np.exp(1j * phi)
        inner = 2 * np.cos(phi / 2) ** 2 * ((e * (m.a2_mean - a * a)).real + (m.g2 - abs(a) ** 2)) + 1.0 / t
        num = np.sqrt(np.maximum(inner, 0.0))
        den = np.abs((e * (alpha - 1j * a)).real)
    return num, den


def _vacuum_sid_parts(m: Moments, phi, loss: LossParams):
    inner = m.g2 / loss.transmission + (m.g4 - m.g2**2) * np.cos(phi / 2) ** 2
    return np.sqrt(np.maximum(inner, 0.0)), np.abs(m.g2 * np.sin(phi / 2))


def _unresolved(scheme: Scheme, m: Moments, var):
    """Variance below the rounding floor of the moments it is assembled from.

    At a dark fringe the photon-counting variance vanishes together with the
    slope.  The excess terms are differences of O(n^2) moments, so there the
    computed ratio is rounding noise and may even collapse to zero.
    """
    n = max(1.0, m.n_total)
    scale = n if scheme is Scheme.HD else n * n
    return np.asarray(var) < RESOLVE_FACTOR * np.finfo(float).eps * scale


def _singular(slope, mean):
    return np.abs(slope) < SINGULAR_RTOL * np.maximum(1.0, np.abs(mean))


def delta_phi_array(scheme: Scheme, m: Moments, phi, loss: LossParams, alpha: float, check: bool = __debug__):
    """Vectorized sensitivity; +inf where the slope is singular."""
    phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    mean, var, slope = stats_arrays(scheme, m, phi, loss, alpha)
    singular = routable = _singular(slope, mean)
    if scheme is Scheme.SID and alpha == 0.0:
        # a common factor cos(phi/2) cancels; phi = pi is removable, not singular
        num, den = _vacuum_sid_parts(m, phi, loss)
        singular = _singular(den, mean)
    else:
        num, den = closed_form_arrays(scheme, m, phi, loss, alpha)
        singular = singular | _unresolved(scheme, m, var)
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = np.where(singular, np.inf, num / np.where(singular, 1.0, den))
        if check:
            routed = np.sqrt(var) / np.abs(np.where(routable, 1.0, slope))
            ok = routable | singular | np.isclose(closed, routed, rtol=ROUTE_RTOL, atol=0.0)
            if not np.all(ok):
                bad = np.flatnonzero(~np.atleast_1d(ok))[0]
                raise ConsistencyError(
                    f"{scheme.value}: closed form {np.atleast_1d(closed)[bad]!r} != "
                    f"sqrt(var)/|slope| {np.atleast_1d(routed)[bad]!r}"
                )
    return closed


def signal_stats(scheme: Scheme | str, params: InputParams, phi: float, loss: LossParams = LOSSLESS) -> SignalStats:
    scheme = Scheme.parse(scheme)
    phi = reduce_angle(phi)
    m = joint_moments(params)
    mean, var, slope = stats_arrays(scheme, m, phi, loss, params.alpha_mag)
    return SignalStats(mean=float(mean), variance=float(var), slope=float(slope), phi=phi)


def phase_sensitivity(
    scheme: Scheme | str, params: InputParams, phi: float, loss: LossParams = LOSSLESS
) -> Sensitivity:
    scheme = Scheme.parse(scheme)
    phi = reduce_angle(phi)
    m = joint_moments(params)
    d = float(delta_phi_array(scheme, m, phi, loss, params.alpha_mag))
    return Sensitivity(delta_phi=d, scheme=scheme, phi=phi, finite=math.isfinite(d))


def caves_reduction(params: InputParams, loss: LossParams = LOSSLESS) -> Sensitivity:
    """HD at phi = 0 with theta pinned to pi, via the A-factor form."""
    k = kerr_factors(params.beta_mag, params.gamma, params.r)
    a, b, r = params.alpha_mag, params.beta_mag, params.r
    g = reduce_angle(params.gamma)
    A = 2 * b * b * (1 + k.c2 * math.cos(2 * g + k.s2) - 2 * k.c**2 * math.cos(k.s) ** 2)
    t = loss.transmission
    num = math.sqrt(max((1.0 / t - 1.0) + math.exp(-2 * r) * (1 + A), 0.0))
    den = abs(a + b * k.c * math.exp(r) * math.sin(k.s - math.pi))
    if den < SINGULAR_RTOL * max(1.0, a + b):
        return Sensitivity(math.inf, Scheme.HD, 0.0, False)
    return Sensitivity(num / den, Scheme.HD, 0.0, True)


# special-case reductions used as cross-checks


def vacuum_port_sid(m: Moments, phi, loss: LossParams = LOSSLESS):
    """SID with vacuum in port 1."""
    num, den = _vacuum_sid_parts(m, phi, loss)
    with np.errstate(divide="ignore"):
        return num / den


def vacuum_port_idd(m: Moments, phi, loss: LossParams = LOSSLESS):
    t = loss.transmission
    with np.errstate(divide="ignore"):
        return np.sqrt(m.g2 / t + (m.g4 - m.g2**2) * np.cos(phi) ** 2) / np.abs(m.g2 * np.sin(phi))


def vacuum_port_optimum(m: Moments) -> float:
    """Optimal-phase SID/IDD sensitivity with vacuum in port 1: 1/sqrt(g2)."""
    return 1.0 / math.sqrt(m.g2)


def kerr_vacuum_hd(params: InputParams, phi):
    """HD with vacuum in port 1 and an unsqueezed Kerr state in port 2 (r = 0)."""
    k = kerr_factors(params.beta_mag, params.gamma, 0.0)
    b2 = params.beta_mag**2
    g = reduce_angle(params.gamma)
    inner = 1.0 / b2 + 2 * np.cos(phi / 2) ** 2 * (
        1 - k.c**2 + k.c2 * np.cos(phi - 2 * g - k.s2) - k.c**2 * np.cos(phi - 2 * k.s)
    )
    with np.errstate(divide="ignore"):
        return np.sqrt(inner) / np.abs(k.c * np.sin(phi - k.s))
