"""Closed-form moments of the squeezed Kerr state and the joint g-moments.

The input is the product |alpha> (x) S(zeta) U_K(gamma) |beta> with alpha, beta
taken real and non-negative.  Every two-mode moment factorizes through
<a1^k> = alpha^k, so the whole set is assembled from a handful of
single-mode SKS expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .params import InputParams, reduce_angle


@dataclass(frozen=True)
class KerrFactors:
    """Kerr envelopes c_k = exp(b^2 (cos 2k gamma - 1)), drifts s_k = b^2 sin 2k gamma,
    and C = cosh r, S = sinh r."""

    c: float
    c2: float
    c3: float
    c4: float
    s: float
    s2: float
    s3: float
    s4: float
    C: float
    S: float


@dataclass(frozen=True)
class SksMoments:
    a_mean: complex
    a2_mean: complex
    n_mean: float
    n2_normal: float


@dataclass(frozen=True)
class Moments:
    g1: float
    g2: float
    g3: float
    g4: float
    g5: float
    g6: float
    g7: float
    g8: float
    g9: float
    g10: complex
    g11: complex
    g12: complex
    a_mean: complex
    a2_mean: complex

    @property
    def n_total(self) -> float:
        return self.g1 + self.g2

    def as_dict(self) -> dict[str, float | complex]:
        out: dict[str, float | complex] = {f.name: getattr(self, f.name) for f in fields(self)}
        out["n_total"] = self.n_total
        return out


def kerr_factors(beta_mag: float, gamma: float, r: float) -> KerrFactors:
    b2 = beta_mag * beta_mag
    g = reduce_angle(gamma)
    # underflow of the envelopes to 0.0 is physical, not an error
    c = [math.exp(b2 * (math.cos(2 * k * g) - 1.0)) for k in (1, 2, 3, 4)]
    s = [b2 * math.sin(2 * k * g) for k in (1, 2, 3, 4)]
    return KerrFactors(*c, *s, C=math.cosh(r), S=math.sinh(r))


def _cubic_unit_parts(params: InputParams, k: KerrFactors) -> tuple[float, float]:
    """Return (u8, u12) with g8 = alpha*u8 and g12 = 1j*alpha*u12.

    u8 = 2 Re<a2^dag a2^2>, u12 = -2 Im<a2^dag a2^2>.
    """
    b = params.beta_mag
    b3 = b ** 3
    th = reduce_angle(params.theta)
    g = reduce_angle(params.gamma)
    C, S = k.C, k.S
    u8 = 2.0 * (
        b3 * k.c * ((C**3 + 2 * C * S * S) * math.cos(2 * g + k.s) + (S**3 + 2 * C * C * S) * math.cos(th + 2 * g + k.s))
        + b * k.c * ((2 * S**3 + C * C * S) * math.cos(th + k.s) + 3 * C * S * S * math.cos(k.s))
        + b3 * k.c3 * C * S * (C * math.cos(th + 6 * g + k.s3) + S * math.cos(2 * th + 6 * g + k.s3))
    )
    u12 = 2.0 * (
        b3 * k.c * ((C**3 + 2 * C * S * S) * math.sin(2 * g + k.s) - (S**3 + 2 * C * C * S) * math.sin(th + 2 * g + k.s))
        - b * k.c * ((2 * S**3 + C * C * S) * math.sin(th + k.s) - 3 * C * S * S * math.sin(k.s))
        + b3 * k.c3 * C * S * (C * math.sin(th + 6 * g + k.s3) - S * math.sin(2 * th + 6 * g + k.s3))
    )
    return u8, u12


def sks_moments(params: InputParams, factors: KerrFactors | None = None) -> SksMoments:
    k = factors or kerr_factors(params.beta_mag, params.gamma, params.r)
    b = params.beta_mag
    b2 = b * b
    b4 = b2 * b2
    th = reduce_angle(params.theta)
    g = reduce_angle(params.gamma)
    C, S = k.C, k.S
    C2, S2 = C * C, S * S

    a_mean = b * k.c * (C * _cis(-k.s) + S * _cis(k.s + th))
    a2_mean = (
        C2 * b2 * k.c2 * _cis(-(2 * g + k.s2))
        + C * S * (2 * b2 + 1) * _cis(th)
        + S2 * b2 * k.c2 * _cis(2 * g + 2 * th + k.s2)
    )
    n_mean = b2 * (C2 + S2 + 2 * k.c2 * C * S * math.cos(2 * g + th + k.s2)) + S2
    n2_normal = (
        b4 * C2 * C2
        + (b4 * S2 * S2 + 4 * b2 * S2 * S2 + 2 * S2 * S2)
        + 2 * b4 * C2 * S2 * k.c4 * math.cos(2 * th + 12 * g + k.s4)
        + 4 * b4 * k.c2 * C * S * (C2 + S2) * math.cos(th + 6 * g + k.s2)
        + 2 * C * S * b2 * k.c2 * (C2 + 5 * S2) * math.cos(th + 2 * g + k.s2)
        + (4 * b4 + 8 * b2 + 1) * C2 * S2
    )
    return SksMoments(a_mean=a_mean, a2_mean=a2_mean, n_mean=n_mean, n2_normal=n2_normal)


def joint_moments(params: InputParams) -> Moments:
    k = kerr_factors(params.beta_mag, params.gamma, params.r)
    sm = sks_moments(params, k)
    a = params.alpha_mag
    b = params.beta_mag
    a2, a3, a4 = a * a, a**3, a**4
    b2 = b * b
    th = reduce_angle(params.theta)
    g = reduce_angle(params.gamma)
    C, S = k.C, k.S

    # 2 Re<a2> and 2 Im<a2> from their closed forms
    re_part = 2 * b * k.c * (C * math.cos(k.s) + S * math.cos(th + k.s))
    im_part = 2 * b * k.c * (-C * math.sin(k.s) + S * math.sin(th + k.s))
    u8, u12 = _cubic_unit_parts(params, k)

    g6 = 2 * a2 * b2 * (
        k.c2 * C * C * math.cos(2 * g + k.s2) + 2 * C * S * math.cos(th) + k.c2 * S * S * math.cos(2 * th + 2 * g + k.s2)
    ) + 2 * a2 * C * S * math.cos(th)
    g7 = a2 * (b2 * C * C + (b2 + 1) * S * S + 2 * b2 * k.c2 * C * S * math.cos(th + 2 * g + k.s2))

    return Moments(
        g1=a2,
        g2=sm.n_mean,
        g3=a * re_part,
        g4=sm.n2_normal,
        g5=a4,
        g6=g6,
        g7=g7,
        g8=a * u8,
        g9=a3 * re_part,
        g10=1j * a * im_part,
        g11=-1j * a3 * im_part,
        g12=1j * a * u12,
        a_mean=sm.a_mean,
        a2_mean=sm.a2_mean,
    )


def _cis(x: float) -> complex:
    return complex(math.cos(x), math.sin(x))
