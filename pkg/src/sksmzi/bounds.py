"""Quantum Fisher information and the benchmark limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .moments import Moments, joint_moments
from .params import ConsistencyError, InputParams, ZeroPhotonError

IMAG_RTOL = 1e-9
MIN_PHOTONS = 1e-15


@dataclass(frozen=True)
class Bounds:
    qfi: float
    qcrb: float
    snl: float
    hl: float
    n_total: float


def qfi_from_moments(m: Moments) -> float:
    n = m.g1 + m.g2
    f = (
        2 * n
        + m.g5
        + m.g4
        - (m.g1 - m.g2) ** 2
        - m.g6
        + m.g10**2
        + 2j * (m.g11 + m.g12 + m.g10 * (n - 1))
    )
    f = complex(f)
    if abs(f.imag) > IMAG_RTOL * max(abs(f.real), 1.0):
        raise ConsistencyError(f"QFI has imaginary residue {f.imag!r} (real part {f.real!r})")
    # rounding can leave a tiny negative value for near-photonless inputs
    return max(f.real, 0.0)


def qfi(params: InputParams) -> float:
    return qfi_from_moments(joint_moments(params))


def limits_from_moments(m: Moments) -> Bounds:
    n = m.n_total
    if n <= MIN_PHOTONS:
        raise ZeroPhotonError("no photons at the inputs; SNL and HL are undefined")
    f = qfi_from_moments(m)
    return Bounds(
        qfi=f,
        qcrb=1.0 / math.sqrt(f) if f > 0 else math.inf,
        snl=1.0 / math.sqrt(n),
        hl=1.0 / n,
        n_total=n,
    )


def benchmark_limits(params: InputParams) -> Bounds:
    return limits_from_moments(joint_moments(params))
