"""Input and loss parameters for the coherent + squeezed-Kerr interferometer."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

TWO_PI = 2.0 * math.pi

# double-precision working range for the closed forms
MAX_AMPLITUDE = 200.0
MAX_SQUEEZING = 10.0


class RangeError(ValueError):
    """Parameter outside the validated domain."""


class ConsistencyError(ArithmeticError):
    """Two evaluation routes disagree, or a moment lost its expected symmetry."""


class ZeroPhotonError(ValueError):
    """Benchmarks requested for an input carrying no photons."""


def reduce_angle(x: float) -> float:
    """Map an angle onto [0, 2pi)."""
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    # fmod of a tiny negative number can land exactly on 2pi
    return 0.0 if y >= TWO_PI else y


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise RangeError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class InputParams:
    """Coherent amplitude |alpha| in port 1 and SKS knobs (|beta|, theta, gamma, r) in port 2."""

    alpha_mag: float
    beta_mag: float
    theta: float = math.pi
    gamma: float = 0.0
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("alpha_mag", "beta_mag", "theta", "gamma", "r"):
            _check_finite(name, getattr(self, name))
        if not 0.0 <= self.alpha_mag <= MAX_AMPLITUDE:
            raise RangeError(f"alpha_mag must lie in [0, {MAX_AMPLITUDE}], got {self.alpha_mag}")
        if not 0.0 <= self.beta_mag <= MAX_AMPLITUDE:
            raise RangeError(f"beta_mag must lie in [0, {MAX_AMPLITUDE}], got {self.beta_mag}")
        if not 0.0 <= self.r <= MAX_SQUEEZING:
            raise RangeError(f"r must lie in [0, {MAX_SQUEEZING}], got {self.r}")

    def with_(self, **changes: float) -> "InputParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class LossParams:
    """Transmissivities of the internal (mu) and detector-side (eta) loss splitters."""

    mu: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mu", "eta"):
            value = getattr(self, name)
            _check_finite(name, value)
            if not 0.0 < value <= 1.0:
                raise RangeError(f"{name} must lie in (0, 1], got {value}")

    @property
    def transmission(self) -> float:
        return self.mu * self.eta

    @property
    def lossless(self) -> bool:
        return self.mu == 1.0 and self.eta == 1.0


LOSSLESS = LossParams()
