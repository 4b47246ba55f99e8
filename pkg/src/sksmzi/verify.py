"""Closed forms against the truncated-Fock oracle on a small parameter grid."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import qfi_from_moments
from .detection import SCHEMES, Scheme, delta_phi_array, stats_arrays
from .moments import Moments, joint_moments
from .oracle import (
    FD_STEP,
    Convention,
    FockInterferometer,
    build_coherent_state,
    build_sks_state,
    check_oracle_range,
    oracle_joint_moments,
    oracle_qfi,
    oracle_qfi_heisenberg,
    oracle_sensitivity,
    product_state,
)
from .params import LOSSLESS, InputParams

MOMENT_TOL = 1e-8
SENSITIVITY_TOL = 1e-6
QFI_TOL = 1e-6
ABS_FLOOR = 1e-10
# above this many two-mode amplitudes the Schrodinger QFI (block unitaries) is skipped
SCHRODINGER_QFI_MAX = 40 * 40
# predicted relative rounding error of the finite-difference slope above which a point is skipped
FD_NOISE_RTOL = 1e-7


def moment_scales(m: Moments, alpha: float) -> dict[str, float]:
    """Cauchy-Schwarz magnitude of each field; relative errors are taken against these.

    Kerr dephasing can shrink a moment like <a2> far below the photon numbers
    that set its rounding error, so a plain relative error would be meaningless.
    """
    r2 = math.sqrt(max(m.g2, 0.0))
    r4 = math.sqrt(max(m.g4, 0.0))
    return {
        "g1": m.g1,
        "g2": m.g2,
        "g3": 2 * alpha * r2,
        "g4": m.g4,
        "g5": m.g5,
        "g6": 2 * alpha**2 * r4,
        "g7": m.g7,
        "g8": 2 * alpha * r2 * r4,
        "g9": 2 * alpha**3 * r2,
        "g10": 2 * alpha * r2,
        "g11": 2 * alpha**3 * r2,
        "g12": 2 * alpha * r2 * r4,
        "a_mean": r2,
        "a2_mean": r4,
    }


def moment_errors(closed: Moments, oracle: Moments, alpha: float) -> dict[str, float]:
    a, b = closed.as_dict(), oracle.as_dict()
    scales = moment_scales(closed, alpha)
    return {k: abs(a[k] - b[k]) / max(abs(s), ABS_FLOOR) for k, s in scales.items()}


def _rel(x: float, y: float) -> float:
    if math.isinf(x) and math.isinf(y):
        return 0.0
    return abs(x - y) / max(abs(y), ABS_FLOOR)


@dataclass(frozen=True)
class Grid:
    alpha: tuple[float, ...] = (0.0, 0.7, 1.4, 2.2, 3.0)
    beta: tuple[float, ...] = (0.0, 0.7, 1.4, 2.2, 3.0)
    gamma: tuple[float, ...] = (0.0, 0.3, 0.9, 1.6, 2.8)
    r: tuple[float, ...] = (0.0, 0.4, 1.2)
    theta: tuple[float, ...] = (0.0, math.pi / 3, math.pi)
    phi: tuple[float, ...] = (0.3, 1.1, 2.0, 3.7, 5.2)
    schemes: tuple[Scheme, ...] = SCHEMES

    def points(self):
        for b, g, r, th in itertools.product(self.beta, self.gamma, self.r, self.theta):
            params = InputParams(0.0, b, theta=th, gamma=g, r=r)
            for a in self.alpha:
                yield params.with_(alpha_mag=a)

    @property
    def size(self) -> int:
        return len(self.alpha) * len(self.beta) * len(self.gamma) * len(self.r) * len(self.theta)


@dataclass
class PointReport:
    params: InputParams
    moment_error: float
    worst_moment: str
    sensitivity_error: float
    qfi_error: float
    skipped: int = 0

    def passed(self) -> bool:
        return (
            self.moment_error <= MOMENT_TOL
            and self.sensitivity_error <= SENSITIVITY_TOL
            and self.qfi_error <= QFI_TOL
        )


@dataclass
class Report:
    points: list[PointReport] = field(default_factory=list)

    @property
    def failures(self) -> list[PointReport]:
        return [p for p in self.points if not p.passed()]

    def passed(self) -> bool:
        return not self.failures

    def worst(self) -> dict[str, float]:
        return {
            "moments": max((p.moment_error for p in self.points), default=0.0),
            "sensitivity": max((p.sensitivity_error for p in self.points), default=0.0),
            "qfi": max((p.qfi_error for p in self.points), default=0.0),
        }


def _ill_conditioned(scheme: Scheme, m: Moments, phi: float, alpha: float) -> bool:
    """True when rounding in the oracle's central difference swamps the slope.

    Each detector mean carries an absolute rounding error of order eps * n, and
    the stencil divides it by h; near a slope zero that noise alone exceeds the
    tolerance, whatever the accuracy of either route.
    """
    _, _, slope = stats_arrays(scheme, m, phi, LOSSLESS, alpha)
    noise = np.finfo(float).eps * max(1.0, m.n_total) / FD_STEP
    return noise > FD_NOISE_RTOL * abs(float(slope))


def verify_point(params: InputParams, sks, grid: Grid, interferometer: FockInterferometer | None = None) -> PointReport:
    alpha = params.alpha_mag
    state = product_state(build_coherent_state(alpha), sks)
    closed = joint_moments(params)
    errs = moment_errors(closed, oracle_joint_moments(state), alpha)
    worst_key = max(errs, key=errs.get)

    sens_err, skipped = 0.0, 0
    if closed.n_total > 0:
        for scheme in grid.schemes:
            for phi in grid.phi:
                c = float(delta_phi_array(scheme, closed, phi, LOSSLESS, alpha))
                if not math.isfinite(c) or _ill_conditioned(scheme, closed, phi, alpha):
                    skipped += 1
                    continue
                o = oracle_sensitivity(scheme, alpha, params, phi, Convention.WITH_GLOBAL_PHASE, state=state)
                sens_err = max(sens_err, _rel(c, o.delta_phi))

    q_closed = qfi_from_moments(closed)
    if state.amplitudes.size <= SCHRODINGER_QFI_MAX:
        q_oracle = oracle_qfi(alpha, params, state=state, interferometer=interferometer)
    else:
        q_oracle = oracle_qfi_heisenberg(state)
    q_err = abs(q_closed - q_oracle) / max(abs(q_oracle), 1.0)
    return PointReport(params, errs[worst_key], worst_key, sens_err, q_err, skipped)


def verify_grid(grid: Grid = Grid()) -> Report:
    """Run every grid point; raises RangeError before any work if a point leaves the oracle range."""
    for p in grid.points():
        check_oracle_range(p.alpha_mag, p)
    report = Report()
    # beam-splitter blocks are cached inside and shared by every point
    ifm = FockInterferometer()
    sks_cache: dict[tuple, object] = {}
    for p in grid.points():
        key = (p.beta_mag, p.gamma, p.r, p.theta)
        if key not in sks_cache:
            sks_cache.clear()
            sks_cache[key] = build_sks_state(p)
        report.points.append(verify_point(p, sks_cache[key], grid, ifm))
    return report
