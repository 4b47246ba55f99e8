"""Global minimization of the sensitivity over the operating phase."""

from __future__ import annotations

import math

import numpy as np

from .detection import Scheme, delta_phi_array
from .moments import Moments, joint_moments
from .params import LOSSLESS, InputParams, LossParams, TWO_PI

GRID_POINTS = 4096
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FTOL = 1e-12
TIE_RTOL = 1e-12
# grid minima this close to the best one are refined too
CANDIDATE_RTOL = 1e-3
MAX_CANDIDATES = 8


class AllSingularError(ArithmeticError):
    """Every grid phase has a vanishing slope."""


def golden_section(f, lo: float, hi: float, ftol: float = FTOL, xtol: float = 1e-13, max_iter: int = 200):
    """Minimize a unimodal ``f`` on [lo, hi]; returns (x, f(x))."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo < xtol:
            break
        if math.isfinite(f1) and math.isfinite(f2) and abs(f1 - f2) <= ftol * max(abs(f1), abs(f2)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _grid_minima(values: np.ndarray) -> np.ndarray:
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    idx = np.flatnonzero((values <= left) & (values <= right) & np.isfinite(values))
    return idx[np.argsort(values[idx], kind="stable")]


def optimize_phase_moments(
    scheme: Scheme, m: Moments, alpha: float, loss: LossParams = LOSSLESS, grid: int = GRID_POINTS
) -> tuple[float, float]:
    step = TWO_PI / grid
    phis = np.arange(grid) * step
    values = delta_phi_array(scheme, m, phis, loss, alpha)
    if not np.any(np.isfinite(values)):
        raise AllSingularError(f"{scheme.value}: slope vanishes at every phase")

    def f(x: float) -> float:
        return float(delta_phi_array(scheme, m, x, loss, alpha, check=False))

    best_grid = None
    candidates = []
    for k in _grid_minima(values)[:MAX_CANDIDATES]:
        if best_grid is None:
            best_grid = values[k]
        elif values[k] > best_grid * (1 + CANDIDATE_RTOL):
            break
        x, fx = golden_section(f, phis[k] - step, phis[k] + step)
        # refinement never reports worse than the grid point itself
        if not fx <= values[k]:
            x, fx = phis[k], float(values[k])
        candidates.append((float(fx), float(np.mod(x, TWO_PI))))

    best = min(c[0] for c in candidates)
    tied = [phi for val, phi in candidates if val <= best * (1 + TIE_RTOL)]
    phi_opt = min(tied)
    # snap tiny wrap-around residues to 0
    if TWO_PI - phi_opt < 1e-12:
        phi_opt = 0.0
    return phi_opt, float(delta_phi_array(scheme, m, phi_opt, loss, alpha))


def optimize_phase(
    scheme: Scheme | str, params: InputParams, loss: LossParams = LOSSLESS
) -> tuple[float, float]:
    """(phi_opt, minimal delta phi) over [0, 2pi)."""
    return optimize_phase_moments(Scheme.parse(scheme), joint_moments(params), params.alpha_mag, loss)


def _objective(scheme: Scheme, base: InputParams, loss: LossParams, phi: float | None, relative: bool):
    def f(gamma: float) -> float:
        params = base.with_(gamma=gamma)
        m = joint_moments(params)
        if phi is None:
            try:
                d = optimize_phase_moments(scheme, m, params.alpha_mag, loss)[1]
            except AllSingularError:
                return math.inf
        else:
            d = float(delta_phi_array(scheme, m, phi, loss, params.alpha_mag, check=False))
        return d * math.sqrt(m.n_total) if relative else d

    return f


def minimize_over_gamma(
    scheme: Scheme | str,
    base: InputParams,
    gammas: np.ndarray,
    loss: LossParams = LOSSLESS,
    phi: float | None = None,
    relative: bool = True,
) -> tuple[float, float]:
    """(gamma_opt, value) minimizing over a gamma grid, then refining the best bracket.

    ``phi=None`` optimizes the phase at every gamma.  With ``relative`` the
    value is the ratio to the shot-noise limit.
    """
    scheme = Scheme.parse(scheme)
    gammas = np.asarray(gammas, dtype=float)
    f = _objective(scheme, base, loss, phi, relative)
    values = np.array([f(g) for g in gammas])
    if not np.any(np.isfinite(values)):
        raise AllSingularError(f"{scheme.value}: singular on the whole gamma grid")
    k = int(np.nanargmin(np.where(np.isfinite(values), values, np.nan)))
    lo = gammas[max(k - 1, 0)]
    hi = gammas[min(k + 1, gammas.size - 1)]
    x, fx = golden_section(f, float(lo), float(hi), ftol=1e-10, xtol=1e-14)
    if fx <= values[k]:
        return float(x), float(fx)
    return float(gammas[k]), float(values[k])
