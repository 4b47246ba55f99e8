"""Truncated Fock-basis brute force for every closed-form quantity.

States are built numerically (coherent vector, diagonal Kerr phase, and the
action of the exponentiated squeeze generator) and all expectation values are
obtained by applying annihilation operators to amplitude arrays.  Only
annihilation operators are ever applied, so truncation enters only through the
discarded tail of the input state and never through a clipped a^dagger.

Two-mode amplitudes are stored as a (D1, D2) matrix ``M[n1, n2]``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln
from scipy.stats import poisson

from .detection import Scheme, Sensitivity
from .moments import Moments, SksMoments
from .params import InputParams, RangeError, TWO_PI, reduce_angle

TAU_TRUNC = 1e-10
TAIL_LIMIT = 1e-8
FD_STEP = 1e-5
ORACLE_MAX_AMPLITUDE = 3.0
ORACLE_MAX_SQUEEZING = 1.2
MAX_AUTO_DIM = 1200
# relative budget for the n^2-weighted mass discarded by automatic truncation
MOMENT_RTOL = 1e-12


class TruncationError(RuntimeError):
    """The Fock basis is too small for the requested state."""


class FiniteDifferenceError(RuntimeError):
    """Variance changes too fast across the slope stencil."""


class Convention(enum.Enum):
    WITH_GLOBAL_PHASE = "with"
    WITHOUT_GLOBAL_PHASE = "without"


@dataclass(frozen=True)
class FockState:
    amplitudes: np.ndarray
    deficit: float = 0.0
    tail_mass: float = 0.0

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def two_mode(self) -> bool:
        return self.amplitudes.ndim == 2

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def check_oracle_range(alpha_mag: float, params: InputParams) -> None:
    if alpha_mag > ORACLE_MAX_AMPLITUDE or params.beta_mag > ORACLE_MAX_AMPLITUDE:
        raise RangeError(f"oracle restricted to alpha, beta <= {ORACLE_MAX_AMPLITUDE}")
    if params.r > ORACLE_MAX_SQUEEZING:
        raise RangeError(f"oracle restricted to r <= {ORACLE_MAX_SQUEEZING}")


def coherent_dim(amplitude: float, tau: float = TAU_TRUNC) -> int:
    """Smallest D whose Poisson tail P(n >= D) is below tau / 10."""
    lam = amplitude * amplitude
    if lam == 0.0:
        return 2
    d = max(2, int(lam))
    while poisson.sf(d - 1, lam) >= tau / 10:
        d += 1
    return d


def auto_dim(beta_mag: float, r: float, tau: float = TAU_TRUNC) -> int:
    """Coherent-tail dimension inflated by 1 + 3r for the squeezing spread."""
    return max(int(math.ceil(coherent_dim(beta_mag, tau) * (1.0 + 3.0 * r))), 8)


def _weighted_poisson_tail(dim: int, lam: float) -> float:
    """sum over n >= dim of n^2 P(n) for a Poisson distribution of mean lam."""
    # n^2 = n(n-1) + n turns the sum into shifted Poisson tails
    return lam * lam * float(poisson.sf(dim - 3, lam)) + lam * float(poisson.sf(dim - 2, lam))


def coherent_amplitudes(amplitude: float, dim: int) -> np.ndarray:
    n = np.arange(dim)
    if amplitude == 0.0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    logs = -0.5 * amplitude**2 + n * math.log(amplitude) - 0.5 * gammaln(n + 1)
    return np.exp(logs).astype(complex)


def lowering(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


def _tail(probs: np.ndarray) -> float:
    top = max(1, int(math.ceil(0.05 * probs.size)))
    return float(probs[-top:].sum())


def _finish(vec: np.ndarray, lost: float, tau: float) -> FockState:
    probs = np.abs(vec) ** 2
    norm = float(probs.sum())
    deficit = max(0.0, 1.0 - norm) + lost
    tail = _tail(probs / norm)
    if deficit > tau or tail > TAIL_LIMIT:
        raise TruncationError(f"dim {vec.size}: discarded mass {deficit:.3g}, top-level tail {tail:.3g}")
    return FockState(vec / math.sqrt(norm), deficit=deficit, tail_mass=tail)


def build_coherent_state(amplitude: float, dim: int | None = None, tau: float = TAU_TRUNC) -> FockState:
    if dim is None:
        dim = coherent_dim(amplitude, tau)
        lam = amplitude * amplitude
        # same fourth-order guard as for the squeezed Kerr state
        while lam and _weighted_poisson_tail(dim, lam) > MOMENT_RTOL * max(1.0, lam * lam + lam):
            dim += 1
    lost = float(poisson.sf(dim - 1, amplitude**2)) if amplitude else 0.0
    return _finish(coherent_amplitudes(amplitude, dim), lost, tau)


def build_sks_state(params: InputParams, dim: int | None = None, tau: float = TAU_TRUNC) -> FockState:
    """Amplitudes of S(zeta) U_K(gamma) |beta> truncated to ``dim`` levels.

    The squeeze is exponentiated in a padded basis so that the generator's
    clipped top rows never reach the kept levels.  With ``dim=None`` the
    dimension starts at ``auto_dim`` and grows by 25% until the tail budget holds.
    """
    if dim is not None:
        return _sks_at(params, dim, tau)
    d = auto_dim(params.beta_mag, params.r, tau)
    while True:
        try:
            return _sks_at(params, d, tau, weighted=True)
        except TruncationError:
            if d >= MAX_AUTO_DIM:
                raise
            d = min(MAX_AUTO_DIM, int(math.ceil(1.25 * d)))


def _squeezer(work: int, r: float, theta: float):
    k = np.sqrt(np.arange(1, work - 1) * np.arange(2, work, dtype=float))
    lower2 = diags([k], [2], shape=(work, work), format="csc")
    zeta = r * np.exp(1j * theta)
    return (0.5 * (zeta * lower2.T - np.conj(zeta) * lower2)).tocsc()


def _sks_at(params: InputParams, dim: int, tau: float, weighted: bool = False) -> FockState:
    # padding also serves the moment check below when r = 0
    work = dim + max(16, dim // 2)
    n = np.arange(work)
    vec = coherent_amplitudes(params.beta_mag, work)
    vec = vec * np.exp(-1j * reduce_angle(params.gamma) * n * (n - 1.0))
    if params.r > 0:
        vec = expm_multiply(_squeezer(work, params.r, reduce_angle(params.theta)), vec)
    probs = np.abs(vec) ** 2
    lost = float(np.sum(probs[dim:]))
    if weighted:
        # fourth-order moments see discarded levels with weight ~ n^2
        n2 = n.astype(float) ** 2
        cut = float(np.sum(n2[dim:] * probs[dim:]))
        if cut > MOMENT_RTOL * max(1.0, float(np.sum(n2 * probs))):
            raise TruncationError(f"dim {dim}: n^2-weighted discarded mass {cut:.3g}")
    if params.beta_mag:
        lost += float(poisson.sf(work - 1, params.beta_mag**2))
    return _finish(vec[:dim].copy(), lost, tau)


# annihilation operators on amplitude arrays


def lower(x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Apply a to the Fock index along ``axis``; exact within the truncation."""
    x = np.moveaxis(x, axis, 0)
    out = np.zeros_like(x)
    k = np.sqrt(np.arange(1, x.shape[0], dtype=float))
    out[:-1] = k.reshape((-1,) + (1,) * (x.ndim - 1)) * x[1:]
    return np.moveaxis(out, 0, axis)


def oracle_single_mode_moments(state: FockState) -> SksMoments:
    if state.two_mode:
        raise ValueError("single-mode state required")
    psi = state.amplitudes
    a1 = lower(psi)
    a2 = lower(a1)
    return SksMoments(
        a_mean=complex(np.vdot(psi, a1)),
        a2_mean=complex(np.vdot(psi, a2)),
        n_mean=float(np.vdot(a1, a1).real),
        n2_normal=float(np.vdot(a2, a2).real),
    )


def product_state(first: FockState, second: FockState) -> FockState:
    return FockState(
        np.outer(first.amplitudes, second.amplitudes),
        deficit=first.deficit + second.deficit,
        tail_mass=max(first.tail_mass, second.tail_mass),
    )


def oracle_joint_moments(state: FockState) -> Moments:
    """All g-moments of a two-mode state by direct contraction."""
    M = state.amplitudes
    A1 = lower(M, 0)
    A2 = lower(M, 1)
    A11 = lower(A1, 0)
    A22 = lower(A2, 1)
    A12 = lower(A1, 1)
    v = np.vdot
    return Moments(
        g1=float(v(A1, A1).real),
        g2=float(v(A2, A2).real),
        g3=float((v(A2, A1) + v(A1, A2)).real),
        g4=float(v(A22, A22).real),
        g5=float(v(A11, A11).real),
        g6=float((v(A22, A11) + v(A11, A22)).real),
        g7=float(v(A12, A12).real),
        g8=float((v(A22, A12) + v(A12, A22)).real),
        g9=float((v(A12, A11) + v(A11, A12)).real),
        g10=complex(v(A1, A2) - v(A2, A1)),
        g11=complex(v(A12, A11) - v(A11, A12)),
        g12=complex(v(A22, A12) - v(A12, A22)),
        a_mean=complex(v(M, A2)),
        a2_mean=complex(v(M, A22)),
    )


def input_state(alpha_mag: float, params: InputParams, dim: int | None = None, tau: float = TAU_TRUNC) -> FockState:
    """|alpha> (x) |psi_SK> as a two-mode amplitude matrix."""
    return product_state(build_coherent_state(alpha_mag, tau=tau), build_sks_state(params, dim, tau))


# interferometer


def mode_matrix(phi: float, convention: Convention = Convention.WITH_GLOBAL_PHASE) -> np.ndarray:
    """Rows give (a3, a4) in terms of (a1, a2)."""
    s, c = math.sin(phi / 2), math.cos(phi / 2)
    m = -np.array([[-s, c], [c, s]], dtype=complex)
    if convention is Convention.WITH_GLOBAL_PHASE:
        m *= np.exp(0.5j * phi)
    return m


# the lossless network factors as OUTER . diag(e^{i phi}, 1) . INNER
INNER = np.array([[1, -1j], [1, 1j]], dtype=complex) / math.sqrt(2)
OUTER = -np.array([[1j, -1j], [1, 1]], dtype=complex) / math.sqrt(2)


def _passive_generator_block(herm: np.ndarray, total: int) -> np.ndarray:
    """Matrix of a^dagger H a on span{|m, N-m>} for m = 0..N."""
    m = np.arange(total + 1, dtype=float)
    block = np.diag(herm[0, 0] * m + herm[1, 1] * (total - m)).astype(complex)
    off = np.sqrt((m[:-1] + 1) * (total - m[:-1]))
    # a1^dagger a2 raises m
    block[np.arange(1, total + 1), np.arange(total)] = herm[0, 1] * off
    block[np.arange(total), np.arange(1, total + 1)] = herm[1, 0] * off
    return block


@dataclass
class PassiveUnitary:
    """Fock-space unitary U with U^dagger a U = V a for a fixed 2x2 unitary V.

    Photon number is conserved, so U is stored block by block; blocks are built
    lazily up to the largest total photon number requested.
    """

    modes: np.ndarray
    blocks: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self) -> None:
        w, vecs = np.linalg.eig(self.modes)
        # V = exp(-i K)  =>  K = i log V, Hermitian because V is unitary
        k = vecs @ np.diag(1j * np.log(w)) @ np.linalg.inv(vecs)
        self._gen = 0.5 * (k + k.conj().T)

    def block(self, total: int) -> np.ndarray:
        while len(self.blocks) <= total:
            t = len(self.blocks)
            lam, q = np.linalg.eigh(_passive_generator_block(self._gen, t))
            self.blocks.append((q * np.exp(-1j * lam)) @ q.conj().T)
        return self.blocks[total]

    def apply(self, M: np.ndarray) -> np.ndarray:
        d1, d2 = M.shape
        top = d1 + d2 - 2
        out = np.zeros((top + 1, top + 1), dtype=complex)
        for total in range(top + 1):
            lo, hi = max(0, total - d2 + 1), min(total, d1 - 1)
            c = np.zeros(total + 1, dtype=complex)
            idx = np.arange(lo, hi + 1)
            c[idx] = M[idx, total - idx]
            m = np.arange(total + 1)
            out[m, total - m] = self.block(total) @ c
        return out


@dataclass
class FockInterferometer:
    """Reusable beam-splitter blocks; holds no state between different inputs."""

    inner: PassiveUnitary = field(default_factory=lambda: PassiveUnitary(INNER))
    outer: PassiveUnitary = field(default_factory=lambda: PassiveUnitary(OUTER))

    def mid_state(self, inp: FockState, phi: float, convention: Convention) -> np.ndarray:
        mid = self.inner.apply(inp.amplitudes)
        return mid * _arm_phase(mid.shape[0], phi, convention)

    def output_state(self, inp: FockState, phi: float, convention: Convention) -> FockState:
        mid = self.mid_state(inp, phi, convention)
        # mid already spans every reachable total photon number; outer stays inside it
        out = self.outer.apply(mid)[: mid.shape[0], : mid.shape[1]]
        return FockState(out, deficit=inp.deficit, tail_mass=inp.tail_mass)


def _arm_phase(dim: int, phi: float, convention: Convention) -> np.ndarray:
    n = np.arange(dim, dtype=float)
    if convention is Convention.WITH_GLOBAL_PHASE:
        return np.exp(1j * phi * n)[:, None] * np.ones(dim)[None, :]
    return np.exp(0.5j * phi * (n[:, None] - n[None, :]))


def oracle_interferometer(
    alpha_mag: float,
    sks: FockState,
    phi: float,
    convention: Convention = Convention.WITH_GLOBAL_PHASE,
    dim: int | None = None,
    interferometer: FockInterferometer | None = None,
) -> FockState:
    """Two-mode output state (ports 3, 4) after BS - phase - BS."""
    coh = build_coherent_state(alpha_mag, dim)
    inp = product_state(coh, sks)
    return (interferometer or FockInterferometer()).output_state(inp, reduce_angle(phi), convention)


# detector statistics


def _output_ops(M: np.ndarray, phi: float, convention: Convention):
    """a3 and a4 acting on the input amplitude matrix."""
    mm = mode_matrix(phi, convention)
    A1, A2 = lower(M, 0), lower(M, 1)

    def out_lower(row, X=None):
        if X is None:
            return mm[row, 0] * A1 + mm[row, 1] * A2
        return mm[row, 0] * lower(X, 0) + mm[row, 1] * lower(X, 1)

    return out_lower


def detector_moments(scheme: Scheme, state: FockState, phi: float, convention: Convention) -> tuple[float, float]:
    """(mean, variance) of the observable, evaluated on the input state with
    output-mode operators built from the mode transformation."""
    M = state.amplitudes
    op = _output_ops(M, phi, convention)
    a3 = op(0)
    n3 = np.vdot(a3, a3).real
    if scheme is Scheme.HD:
        a3a3 = op(0, a3)
        m3 = np.vdot(M, a3)
        var = 0.5 + (np.vdot(M, a3a3) - m3 * m3).real + (n3 - abs(m3) ** 2)
        return math.sqrt(2.0) * float(m3.real), float(var)
    a33 = op(0, a3)
    if scheme is Scheme.SID:
        return float(n3), float(n3 + np.vdot(a33, a33).real - n3 * n3)
    a4 = op(1)
    n4 = np.vdot(a4, a4).real
    a44 = op(1, a4)
    a43 = op(1, a3)
    second = n3 + n4 + np.vdot(a33, a33).real + np.vdot(a44, a44).real - 2 * np.vdot(a43, a43).real
    mean = n3 - n4
    return float(mean), float(second - mean * mean)


def output_state_moments(scheme: Scheme, out: FockState) -> tuple[float, float]:
    """(mean, variance) read directly off an output state (modes 3, 4 = axes 0, 1)."""
    M = out.amplitudes
    A3, A4 = lower(M, 0), lower(M, 1)
    n3 = np.vdot(A3, A3).real
    A33 = lower(A3, 0)
    if scheme is Scheme.HD:
        m3 = np.vdot(M, A3)
        var = 0.5 + (np.vdot(M, A33) - m3 * m3).real + (n3 - abs(m3) ** 2)
        return math.sqrt(2.0) * float(m3.real), float(var)
    if scheme is Scheme.SID:
        return float(n3), float(n3 + np.vdot(A33, A33).real - n3 * n3)
    n4 = np.vdot(A4, A4).real
    A44, A34 = lower(A4, 1), lower(A3, 1)
    second = n3 + n4 + np.vdot(A33, A33).real + np.vdot(A44, A44).real - 2 * np.vdot(A34, A34).real
    mean = n3 - n4
    return float(mean), float(second - mean * mean)


def oracle_sensitivity(
    scheme: Scheme | str,
    alpha_mag: float,
    params: InputParams,
    phi: float,
    convention: Convention = Convention.WITH_GLOBAL_PHASE,
    dim: int | None = None,
    state: FockState | None = None,
    h: float = FD_STEP,
) -> Sensitivity:
    """Error-propagation sensitivity with a central-difference slope."""
    scheme = Scheme.parse(scheme)
    phi = reduce_angle(phi)
    if state is None:
        state = input_state(alpha_mag, params, dim)
    mean, var = detector_moments(scheme, state, phi, convention)
    up, var_up = detector_moments(scheme, state, phi + h, convention)
    down, var_down = detector_moments(scheme, state, phi - h, convention)
    slope = (up - down) / (2 * h)
    if abs(slope) < 1e-12 * max(1.0, abs(mean)):
        return Sensitivity(math.inf, scheme, phi, False)
    spread = max(abs(var_up - var), abs(var_down - var))
    if spread > 0.1 * max(var, 1e-300):
        raise FiniteDifferenceError(f"variance moves by {spread:.3g} across the stencil at phi={phi}")
    return Sensitivity(math.sqrt(max(var, 0.0)) / abs(slope), scheme, phi, True)


def oracle_qfi(
    alpha_mag: float,
    params: InputParams,
    dim: int | None = None,
    convention: Convention = Convention.WITH_GLOBAL_PHASE,
    state: FockState | None = None,
    interferometer: FockInterferometer | None = None,
) -> float:
    """4 (<d psi|d psi> - |<d psi|psi>|^2) on the state between the beam splitters.

    The phase acts diagonally there, so the derivative multiplies each
    amplitude by i n1 (or i (n1 - n2) / 2 without the global phase).
    """
    if state is None:
        state = input_state(alpha_mag, params, dim)
    ifm = interferometer or FockInterferometer()
    mid = ifm.mid_state(state, 0.0, convention)
    n = np.arange(mid.shape[0], dtype=float)
    if convention is Convention.WITH_GLOBAL_PHASE:
        gen = n[:, None] * np.ones_like(n)[None, :]
    else:
        gen = 0.5 * (n[:, None] - n[None, :])
    d = 1j * gen * mid
    return float(4.0 * (np.vdot(d, d).real - abs(np.vdot(d, mid)) ** 2))


def oracle_qfi_heisenberg(state: FockState) -> float:
    """4 Var(n_arm) with the arm mode b = (a1 - i a2)/sqrt(2) applied to the input."""
    M = state.amplitudes
    b = (lower(M, 0) - 1j * lower(M, 1)) / math.sqrt(2)
    bb = (lower(b, 0) - 1j * lower(b, 1)) / math.sqrt(2)
    n = np.vdot(b, b).real
    return float(4.0 * (np.vdot(bb, bb).real + n - n * n))
