"""Phase sensitivity of a Mach-Zehnder interferometer fed by a coherent state and a squeezed Kerr state."""

from .bounds import Bounds, benchmark_limits, qfi
from .detection import SCHEMES, Scheme, Sensitivity, SignalStats, caves_reduction, phase_sensitivity, signal_stats
from .moments import KerrFactors, Moments, SksMoments, joint_moments, kerr_factors, sks_moments
from .optimize import AllSingularError, optimize_phase
from .params import LOSSLESS, ConsistencyError, InputParams, LossParams, RangeError, ZeroPhotonError

__all__ = [
    "AllSingularError",
    "Bounds",
    "ConsistencyError",
    "InputParams",
    "KerrFactors",
    "LOSSLESS",
    "LossParams",
    "Moments",
    "RangeError",
    "SCHEMES",
    "Scheme",
    "Sensitivity",
    "SignalStats",
    "SksMoments",
    "ZeroPhotonError",
    "benchmark_limits",
    "caves_reduction",
    "joint_moments",
    "kerr_factors",
    "optimize_phase",
    "phase_sensitivity",
    "qfi",
    "signal_stats",
    "sks_moments",
]
__version__ = "0.1.0"
